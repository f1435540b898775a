#pragma once

#include <complex>
#include <vector>

namespace ppk::detail {

using cplx = std::complex<double>;

// Unnormalized n-d DFT on a row-major array (last axis fastest). sign -1 is forward.
void dft(std::vector<cplx>& data, const std::vector<int>& dims, int sign);

// Signed frequency for position i on an axis of length N; N/2 maps to -N/2.
inline int frequency(int i, int N) { return i < (N + 1) / 2 ? i : i - N; }

} // namespace ppk::detail
