#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ppk/grid.hpp"

namespace ppk {

// Conjugate quadrature pair. Both filters occupy integer indices offset .. offset+L-1,
// phi(x) = sqrt2 sum h_i phi(2x-i), psi(x) = sqrt2 sum g_i phi(2x-i).
struct FilterBank {
  std::vector<double> lowpass;
  std::vector<double> highpass;
  int offset = 0;

  static FilterBank from_lowpass(std::vector<double> h, int offset);

  int length() const { return static_cast<int>(lowpass.size()); }
  double low(int i) const { return lowpass[static_cast<std::size_t>(i - offset)]; }
  double high(int i) const { return highpass[static_cast<std::size_t>(i - offset)]; }

  struct Residuals {
    double sum = 0;            // |sum h - sqrt2|
    double orthonormality = 0; // max_m |sum h_k h_{k+2m} - delta_m|
    double flip = 0;           // max |g_j - (-1)^j h_{L-1-j}|
    double max() const;
  };
  Residuals residuals() const;

  // Plain text: offset on the first line, then one lowpass tap per line.
  void write(std::ostream& os) const;
  static FilterBank read(std::istream& is);
};

// Lowpass taps of the extremal-phase Daubechies filter with p vanishing moments.
std::vector<double> daubechies_lowpass(int p);

// Samples of phi and psi at x = m 2^-K over their support [offset, offset+L-1],
// right endpoint included. Normalized so the grid sum of phi times 2^-K is 1.
std::pair<GridFunction, GridFunction> cascade_sample(const FilterBank& bank, int K);

double moment_integral(const GridFunction& samples, int l);
double moment_integral(const GridFunction& f, const std::array<int, kMaxDim>& beta);

enum class Profile { phi, psi, phi_squared, psi_squared };

// Samples of one profile on the 2^-r grid; sample t sits at x = first*2^-r + t*2^-r.
struct ProfileSamples {
  int resolution = 0;
  std::int64_t first = 0;
  std::vector<double> values;
};

class WaveletSystem {
public:
  WaveletSystem(std::string name, FilterBank bank, int moments, int smoothness, int cascade_level = 12);

  const std::string& name() const { return name_; }
  const FilterBank& bank() const { return bank_; }
  int moments() const { return moments_; }
  int smoothness() const { return smoothness_; }
  bool is_haar() const { return bank_.length() == 2; }
  // Supports of phi and psi are [support_lo, support_hi] = 1/2 + m(-1/2, 1/2) closed.
  int support_lo() const { return bank_.offset; }
  int support_hi() const { return bank_.offset + bank_.length() - 1; }
  int support_radius() const { return bank_.length() - 1; }
  int cascade_level() const { return cascade_level_; }

  const GridFunction& phi_samples() const { return phi_; }
  const GridFunction& psi_samples() const { return psi_; }
  ProfileSamples profile(Profile which, int resolution) const;

  // Point values; exact on the cascade grid, linear interpolation in between.
  double phi(double x) const;
  double psi(double x) const;
  double phi_sup() const;

private:
  std::string name_;
  FilterBank bank_;
  int moments_;
  int smoothness_;
  int cascade_level_;
  GridFunction phi_, psi_;
};

WaveletSystem haar_system(int cascade_level = 12);
WaveletSystem daubechies_system(int p, int cascade_level = 12);
// "haar" or "db1".."db10".
WaveletSystem wavelet_by_name(std::string_view name, int cascade_level = 12);

void write_samples_csv(std::ostream& os, const GridFunction& samples);

} // namespace ppk
