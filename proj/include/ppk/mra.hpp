#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <map>

#include "ppk/grid.hpp"
#include "ppk/wavelet_core.hpp"

namespace ppk {

// I_{j,k} = prod_d [2^-j k_d, 2^-j (k_d+1)).
struct DyadicCube {
  int n = 1;
  int j = 0;
  Index k{0, 0, 0};

  double side() const { return exp2i(-j); }
  double volume() const { return exp2i(-j * n); }
  double corner(int d) const { return static_cast<double>(k[d]) * side(); }
  double center(int d) const { return (static_cast<double>(k[d]) + 0.5) * side(); }
  DyadicCube parent() const;
  bool contains(const DyadicCube& other) const;

  auto operator<=>(const DyadicCube&) const = default;
};

// lambda is a bit mask: bit d set means the d-th factor is psi. Zero means phi in every axis.
struct TensorIndex {
  DyadicCube cube;
  unsigned lambda = 1;

  auto operator<=>(const TensorIndex&) const = default;
};

// Finite wavelet expansion: scaling coefficients <f, phi_I> at level j_min and
// wavelet coefficients <f, psi^lambda_I> at scales j_min <= j < j_max.
class CoeffField {
public:
  CoeffField() = default;
  CoeffField(int n, int j_min, int j_max);

  int dim() const { return n_; }
  int j_min() const { return j_min_; }
  int j_max() const { return j_max_; }

  void add_wavelet(const TensorIndex& idx, double value);
  void add_scaling(const DyadicCube& cube, double value);
  void set_wavelet(const TensorIndex& idx, double value);
  void set_scaling(const DyadicCube& cube, double value);
  double wavelet_at(const TensorIndex& idx) const;
  double scaling_at(const DyadicCube& cube) const;

  const std::map<TensorIndex, double>& wavelet() const { return wavelet_; }
  const std::map<DyadicCube, double>& scaling() const { return scaling_; }

  bool empty() const { return wavelet_.empty() && scaling_.empty(); }
  std::size_t size() const { return wavelet_.size() + scaling_.size(); }
  double l2_norm() const;
  double max_abs() const;
  CoeffField scaled(double s) const;
  // Copy with the scale range widened (never narrowed).
  CoeffField with_range(int j_min, int j_max) const;

private:
  void check_cube(const DyadicCube& c) const;

  int n_ = 1;
  int j_min_ = 0;
  int j_max_ = 0;
  std::map<TensorIndex, double> wavelet_;
  std::map<DyadicCube, double> scaling_;
};

// a*x + b*y over the union of entries; the fields must share dimension and j_min.
CoeffField combine(double a, const CoeffField& x, double b, const CoeffField& y);
double max_abs_difference(const CoeffField& a, const CoeffField& b);

// Support bounding box [lo, hi) of the expansion on the 2^-K grid (hi exclusive,
// the function vanishes there). Empty field gives lo == hi.
void support_box(const CoeffField& c, const WaveletSystem& sys, int K, Index& lo, Index& hi);

// psi^lambda_I (or phi_I for lambda = 0) sampled at step 2^-K over its support.
GridFunction tensor_sample(const WaveletSystem& sys, const DyadicCube& cube, unsigned lambda, int K);
GridFunction tensor_sample(const WaveletSystem& sys, const TensorIndex& idx, int K);

CoeffField analyze(const GridFunction& f, const WaveletSystem& sys, int j_min, int j_max);
GridFunction synthesize(const CoeffField& c, const WaveletSystem& sys, int K);
GridFunction synthesize(const CoeffField& c, const WaveletSystem& sys, int K, const Index& lo, const Index& hi);

enum class Subspace { V, W };
// P_j f as scaling coefficients at level j, or Q_j f as the scale-j wavelet entries.
CoeffField project(const CoeffField& f, const WaveletSystem& sys, int j, Subspace which);

void write_jsonl(std::ostream& os, const CoeffField& c);
CoeffField read_jsonl(std::istream& is);

void write_csv(std::ostream& os, const GridFunction& f);
GridFunction read_csv(std::istream& is);
void write_binary(std::ostream& os, const GridFunction& f);
GridFunction read_binary(std::istream& is);

} // namespace ppk
