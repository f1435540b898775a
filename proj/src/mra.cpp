#include "ppk/mra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ppk/errors.hpp"
#include "transform.hpp"

namespace ppk {

DyadicCube DyadicCube::parent() const {
  DyadicCube p = *this;
  p.j = j - 1;
  for (int d = 0; d < n; ++d) p.k[d] = floor_div(k[d], 2);
  return p;
}

bool DyadicCube::contains(const DyadicCube& o) const {
  if (o.n != n || o.j < j) return false;
  const int shift = o.j - j;
  for (int d = 0; d < n; ++d)
    if ((o.k[d] >> shift) != k[d]) return false;
  return true;
}

CoeffField::CoeffField(int n, int j_min, int j_max) : n_(n), j_min_(j_min), j_max_(j_max) {
  if (n < 1 || n > kMaxDim) throw RangeError("dimension must be 1.." + std::to_string(kMaxDim));
  if (j_max < j_min) throw RangeError("scale range requires j_min <= j_max");
}

void CoeffField::check_cube(const DyadicCube& c) const {
  if (c.n != n_) throw GeometryError("cube dimension does not match the field");
  for (int d = n_; d < kMaxDim; ++d)
    if (c.k[d] != 0) throw GeometryError("cube has nonzero corner beyond the field dimension");
}

void CoeffField::add_wavelet(const TensorIndex& idx, double value) {
  check_cube(idx.cube);
  if (idx.cube.j < j_min_ || idx.cube.j >= j_max_)
    throw RangeError("wavelet scale " + std::to_string(idx.cube.j) + " outside [" + std::to_string(j_min_) + ", " +
                     std::to_string(j_max_) + ")");
  if (idx.lambda == 0 || idx.lambda >= (1u << n_)) throw RangeError("lambda must be a nonzero mask of n bits");
  wavelet_[idx] += value;
}

void CoeffField::set_wavelet(const TensorIndex& idx, double value) {
  add_wavelet(idx, 0.0);
  wavelet_[idx] = value;
}

void CoeffField::add_scaling(const DyadicCube& cube, double value) {
  check_cube(cube);
  if (cube.j != j_min_) throw RangeError("scaling coefficients live at level j_min only");
  scaling_[cube] += value;
}

void CoeffField::set_scaling(const DyadicCube& cube, double value) {
  add_scaling(cube, 0.0);
  scaling_[cube] = value;
}

double CoeffField::wavelet_at(const TensorIndex& idx) const {
  auto it = wavelet_.find(idx);
  return it == wavelet_.end() ? 0.0 : it->second;
}

double CoeffField::scaling_at(const DyadicCube& cube) const {
  auto it = scaling_.find(cube);
  return it == scaling_.end() ? 0.0 : it->second;
}

double CoeffField::l2_norm() const {
  std::vector<double> sq;
  sq.reserve(size());
  for (const auto& [i, v] : scaling_) sq.push_back(v * v);
  for (const auto& [i, v] : wavelet_) sq.push_back(v * v);
  return std::sqrt(pairwise_sum(sq));
}

double CoeffField::max_abs() const {
  double m = 0;
  for (const auto& [i, v] : scaling_) m = std::max(m, std::abs(v));
  for (const auto& [i, v] : wavelet_) m = std::max(m, std::abs(v));
  return m;
}

CoeffField CoeffField::scaled(double s) const {
  CoeffField out = *this;
  for (auto& [i, v] : out.scaling_) v *= s;
  for (auto& [i, v] : out.wavelet_) v *= s;
  return out;
}

CoeffField CoeffField::with_range(int j_min, int j_max) const {
  if (j_min > j_min_ || j_max < j_max_) throw RangeError("with_range can only widen the scale range");
  if (j_min != j_min_ && !scaling_.empty()) throw RangeError("cannot move the scaling level of a field with a scaling part");
  CoeffField out = *this;
  out.j_min_ = j_min;
  out.j_max_ = j_max;
  return out;
}

CoeffField combine(double a, const CoeffField& x, double b, const CoeffField& y) {
  if (x.dim() != y.dim() || x.j_min() != y.j_min()) throw GeometryError("combine: fields differ in dimension or j_min");
  CoeffField out(x.dim(), x.j_min(), std::max(x.j_max(), y.j_max()));
  for (const auto& [i, v] : x.scaling()) out.add_scaling(i, a * v);
  for (const auto& [i, v] : y.scaling()) out.add_scaling(i, b * v);
  for (const auto& [i, v] : x.wavelet()) out.add_wavelet(i, a * v);
  for (const auto& [i, v] : y.wavelet()) out.add_wavelet(i, b * v);
  return out;
}

double max_abs_difference(const CoeffField& a, const CoeffField& b) {
  double m = 0;
  auto scan = [&](const auto& ma, const auto& mb) {
    for (const auto& [i, v] : ma) {
      auto it = mb.find(i);
      m = std::max(m, std::abs(v - (it == mb.end() ? 0.0 : it->second)));
    }
    for (const auto& [i, v] : mb)
      if (!ma.count(i)) m = std::max(m, std::abs(v));
  };
  scan(a.scaling(), b.scaling());
  scan(a.wavelet(), b.wavelet());
  return m;
}

namespace {

void cube_support(const DyadicCube& c, const WaveletSystem& sys, int K, Index& lo, Index& hi) {
  if (K < c.j) throw PrecisionError("grid 2^-" + std::to_string(K) + " is coarser than cube scale " + std::to_string(c.j));
  const std::int64_t s = std::int64_t{1} << (K - c.j);
  for (int d = 0; d < kMaxDim; ++d) {
    if (d >= c.n) {
      lo[d] = 0;
      hi[d] = 1;
      continue;
    }
    lo[d] = (c.k[d] + sys.support_lo()) * s;
    hi[d] = (c.k[d] + sys.support_hi()) * s;
  }
}

void grow(Index& lo, Index& hi, const Index& l2, const Index& h2, bool& first) {
  if (first) {
    lo = l2;
    hi = h2;
    first = false;
    return;
  }
  for (int d = 0; d < kMaxDim; ++d) {
    lo[d] = std::min(lo[d], l2[d]);
    hi[d] = std::max(hi[d], h2[d]);
  }
}

} // namespace

void support_box(const CoeffField& c, const WaveletSystem& sys, int K, Index& lo, Index& hi) {
  bool first = true;
  lo = {0, 0, 0};
  hi = {0, 1, 1};
  for (int d = 1; d < c.dim(); ++d) hi[d] = 0;
  Index l, h;
  for (const auto& [cube, v] : c.scaling()) {
    cube_support(cube, sys, K, l, h);
    grow(lo, hi, l, h, first);
  }
  for (const auto& [idx, v] : c.wavelet()) {
    cube_support(idx.cube, sys, K, l, h);
    grow(lo, hi, l, h, first);
  }
}

GridFunction tensor_sample(const WaveletSystem& sys, const DyadicCube& cube, unsigned lambda, int K) {
  Index lo, hi;
  cube_support(cube, sys, K, lo, hi);
  for (int d = 0; d < cube.n; ++d) hi[d] += 1; // keep the closed right endpoint
  GridFunction out(cube.n, K, lo, hi);
  const int r = K - cube.j;
  const ProfileSamples p0 = sys.profile(Profile::phi, r), p1 = sys.profile(Profile::psi, r);
  Index one{1, 1, 1};
  Block c(cube.n, cube.k, one);
  c.v[0] = 1.0;
  detail::expand_add(c, detail::pick(lambda, cube.n, p0, p1), std::pow(2.0, 0.5 * cube.j * cube.n), out.block());
  return out;
}

GridFunction tensor_sample(const WaveletSystem& sys, const TensorIndex& idx, int K) {
  if (idx.lambda == 0) throw RangeError("tensor_sample(TensorIndex) needs a nonzero lambda; use the cube overload for phi");
  return tensor_sample(sys, idx.cube, idx.lambda, K);
}

CoeffField analyze(const GridFunction& f, const WaveletSystem& sys, int j_min, int j_max) {
  const int n = f.dim(), K = f.level();
  if (j_max > K) throw GeometryError("analyze: j_max exceeds the grid level");
  if (j_min > j_max) throw GeometryError("analyze: j_min > j_max");
  const std::int64_t cell = std::int64_t{1} << (K - j_min);
  for (int d = 0; d < n; ++d)
    if (f.lo()[d] % cell != 0 || f.hi()[d] % cell != 0)
      throw GeometryError("analyze: box corners are not on the 2^-j_min lattice");

  CoeffField out(n, j_min, j_max);
  Block c = detail::point_values_to_coeffs(f, sys);
  for (int j = K - 1; j >= j_min; --j) {
    auto bands = detail::analysis_step(c, sys.bank());
    if (j < j_max) {
      for (unsigned l = 1; l < bands.size(); ++l) {
        const Block& b = bands[l];
        for (std::size_t i = 0; i < b.size(); ++i)
          if (b.v[i] != 0.0) out.add_wavelet(TensorIndex{DyadicCube{n, j, b.index_of(i)}, l}, b.v[i]);
      }
    }
    c = std::move(bands[0]);
  }
  for (std::size_t i = 0; i < c.size(); ++i)
    if (c.v[i] != 0.0) out.add_scaling(DyadicCube{n, j_min, c.index_of(i)}, c.v[i]);
  return out;
}

namespace {

// Scaling coefficients of P_j f at level `to` by the synthesis pyramid from j_min.
Block scaling_at_level(const CoeffField& c, const WaveletSystem& sys, int to) {
  Block s = detail::gather_scaling(c);
  for (int j = c.j_min(); j < to; ++j) {
    auto bands = detail::gather_details(c, j);
    bands[0] = std::move(s);
    s = detail::synthesis_step(bands, sys.bank());
  }
  return s;
}

} // namespace

GridFunction synthesize(const CoeffField& c, const WaveletSystem& sys, int K, const Index& lo, const Index& hi) {
  if (K < c.j_max()) throw PrecisionError("synthesize: K must be at least j_max");
  GridFunction out(c.dim(), K, lo, hi);
  Block s = scaling_at_level(c, sys, K);
  const ProfileSamples p0 = sys.profile(Profile::phi, 0);
  detail::expand_add(s, detail::pick(0, c.dim(), p0, p0), std::pow(2.0, 0.5 * K * c.dim()), out.block());
  return out;
}

GridFunction synthesize(const CoeffField& c, const WaveletSystem& sys, int K) {
  if (K < c.j_max()) throw PrecisionError("synthesize: K must be at least j_max");
  const int n = c.dim();
  Index lo, hi;
  const std::int64_t cell = std::int64_t{1} << (K - c.j_min());
  if (c.empty()) {
    lo = {0, 0, 0};
    hi = {1, 1, 1};
    for (int d = 0; d < n; ++d) hi[d] = cell;
  } else {
    support_box(c, sys, K, lo, hi);
    for (int d = 0; d < n; ++d) {
      lo[d] = floor_div(lo[d], cell) * cell;
      hi[d] = ceil_div(hi[d], cell) * cell;
    }
  }
  return synthesize(c, sys, K, lo, hi);
}

CoeffField project(const CoeffField& f, const WaveletSystem& sys, int j, Subspace which) {
  const int n = f.dim();
  if (which == Subspace::V) {
    if (j < f.j_min() || j > f.j_max()) throw RangeError("project: j outside the field's scale range");
    CoeffField out(n, j, j);
    Block s = scaling_at_level(f, sys, j);
    for (std::size_t i = 0; i < s.size(); ++i)
      if (s.v[i] != 0.0) out.add_scaling(DyadicCube{n, j, s.index_of(i)}, s.v[i]);
    return out;
  }
  if (j < f.j_min() || j >= f.j_max()) throw RangeError("project: j outside the field's wavelet scales");
  CoeffField out(n, j, j + 1);
  for (const auto& [idx, v] : f.wavelet())
    if (idx.cube.j == j) out.add_wavelet(idx, v);
  return out;
}

} // namespace ppk
