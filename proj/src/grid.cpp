#include "ppk/grid.hpp"

#include <algorithm>

#include "ppk/errors.hpp"

namespace ppk {

namespace {

double pairwise_rec(const double* p, std::size_t n) {
  if (n <= 16) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += p[i];
    return s;
  }
  std::size_t h = n / 2;
  return pairwise_rec(p, h) + pairwise_rec(p + h, n - h);
}

} // namespace

double pairwise_sum(std::span<const double> v) { return pairwise_rec(v.data(), v.size()); }

Block::Block(int n_, const Index& lo_, const Index& ext_) : n(n_), lo(lo_), ext(ext_) {
  if (n < 1 || n > kMaxDim) throw RangeError("dimension must be 1.." + std::to_string(kMaxDim));
  std::size_t total = 1;
  for (int d = 0; d < kMaxDim; ++d) {
    if (d >= n) {
      lo[d] = 0;
      ext[d] = 1;
    }
    if (ext[d] < 0) ext[d] = 0;
    total *= static_cast<std::size_t>(ext[d]);
  }
  v.assign(total, 0.0);
}

Index Block::hi() const {
  Index h;
  for (int d = 0; d < kMaxDim; ++d) h[d] = lo[d] + ext[d];
  return h;
}

std::int64_t Block::stride(int axis) const {
  std::int64_t s = 1;
  for (int d = kMaxDim - 1; d > axis; --d) s *= ext[d];
  return s;
}

bool Block::contains(const Index& idx) const {
  for (int d = 0; d < n; ++d)
    if (idx[d] < lo[d] || idx[d] >= lo[d] + ext[d]) return false;
  return !v.empty();
}

std::size_t Block::offset(const Index& idx) const {
  std::size_t off = 0;
  for (int d = 0; d < kMaxDim; ++d) {
    std::int64_t i = d < n ? idx[d] - lo[d] : 0;
    off = off * static_cast<std::size_t>(ext[d]) + static_cast<std::size_t>(i);
  }
  return off;
}

Index Block::index_of(std::size_t flat) const {
  Index idx{0, 0, 0};
  for (int d = kMaxDim - 1; d >= 0; --d) {
    auto e = static_cast<std::size_t>(ext[d]);
    idx[d] = lo[d] + static_cast<std::int64_t>(flat % e);
    flat /= e;
  }
  return idx;
}

Block embed(const Block& b, const Index& lo, const Index& ext) {
  Block out(b.n, lo, ext);
  if (b.empty() || out.empty()) return out;
  Index a{0, 0, 0}, z{1, 1, 1};
  for (int d = 0; d < b.n; ++d) {
    a[d] = std::max(b.lo[d], out.lo[d]);
    z[d] = std::min(b.lo[d] + b.ext[d], out.lo[d] + out.ext[d]);
    if (z[d] <= a[d]) return out;
  }
  Index i{0, 0, 0};
  for (i[0] = a[0]; i[0] < z[0]; ++i[0])
    for (i[1] = a[1]; i[1] < z[1]; ++i[1]) {
      Index s = i;
      s[2] = a[2];
      std::size_t src = b.offset(s), dst = out.offset(s);
      std::copy_n(b.v.begin() + static_cast<std::ptrdiff_t>(src), z[2] - a[2],
                  out.v.begin() + static_cast<std::ptrdiff_t>(dst));
    }
  return out;
}

void union_box(const Block& a, const Block& b, Index& lo, Index& ext) {
  if (a.empty()) {
    lo = b.lo;
    ext = b.ext;
    return;
  }
  if (b.empty()) {
    lo = a.lo;
    ext = a.ext;
    return;
  }
  for (int d = 0; d < kMaxDim; ++d) {
    std::int64_t l = std::min(a.lo[d], b.lo[d]);
    std::int64_t h = std::max(a.lo[d] + a.ext[d], b.lo[d] + b.ext[d]);
    lo[d] = l;
    ext[d] = h - l;
  }
}

GridFunction::GridFunction(int n, int K, const Index& lo, const Index& hi) : K_(K) {
  Index ext;
  for (int d = 0; d < kMaxDim; ++d) ext[d] = hi[d] - lo[d];
  data_ = Block(n, lo, ext);
}

GridFunction::GridFunction(int K, Block data) : K_(K), data_(std::move(data)) {}

GridFunction GridFunction::from_function(int n, int K, const Index& lo, const Index& hi,
                                         const std::function<double(const Point&)>& f) {
  GridFunction g(n, K, lo, hi);
  for (std::size_t i = 0; i < g.size(); ++i) g.data_.v[i] = f(g.point(i));
  return g;
}

Point GridFunction::point_of(const Index& m) const {
  Point x{0.0, 0.0, 0.0};
  double h = step();
  for (int d = 0; d < data_.n; ++d) x[d] = static_cast<double>(m[d]) * h;
  return x;
}

Point GridFunction::point(std::size_t flat) const { return point_of(data_.index_of(flat)); }

double GridFunction::integral() const { return pairwise_sum(data_.v) * cell_volume(); }

double GridFunction::max_abs() const {
  double m = 0.0;
  for (double x : data_.v) m = std::max(m, std::abs(x));
  return m;
}

double GridFunction::l2_norm() const {
  std::vector<double> sq(data_.v.size());
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = data_.v[i] * data_.v[i];
  return std::sqrt(pairwise_sum(sq) * cell_volume());
}

GridFunction GridFunction::restricted(const Index& lo, const Index& hi) const {
  Index ext;
  for (int d = 0; d < kMaxDim; ++d) ext[d] = hi[d] - lo[d];
  return GridFunction(K_, embed(data_, lo, ext));
}

bool GridFunction::same_grid(const GridFunction& o) const {
  return K_ == o.K_ && data_.n == o.data_.n && data_.lo == o.data_.lo && data_.ext == o.data_.ext;
}

namespace {
void require_same(const GridFunction& a, const GridFunction& b) {
  if (!a.same_grid(b)) throw GeometryError("grid functions live on different grids");
}
} // namespace

GridFunction& GridFunction::operator+=(const GridFunction& o) {
  require_same(*this, o);
  for (std::size_t i = 0; i < size(); ++i) data_.v[i] += o.data_.v[i];
  return *this;
}
GridFunction& GridFunction::operator-=(const GridFunction& o) {
  require_same(*this, o);
  for (std::size_t i = 0; i < size(); ++i) data_.v[i] -= o.data_.v[i];
  return *this;
}
GridFunction& GridFunction::operator*=(const GridFunction& o) {
  require_same(*this, o);
  for (std::size_t i = 0; i < size(); ++i) data_.v[i] *= o.data_.v[i];
  return *this;
}
GridFunction& GridFunction::operator*=(double s) {
  for (double& x : data_.v) x *= s;
  return *this;
}

GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
GridFunction operator*(GridFunction a, const GridFunction& b) { return a *= b; }
GridFunction operator*(double s, GridFunction a) { return a *= s; }

double max_abs_difference(const GridFunction& a, const GridFunction& b) {
  if (a.level() != b.level() || a.dim() != b.dim())
    throw GeometryError("cannot compare grid functions at different resolutions");
  Index lo, ext;
  union_box(a.block(), b.block(), lo, ext);
  Block x = embed(a.block(), lo, ext), y = embed(b.block(), lo, ext);
  double m = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x.v[i] - y.v[i]));
  return m;
}

} // namespace ppk
