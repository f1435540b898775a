#include "ppk/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "ppk/errors.hpp"

namespace ppk {

Exponents Exponents::from_p(int n, double p) {
  if (n < 1 || n > kMaxDim) throw RangeError("dimension must be 1.." + std::to_string(kMaxDim));
  const double lo = static_cast<double>(n) / (n + 1);
  if (!(p > lo && p < 1)) throw RangeError("p must lie in (n/(n+1), 1)");
  return Exponents{n, p, n * (1 / p - 1)};
}

int Exponents::moment_order() const { return static_cast<int>(std::floor(n * (1 / p - 1))); }

double Weight::operator()(const Point& x) const {
  double r = 0;
  for (int d = 0; d < n; ++d) r += x[d] * x[d];
  return std::pow(1 + std::sqrt(r), -exponent());
}

double lp_norm(const GridFunction& f, double p, const std::optional<Weight>& w) {
  if (!(p > 0)) throw RangeError("lp_norm needs p > 0");
  std::vector<double> terms(f.size());
  const double half = 0.5 * f.step();
  for (std::size_t i = 0; i < f.size(); ++i) {
    double t = std::pow(std::abs(f.values()[i]), p);
    if (w && t != 0.0) {
      // weight at the cell center; the sample itself stands for the whole cell
      Point x = f.point(i);
      for (int d = 0; d < f.dim(); ++d) x[d] += half;
      t *= (*w)(x);
    }
    terms[i] = t;
  }
  return std::pow(pairwise_sum(terms) * f.cell_volume(), 1 / p);
}

namespace {

void cube_hull(const CoeffField& c, int K, Index& lo, Index& hi) {
  const int n = c.dim();
  lo = {0, 0, 0};
  hi = {1, 1, 1};
  bool first = true;
  for (const auto& [idx, v] : c.wavelet()) {
    const std::int64_t s = std::int64_t{1} << (K - idx.cube.j);
    for (int d = 0; d < n; ++d) {
      const std::int64_t a = idx.cube.k[d] * s, b = (idx.cube.k[d] + 1) * s;
      lo[d] = first ? a : std::min(lo[d], a);
      hi[d] = first ? b : std::max(hi[d], b);
    }
    first = false;
  }
  if (first)
    for (int d = 0; d < n; ++d) hi[d] = 1;
}

} // namespace

GridFunction square_function(const CoeffField& c, int K, const Index& lo, const Index& hi) {
  const int n = c.dim();
  GridFunction S(n, K, lo, hi);
  Block& b = S.block();
  for (const auto& [idx, v] : c.wavelet()) {
    if (idx.cube.j > K) throw PrecisionError("square function grid is coarser than a cube in the field");
    const std::int64_t s = std::int64_t{1} << (K - idx.cube.j);
    const double add = v * v / idx.cube.volume();
    Index a{0, 0, 0}, z{1, 1, 1};
    bool empty = false;
    for (int d = 0; d < n; ++d) {
      a[d] = std::max(idx.cube.k[d] * s, b.lo[d]);
      z[d] = std::min((idx.cube.k[d] + 1) * s, b.lo[d] + b.ext[d]);
      empty = empty || a[d] >= z[d];
    }
    if (empty) continue;
    for (std::int64_t i0 = a[0]; i0 < z[0]; ++i0)
      for (std::int64_t i1 = a[1]; i1 < z[1]; ++i1)
        for (std::int64_t i2 = a[2]; i2 < z[2]; ++i2) b.ref({i0, i1, i2}) += add;
  }
  for (double& x : b.v) x = std::sqrt(x);
  return S;
}

GridFunction square_function(const CoeffField& c, int K) {
  Index lo, hi;
  cube_hull(c, K, lo, hi);
  return square_function(c, K, lo, hi);
}

double sequence_hardy_norm(const CoeffField& c, double p, const std::optional<Weight>& w, int extra_levels) {
  if (c.wavelet().empty()) return 0.0;
  int jtop = c.j_min();
  for (const auto& [idx, v] : c.wavelet()) jtop = std::max(jtop, idx.cube.j);
  const int K = jtop + (w ? std::max(0, extra_levels) : 0);
  return lp_norm(square_function(c, K), p, w);
}

double carleson_norm(const CoeffField& c, double alpha) {
  const int n = c.dim();
  std::map<int, std::map<DyadicCube, double>> by_level;
  for (const auto& [idx, v] : c.wavelet()) by_level[idx.cube.j][idx.cube] += v * v;
  if (by_level.empty()) return 0.0;
  const double e = 2 * alpha / n + 1;
  double best = 0;
  std::map<DyadicCube, double> cur;
  int j = by_level.rbegin()->first;
  const int jlow = by_level.begin()->first;
  while (true) {
    if (auto it = by_level.find(j); it != by_level.end())
      for (const auto& [q, s] : it->second) cur[q] += s;
    for (const auto& [q, s] : cur) best = std::max(best, s * std::pow(q.volume(), -e));
    // every remaining cube is its own ancestor from here on, so the prefactor only shrinks
    bool settled = j <= jlow;
    for (const auto& [q, s] : cur)
      for (int d = 0; d < n && settled; ++d) settled = q.k[d] == 0 || q.k[d] == -1;
    if (settled && e >= 0) break;
    std::map<DyadicCube, double> up;
    for (const auto& [q, s] : cur) up[q.parent()] += s;
    cur = std::move(up);
    --j;
  }
  return std::sqrt(best);
}

double lipschitz_norm(const GridFunction& f, double alpha, const LipschitzOptions& opt) {
  if (!(alpha > 0 && alpha <= 1)) throw RangeError("alpha must lie in (0, 1]");
  const int n = f.dim();
  const Block& b = f.block();
  const int R0 = opt.near_radius > 0 ? opt.near_radius : (n == 1 ? 32 : 8);
  const double h = f.step();
  double best = 0;

  // offsets with Chebyshev norm in (rlo, rhi], stride s, first nonzero coordinate positive
  auto scan = [&](std::int64_t s, std::int64_t rlo, std::int64_t rhi) {
    std::vector<Index> offs;
    const std::int64_t q = rhi / s;
    Index lo{0, 0, 0}, hi{0, 0, 0};
    for (int d = 0; d < n; ++d) {
      lo[d] = -q;
      hi[d] = q;
    }
    for (std::int64_t a = lo[0]; a <= hi[0]; ++a)
      for (std::int64_t c = lo[1]; c <= hi[1]; ++c)
        for (std::int64_t e = lo[2]; e <= hi[2]; ++e) {
          Index o{a * s, c * s, e * s};
          std::int64_t cheb = 0;
          int lead = 0;
          for (int d = 0; d < n; ++d) {
            cheb = std::max(cheb, std::abs(o[d]));
            if (lead == 0 && o[d] != 0) lead = o[d] > 0 ? 1 : -1;
          }
          if (cheb <= rlo || cheb > rhi || lead <= 0) continue;
          offs.push_back(o);
        }
    std::vector<double> inv(offs.size());
    for (std::size_t t = 0; t < offs.size(); ++t) {
      double r2 = 0;
      for (int d = 0; d < n; ++d) r2 += static_cast<double>(offs[t][d] * offs[t][d]);
      inv[t] = std::pow(std::sqrt(r2) * h, -alpha);
    }
    for (std::size_t i = 0; i < b.size(); ++i) {
      const Index m = b.index_of(i);
      bool on = true;
      for (int d = 0; d < n && on; ++d) on = (m[d] - b.lo[d]) % s == 0;
      if (!on) continue;
      const double fx = b.v[i];
      for (std::size_t t = 0; t < offs.size(); ++t) {
        Index y = m;
        for (int d = 0; d < n; ++d) y[d] += offs[t][d];
        if (!b.contains(y)) continue;
        best = std::max(best, std::abs(fx - b.v[b.offset(y)]) * inv[t]);
      }
    }
  };

  std::int64_t maxext = 0;
  for (int d = 0; d < n; ++d) maxext = std::max(maxext, b.ext[d]);
  scan(1, 0, R0);
  if (n == 1) {
    if (maxext > R0) scan(2, R0, maxext);
  } else {
    // a flat stride-2 lattice is quadratic in the cell count; widen the stride with distance
    for (std::int64_t s = 2, r = R0; r < maxext; s *= 2, r *= 2) scan(s, r, 2 * r);
  }
  if (!opt.homogeneous) best += f.max_abs();
  return best;
}

double bmo_alpha_norm(const GridFunction& f, double alpha, double q, std::optional<int> j_min) {
  if (!(q >= 1)) throw RangeError("bmo_alpha_norm needs q >= 1");
  const int n = f.dim(), K = f.level();
  const Block& b = f.block();
  int jc = K;
  if (j_min) {
    jc = *j_min;
  } else {
    // coarsest level with at least one whole cube inside the box
    while (true) {
      const int j = jc - 1;
      if (K - j > 40) break;
      const std::int64_t s = std::int64_t{1} << (K - j);
      bool fits = true;
      for (int d = 0; d < n; ++d) fits = fits && floor_div(b.lo[d] + b.ext[d], s) > ceil_div(b.lo[d], s);
      if (!fits) break;
      jc = j;
    }
  }
  double best = 0;
  for (int j = jc; j <= K; ++j) {
    if (K - j > 40) continue;
    const std::int64_t s = std::int64_t{1} << (K - j);
    Index c0{0, 0, 0}, c1{1, 1, 1};
    bool any = true;
    for (int d = 0; d < n; ++d) {
      c0[d] = ceil_div(b.lo[d], s);
      c1[d] = floor_div(b.lo[d] + b.ext[d], s);
      any = any && c0[d] < c1[d];
    }
    if (!any) continue;
    const double vol = std::ldexp(1.0, -j * n);
    const double cells = std::ldexp(1.0, (K - j) * n);
    std::vector<double> vals;
    for (std::int64_t a0 = c0[0]; a0 < c1[0]; ++a0)
      for (std::int64_t a1 = c0[1]; a1 < c1[1]; ++a1)
        for (std::int64_t a2 = c0[2]; a2 < c1[2]; ++a2) {
          Index k{a0, a1, a2};
          Index lo{0, 0, 0}, hi{1, 1, 1};
          for (int d = 0; d < n; ++d) {
            lo[d] = k[d] * s;
            hi[d] = lo[d] + s;
          }
          vals.clear();
          for (std::int64_t i0 = lo[0]; i0 < hi[0]; ++i0)
            for (std::int64_t i1 = lo[1]; i1 < hi[1]; ++i1)
              for (std::int64_t i2 = lo[2]; i2 < hi[2]; ++i2) vals.push_back(b.v[b.offset({i0, i1, i2})]);
          const double mean = pairwise_sum(vals) / cells;
          for (double& v : vals) v = std::pow(std::abs(v - mean), q);
          const double osc = pairwise_sum(vals) * f.cell_volume();
          best = std::max(best, std::pow(std::pow(vol, -(1 + alpha / n)) * osc, 1 / q));
        }
  }
  return best;
}

nlohmann::json norm_report(const std::string& norm, double value, const nlohmann::json& params,
                           const nlohmann::json& tolerances) {
  return {{"norm", norm}, {"value", value}, {"params", params}, {"tolerances", tolerances}};
}

} // namespace ppk
