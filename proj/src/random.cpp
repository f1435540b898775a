#include "ppk/random.hpp"

#include <cmath>
#include <vector>

namespace ppk {

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

CoeffField random_field(std::uint64_t seed, const RandomFieldSpec& spec) {
  CoeffField c(spec.n, spec.j_min, std::max(spec.j_min, spec.j_max));
  if (spec.j_max <= spec.j_min) return c;
  SplitMix64 rng(seed);
  const auto levels = static_cast<std::uint64_t>(spec.j_max - spec.j_min);
  const std::uint64_t masks = (std::uint64_t{1} << spec.n) - 1;
  for (int e = 0; e < spec.entries; ++e) {
    const int j = spec.j_min + static_cast<int>(rng.below(levels));
    TensorIndex idx;
    idx.cube.n = spec.n;
    idx.cube.j = j;
    for (int d = 0; d < spec.n; ++d)
      idx.cube.k[d] = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(spec.span) << (j - spec.j_min)));
    idx.lambda = 1 + static_cast<unsigned>(rng.below(masks));
    const double v = spec.amplitude * (2.0 * rng.uniform() - 1.0) * std::exp2(-spec.scale_decay * (j - spec.j_min));
    c.add_wavelet(idx, v);
  }
  if (spec.with_scaling) {
    DyadicCube q{spec.n, spec.j_min, {0, 0, 0}};
    const std::int64_t s = spec.span;
    for (q.k[0] = 0; q.k[0] < s; ++q.k[0])
      for (q.k[1] = 0; q.k[1] < (spec.n > 1 ? s : 1); ++q.k[1])
        for (q.k[2] = 0; q.k[2] < (spec.n > 2 ? s : 1); ++q.k[2])
          c.add_scaling(q, spec.amplitude * (2.0 * rng.uniform() - 1.0));
  }
  return c;
}

GridFunction random_holder_function(std::uint64_t seed, int n, int K, const Index& lo, const Index& hi, double alpha,
                                    int terms) {
  SplitMix64 rng(seed);
  GridFunction g(n, K, lo, hi);
  const Point a = g.point_of(lo), b = g.point_of(hi);
  std::vector<Point> centers(static_cast<std::size_t>(terms));
  std::vector<double> c(static_cast<std::size_t>(terms));
  for (int t = 0; t < terms; ++t) {
    for (int d = 0; d < n; ++d) centers[static_cast<std::size_t>(t)][d] = rng.uniform(a[d], b[d]);
    c[static_cast<std::size_t>(t)] = rng.uniform(-1, 1);
  }
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Point x = g.point(i);
    double v = 0;
    for (int t = 0; t < terms; ++t) {
      double r2 = 0;
      for (int d = 0; d < n; ++d) {
        const double u = x[d] - centers[static_cast<std::size_t>(t)][d];
        r2 += u * u;
      }
      v += c[static_cast<std::size_t>(t)] * std::pow(r2, alpha / 2);
    }
    g.values()[i] = v;
  }
  return g;
}

} // namespace ppk
