#include <algorithm>
#include <cmath>
#include <deque>

#include "fft.hpp"
#include "ppk/errors.hpp"
#include "ppk/spaces.hpp"

namespace ppk {

namespace {

// Test profile: bump (1-|u|^2)^4 times u^beta, u = x / delta, divided by its S_m seminorm.
struct Shape {
  std::array<int, kMaxDim> beta{};
  double delta = 1;
  double norm = 1;

  double raw(const Point& x, int n) const {
    double r2 = 0, mono = 1;
    for (int d = 0; d < n; ++d) {
      const double u = x[d] / delta;
      r2 += u * u;
      for (int e = 0; e < beta[d]; ++e) mono *= u;
    }
    if (r2 >= 1) return 0.0;
    const double b = 1 - r2;
    return b * b * b * b * mono;
  }
  double operator()(const Point& x, int n) const { return raw(x, n) / norm; }
};

double derivative(const Shape& s, int n, Point x, std::array<int, kMaxDim> g, double h) {
  for (int d = 0; d < n; ++d) {
    if (g[d] == 0) continue;
    g[d] -= 1;
    Point a = x, b = x;
    a[d] += h;
    b[d] -= h;
    return (derivative(s, n, a, g, h) - derivative(s, n, b, g, h)) / (2 * h);
  }
  return s.raw(x, n);
}

std::vector<std::array<int, kMaxDim>> multi_indices(int n, int order) {
  std::vector<std::array<int, kMaxDim>> out;
  for (int total = 0; total <= order; ++total)
    for (int a = total; a >= 0; --a)
      for (int b = (n > 1 ? total - a : 0); b >= 0; --b) {
        const int c = total - a - b;
        if (n == 1 && (b != 0 || c != 0)) continue;
        if (n == 2 && c != 0) continue;
        out.push_back({a, n > 1 ? b : 0, n > 2 ? c : 0});
      }
  return out;
}

// sup_x (1+|x|)^{(m+2)(n+1)} |d^gamma phi(x)| over |gamma| <= m+1, on a sample grid.
double seminorm(const Shape& s, int n, int m) {
  const int pts = n == 1 ? 400 : (n == 2 ? 60 : 20);
  const double h = s.delta * 1e-3;
  const auto orders = multi_indices(n, m + 1);
  double best = 0;
  std::array<int, kMaxDim> c{0, 0, 0};
  const int total = static_cast<int>(std::pow(pts + 1, n));
  for (int flat = 0; flat < total; ++flat) {
    int rem = flat;
    Point x{0, 0, 0};
    double r2 = 0;
    for (int d = 0; d < n; ++d) {
      c[d] = rem % (pts + 1);
      rem /= pts + 1;
      x[d] = s.delta * (-1 + 2.0 * c[d] / pts);
      r2 += x[d] * x[d];
    }
    if (r2 >= s.delta * s.delta) continue;
    const double w = std::pow(1 + std::sqrt(r2), (m + 2) * (n + 1));
    for (const auto& g : orders) best = std::max(best, w * std::abs(derivative(s, n, x, g, h)));
  }
  return best;
}

std::vector<Shape> dictionary(int n, int m, int size) {
  std::vector<Shape> out;
  const auto betas = multi_indices(n, 3);
  for (double delta = 1; static_cast<int>(out.size()) < size; delta *= 0.5)
    for (const auto& b : betas) {
      if (static_cast<int>(out.size()) == size) break;
      Shape s;
      s.beta = b;
      s.delta = delta;
      s.norm = seminorm(s, n, m);
      out.push_back(s);
    }
  return out;
}

// Running max of |v| over windows [i-w, i+w] along one axis of a row-major array.
void window_max(std::vector<double>& v, const std::vector<int>& dims, int axis, int w) {
  if (w <= 0) return;
  const int n = static_cast<int>(dims.size());
  std::int64_t inner = 1, outer = 1;
  for (int d = axis + 1; d < n; ++d) inner *= dims[static_cast<std::size_t>(d)];
  for (int d = 0; d < axis; ++d) outer *= dims[static_cast<std::size_t>(d)];
  const std::int64_t N = dims[static_cast<std::size_t>(axis)];
  std::vector<double> line(static_cast<std::size_t>(N)), res(static_cast<std::size_t>(N));
  std::deque<std::int64_t> dq;
  for (std::int64_t o = 0; o < outer; ++o)
    for (std::int64_t i = 0; i < inner; ++i) {
      const std::int64_t base = o * N * inner + i;
      for (std::int64_t t = 0; t < N; ++t) line[static_cast<std::size_t>(t)] = v[static_cast<std::size_t>(base + t * inner)];
      dq.clear();
      // window for output t is [t-w, t+w]; feed indices up to t+w
      std::int64_t next = 0;
      for (std::int64_t t = 0; t < N; ++t) {
        for (; next < N && next <= t + w; ++next) {
          while (!dq.empty() && line[static_cast<std::size_t>(dq.back())] <= line[static_cast<std::size_t>(next)]) dq.pop_back();
          dq.push_back(next);
        }
        while (dq.front() < t - w) dq.pop_front();
        res[static_cast<std::size_t>(t)] = line[static_cast<std::size_t>(dq.front())];
      }
      for (std::int64_t t = 0; t < N; ++t) v[static_cast<std::size_t>(base + t * inner)] = res[static_cast<std::size_t>(t)];
    }
}

} // namespace

GridFunction grand_maximal_function(const GridFunction& f, double p, const MaximalOptions& opt) {
  if (!(p > 0)) throw RangeError("grand maximal function needs p > 0");
  if (opt.dictionary_size < 1) throw RangeError("dictionary_size must be positive");
  const int n = f.dim();
  const double h = f.step();
  const int m = static_cast<int>(std::floor(n * (1 / p - 1))) + 1;
  const auto shapes = dictionary(n, std::max(m, 1), opt.dictionary_size);

  std::int64_t maxext = 1;
  for (int d = 0; d < n; ++d) maxext = std::max(maxext, f.extent()[d]);
  int levels = opt.t_levels;
  if (levels <= 0)
    while ((std::int64_t{1} << levels) < maxext) ++levels;

  const std::int64_t R = (std::int64_t{1} << levels) + 1;
  std::vector<int> dims(static_cast<std::size_t>(n));
  std::size_t total = 1;
  for (int d = 0; d < n; ++d) {
    dims[static_cast<std::size_t>(d)] = static_cast<int>(f.extent()[d] + 2 * R);
    total *= static_cast<std::size_t>(dims[static_cast<std::size_t>(d)]);
  }
  auto flat = [&](const Index& pos) {
    std::size_t o = 0;
    for (int d = 0; d < n; ++d) o = o * static_cast<std::size_t>(dims[static_cast<std::size_t>(d)]) + static_cast<std::size_t>(pos[d]);
    return o;
  };

  std::vector<detail::cplx> F(total, 0.0);
  for (std::size_t i = 0; i < f.size(); ++i) {
    Index m0 = f.block().index_of(i);
    Index pos{0, 0, 0};
    for (int d = 0; d < n; ++d) pos[d] = m0[d] - f.lo()[d] + R;
    F[flat(pos)] = f.values()[i];
  }
  detail::dft(F, dims, -1);

  std::vector<double> best(total, 0.0), u(total);
  std::vector<detail::cplx> kern(total);
  for (int s = 1; s <= levels; ++s) {
    const double t = std::ldexp(h, s);
    const int w = static_cast<int>(std::ceil(std::ldexp(1.0, s) / std::sqrt(static_cast<double>(n)))) - 1;
    for (const auto& shape : shapes) {
      std::fill(kern.begin(), kern.end(), 0.0);
      const std::int64_t rk = std::min<std::int64_t>(R - 1, static_cast<std::int64_t>(std::ceil(t * shape.delta / h)));
      const double tn = std::pow(t, -n) * std::pow(h, n);
      Index c{0, 0, 0};
      Index lo{-rk, n > 1 ? -rk : 0, n > 2 ? -rk : 0}, hi{rk, n > 1 ? rk : 0, n > 2 ? rk : 0};
      for (c[0] = lo[0]; c[0] <= hi[0]; ++c[0])
        for (c[1] = lo[1]; c[1] <= hi[1]; ++c[1])
          for (c[2] = lo[2]; c[2] <= hi[2]; ++c[2]) {
            Point x{0, 0, 0};
            Index pos{0, 0, 0};
            for (int d = 0; d < n; ++d) {
              x[d] = static_cast<double>(c[d]) * h / t;
              const std::int64_t N = dims[static_cast<std::size_t>(d)];
              pos[d] = ((c[d] % N) + N) % N;
            }
            const double v = shape(x, n);
            if (v != 0.0) kern[flat(pos)] = v * tn;
          }
      detail::dft(kern, dims, -1);
      for (std::size_t i = 0; i < total; ++i) kern[i] *= F[i];
      detail::dft(kern, dims, +1);
      const double inv = 1.0 / static_cast<double>(total);
      for (std::size_t i = 0; i < total; ++i) u[i] = std::abs(kern[i].real() * inv);
      for (int d = 0; d < n; ++d) window_max(u, dims, d, w);
      for (std::size_t i = 0; i < total; ++i) best[i] = std::max(best[i], u[i]);
    }
  }

  GridFunction out(n, f.level(), f.lo(), f.hi());
  for (std::size_t i = 0; i < out.size(); ++i) {
    Index m0 = out.block().index_of(i);
    Index pos{0, 0, 0};
    for (int d = 0; d < n; ++d) pos[d] = m0[d] - f.lo()[d] + R;
    out.values()[i] = best[flat(pos)];
  }
  return out;
}

double grand_maximal_norm(const GridFunction& f, double p, const MaximalOptions& opt) {
  if (f.max_abs() == 0.0) return 0.0;
  return lp_norm(grand_maximal_function(f, p, opt), p, opt.weight);
}

double grand_maximal_norm(const CoeffField& c, const WaveletSystem& sys, int K, double p, const MaximalOptions& opt,
                          int pad_cubes) {
  if (c.empty()) return 0.0;
  const int n = c.dim();
  Index lo, hi;
  support_box(c, sys, K, lo, hi);
  const std::int64_t cell = std::int64_t{1} << (K - c.j_min());
  for (int d = 0; d < n; ++d) {
    lo[d] = (floor_div(lo[d], cell) - pad_cubes) * cell;
    hi[d] = (ceil_div(hi[d], cell) + pad_cubes) * cell;
  }
  return grand_maximal_norm(synthesize(c, sys, K, lo, hi), p, opt);
}

} // namespace ppk
