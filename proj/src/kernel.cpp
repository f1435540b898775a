#include <algorithm>
#include <cmath>
#include <limits>

#include "ppk/errors.hpp"
#include "ppk/paraproduct.hpp"

namespace ppk {

namespace {

// Values of phi and psi at 2^j x_d - k for every k where phi is nonzero near x_d.
struct AxisValues {
  std::int64_t k0 = 0;
  std::vector<double> phi, psi;
  double at(const std::vector<double>& v, std::int64_t k) const {
    std::int64_t i = k - k0;
    return i >= 0 && i < static_cast<std::int64_t>(v.size()) ? v[static_cast<std::size_t>(i)] : 0.0;
  }
};

AxisValues axis_values(const WaveletSystem& sys, int j, double x) {
  const double u = std::ldexp(x, j);
  AxisValues a;
  a.k0 = static_cast<std::int64_t>(std::floor(u)) - sys.support_hi();
  const std::int64_t k1 = static_cast<std::int64_t>(std::floor(u)) - sys.support_lo();
  for (std::int64_t k = a.k0; k <= k1; ++k) {
    a.phi.push_back(sys.phi(u - static_cast<double>(k)));
    a.psi.push_back(sys.psi(u - static_cast<double>(k)));
  }
  return a;
}

struct Term {
  Index k;
  unsigned lambda;
  double value;
};

// All (I, lambda) at scale j with f_I(p) g_I(q) != 0, where f, g pick phi or psi per axis.
// which = 0 gives phi_I(p) phi_I(q) (lambda = 0), otherwise psi^lambda_I(p) psi^lambda_I(q) for every lambda.
std::vector<Term> pair_terms(const WaveletSystem& sys, int n, int j, const Point& p, const Point& q, bool wavelet,
                             const KernelOptions& opt) {
  std::array<AxisValues, kMaxDim> P, Q;
  Index lo{0, 0, 0}, hi{1, 1, 1};
  for (int d = 0; d < n; ++d) {
    P[d] = axis_values(sys, j, p[d]);
    Q[d] = axis_values(sys, j, q[d]);
    lo[d] = std::max(P[d].k0, Q[d].k0);
    hi[d] = std::min(P[d].k0 + static_cast<std::int64_t>(P[d].phi.size()),
                     Q[d].k0 + static_cast<std::int64_t>(Q[d].phi.size()));
    if (opt.region_lo && opt.region_hi) {
      lo[d] = std::max<std::int64_t>(lo[d], static_cast<std::int64_t>(std::ceil(std::ldexp((*opt.region_lo)[d], j))));
      hi[d] = std::min<std::int64_t>(hi[d], static_cast<std::int64_t>(std::floor(std::ldexp((*opt.region_hi)[d], j))));
    }
    if (lo[d] >= hi[d]) return {};
  }
  std::vector<Term> out;
  const double scale = std::ldexp(1.0, j * n); // (2^{jn/2})^2
  const unsigned first = wavelet ? 1u : 0u, last = wavelet ? (1u << n) : 1u;
  for (std::int64_t a = lo[0]; a < hi[0]; ++a)
    for (std::int64_t b = lo[1]; b < hi[1]; ++b)
      for (std::int64_t c = lo[2]; c < hi[2]; ++c) {
        Index k{a, b, c};
        for (unsigned l = first; l < last; ++l) {
          double v = scale;
          for (int d = 0; d < n && v != 0.0; ++d) {
            const bool s = (l >> d) & 1u;
            v *= P[d].at(s ? P[d].psi : P[d].phi, k[d]) * Q[d].at(s ? Q[d].psi : Q[d].phi, k[d]);
          }
          if (v != 0.0) out.push_back({k, l, v});
        }
      }
  return out;
}

bool near(const Index& a, const Index& b, int n, int m) {
  for (int d = 0; d < n; ++d)
    if (std::abs(a[d] - b[d]) >= m) return false;
  return true;
}

double scale_term(int i, const WaveletSystem& sys, int n, int j, const Point& x, const Point& y, const Point& z,
                  const KernelOptions& opt) {
  const int m = sys.support_radius();
  double s = 0;
  switch (i) {
  case 1:
  case 2: {
    // Pi1: phi_I(x) phi_I(y) psi_I'(x) psi_I'(z); Pi2 swaps the roles of y and z
    auto A = pair_terms(sys, n, j, x, i == 1 ? y : z, false, opt);
    auto B = pair_terms(sys, n, j, x, i == 1 ? z : y, true, opt);
    for (const auto& a : A)
      for (const auto& b : B)
        if (near(a.k, b.k, n, m)) s += a.value * b.value;
    break;
  }
  case 3: {
    auto A = pair_terms(sys, n, j, x, y, true, opt);
    auto B = pair_terms(sys, n, j, x, z, true, opt);
    for (const auto& a : A)
      for (const auto& b : B)
        if (near(a.k, b.k, n, m) && !(a.k == b.k && a.lambda == b.lambda)) s += a.value * b.value;
    break;
  }
  case 4: {
    auto A = pair_terms(sys, n, j, x, y, true, opt);
    auto B = pair_terms(sys, n, j, x, z, true, opt);
    for (const auto& a : A)
      for (const auto& b : B)
        if (a.k == b.k && a.lambda == b.lambda) s += a.value * b.value;
    break;
  }
  default:
    throw RangeError("paraproduct index must be 1..4");
  }
  return s;
}

double dist(const Point& a, const Point& b, int n) {
  double s = 0;
  for (int d = 0; d < n; ++d) s += (a[d] - b[d]) * (a[d] - b[d]);
  return std::sqrt(s);
}

void fit_line(const std::vector<double>& X, const std::vector<double>& Y, double& slope, double& intercept) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (X.size() < 2) {
    slope = intercept = nan;
    return;
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    mx += X[i];
    my += Y[i];
  }
  mx /= static_cast<double>(X.size());
  my /= static_cast<double>(X.size());
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    sxx += (X[i] - mx) * (X[i] - mx);
    sxy += (X[i] - mx) * (Y[i] - my);
  }
  slope = sxx > 0 ? sxy / sxx : nan;
  intercept = my - slope * mx;
}

} // namespace

KernelValue kernel_value(int i, const WaveletSystem& sys, int n, const Point& x, const Point& y, const Point& z,
                         const KernelOptions& opt) {
  if (n < 1 || n > kMaxDim) throw RangeError("dimension must be 1.." + std::to_string(kMaxDim));
  if (opt.j_lo > opt.j_hi) throw RangeError("kernel scale range is empty");
  KernelValue out;
  std::vector<double> terms;
  for (int j = opt.j_lo; j <= opt.j_hi; ++j) terms.push_back(scale_term(i, sys, n, j, x, y, z, opt));
  out.value = pairwise_sum(terms);
  out.tail = std::abs(terms.front()) + (terms.size() > 1 ? std::abs(terms.back()) : 0.0);
  return out;
}

std::vector<ProbeTriple> self_similar_probes(int n, int t_first, int t_last, bool diagonal_yz) {
  std::vector<ProbeTriple> out;
  for (int t = t_first; t <= t_last; ++t) {
    const double s = std::ldexp(1.0, -t);
    ProbeTriple p{};
    for (int d = 0; d < n; ++d) {
      p.x[d] = 0.75 * s;
      p.y[d] = 1.75 * s;
      p.z[d] = diagonal_yz ? 1.75 * s : -0.25 * s;
      p.x_shift[d] = s;
    }
    out.push_back(p);
  }
  return out;
}

KernelProbe kernel_probe(int i, const WaveletSystem& sys, int n, const std::vector<ProbeTriple>& probes,
                         const KernelOptions& opt) {
  KernelProbe out;
  std::vector<double> lx, ly, qx, qy;
  for (const auto& pr : probes) {
    const double dxy = dist(pr.x, pr.y, n), dxz = dist(pr.x, pr.z, n), dyz = dist(pr.y, pr.z, n);
    const double D = dxy + dxz + dyz;
    if (D == 0.0) throw ProbeError("probe lies on the diagonal x = y = z");
    const double h = dist(pr.x, pr.x_shift, n);
    if (h == 0.0 || h > 0.5 * std::max(dxy, dxz)) throw ProbeError("regularity shift |x - x'| must be in (0, max(|x-y|,|x-z|)/2]");
    auto k = kernel_value(i, sys, n, pr.x, pr.y, pr.z, opt);
    auto k2 = kernel_value(i, sys, n, pr.x_shift, pr.y, pr.z, opt);
    const double q = std::abs(k.value - k2.value) / h;
    out.points.push_back(pr);
    out.distance.push_back(D);
    out.values.push_back(k.value);
    out.tails.push_back(std::max(k.tail, k2.tail));
    out.quotients.push_back(q);
    if (k.value != 0.0) {
      lx.push_back(std::log(D));
      ly.push_back(std::log(std::abs(k.value)));
    }
    if (q != 0.0) {
      qx.push_back(std::log(D));
      qy.push_back(std::log(q));
    }
  }
  double b = 0;
  fit_line(lx, ly, out.fitted_slope, b);
  out.fitted_constant = std::exp(b);
  fit_line(qx, qy, out.regularity_slope, b);
  out.regularity_constant = std::exp(b);
  double lo = std::numeric_limits<double>::infinity(), hi = 0;
  for (std::size_t t = 0; t < out.quotients.size(); ++t) {
    if (out.quotients[t] == 0.0) continue;
    double c = out.quotients[t] * std::pow(out.distance[t], 2 * n + 1);
    lo = std::min(lo, c);
    hi = std::max(hi, c);
  }
  out.regularity_spread = hi > 0 ? hi / lo : std::numeric_limits<double>::quiet_NaN();
  return out;
}

namespace {

// Central differences inside the block, one-sided at its faces.
GridFunction differentiate(const GridFunction& f, int axis) {
  GridFunction out = f;
  const Block& b = f.block();
  const std::int64_t N = b.ext[axis], s = b.stride(axis);
  const double h = f.step();
  if (N < 2) {
    for (double& v : out.values()) v = 0.0;
    return out;
  }
  for (std::size_t i = 0; i < b.size(); ++i) {
    const std::int64_t pos = b.index_of(i)[axis] - b.lo[axis];
    const auto at = [&](std::int64_t off) { return b.v[static_cast<std::size_t>(static_cast<std::int64_t>(i) + off * s)]; };
    double d;
    if (pos == 0)
      d = (at(1) - at(0)) / h;
    else if (pos == N - 1)
      d = (at(0) - at(-1)) / h;
    else
      d = (at(1) - at(-1)) / (2 * h);
    out.values()[i] = d;
  }
  return out;
}

} // namespace

MoleculeReport molecule_check(const WaveletSystem& sys, const DyadicCube& I, const Index& shift, unsigned lambda,
                              int M, const std::array<int, kMaxDim>& gamma, double constant) {
  const int n = I.n;
  int order = 0;
  for (int d = 0; d < n; ++d) {
    if (gamma[d] < 0) throw RangeError("derivative orders must be nonnegative");
    order += gamma[d];
  }
  if (order > sys.smoothness())
    throw CapabilityError("derivative order " + std::to_string(order) + " exceeds the smoothness of " + sys.name());
  if (lambda == 0 || lambda >= (1u << n)) throw RangeError("lambda must be a nonzero mask of n bits");
  const int K = I.j + sys.cascade_level();

  DyadicCube J = I;
  for (int d = 0; d < n; ++d) J.k[d] += shift[d];
  GridFunction P = tensor_sample(sys, I, 0, K);
  GridFunction Q = tensor_sample(sys, J, lambda, K);
  GridFunction F = P;
  const double root = std::sqrt(I.volume());
  bool zero = true;
  for (std::size_t i = 0; i < F.size(); ++i) {
    Index m = F.block().index_of(i);
    F.values()[i] = root * P.values()[i] * Q.value_at(m);
    if (F.values()[i] != 0.0) zero = false;
  }

  MoleculeReport out;
  out.order = order;
  out.identically_zero = zero;
  out.integral = F.integral();
  GridFunction D = F;
  for (int d = 0; d < n; ++d)
    for (int r = 0; r < gamma[d]; ++r) D = differentiate(D, d);

  const double pre = std::pow(2.0, 0.5 * I.j * n) * std::ldexp(1.0, I.j * order);
  std::vector<double> ratio(D.size());
  for (std::size_t i = 0; i < D.size(); ++i) {
    Point x = D.point(i);
    double r2 = 0;
    for (int d = 0; d < n; ++d) {
      double u = std::ldexp(x[d], I.j) - static_cast<double>(I.k[d]);
      r2 += u * u;
    }
    const double bound = pre / std::pow(1 + std::sqrt(r2), M);
    ratio[i] = std::abs(D.values()[i]) / bound;
  }
  double worst = 0;
  for (double r : ratio) worst = std::max(worst, r);
  out.worst_ratio = worst;
  out.constant = constant > 0 ? constant : worst;
  out.points = static_cast<std::int64_t>(ratio.size());
  for (double r : ratio)
    if (r > out.constant * (1 + 1e-12)) ++out.violations;
  return out;
}

double molecule_constant(const WaveletSystem& sys, int n, const Index& shift, unsigned lambda, int M,
                         const std::array<int, kMaxDim>& gamma) {
  return molecule_check(sys, DyadicCube{n, 0, {0, 0, 0}}, shift, lambda, M, gamma).worst_ratio;
}

} // namespace ppk
