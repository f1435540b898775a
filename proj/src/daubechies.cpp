#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "ppk/errors.hpp"
#include "ppk/wavelet_core.hpp"

namespace ppk {

namespace {

using cld = std::complex<long double>;

// Horner evaluation of sum c_k y^k and its derivative.
std::pair<cld, cld> eval_poly(const std::vector<long double>& c, cld y) {
  cld v = 0, dv = 0;
  for (std::size_t k = c.size(); k-- > 0;) {
    dv = dv * y + v;
    v = v * y + c[k];
  }
  return {v, dv};
}

std::vector<cld> polynomial_roots(const std::vector<long double>& c) {
  const int deg = static_cast<int>(c.size()) - 1;
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(deg, deg);
  for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -static_cast<double>(c[i] / c[deg]);
  Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
  std::vector<cld> roots;
  for (int i = 0; i < deg; ++i) {
    cld y(es.eigenvalues()[i].real(), es.eigenvalues()[i].imag());
    for (int it = 0; it < 50; ++it) {
      auto [v, dv] = eval_poly(c, y);
      if (std::abs(dv) == 0.0L) break;
      cld step = v / dv;
      y -= step;
      if (std::abs(step) <= 1e-19L * std::max(1.0L, std::abs(y))) break;
    }
    roots.push_back(y);
  }
  return roots;
}

} // namespace

std::vector<double> daubechies_lowpass(int p) {
  if (p < 1 || p > 10) throw RangeError("Daubechies order must be in 1..10, got " + std::to_string(p));
  if (p == 1) return {1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)};
  if (p == 2) {
    const double s3 = std::sqrt(3.0), d = 4.0 * std::sqrt(2.0);
    return {(1 + s3) / d, (3 + s3) / d, (3 - s3) / d, (1 - s3) / d};
  }

  // |m0|^2 = cos^{2p}(w/2) P(sin^2(w/2)), P(y) = sum_{k<p} C(p-1+k, k) y^k.
  std::vector<long double> c(static_cast<std::size_t>(p));
  long double binom = 1;
  for (int k = 0; k < p; ++k) {
    c[static_cast<std::size_t>(k)] = binom;
    binom = binom * static_cast<long double>(p + k) / static_cast<long double>(k + 1);
  }
  std::vector<cld> yroots = polynomial_roots(c);

  // y = (2 - z - 1/z)/4  =>  z^2 - (2-4y) z + 1 = 0; keep the root inside the unit circle.
  std::vector<cld> zroots;
  for (cld y : yroots) {
    cld b = 1.0L - 2.0L * y;
    cld disc = std::sqrt(b * b - 1.0L);
    cld z1 = b + disc, z2 = b - disc;
    zroots.push_back(std::abs(z1) < 1.0L ? z1 : z2);
  }

  // Coefficients of (z+1)^p prod (z - r), highest power first.
  std::vector<cld> poly{1.0L};
  auto multiply = [&](cld r) {
    std::vector<cld> next(poly.size() + 1, 0.0L);
    for (std::size_t i = 0; i < poly.size(); ++i) {
      next[i] += poly[i];
      next[i + 1] -= r * poly[i];
    }
    poly.swap(next);
  };
  for (int i = 0; i < p; ++i) multiply(-1.0L);
  for (cld r : zroots) multiply(r);

  long double total = 0;
  for (const cld& v : poly) total += v.real();
  const long double scale = std::sqrt(2.0L) / total;
  std::vector<double> h;
  for (const cld& v : poly) h.push_back(static_cast<double>(v.real() * scale));
  return h;
}

} // namespace ppk
