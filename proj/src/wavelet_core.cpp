#include "ppk/wavelet_core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include <Eigen/Dense>

#include "ppk/errors.hpp"

namespace ppk {

double FilterBank::Residuals::max() const { return std::max({sum, orthonormality, flip}); }

FilterBank FilterBank::from_lowpass(std::vector<double> h, int offset) {
  if (h.size() < 2 || h.size() % 2 != 0) throw RangeError("lowpass filter length must be even and >= 2");
  FilterBank fb;
  const std::size_t L = h.size();
  fb.highpass.resize(L);
  for (std::size_t j = 0; j < L; ++j) fb.highpass[j] = (j % 2 == 0 ? 1.0 : -1.0) * h[L - 1 - j];
  fb.lowpass = std::move(h);
  fb.offset = offset;
  return fb;
}

FilterBank::Residuals FilterBank::residuals() const {
  Residuals r;
  const std::size_t L = lowpass.size();
  double s = 0;
  for (double x : lowpass) s += x;
  r.sum = std::abs(s - std::sqrt(2.0));
  for (std::size_t m = 0; 2 * m < L; ++m) {
    double acc = 0;
    for (std::size_t k = 0; k + 2 * m < L; ++k) acc += lowpass[k] * lowpass[k + 2 * m];
    r.orthonormality = std::max(r.orthonormality, std::abs(acc - (m == 0 ? 1.0 : 0.0)));
  }
  for (std::size_t j = 0; j < L; ++j) {
    double expect = (j % 2 == 0 ? 1.0 : -1.0) * lowpass[L - 1 - j];
    r.flip = std::max(r.flip, std::abs(highpass[j] - expect));
  }
  return r;
}

void FilterBank::write(std::ostream& os) const {
  os << offset << '\n';
  for (double h : lowpass) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof buf, h);
    os << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)) << '\n';
  }
}

FilterBank FilterBank::read(std::istream& is) {
  std::string line;
  int offset = 0;
  bool have_offset = false;
  std::vector<double> taps;
  while (std::getline(is, line)) {
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ss(line.substr(first));
    if (!have_offset) {
      if (!(ss >> offset)) throw FormatError("filter file: expected integer offset, got '" + line + "'");
      have_offset = true;
      continue;
    }
    double v;
    if (!(ss >> v)) throw FormatError("filter file: bad tap '" + line + "'");
    taps.push_back(v);
  }
  if (!have_offset) throw FormatError("filter file: empty");
  return from_lowpass(std::move(taps), offset);
}

namespace {

// Cascade without the public range restriction; used for on-demand profiles.
std::pair<GridFunction, GridFunction> cascade(const FilterBank& bank, int K) {
  const int L = bank.length();
  const int a = bank.offset;
  const double s2 = std::sqrt(2.0);

  std::vector<double> phi;
  if (L == 2) {
    phi = {1.0, 0.0};
  } else {
    const int ni = L - 2;
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(ni, ni);
    for (int r = 0; r < ni; ++r) {
      int x = a + 1 + r;
      for (int c = 0; c < ni; ++c) {
        int i = 2 * x - (a + 1 + c);
        if (i >= a && i < a + L) M(r, c) = s2 * bank.low(i);
      }
    }
    Eigen::MatrixXd A = M - Eigen::MatrixXd::Identity(ni, ni);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(ni);
    A.row(ni - 1).setOnes();
    rhs(ni - 1) = 1.0;
    Eigen::VectorXd v = A.fullPivLu().solve(rhs);
    Eigen::VectorXd res = M * v - v;
    if (!v.allFinite() || res.cwiseAbs().maxCoeff() > 1e-9)
      throw ConvergenceError("cascade: filter has no normalizable fixed point at the integers");
    phi.assign(static_cast<std::size_t>(L), 0.0);
    for (int r = 0; r < ni; ++r) phi[static_cast<std::size_t>(r + 1)] = v(r);
  }

  for (int lev = 1; lev <= K; ++lev) {
    const std::int64_t half = std::int64_t{1} << (lev - 1);
    const std::int64_t count = static_cast<std::int64_t>(L - 1) * (std::int64_t{1} << lev) + 1;
    const auto prev_count = static_cast<std::int64_t>(phi.size());
    std::vector<double> next(static_cast<std::size_t>(count), 0.0);
    // t at level lev is x = a + t 2^-lev, and phi(2x - a - i) is entry t - i 2^(lev-1) one level up.
    for (std::int64_t t = 0; t < count; ++t) {
      double acc = 0.0;
      for (int i = 0; i < L; ++i) {
        std::int64_t u = t - i * half;
        if (u >= 0 && u < prev_count) acc += bank.lowpass[static_cast<std::size_t>(i)] * phi[static_cast<std::size_t>(u)];
      }
      next[static_cast<std::size_t>(t)] = s2 * acc;
    }
    phi.swap(next);
  }

  const std::int64_t scale = std::int64_t{1} << K;
  const auto count = static_cast<std::int64_t>(phi.size());
  std::vector<double> psi(phi.size(), 0.0);
  for (std::int64_t t = 0; t < count; ++t) {
    double acc = 0.0;
    for (int jj = 0; jj < L; ++jj) {
      std::int64_t u = 2 * t - jj * scale;
      if (u >= 0 && u < count) acc += bank.highpass[static_cast<std::size_t>(jj)] * phi[static_cast<std::size_t>(u)];
    }
    psi[static_cast<std::size_t>(t)] = s2 * acc;
  }

  double big = 0.0;
  for (double x : phi) {
    if (!std::isfinite(x)) throw ConvergenceError("cascade: non-finite samples");
    big = std::max(big, std::abs(x));
  }
  if (big > 1e6) throw ConvergenceError("cascade: samples diverge");

  const Index lo{static_cast<std::int64_t>(a) * scale, 0, 0};
  const Index hi{lo[0] + count, 1, 1};
  GridFunction gphi(1, K, lo, hi), gpsi(1, K, lo, hi);
  std::copy(phi.begin(), phi.end(), gphi.values().begin());
  std::copy(psi.begin(), psi.end(), gpsi.values().begin());
  return {std::move(gphi), std::move(gpsi)};
}

} // namespace

std::pair<GridFunction, GridFunction> cascade_sample(const FilterBank& bank, int K) {
  if (K < 1 || K > 16) throw RangeError("cascade level K must be in [1, 16], got " + std::to_string(K));
  return cascade(bank, K);
}

double moment_integral(const GridFunction& f, const std::array<int, kMaxDim>& beta) {
  std::vector<double> terms(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    Point x = f.point(i);
    double w = f.values()[i];
    for (int d = 0; d < f.dim(); ++d) w *= std::pow(x[d], beta[d]);
    terms[i] = w;
  }
  return pairwise_sum(terms) * f.cell_volume();
}

double moment_integral(const GridFunction& samples, int l) {
  if (samples.dim() != 1) throw GeometryError("moment_integral(l) expects one-dimensional samples");
  return moment_integral(samples, std::array<int, kMaxDim>{l, 0, 0});
}

WaveletSystem::WaveletSystem(std::string name, FilterBank bank, int moments, int smoothness, int cascade_level)
    : name_(std::move(name)), bank_(std::move(bank)), moments_(moments), smoothness_(smoothness),
      cascade_level_(cascade_level) {
  auto [phi, psi] = cascade_sample(bank_, cascade_level_);
  phi_ = std::move(phi);
  psi_ = std::move(psi);
}

ProfileSamples WaveletSystem::profile(Profile which, int r) const {
  if (r < 0) throw PrecisionError("profile requested on a grid coarser than the integers");
  ProfileSamples out;
  out.resolution = r;
  out.first = static_cast<std::int64_t>(bank_.offset) << r;
  const bool want_phi = which == Profile::phi || which == Profile::phi_squared;
  const bool square = which == Profile::phi_squared || which == Profile::psi_squared;
  if (r <= cascade_level_) {
    const auto& src = want_phi ? phi_ : psi_;
    const std::size_t stride = std::size_t{1} << (cascade_level_ - r);
    for (std::size_t t = 0; t < src.size(); t += stride) out.values.push_back(src.values()[t]);
  } else {
    if (r > 24) throw PrecisionError("profile resolution beyond 2^-24 requested");
    auto [phi, psi] = cascade(bank_, r);
    const auto& src = want_phi ? phi : psi;
    out.values.assign(src.values().begin(), src.values().end());
  }
  if (square)
    for (double& v : out.values) v *= v;
  return out;
}

namespace {
double interpolate(const GridFunction& s, int K, int offset, double x) {
  double t = (x - offset) * exp2i(K);
  if (t < 0) return 0.0;
  auto i = static_cast<std::size_t>(std::floor(t));
  double frac = t - static_cast<double>(i);
  if (i + 1 >= s.size()) return (i + 1 == s.size() && frac == 0.0) ? s.values()[i] : 0.0;
  if (frac == 0.0) return s.values()[i];
  return (1 - frac) * s.values()[i] + frac * s.values()[i + 1];
}
} // namespace

double WaveletSystem::phi(double x) const { return interpolate(phi_, cascade_level_, bank_.offset, x); }
double WaveletSystem::psi(double x) const { return interpolate(psi_, cascade_level_, bank_.offset, x); }

double WaveletSystem::phi_sup() const { return phi_.max_abs(); }

WaveletSystem haar_system(int cascade_level) {
  return WaveletSystem("haar", FilterBank::from_lowpass(daubechies_lowpass(1), 0), 1, 0, cascade_level);
}

WaveletSystem daubechies_system(int p, int cascade_level) {
  // floor of the Hoelder exponent of the extremal-phase scaling function
  static constexpr int smooth[] = {0, 0, 1, 1, 1, 2, 2, 2, 3, 3};
  auto h = daubechies_lowpass(p);
  if (p == 1) return haar_system(cascade_level);
  return WaveletSystem("db" + std::to_string(p), FilterBank::from_lowpass(std::move(h), 1 - p), p,
                       smooth[p - 1], cascade_level);
}

WaveletSystem wavelet_by_name(std::string_view name, int cascade_level) {
  if (name == "haar") return haar_system(cascade_level);
  if (name.size() > 2 && name.substr(0, 2) == "db") {
    int p = 0;
    auto body = name.substr(2);
    auto res = std::from_chars(body.data(), body.data() + body.size(), p);
    if (res.ec == std::errc() && res.ptr == body.data() + body.size()) return daubechies_system(p, cascade_level);
  }
  throw UsageError("wavelet: expected 'haar' or 'db1'..'db10', got '" + std::string(name) + "'");
}

void write_samples_csv(std::ostream& os, const GridFunction& samples) {
  if (samples.dim() != 1) throw GeometryError("sample CSV export is one-dimensional");
  os << "x,value\n" << std::setprecision(17);
  for (std::size_t i = 0; i < samples.size(); ++i) os << samples.point(i)[0] << ',' << samples.values()[i] << '\n';
}

} // namespace ppk
