#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include "ppk/errors.hpp"
#include "ppk/spaces.hpp"

namespace ppk {

double Atom::size_bound() const {
  return std::pow(std::pow(static_cast<double>(dilation), cube.n) * cube.volume(), 0.5 - 1 / p);
}

int default_dilation(const WaveletSystem& sys) { return sys.is_haar() ? 1 : sys.support_radius(); }

AtomReport atom_verify(const Atom& a, const WaveletSystem& sys, int extra_levels) {
  AtomReport r;
  const int n = a.coeffs.dim();
  if (a.cube.n != n) throw GeometryError("atom cube dimension differs from its coefficients");
  r.l2 = a.coeffs.l2_norm(); // orthonormal expansion
  r.l2_bound = a.size_bound();
  r.l2_ok = r.l2 <= r.l2_bound * (1 + 1e-12);
  if (a.coeffs.empty()) {
    r.support_ok = r.moments_ok = true;
    return r;
  }

  const int K = std::max(a.coeffs.j_max(), a.cube.j) + extra_levels;
  GridFunction f = synthesize(a.coeffs, sys, K);
  const double top = f.max_abs();
  double outside = 0;
  const double half = 0.5 * a.dilation * a.cube.side();
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double v = std::abs(f.values()[i]);
    if (v == 0.0) continue;
    Point x = f.point(i);
    bool in = true;
    for (int d = 0; d < n; ++d) in = in && std::abs(x[d] - a.cube.center(d)) <= half;
    if (!in) outside = std::max(outside, v);
  }
  r.support_excess = top > 0 ? outside / top : 0.0;
  r.support_ok = r.support_excess <= 1e-12;

  const int order = a.p < 1 ? static_cast<int>(std::floor(n * (1 / a.p - 1))) : 0;
  double l1 = 0;
  for (double v : f.values()) l1 += std::abs(v);
  l1 *= f.cell_volume();
  double worst = 0;
  for (int b0 = 0; b0 <= order; ++b0)
    for (int b1 = 0; b1 <= (n > 1 ? order - b0 : 0); ++b1)
      for (int b2 = 0; b2 <= (n > 2 ? order - b0 - b1 : 0); ++b2) {
        std::array<int, kMaxDim> beta{b0, b1, b2};
        const double mom = moment_integral(f, beta);
        // moments about the cube center scale like side^|beta|; compare against ||a||_1 at the same scale
        double scale = l1;
        for (int d = 0; d < n; ++d) scale *= std::pow(std::max(std::abs(a.cube.center(d)), a.cube.side()), beta[d]);
        worst = std::max(worst, scale > 0 ? std::abs(mom) / scale : 0.0);
      }
  r.moment_residual = worst;
  r.moments_ok = worst <= 1e-9;
  return r;
}

namespace {

// Cells of the box [lo, hi) that lie in cube q (grid level K >= q.j), listed as values of S.
void cube_values(const GridFunction& S, const DyadicCube& q, std::vector<double>& out, std::int64_t& total) {
  const int n = S.dim(), K = S.level();
  const std::int64_t s = std::int64_t{1} << (K - q.j);
  const Block& b = S.block();
  total = 1;
  Index a{0, 0, 0}, z{1, 1, 1};
  out.clear();
  for (int d = 0; d < n; ++d) {
    total *= s;
    a[d] = std::max(q.k[d] * s, b.lo[d]);
    z[d] = std::min((q.k[d] + 1) * s, b.lo[d] + b.ext[d]);
    if (a[d] >= z[d]) return;
  }
  for (std::int64_t i0 = a[0]; i0 < z[0]; ++i0)
    for (std::int64_t i1 = a[1]; i1 < z[1]; ++i1)
      for (std::int64_t i2 = a[2]; i2 < z[2]; ++i2) out.push_back(b.v[b.offset({i0, i1, i2})]);
}

// Largest k with |{S > 2^k} cap q| > |q| / 2.
int level_of(const GridFunction& S, const DyadicCube& q) {
  std::vector<double> v;
  std::int64_t total;
  cube_values(S, q, v, total);
  const auto need = static_cast<std::size_t>(total / 2 + 1); // strictly more than half
  if (v.size() < need) throw PreconditionError("atomic decomposition: cube outside the square-function box");
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(need - 1), v.end(), std::greater<>());
  const double med = v[need - 1];
  int k = static_cast<int>(std::ceil(std::log2(med))) - 1;
  while (std::ldexp(1.0, k + 1) < med) ++k;
  while (k > -1100 && !(std::ldexp(1.0, k) < med)) --k;
  return k;
}

bool dense(const GridFunction& S, const DyadicCube& q, int k) {
  std::vector<double> v;
  std::int64_t total;
  cube_values(S, q, v, total);
  const double thr = std::ldexp(1.0, k);
  std::int64_t c = 0;
  for (double x : v)
    if (x > thr) ++c;
  return 2 * c > total;
}

} // namespace

AtomicDecomposition finite_atomic_decompose(const CoeffField& f, double p, const WaveletSystem& sys) {
  if (!f.scaling().empty()) throw PreconditionError("atomic decomposition needs a field without a scaling part");
  if (!(p > 0 && p <= 1)) throw RangeError("atomic decomposition needs p in (0, 1]");
  AtomicDecomposition out;
  const int n = f.dim();
  std::map<DyadicCube, std::vector<std::pair<unsigned, double>>> cubes;
  for (const auto& [idx, v] : f.wavelet())
    if (v != 0.0) cubes[idx.cube].push_back({idx.lambda, v});
  if (cubes.empty()) return out;
  int K = f.j_min();
  for (const auto& [q, e] : cubes) K = std::max(K, q.j);
  const GridFunction S = square_function(f, K);
  std::int64_t omega_cells = 0;

  // group key: (k, R)
  std::map<std::pair<int, DyadicCube>, std::vector<DyadicCube>> groups;
  std::map<int, std::int64_t> omega;
  for (const auto& [q, e] : cubes) {
    const int k = level_of(S, q);
    auto it = omega.find(k);
    if (it == omega.end()) {
      const double thr = std::ldexp(1.0, k);
      std::int64_t c = 0;
      for (double x : S.values())
        if (x > thr) ++c;
      it = omega.emplace(k, c).first;
    }
    omega_cells = it->second;
    DyadicCube R = q, A = q;
    // climb while an ancestor could still be more than half covered
    while (true) {
      A = A.parent();
      const double cells = std::ldexp(1.0, (K - A.j) * n);
      if (cells >= 2.0 * static_cast<double>(omega_cells)) break;
      if (dense(S, A, k)) R = A;
    }
    groups[{k, R}].push_back(q);
  }

  const int dil = default_dilation(sys);
  for (const auto& [key, members] : groups) {
    const DyadicCube& R = key.second;
    CoeffField a(n, f.j_min(), f.j_max());
    for (const auto& q : members)
      for (const auto& [l, v] : cubes[q]) a.add_wavelet(TensorIndex{q, l}, v);
    Atom atom{a, R, p, dil};
    const double mu = a.l2_norm() / atom.size_bound();
    atom.coeffs = a.scaled(1 / mu);
    out.mu.push_back(mu);
    out.atoms.push_back(std::move(atom));
  }
  std::vector<double> pw;
  for (double mu : out.mu) pw.push_back(std::pow(std::abs(mu), p));
  out.mu_p_norm = std::pow(pairwise_sum(pw), 1 / p);
  out.hardy_norm = sequence_hardy_norm(f, p);
  out.ratio = out.hardy_norm > 0 ? out.mu_p_norm / out.hardy_norm : 0.0;
  return out;
}

CoeffField recombine(const AtomicDecomposition& d, const CoeffField& like) {
  CoeffField out(like.dim(), like.j_min(), like.j_max());
  for (std::size_t l = 0; l < d.atoms.size(); ++l)
    for (const auto& [idx, v] : d.atoms[l].coeffs.wavelet()) out.add_wavelet(idx, d.mu[l] * v);
  return out;
}

void write_atoms_jsonl(std::ostream& os, const AtomicDecomposition& d) {
  using nlohmann::json;
  for (std::size_t l = 0; l < d.atoms.size(); ++l) {
    const Atom& a = d.atoms[l];
    const int n = a.cube.n;
    json k = json::array();
    for (int i = 0; i < n; ++i) k.push_back(a.cube.k[i]);
    json entries = json::array();
    for (const auto& [idx, v] : a.coeffs.wavelet()) {
      json kk = json::array(), lam = json::array();
      for (int i = 0; i < n; ++i) {
        kk.push_back(idx.cube.k[i]);
        lam.push_back((idx.lambda >> i) & 1u);
      }
      entries.push_back({{"j", idx.cube.j}, {"k", kk}, {"lambda", lam}, {"value", v}});
    }
    os << json{{"mu", d.mu[l]}, {"R", {{"j", a.cube.j}, {"k", k}}}, {"dilation", a.dilation}, {"entries", entries}}.dump()
       << '\n';
  }
}

} // namespace ppk
