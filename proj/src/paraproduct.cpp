#include "ppk/paraproduct.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "ppk/errors.hpp"
#include "ppk/spaces.hpp"
#include "transform.hpp"

namespace ppk {

namespace {

void check_pair(const CoeffField& f, const CoeffField& g, int K_out) {
  if (f.dim() != g.dim()) throw GeometryError("paraproduct: fields differ in dimension");
  if (f.j_min() != g.j_min()) throw GeometryError("paraproduct: fields must share j_min");
  if (K_out < std::max(f.j_max(), g.j_max()))
    throw PrecisionError("paraproduct: K_out is coarser than the finest wavelet scale");
}

std::int64_t chebyshev(const Index& a, const Index& b, int n) {
  std::int64_t d = 0;
  for (int i = 0; i < n; ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

// Pairs (u in A, v in B) with |k_u - k_v|_inf < m, both nonzero.
std::int64_t count_pairs(const Block& A, const Block& B, int m) {
  if (A.empty() || B.empty()) return 0;
  std::int64_t count = 0;
  const int n = A.n;
  for (std::size_t i = 0; i < B.size(); ++i) {
    if (B.v[i] == 0.0) continue;
    const Index kb = B.index_of(i);
    Index lo{0, 0, 0}, hi{1, 1, 1};
    for (int d = 0; d < n; ++d) {
      lo[d] = std::max(kb[d] - m + 1, A.lo[d]);
      hi[d] = std::min(kb[d] + m, A.lo[d] + A.ext[d]);
      if (lo[d] >= hi[d]) goto next;
    }
    for (std::int64_t a0 = lo[0]; a0 < hi[0]; ++a0)
      for (std::int64_t a1 = lo[1]; a1 < hi[1]; ++a1)
        for (std::int64_t a2 = lo[2]; a2 < hi[2]; ++a2)
          if (A.v[A.offset({a0, a1, a2})] != 0.0) ++count;
  next:;
  }
  return count;
}

struct Levels {
  std::array<GridFunction, 4> comp;
  GridFunction coarse;
  std::array<std::int64_t, 4> terms{};
};

Levels evaluate(const CoeffField& f, const CoeffField& g, const WaveletSystem& sys, int K, const Index& lo,
                const Index& hi, unsigned wanted) {
  const int n = f.dim();
  const int m = sys.support_radius();
  const int jmin = f.j_min(), jmax = std::max(f.j_max(), g.j_max());
  Levels out;
  for (auto& c : out.comp) c = GridFunction(n, K, lo, hi);
  out.coarse = GridFunction(n, K, lo, hi);

  Block Sf = detail::gather_scaling(f), Sg = detail::gather_scaling(g);
  {
    const ProfileSamples p0 = sys.profile(Profile::phi, K - jmin);
    const double scale = std::pow(2.0, 0.5 * jmin * n);
    GridFunction a(n, K, lo, hi), b(n, K, lo, hi);
    detail::expand_add(Sf, detail::pick(0, n, p0, p0), scale, a.block());
    detail::expand_add(Sg, detail::pick(0, n, p0, p0), scale, b.block());
    out.coarse = a * b;
  }
  for (int j = jmin; j < jmax; ++j) {
    auto Df = detail::gather_details(f, j), Dg = detail::gather_details(g, j);
    const bool hasf = !Df[1].empty(), hasg = !Dg[1].empty();
    const int r = K - j;
    const double scale = std::pow(2.0, 0.5 * j * n);
    const ProfileSamples p0 = sys.profile(Profile::phi, r), p1 = sys.profile(Profile::psi, r);
    const std::size_t nb = Df.size();

    GridFunction Pf(n, K, lo, hi), Pg(n, K, lo, hi), Qf(n, K, lo, hi), Qg(n, K, lo, hi);
    detail::expand_add(Sf, detail::pick(0, n, p0, p0), scale, Pf.block());
    detail::expand_add(Sg, detail::pick(0, n, p0, p0), scale, Pg.block());
    for (unsigned l = 1; l < nb; ++l) {
      if (hasf) detail::expand_add(Df[l], detail::pick(l, n, p0, p1), scale, Qf.block());
      if (hasg) detail::expand_add(Dg[l], detail::pick(l, n, p0, p1), scale, Qg.block());
    }
    if ((wanted & 1u) && hasg) out.comp[0] += Pf * Qg;
    if ((wanted & 2u) && hasf) out.comp[1] += Qf * Pg;

    GridFunction diag(n, K, lo, hi);
    std::int64_t ndiag = 0, nall = 0;
    if (hasf && hasg) {
      const ProfileSamples q0 = sys.profile(Profile::phi_squared, r), q1 = sys.profile(Profile::psi_squared, r);
      for (unsigned l = 1; l < nb; ++l) {
        Block prod = Df[l];
        for (std::size_t i = 0; i < prod.size(); ++i) {
          prod.v[i] *= Dg[l].at(prod.index_of(i));
          if (prod.v[i] != 0.0) ++ndiag;
        }
        if (wanted & 12u) detail::expand_add(prod, detail::pick(l, n, q0, q1), std::pow(2.0, j * n), diag.block());
        for (unsigned l2 = 1; l2 < nb; ++l2) nall += count_pairs(Df[l], Dg[l2], m);
      }
      if (wanted & 4u) {
        GridFunction qq = Qf * Qg;
        qq -= diag;
        out.comp[2] += qq;
      }
      if (wanted & 8u) out.comp[3] += diag;
    }
    for (unsigned l = 1; l < nb; ++l) {
      out.terms[0] += count_pairs(Sf, Dg[l], m);
      out.terms[1] += count_pairs(Df[l], Sg, m);
    }
    out.terms[2] += nall - ndiag;
    out.terms[3] += ndiag;

    if (j + 1 < jmax) {
      Df[0] = std::move(Sf);
      Dg[0] = std::move(Sg);
      Sf = detail::synthesis_step(Df, sys.bank());
      Sg = detail::synthesis_step(Dg, sys.bank());
    }
  }
  return out;
}

} // namespace

void paraproduct_box(const CoeffField& f, const CoeffField& g, const WaveletSystem& sys, int K_out, Index& lo,
                     Index& hi) {
  const int n = f.dim();
  const std::int64_t cell = std::int64_t{1} << (K_out - f.j_min());
  Index l1, h1, l2, h2;
  support_box(f, sys, K_out, l1, h1);
  support_box(g, sys, K_out, l2, h2);
  lo = {0, 0, 0};
  hi = {1, 1, 1};
  for (int d = 0; d < n; ++d) {
    if (f.empty() && g.empty()) {
      hi[d] = cell;
      continue;
    }
    if (f.empty()) {
      l1 = l2;
      h1 = h2;
    }
    if (g.empty()) {
      l2 = l1;
      h2 = h1;
    }
    lo[d] = floor_div(std::min(l1[d], l2[d]), cell) * cell;
    hi[d] = ceil_div(std::max(h1[d], h2[d]), cell) * cell;
  }
}

GridFunction pi(int i, const CoeffField& f, const CoeffField& g, const WaveletSystem& sys, int K_out,
                const Index& lo, const Index& hi) {
  if (i < 1 || i > 4) throw RangeError("paraproduct index must be 1..4");
  check_pair(f, g, K_out);
  auto lv = evaluate(f, g, sys, K_out, lo, hi, 1u << (i - 1));
  return std::move(lv.comp[static_cast<std::size_t>(i - 1)]);
}

GridFunction pi(int i, const CoeffField& f, const CoeffField& g, const WaveletSystem& sys, int K_out) {
  check_pair(f, g, K_out);
  Index lo, hi;
  paraproduct_box(f, g, sys, K_out, lo, hi);
  return pi(i, f, g, sys, K_out, lo, hi);
}

ParaproductResult renormalize(const CoeffField& f, const CoeffField& g, const WaveletSystem& sys, int K_out,
                              const Index& lo, const Index& hi) {
  check_pair(f, g, K_out);
  auto lv = evaluate(f, g, sys, K_out, lo, hi, 15u);
  ParaproductResult r;
  r.components = std::move(lv.comp);
  r.coarse = std::move(lv.coarse);
  r.terms = lv.terms;
  for (auto t : r.terms) r.term_count += t;
  r.T = r.components[0] + r.components[1];
  r.T += r.components[2];
  r.S = r.components[3];
  r.value = r.T + r.S;

  GridFunction fg = synthesize(f, sys, K_out, lo, hi) * synthesize(g, sys, K_out, lo, hi);
  GridFunction full = r.value + r.coarse;
  r.residual = max_abs_difference(full, fg);
  const double scale = f.l2_norm() * g.l2_norm();
  r.relative_residual = scale > 0 ? r.residual / scale : r.residual;
  return r;
}

ParaproductResult renormalize(const CoeffField& f, const CoeffField& g, const WaveletSystem& sys, int K_out) {
  check_pair(f, g, K_out);
  Index lo, hi;
  paraproduct_box(f, g, sys, K_out, lo, hi);
  return renormalize(f, g, sys, K_out, lo, hi);
}

void write_bundle(const std::filesystem::path& dir, const ParaproductResult& r) {
  std::filesystem::create_directories(dir);
  nlohmann::json manifest;
  manifest["components"] = nlohmann::json::array();
  for (int i = 0; i < 4; ++i) {
    const std::string name = "pi" + std::to_string(i + 1) + ".csv";
    std::ofstream os(dir / name);
    if (!os) throw FormatError("cannot write " + (dir / name).string());
    write_csv(os, r.components[static_cast<std::size_t>(i)]);
    manifest["components"].push_back({{"file", name}, {"terms", r.terms[static_cast<std::size_t>(i)]}});
  }
  manifest["term_count"] = r.term_count;
  manifest["residual"] = r.residual;
  manifest["relative_residual"] = r.relative_residual;
  manifest["coarse_max"] = r.coarse.max_abs();
  manifest["K"] = r.value.level();
  std::ofstream os(dir / "manifest.json");
  os << manifest.dump(2) << '\n';
}

Pi2SplitReport pi2_split_check(const CoeffField& a, const DyadicCube& R, const GridFunction& g, double p,
                               const WaveletSystem& sys) {
  const int n = a.dim();
  const int m = sys.support_radius();
  const int jl = R.j;
  const int K = g.level();
  if (!a.scaling().empty() || a.j_min() > jl) throw PreconditionError("pi2 split: the atom must be wavelet-only at scales >= j(R)");
  for (const auto& [idx, v] : a.wavelet())
    if (idx.cube.j < jl) throw PreconditionError("pi2 split: atom has a wavelet coarser than R");
  Atom atom{a, R, p, default_dilation(sys)};
  auto rep = atom_verify(atom, sys);
  if (!rep.passed()) throw PreconditionError("pi2 split: input is not an H^p atom on R");

  // 2mR: cube with the same center and side 2m l(R)
  Point dlo, dhi;
  for (int d = 0; d < n; ++d) {
    dlo[d] = R.center(d) - m * R.side();
    dhi[d] = R.center(d) + m * R.side();
    if (g.point_of(g.lo())[d] > dlo[d] || g.point_of(g.hi())[d] < dhi[d])
      throw GeometryError("pi2 split: g must be sampled on a box containing 2mR");
  }
  const int jmax = std::max(a.j_max(), jl + 1);
  if (K < jmax) throw PrecisionError("pi2 split: g's grid is coarser than the atom");
  CoeffField G = analyze(g, sys, jl, jmax);
  CoeffField A(n, jl, jmax);
  for (const auto& [idx, v] : a.wavelet()) A.add_wavelet(idx, v);

  Pi2SplitReport out;
  const Index lo = g.lo(), hi = g.hi();

  // g_R from the samples inside R
  {
    double s = 0;
    std::int64_t cnt = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      Point x = g.point(i);
      bool in = true;
      for (int d = 0; d < n; ++d) in = in && x[d] >= R.corner(d) && x[d] < R.corner(d) + R.side();
      if (in) {
        s += g.values()[i];
        ++cnt;
      }
    }
    out.g_mean = cnt ? s / static_cast<double>(cnt) : 0.0;
  }

  CoeffField b(n, jl, jmax);
  for (const auto& [idx, v] : G.wavelet()) {
    bool inside = true;
    for (int d = 0; d < n; ++d) {
      inside = inside && idx.cube.corner(d) >= dlo[d] - 1e-15 && idx.cube.corner(d) + idx.cube.side() <= dhi[d] + 1e-15;
    }
    if (inside) b.add_wavelet(idx, v);
  }
  out.b_entries = b.size();

  out.pi2 = pi(2, A, G, sys, K, lo, hi);
  GridFunction pi2b = pi(2, A, b, sys, K, lo, hi);
  GridFunction asyn = synthesize(A, sys, K, lo, hi);

  // a P_j g split into the mean-free part (goes to h1) and the g_R part (c h2 g_R)
  const double rootR = std::sqrt(R.volume());
  GridFunction lowpass(n, K, lo, hi), mean_free(n, K, lo, hi), with_mean(n, K, lo, hi);
  for (const auto& [cube, v] : G.scaling()) {
    std::int64_t dist = 0;
    for (int d = 0; d < n; ++d) dist = std::max(dist, std::abs(cube.k[d] - R.k[d]));
    if (dist >= m) continue; // a phi_I vanishes
    GridFunction phiI = synthesize([&] {
      CoeffField one(n, jl, jl);
      one.add_scaling(cube, 1.0);
      return one;
    }(), sys, K, lo, hi);
    GridFunction aphi = asyn * phiI;
    GridFunction t = aphi;
    t *= v;
    lowpass += t;
    t = aphi;
    t *= v - rootR * out.g_mean;
    mean_free += t;
    t = aphi;
    t *= rootR;
    with_mean += t;
  }

  const double nphi = std::pow(sys.phi_sup(), n);
  out.c = std::pow(2.0 * m, n) * nphi * std::pow(2.0 * m, n * (1.0 / p - 0.5));
  out.h1 = pi2b + mean_free;
  out.h2 = with_mean;
  out.h2 *= 1.0 / out.c;

  const double ref = std::max(out.pi2.max_abs(), 1e-300);
  GridFunction split = out.h1;
  GridFunction ch2 = out.h2;
  ch2 *= out.c * out.g_mean;
  split += ch2;
  out.identity_residual = max_abs_difference(out.pi2, split) / ref;
  out.lowpass_residual = max_abs_difference(out.pi2, lowpass + pi2b) / ref;

  out.h2_l2 = out.h2.l2_norm();
  out.h2_bound = std::pow(std::pow(2.0 * m, n) * R.volume(), 0.5 - 1.0 / p);
  out.h2_integral = out.h2.integral();
  out.h2_support_ok = true;
  const double hmax = out.h2.max_abs();
  for (std::size_t i = 0; i < out.h2.size(); ++i) {
    if (std::abs(out.h2.values()[i]) <= 1e-12 * hmax) continue;
    Point x = out.h2.point(i);
    for (int d = 0; d < n; ++d)
      if (x[d] < dlo[d] || x[d] > dhi[d]) out.h2_support_ok = false;
  }
  const double l1 = [&] {
    double s = 0;
    for (double v : out.h2.values()) s += std::abs(v);
    return s * out.h2.cell_volume();
  }();
  out.h2_is_atom = out.h2_support_ok && out.h2_l2 <= out.h2_bound * (1 + 1e-12) &&
                   std::abs(out.h2_integral) <= 1e-8 * std::max(l1, 1e-300);
  return out;
}

} // namespace ppk
