#include "transform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "ppk/errors.hpp"

namespace ppk::detail {

namespace {

// Calls fn(in_base, out_base, inner_stride) for every line along `axis`; both blocks share
// every other axis.
template <class Fn>
void for_lines(const Block& in, const Block& out, int axis, Fn fn) {
  std::int64_t outer = 1, inner = 1;
  for (int d = 0; d < axis; ++d) outer *= in.ext[d];
  for (int d = axis + 1; d < kMaxDim; ++d) inner *= in.ext[d];
  const std::int64_t nin = in.ext[axis], nout = out.ext[axis];
  for (std::int64_t o = 0; o < outer; ++o)
    for (std::int64_t i = 0; i < inner; ++i) fn(o * nin * inner + i, o * nout * inner + i, inner);
}

Block with_axis(const Block& like, int axis, std::int64_t lo, std::int64_t ext) {
  Index l = like.lo, e = like.ext;
  l[axis] = lo;
  e[axis] = ext;
  return Block(like.n, l, e);
}

void split_axis(const Block& in, const FilterBank& fb, int axis, Block& low, Block& high) {
  const int a = fb.offset, L = fb.length();
  const std::int64_t A = in.lo[axis], N = in.ext[axis];
  const std::int64_t C = ceil_div(A - a - L + 1, 2);
  const std::int64_t D = floor_div(A + N - 1 - a, 2) + 1;
  low = with_axis(in, axis, C, D - C);
  high = with_axis(in, axis, C, D - C);
  const double* h = fb.lowpass.data();
  const double* g = fb.highpass.data();
  for_lines(in, low, axis, [&](std::int64_t ib, std::int64_t ob, std::int64_t s) {
    for (std::int64_t k = C; k < D; ++k) {
      double lo_acc = 0.0, hi_acc = 0.0;
      // fine index 2k + a + i, i = 0..L-1
      std::int64_t first = 2 * k + a - A;
      for (int i = 0; i < L; ++i) {
        std::int64_t m = first + i;
        if (m < 0 || m >= N) continue;
        double x = in.v[static_cast<std::size_t>(ib + m * s)];
        lo_acc += h[i] * x;
        hi_acc += g[i] * x;
      }
      low.v[static_cast<std::size_t>(ob + (k - C) * s)] = lo_acc;
      high.v[static_cast<std::size_t>(ob + (k - C) * s)] = hi_acc;
    }
  });
}

Block merge_axis(const Block& low, const Block& high, const FilterBank& fb, int axis) {
  const int a = fb.offset, L = fb.length();
  const std::int64_t C = low.lo[axis], M = low.ext[axis];
  const std::int64_t F0 = 2 * C + a;
  Block out = with_axis(low, axis, F0, M > 0 ? 2 * (M - 1) + L : 0);
  const double* h = fb.lowpass.data();
  const double* g = fb.highpass.data();
  for_lines(low, out, axis, [&](std::int64_t ib, std::int64_t ob, std::int64_t s) {
    for (std::int64_t k = 0; k < M; ++k) {
      double cl = low.v[static_cast<std::size_t>(ib + k * s)];
      double ch = high.v[static_cast<std::size_t>(ib + k * s)];
      if (cl == 0.0 && ch == 0.0) continue;
      std::int64_t base = ob + 2 * k * s;
      for (int i = 0; i < L; ++i) out.v[static_cast<std::size_t>(base + i * s)] += h[i] * cl + g[i] * ch;
    }
  });
  return out;
}

} // namespace

std::vector<Block> analysis_step(const Block& fine, const FilterBank& fb) {
  const int n = fine.n;
  std::vector<Block> bands(std::size_t{1} << n);
  bands[0] = fine;
  for (int d = 0; d < n; ++d) {
    for (unsigned idx = 0; idx < (1u << d); ++idx) {
      Block low, high;
      split_axis(bands[idx], fb, d, low, high);
      bands[idx] = std::move(low);
      bands[idx | (1u << d)] = std::move(high);
    }
  }
  return bands;
}

Block synthesis_step(const std::vector<Block>& in, const FilterBank& fb) {
  const Block* ref = nullptr;
  Index lo{}, ext{};
  for (const auto& b : in) {
    if (b.empty()) continue;
    if (!ref) {
      ref = &b;
      lo = b.lo;
      ext = b.ext;
    } else {
      for (int d = 0; d < b.n; ++d) {
        std::int64_t l = std::min(lo[d], b.lo[d]);
        std::int64_t h = std::max(lo[d] + ext[d], b.lo[d] + b.ext[d]);
        lo[d] = l;
        ext[d] = h - l;
      }
    }
  }
  if (!ref) return {};
  const int n = ref->n;
  std::vector<Block> bands(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (in[i].empty())
      bands[i] = Block(n, lo, ext);
    else if (in[i].lo == lo && in[i].ext == ext)
      bands[i] = in[i];
    else
      bands[i] = embed(in[i], lo, ext);
  }
  for (int d = n - 1; d >= 0; --d)
    for (unsigned idx = 0; idx < (1u << d); ++idx)
      bands[idx] = merge_axis(bands[idx], bands[idx | (1u << d)], fb, d);
  return std::move(bands[0]);
}

void expand_add(const Block& coeffs, const std::array<const ProfileSamples*, kMaxDim>& prof, double scale,
                Block& target) {
  if (coeffs.empty() || target.empty()) return;
  const int n = coeffs.n;
  Block cur = coeffs;
  for (int d = 0; d < n; ++d) {
    const ProfileSamples& P = *prof[d];
    const std::int64_t step = std::int64_t{1} << P.resolution;
    const auto len = static_cast<std::int64_t>(P.values.size());
    Block next = with_axis(cur, d, target.lo[d], target.ext[d]);
    const std::int64_t T0 = target.lo[d], TN = target.ext[d];
    const std::int64_t K0 = cur.lo[d], KN = cur.ext[d];
    const double* pv = P.values.data();
    for_lines(cur, next, d, [&](std::int64_t ib, std::int64_t ob, std::int64_t s) {
      for (std::int64_t k = 0; k < KN; ++k) {
        double w = cur.v[static_cast<std::size_t>(ib + k * s)];
        if (w == 0.0) continue;
        std::int64_t base = (K0 + k) * step + P.first - T0; // output index of profile sample 0
        std::int64_t t0 = std::max<std::int64_t>(0, -base);
        std::int64_t t1 = std::min(len, TN - base);
        for (std::int64_t t = t0; t < t1; ++t) next.v[static_cast<std::size_t>(ob + (base + t) * s)] += w * pv[t];
      }
    });
    cur = std::move(next);
  }
  for (std::size_t i = 0; i < target.v.size(); ++i) target.v[i] += scale * cur.v[i];
}

Block point_values_to_coeffs(const GridFunction& f, const WaveletSystem& sys) {
  const int n = f.dim(), K = f.level();
  const FilterBank& fb = sys.bank();
  const int a = fb.offset, L = fb.length();
  const ProfileSamples ints = sys.profile(Profile::phi, 0); // phi(a), ..., phi(a+L-1)
  const double axis_scale = std::pow(2.0, -0.5 * K);

  Block cur = f.block();
  for (int d = 0; d < n; ++d) {
    const std::int64_t M0 = cur.lo[d], NM = cur.ext[d];
    const std::int64_t k0 = M0 - a;
    const std::int64_t NK = NM - L + 2; // supports [k+a, k+a+L-1] inside the box
    if (NK <= 0) throw GeometryError("box too small for the wavelet support along an axis");
    Block next = with_axis(cur, d, k0, NK);
    if (L == 2) {
      for_lines(cur, next, d, [&](std::int64_t ib, std::int64_t ob, std::int64_t s) {
        for (std::int64_t k = 0; k < NK; ++k)
          next.v[static_cast<std::size_t>(ob + k * s)] = cur.v[static_cast<std::size_t>(ib + k * s)];
      });
    } else {
      // B[m][k] = phi(m - k); the normal matrix is the Toeplitz autocorrelation of phi at the integers.
      std::vector<double> ac(static_cast<std::size_t>(L), 0.0);
      for (int s = 0; s < L; ++s)
        for (int i = 0; i + s < L; ++i) ac[static_cast<std::size_t>(s)] += ints.values[static_cast<std::size_t>(i)] * ints.values[static_cast<std::size_t>(i + s)];
      std::vector<Eigen::Triplet<double>> trip;
      for (std::int64_t r = 0; r < NK; ++r)
        for (int s = 0; s < L; ++s) {
          if (ac[static_cast<std::size_t>(s)] == 0.0 || r + s >= NK) continue;
          trip.emplace_back(static_cast<int>(r + s), static_cast<int>(r), ac[static_cast<std::size_t>(s)]);
          if (s != 0) trip.emplace_back(static_cast<int>(r), static_cast<int>(r + s), ac[static_cast<std::size_t>(s)]);
        }
      Eigen::SparseMatrix<double> N(static_cast<int>(NK), static_cast<int>(NK));
      N.setFromTriplets(trip.begin(), trip.end());
      Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(N);
      if (solver.info() != Eigen::Success) throw PrecisionError("point-value deconvolution is singular");
      Eigen::VectorXd rhs(NK);
      for_lines(cur, next, d, [&](std::int64_t ib, std::int64_t ob, std::int64_t s) {
        // rhs_k = sum_m phi(m - k) f_m with m = k + a + i
        for (std::int64_t k = 0; k < NK; ++k) {
          double acc = 0.0;
          for (int i = 0; i < L; ++i) {
            std::int64_t m = k + i; // (k0 + k) + a + i - M0
            if (m >= 0 && m < NM) acc += ints.values[static_cast<std::size_t>(i)] * cur.v[static_cast<std::size_t>(ib + m * s)];
          }
          rhs(k) = acc;
        }
        Eigen::VectorXd x = solver.solve(rhs);
        for (std::int64_t k = 0; k < NK; ++k) next.v[static_cast<std::size_t>(ob + k * s)] = x(k);
      });
    }
    for (double& x : next.v) x *= axis_scale;
    cur = std::move(next);
  }
  return cur;
}

Block gather_scaling(const CoeffField& c) {
  const int n = c.dim();
  if (c.scaling().empty()) return {};
  Index lo, hi;
  for (int d = 0; d < kMaxDim; ++d) {
    lo[d] = std::numeric_limits<std::int64_t>::max();
    hi[d] = std::numeric_limits<std::int64_t>::min();
  }
  for (const auto& [cube, v] : c.scaling())
    for (int d = 0; d < n; ++d) {
      lo[d] = std::min(lo[d], cube.k[d]);
      hi[d] = std::max(hi[d], cube.k[d] + 1);
    }
  Index ext;
  for (int d = 0; d < kMaxDim; ++d) ext[d] = d < n ? hi[d] - lo[d] : 1;
  Block b(n, lo, ext);
  for (const auto& [cube, v] : c.scaling()) b.ref(cube.k) = v;
  return b;
}

std::vector<Block> gather_details(const CoeffField& c, int j) {
  const int n = c.dim();
  std::vector<Block> out(std::size_t{1} << n);
  TensorIndex start;
  start.cube.n = n;
  start.cube.j = j;
  start.cube.k = {std::numeric_limits<std::int64_t>::min(), std::numeric_limits<std::int64_t>::min(),
                  std::numeric_limits<std::int64_t>::min()};
  start.lambda = 0;
  auto first = c.wavelet().lower_bound(start);
  auto last = first;
  Index lo, hi;
  for (int d = 0; d < kMaxDim; ++d) {
    lo[d] = std::numeric_limits<std::int64_t>::max();
    hi[d] = std::numeric_limits<std::int64_t>::min();
  }
  for (; last != c.wavelet().end() && last->first.cube.j == j; ++last)
    for (int d = 0; d < n; ++d) {
      lo[d] = std::min(lo[d], last->first.cube.k[d]);
      hi[d] = std::max(hi[d], last->first.cube.k[d] + 1);
    }
  if (first == last) return out;
  Index ext;
  for (int d = 0; d < kMaxDim; ++d) ext[d] = d < n ? hi[d] - lo[d] : 1;
  for (unsigned l = 1; l < out.size(); ++l) out[l] = Block(n, lo, ext);
  for (auto it = first; it != last; ++it) out[it->first.lambda].ref(it->first.cube.k) = it->second;
  return out;
}

std::array<const ProfileSamples*, kMaxDim> pick(unsigned lambda, int n, const ProfileSamples& zero,
                                                const ProfileSamples& one) {
  std::array<const ProfileSamples*, kMaxDim> p{&zero, &zero, &zero};
  for (int d = 0; d < n; ++d) p[static_cast<std::size_t>(d)] = (lambda >> d) & 1u ? &one : &zero;
  return p;
}

} // namespace ppk::detail
