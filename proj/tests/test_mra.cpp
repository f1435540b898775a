#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "ppk/errors.hpp"
#include "ppk/mra.hpp"
#include "ppk/random.hpp"

using namespace ppk;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

double sum_squares(const GridFunction& f) {
  double s = 0;
  for (double v : f.values()) s += v * v;
  return s * f.cell_volume();
}

double max_entry_except(const CoeffField& c, const TensorIndex& skip) {
  double m = 0;
  for (const auto& [i, v] : c.wavelet())
    if (!(i == skip)) m = std::max(m, std::abs(v));
  for (const auto& [i, v] : c.scaling()) m = std::max(m, std::abs(v));
  return m;
}

} // namespace

TEST_CASE("dyadic cube geometry") {
  DyadicCube q{2, 3, {5, -3, 0}};
  CHECK(q.side() == 0.125);
  CHECK(q.volume() == 0.015625);
  CHECK(q.parent().k[0] == 2);
  CHECK(q.parent().k[1] == -2);
  CHECK(q.parent().contains(q));
  CHECK_FALSE(q.contains(q.parent()));
  CHECK(q.center(1) == (-3 + 0.5) * 0.125);
}

TEST_CASE("haar tensor samples") {
  auto haar = haar_system(10);
  auto psi = tensor_sample(haar, TensorIndex{{1, 0, {0, 0, 0}}, 1}, 3);
  REQUIRE(psi.lo()[0] == 0);
  for (int m = 0; m < 8; ++m) CHECK(psi.value_at({m, 0, 0}) == (m < 4 ? 1.0 : -1.0));
  CHECK(psi.value_at({8, 0, 0}) == 0.0);

  auto t = tensor_sample(haar, TensorIndex{{2, 1, {0, 0, 0}}, 1}, 4);
  // 2 psi(2x1) phi(2x2) on [0,1/2)^2
  CHECK(t.value_at({1, 3, 0}) == 2.0);
  CHECK(t.value_at({5, 3, 0}) == -2.0);
  CHECK(t.value_at({9, 3, 0}) == 0.0);
  CHECK_THAT(sum_squares(t), WithinAbs(1.0, 1e-14));
}

TEST_CASE("daubechies tensor samples stay inside mI") {
  auto db2 = daubechies_system(2, 10);
  const int K = 10;
  auto s = tensor_sample(db2, TensorIndex{{1, 2, {3, 0, 0}}, 1}, K);
  const double m = 3.0, side = 0.25, center = 3.5 * 0.25;
  for (std::size_t i = 0; i < s.size(); ++i) {
    double x = s.point(i)[0];
    if (s.values()[i] != 0.0) {
      CHECK(x >= center - m * side / 2 - 1e-15);
      CHECK(x <= center + m * side / 2 + 1e-15);
    }
  }
  CHECK_THAT(sum_squares(s), WithinAbs(1.0, 2e-3)); // Riemann sum of a rough function
  CHECK_THROWS_AS(tensor_sample(db2, TensorIndex{{1, 5, {0, 0, 0}}, 1}, 4), PrecisionError);
}

TEST_CASE("analyze recovers single entries") {
  for (const char* name : {"haar", "db2", "db4"}) {
    auto sys = wavelet_by_name(name, 12);
    INFO(name);
    for (int n = 1; n <= 2; ++n) {
      TensorIndex idx{{n, 2, {1, 0, 0}}, n == 1 ? 1u : 2u};
      if (n == 2) idx.cube.k[1] = 2;
      CoeffField c(n, 0, 4);
      c.add_wavelet(idx, 1.0);
      auto f = synthesize(c, sys, n == 1 ? 10 : 6);
      auto back = analyze(f, sys, 0, 4);
      CHECK_THAT(back.wavelet_at(idx), WithinAbs(1.0, 1e-10));
      CHECK(max_entry_except(back, idx) < 1e-10);

      // phi_I at j_min
      CoeffField s(n, 2, 4);
      s.add_scaling(idx.cube, 1.0);
      auto g = synthesize(s, sys, n == 1 ? 10 : 6);
      auto sb = analyze(g, sys, 2, 4);
      CHECK_THAT(sb.scaling_at(idx.cube), WithinAbs(1.0, 1e-10));
    }
  }
}

TEST_CASE("tensor_sample and synthesize agree") {
  auto sys = daubechies_system(3, 12);
  TensorIndex idx{{2, 1, {0, 1, 0}}, 3};
  CoeffField c(2, 0, 2);
  c.add_wavelet(idx, 1.0);
  auto a = tensor_sample(sys, idx, 6);
  auto b = synthesize(c, sys, 6);
  CHECK(max_abs_difference(a, b) < 1e-12);
}

TEST_CASE("round trips and Parseval on random fields") {
  for (const char* name : {"haar", "db2", "db3"}) {
    auto sys = wavelet_by_name(name, 12);
    const double tol = sys.is_haar() ? 1e-12 : 1e-8;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      RandomFieldSpec spec;
      spec.n = 1 + static_cast<int>(seed % 2);
      spec.j_min = 0;
      spec.j_max = 4;
      spec.span = 2;
      spec.entries = 60;
      spec.with_scaling = true;
      auto c = random_field(seed, spec);
      const int K = spec.n == 1 ? 9 : 6;
      auto f = synthesize(c, sys, K);
      auto back = analyze(f, sys, 0, 4);
      INFO(name << " seed " << seed);
      CHECK(max_abs_difference(back, c) <= tol * c.max_abs());
      // energy of the analysis equals the energy of the input coefficients
      CHECK_THAT(back.l2_norm(), WithinRel(c.l2_norm(), tol));
      if (sys.is_haar()) CHECK_THAT(std::sqrt(sum_squares(f)), WithinRel(c.l2_norm(), 1e-12));
    }
  }
}

TEST_CASE("Parseval against quadrature for a random 2-D grid") {
  auto haar = haar_system(8);
  SplitMix64 rng(42);
  auto f = GridFunction::from_function(2, 8, {0, 0, 0}, {256, 256, 1}, [&](const Point&) { return rng.uniform(-1, 1); });
  auto c = analyze(f, haar, 0, 6);
  // j_max < K drops the two finest scales, so compare against the full range
  auto full = analyze(f, haar, 0, 8);
  CHECK_THAT(full.l2_norm() * full.l2_norm(), WithinRel(sum_squares(f), 1e-12));
  CHECK(c.l2_norm() < full.l2_norm());
  auto back = synthesize(full, haar, 8, f.lo(), f.hi());
  CHECK(max_abs_difference(back, f) < 1e-12);
}

TEST_CASE("synthesize after analyze on band-limited grids") {
  auto sys = daubechies_system(2, 12);
  RandomFieldSpec spec;
  spec.j_max = 4;
  spec.span = 1;
  spec.entries = 30;
  auto c = random_field(9, spec);
  auto f = synthesize(c, sys, 8);
  auto again = synthesize(analyze(f, sys, 0, 4), sys, 8, f.lo(), f.hi());
  CHECK(max_abs_difference(again, f) < 1e-10);
}

TEST_CASE("nested ranges agree") {
  auto sys = daubechies_system(2, 12);
  RandomFieldSpec spec;
  spec.j_max = 5;
  spec.span = 2;
  auto f = synthesize(random_field(3, spec), sys, 9);
  auto wide = analyze(f, sys, 0, 5);
  auto narrow = analyze(f, sys, 0, 3);
  for (const auto& [i, v] : narrow.wavelet()) CHECK_THAT(wide.wavelet_at(i), WithinAbs(v, 1e-14));
  for (const auto& [i, v] : wide.wavelet())
    if (i.cube.j < 3) CHECK_THAT(narrow.wavelet_at(i), WithinAbs(v, 1e-14));
}

TEST_CASE("analyze geometry checks") {
  auto haar = haar_system(6);
  GridFunction f(1, 6, {3, 0, 0}, {64, 1, 1});
  CHECK_THROWS_AS(analyze(f, haar, 0, 4), GeometryError);
  GridFunction g(1, 6, {0, 0, 0}, {64, 1, 1});
  CHECK_THROWS_AS(analyze(g, haar, 0, 7), GeometryError);
  CHECK_NOTHROW(analyze(g, haar, 2, 6));
}

TEST_CASE("empty field synthesizes to zero") {
  auto sys = daubechies_system(2, 8);
  CoeffField c(2, 0, 3);
  auto f = synthesize(c, sys, 5);
  CHECK(f.size() > 0);
  CHECK(f.max_abs() == 0.0);
}

TEST_CASE("projections") {
  auto sys = daubechies_system(2, 12);
  TensorIndex idx{{1, 2, {3, 0, 0}}, 1};
  CoeffField w(1, 0, 4);
  w.add_wavelet(idx, 1.0);
  auto q = project(w, sys, 2, Subspace::W);
  CHECK(q.size() == 1);
  CHECK(q.wavelet_at(idx) == 1.0);
  auto p = project(w, sys, 2, Subspace::V);
  CHECK(p.max_abs() == 0.0);
  CHECK_THROWS_AS(project(w, sys, 5, Subspace::V), RangeError);
  CHECK_THROWS_AS(project(w, sys, 4, Subspace::W), RangeError);

  RandomFieldSpec spec;
  spec.j_max = 4;
  spec.span = 2;
  spec.with_scaling = true;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto f = random_field(seed, spec);
    for (int j = 0; j < 4; ++j) {
      auto next = project(f, sys, j + 1, Subspace::V);
      auto pj = project(f, sys, j, Subspace::V);
      auto qj = project(f, sys, j, Subspace::W);
      // P_j + Q_j re-expressed one level up
      CoeffField sum(1, j, j + 1);
      for (const auto& [c, v] : pj.scaling()) sum.add_scaling(c, v);
      for (const auto& [i, v] : qj.wavelet()) sum.add_wavelet(i, v);
      auto lifted = project(sum, sys, j + 1, Subspace::V);
      CHECK(max_abs_difference(lifted, next) < 1e-10);
    }
  }
}

TEST_CASE("bilinear field helpers") {
  CoeffField a(1, 0, 3), b(1, 0, 2);
  a.add_wavelet({{1, 1, {1, 0, 0}}, 1}, 2.0);
  b.add_wavelet({{1, 1, {1, 0, 0}}, 1}, 1.0);
  b.add_scaling({1, 0, {0, 0, 0}}, 3.0);
  auto c = combine(1.0, a, -2.0, b);
  CHECK(c.j_max() == 3);
  CHECK(c.wavelet_at({{1, 1, {1, 0, 0}}, 1}) == 0.0);
  CHECK(c.scaling_at({1, 0, {0, 0, 0}}) == -6.0);
  CHECK_THROWS_AS(a.add_wavelet({{1, 3, {0, 0, 0}}, 1}, 1.0), RangeError);
  CHECK_THROWS_AS(a.add_scaling({1, 1, {0, 0, 0}}, 1.0), RangeError);
  CHECK_THROWS_AS(a.add_wavelet({{1, 1, {0, 0, 0}}, 2}, 1.0), RangeError);
}

TEST_CASE("coefficient and grid file formats") {
  RandomFieldSpec spec;
  spec.n = 2;
  spec.j_max = 3;
  spec.span = 2;
  spec.entries = 20;
  spec.with_scaling = true;
  auto c = random_field(5, spec);
  std::stringstream ss;
  write_jsonl(ss, c);
  auto back = read_jsonl(ss);
  CHECK(back.dim() == 2);
  CHECK(back.j_min() == 0);
  CHECK(max_abs_difference(back, c) == 0.0);

  auto sys = haar_system(6);
  auto f = synthesize(c, sys, 4);
  std::stringstream csv;
  write_csv(csv, f);
  auto g = read_csv(csv);
  CHECK(g.same_grid(f));
  CHECK(max_abs_difference(g, f) == 0.0);

  std::stringstream bin;
  write_binary(bin, f);
  auto h = read_binary(bin);
  CHECK(h.same_grid(f));
  CHECK(max_abs_difference(h, f) == 0.0);

  std::stringstream bad("{\"j\": 0}\n");
  CHECK_THROWS_AS(read_jsonl(bad), FormatError);
}

TEST_CASE("random fields are deterministic") {
  RandomFieldSpec spec;
  auto a = random_field(7, spec), b = random_field(7, spec);
  CHECK(max_abs_difference(a, b) == 0.0);
  CHECK(a.wavelet().size() == b.wavelet().size());
  spec.j_max = spec.j_min;
  CHECK(random_field(0, spec).empty());
  SplitMix64 r(0);
  // reference outputs of SplitMix64 seeded with 0
  CHECK(r.next() == 0xE220A8397B1DCDAFULL);
  CHECK(r.next() == 0x6E789E6AA1B965F4ULL);
}
