#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "ppk/divcurl.hpp"
#include "ppk/errors.hpp"
#include "ppk/random.hpp"

using namespace ppk;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double kTau = 2 * std::numbers::pi;

GridFunction periodic(int n, int K, const std::function<double(const Point&)>& f) {
  const std::int64_t N = std::int64_t{1} << K;
  return GridFunction::from_function(n, K, {0, 0, 0}, {N, n > 1 ? N : 1, n > 2 ? N : 1}, f);
}

double inner(const VectorField& a, const VectorField& b) {
  double s = 0;
  for (int i = 0; i < a.dim(); ++i) s += (a.components[static_cast<std::size_t>(i)] * b.components[static_cast<std::size_t>(i)]).integral();
  return s;
}

double energy(const VectorField& a) { return inner(a, a); }

} // namespace

TEST_CASE("Hilbert transform of a cosine") {
  const auto c = periodic(1, 6, [](const Point& x) { return std::cos(kTau * 5 * x[0]); });
  const auto s = periodic(1, 6, [](const Point& x) { return std::sin(kTau * 5 * x[0]); });
  CHECK(max_abs_difference(riesz_apply(0, c), s) <= 1e-10);
}

TEST_CASE("Riesz transforms agree with a direct DFT") {
  for (int n : {1, 2}) {
    const int K = n == 1 ? 5 : 3;
    const auto f = random_band_limited(n, n, K, n == 1 ? 15 : 3);
    for (int i = 0; i < n; ++i) {
      const auto fast = riesz_apply(i, f);
      const auto slow = oracle::riesz_direct(i, f);
      for (std::size_t t = 0; t < f.size(); ++t) CHECK_THAT(fast.values()[t], WithinAbs(slow[t], 1e-12));
    }
  }
  // Nyquist content on the transformed axis is dropped, as in the oracle
  const auto alt = periodic(1, 3, [](const Point& x) { return std::cos(kTau * 4 * x[0]); });
  const auto slow = oracle::riesz_direct(0, alt);
  for (std::size_t t = 0; t < alt.size(); ++t) CHECK_THAT(riesz_apply(0, alt).values()[t], WithinAbs(slow[t], 1e-12));
}

TEST_CASE("single 2-D mode gets the multiplier -i k_i / |k|") {
  // cos(2 pi (3x + 4y)): R_i maps it to (k_i/|k|) sin(...)
  const auto f = periodic(2, 4, [](const Point& x) { return std::cos(kTau * (3 * x[0] + 4 * x[1])); });
  for (int i = 0; i < 2; ++i) {
    const double k = i == 0 ? 3 : 4;
    const auto expect = periodic(2, 4, [&](const Point& x) { return k / 5 * std::sin(kTau * (3 * x[0] + 4 * x[1])); });
    CHECK(max_abs_difference(riesz_apply(i, f), expect) <= 1e-12);
  }
}

TEST_CASE("sum of squared Riesz transforms is minus the identity") {
  for (int n : {1, 2, 3}) {
    const int K = n == 3 ? 4 : 6;
    const auto f = random_band_limited(40 + n, n, K, 3);
    CHECK(riesz_roundtrip_residual(f) <= 1e-10);
  }
}

TEST_CASE("Riesz transforms commute") {
  const auto f = random_band_limited(3, 2, 5, 6);
  CHECK(max_abs_difference(riesz_apply(0, riesz_apply(1, f)), riesz_apply(1, riesz_apply(0, f))) <= 1e-12);
}

TEST_CASE("spectral derivative of a mode") {
  const auto f = periodic(2, 5, [](const Point& x) { return std::sin(kTau * (2 * x[0] - x[1])); });
  const auto d1 = periodic(2, 5, [](const Point& x) { return -kTau * std::cos(kTau * (2 * x[0] - x[1])); });
  CHECK(max_abs_difference(spectral_derivative(1, f), d1) <= 1e-10);
  CHECK_THROWS_AS(spectral_derivative(2, f), RangeError);
}

TEST_CASE("curl-free and div-free constructors") {
  const auto f = random_band_limited(7, 2, 6, 5), u = random_band_limited(8, 2, 6, 5);
  const auto F = curl_free_field(f);
  const auto G = div_free_field(u);
  CHECK(F.kind == FieldKind::curl_free);
  CHECK(G.kind == FieldKind::div_free);
  CHECK(curl_residual(F) <= 1e-10);
  CHECK(div_residual(G) <= 1e-10);
  CHECK(riesz_sum_residual(G) <= 1e-10);
  // -sum R_i F_i gives f back
  GridFunction back = riesz_apply(0, F.components[0]);
  back += riesz_apply(1, F.components[1]);
  back *= -1.0;
  CHECK(max_abs_difference(back, f) <= 1e-10 * f.max_abs());
  // a generic field fails both
  VectorField V{{f, u}, FieldKind::general};
  CHECK(curl_residual(V) > 1e-3);
  CHECK(div_residual(V) > 1e-3);
  // zero stream function
  const auto Z = div_free_field(periodic(2, 4, [](const Point&) { return 0.0; }));
  CHECK(Z.components[0].max_abs() == 0.0);
}

TEST_CASE("constructor preconditions") {
  const auto u3 = random_band_limited(1, 3, 3, 2);
  CHECK_THROWS_AS(div_free_field(u3), CapabilityError);
  const auto c = periodic(2, 4, [](const Point& x) { return 1 + std::cos(kTau * x[0]); });
  CHECK_THROWS_AS(curl_free_field(c), DomainError);
  GridFunction shifted(1, 4, {1, 0, 0}, {17, 1, 1});
  CHECK_FALSE(is_periodic_grid(shifted));
  CHECK_THROWS_AS(riesz_apply(0, shifted), DomainError);
  CHECK_THROWS_AS(random_band_limited(1, 1, 4, 8), RangeError);
}

TEST_CASE("Helmholtz projection") {
  VectorField V;
  for (int i = 0; i < 3; ++i) V.components.push_back(random_band_limited(60 + i, 3, 4, 3));
  const auto [C, D] = helmholtz_project(V);
  CHECK(curl_residual(C) <= 1e-10);
  CHECK(div_residual(D) <= 1e-10);
  for (int i = 0; i < 3; ++i)
    CHECK(max_abs_difference(C.components[static_cast<std::size_t>(i)] + D.components[static_cast<std::size_t>(i)],
                             V.components[static_cast<std::size_t>(i)]) <= 1e-12);
  CHECK(std::abs(inner(C, D)) <= 1e-10 * energy(V));
  // idempotence on each part
  const auto [C2, D2] = helmholtz_project(C);
  CHECK(std::sqrt(energy(D2)) <= 1e-12 * std::sqrt(energy(C)));
  const auto [C3, D3] = helmholtz_project(D);
  CHECK(std::sqrt(energy(C3)) <= 1e-12 * std::sqrt(energy(D)));
}

TEST_CASE("almost-diagonal weight") {
  const DyadicCube I{2, 3, {1, 2, 0}};
  CHECK(almost_diag_weight(I, I, 0.5) == 1.0);
  SplitMix64 rng(5);
  for (int t = 0; t < 1000; ++t) {
    const int n = 1 + static_cast<int>(rng.below(3));
    DyadicCube a{n, static_cast<int>(rng.below(12)) - 4, {0, 0, 0}}, b{n, static_cast<int>(rng.below(12)) - 4, {0, 0, 0}};
    for (int d = 0; d < n; ++d) {
      a.k[d] = static_cast<std::int64_t>(rng.below(64)) - 32;
      b.k[d] = static_cast<std::int64_t>(rng.below(64)) - 32;
    }
    const double delta = 0.5 * (1 - rng.uniform());
    const double v = almost_diag_weight(a, b, delta);
    CHECK_THAT(v, WithinRel(oracle::p_delta(a, b, delta), 1e-12));
    CHECK(v > 0);
    CHECK(v <= 1);
  }
  // far apart at the same scale
  const DyadicCube J{1, 0, {1000, 0, 0}}, J0{1, 0, {0, 0, 0}};
  CHECK_THAT(almost_diag_weight(J0, J, 0.25), WithinRel(std::pow(2.0 / 1000, 1.25), 0.01));
  CHECK_THROWS_AS(almost_diag_weight(I, I, 0.0), RangeError);
  CHECK_THROWS_AS(almost_diag_weight(I, I, 0.6), RangeError);
}

TEST_CASE("div-curl experiment report") {
  const auto sys = haar_system();
  const auto F = curl_free_field(random_band_limited(1, 2, 6, 4));
  const auto G = div_free_field(random_band_limited(2, 2, 6, 4));
  const auto rep = divcurl_experiment(F, G, 0.95, sys);
  CHECK(rep["K"] == 6);
  CHECK(std::isfinite(rep["ratio"].get<double>()));
  CHECK(rep["ratio"].get<double>() > 0);
  for (const char* k : {"FG_weighted_Hp", "A_H1", "B_Hp_w"}) CHECK(rep["norms"].contains(k));
  CHECK(rep["residuals"]["curl"].get<double>() <= 1e-10);
  CHECK(rep["residuals"]["riesz_roundtrip"].get<double>() <= 1e-10);
  CHECK(rep["residuals"]["product_reconstruction"].get<double>() <= 1e-12);
  CHECK(rep["residuals"]["A_integral"].get<double>() <= 1e-12);
  // the ratio is scale invariant
  VectorField F2 = F;
  for (auto& c : F2.components) c *= 3.0;
  CHECK_THAT(divcurl_experiment(F2, G, 0.95, sys)["ratio"].get<double>(), WithinRel(rep["ratio"].get<double>(), 1e-12));
  // G constant: the augmented norm keeps the ratio finite
  const auto one = periodic(2, 6, [](const Point&) { return 1.0; });
  VectorField Gc{{one, 2.0 * one}, FieldKind::div_free};
  CHECK(std::isfinite(divcurl_experiment(F, Gc, 0.95, sys)["ratio"].get<double>()));
  // F = 0
  VectorField F0 = F;
  for (auto& c : F0.components) c *= 0.0;
  const auto z = divcurl_experiment(F0, G, 0.95, sys);
  CHECK(z["norms"]["FG_weighted_Hp"].get<double>() == 0.0);
  CHECK(z["ratio"].get<double>() == 0.0);
  // swapped roles fail the kind checks
  CHECK_THROWS_AS(divcurl_experiment(G, F, 0.95, sys), PreconditionError);
}

TEST_CASE("div-curl with a smooth window for Daubechies") {
  const auto sys = daubechies_system(2);
  const auto F = curl_free_field(random_band_limited(1, 2, 6, 4));
  const auto G = div_free_field(random_band_limited(2, 2, 6, 4));
  const auto rep = divcurl_experiment(F, G, 0.95, sys);
  CHECK(rep["windowed"] == true);
  CHECK(std::isfinite(rep["ratio"].get<double>()));
}
