#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "ppk/errors.hpp"
#include "ppk/wavelet_core.hpp"

using namespace ppk;
using Catch::Matchers::WithinAbs;

TEST_CASE("daubechies filters match tabulated taps") {
  // Ten Lectures on Wavelets, table 6.1 (normalized to sum sqrt2)
  const std::vector<double> db3 = {0.3326705529500825, 0.8068915093110924, 0.4598775021184914,
                                   -0.1350110200102546, -0.0854412738820267, 0.0352262918857095};
  const std::vector<double> db4 = {0.2303778133088964, 0.7148465705529154, 0.6308807679298587,
                                   -0.0279837694168599, -0.1870348117190931, 0.0308413818355607,
                                   0.0328830116668852, -0.0105974017850690};
  auto h3 = daubechies_lowpass(3);
  auto h4 = daubechies_lowpass(4);
  REQUIRE(h3.size() == db3.size());
  REQUIRE(h4.size() == db4.size());
  for (std::size_t i = 0; i < db3.size(); ++i) CHECK_THAT(h3[i], WithinAbs(db3[i], 1e-13));
  for (std::size_t i = 0; i < db4.size(); ++i) CHECK_THAT(h4[i], WithinAbs(db4[i], 1e-13));

  auto h2 = daubechies_lowpass(2);
  CHECK_THAT(h2[0], WithinAbs((1 + std::sqrt(3.0)) / (4 * std::sqrt(2.0)), 1e-16));
}

TEST_CASE("filter invariants hold for every supported order") {
  for (int p = 1; p <= 10; ++p) {
    auto fb = FilterBank::from_lowpass(daubechies_lowpass(p), 1 - p);
    auto r = fb.residuals();
    INFO("p = " << p);
    CHECK(r.sum < 1e-12);
    CHECK(r.orthonormality < 1e-12);
    CHECK(r.flip == 0.0);
    CHECK(fb.length() == 2 * p);
  }
  CHECK_THROWS_AS(daubechies_lowpass(0), RangeError);
  CHECK_THROWS_AS(daubechies_lowpass(11), RangeError);
}

TEST_CASE("haar cascade is the half-open indicator") {
  auto sys = haar_system(6);
  const auto& phi = sys.phi_samples();
  const auto& psi = sys.psi_samples();
  REQUIRE(phi.size() == 65);
  for (std::size_t t = 0; t < 64; ++t) {
    CHECK(phi.values()[t] == 1.0);
    CHECK(psi.values()[t] == (t < 32 ? 1.0 : -1.0));
  }
  CHECK(phi.values()[64] == 0.0);
  CHECK(psi.values()[64] == 0.0);
  CHECK_THAT(moment_integral(psi, 1), WithinAbs(-0.25, 1e-12));
  CHECK_THAT(moment_integral(phi, 0), WithinAbs(1.0, 1e-15));
}

TEST_CASE("db2 integer samples have the closed form") {
  auto [phi, psi] = cascade_sample(FilterBank::from_lowpass(daubechies_lowpass(2), -1), 3);
  // support [-1, 2]; phi(0) = (1+sqrt3)/2, phi(1) = (1-sqrt3)/2
  CHECK(phi.lo()[0] == -8);
  CHECK_THAT(phi.value_at({0, 0, 0}), WithinAbs((1 + std::sqrt(3.0)) / 2, 1e-13));
  CHECK_THAT(phi.value_at({8, 0, 0}), WithinAbs((1 - std::sqrt(3.0)) / 2, 1e-13));
  CHECK(phi.value_at({-8, 0, 0}) == 0.0);
  CHECK(phi.value_at({16, 0, 0}) == 0.0);
}

TEST_CASE("cascade normalization and vanishing moments") {
  for (int p = 1; p <= 6; ++p) {
    auto sys = daubechies_system(p, 12);
    INFO("p = " << p);
    CHECK_THAT(moment_integral(sys.phi_samples(), 0), WithinAbs(1.0, 1e-8));
    for (int l = 0; l < p; ++l) CHECK(std::abs(moment_integral(sys.psi_samples(), l)) < 1e-6);
  }
}

TEST_CASE("cascade range checks") {
  auto fb = FilterBank::from_lowpass(daubechies_lowpass(2), -1);
  CHECK_THROWS_AS(cascade_sample(fb, 0), RangeError);
  CHECK_THROWS_AS(cascade_sample(fb, 17), RangeError);
  // a lowpass without a fixed point at the integers
  auto bad = FilterBank::from_lowpass({0.5, 0.5, 0.5, 0.5}, -1);
  CHECK_THROWS_AS(cascade_sample(bad, 4), ConvergenceError);
}

TEST_CASE("profiles subsample and refine consistently") {
  auto sys = daubechies_system(3, 8);
  auto coarse = sys.profile(Profile::psi, 5);
  auto fine = sys.profile(Profile::psi, 10);
  for (std::size_t t = 0; t < coarse.values.size(); ++t)
    CHECK_THAT(coarse.values[t], WithinAbs(fine.values[t * 32], 1e-12));
  auto sq = sys.profile(Profile::phi_squared, 4);
  auto base = sys.profile(Profile::phi, 4);
  for (std::size_t t = 0; t < sq.values.size(); ++t) CHECK(sq.values[t] == base.values[t] * base.values[t]);
  CHECK_THROWS_AS(sys.profile(Profile::phi, -1), PrecisionError);
}

TEST_CASE("point evaluation matches samples") {
  auto sys = daubechies_system(2, 10);
  CHECK_THAT(sys.phi(0.0), WithinAbs((1 + std::sqrt(3.0)) / 2, 1e-12));
  CHECK(sys.phi(-1.5) == 0.0);
  CHECK(sys.phi(2.5) == 0.0);
  auto h = haar_system(4);
  CHECK(h.psi(0.25) == 1.0);
  CHECK(h.psi(0.75) == -1.0);
  CHECK(h.phi(1.0) == 0.0);
}

TEST_CASE("filter text round trip") {
  auto fb = FilterBank::from_lowpass(daubechies_lowpass(5), -4);
  std::stringstream ss;
  fb.write(ss);
  auto back = FilterBank::read(ss);
  CHECK(back.offset == -4);
  REQUIRE(back.lowpass.size() == fb.lowpass.size());
  for (std::size_t i = 0; i < fb.lowpass.size(); ++i) CHECK(back.lowpass[i] == fb.lowpass[i]);
  std::stringstream bad("x\n");
  CHECK_THROWS_AS(FilterBank::read(bad), FormatError);
}

TEST_CASE("wavelet names") {
  CHECK(wavelet_by_name("haar").is_haar());
  CHECK(wavelet_by_name("db3", 6).moments() == 3);
  CHECK(wavelet_by_name("db3", 6).support_lo() == -2);
  CHECK(wavelet_by_name("db3", 6).support_hi() == 3);
  CHECK_THROWS_AS(wavelet_by_name("sym4"), UsageError);
  CHECK_THROWS_AS(wavelet_by_name("db11"), RangeError);
}

TEST_CASE("smoothness order grows with p") {
  int prev = -1;
  for (int p = 1; p <= 10; ++p) {
    int s = daubechies_system(p, 4).smoothness();
    CHECK(s >= prev);
    prev = s;
  }
  CHECK(daubechies_system(3, 4).smoothness() >= 1);
}
