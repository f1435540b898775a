#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ppk/mra.hpp"

namespace ppk {

// Pi1 = sum_j (P_j f)(Q_j g), Pi2 = sum_j (Q_j f)(P_j g),
// Pi3 = equal-scale wavelet pairs off the diagonal, Pi4 = sum <f,psi><g,psi> psi^2.
struct ParaproductResult {
  std::array<GridFunction, 4> components;
  GridFunction value; // Pi1 + Pi2 + Pi3 + Pi4
  GridFunction S;     // Pi4
  GridFunction T;     // Pi1 + Pi2 + Pi3
  GridFunction coarse; // (P_jmin f)(P_jmin g); zero when neither field has a scaling part
  std::array<std::int64_t, 4> terms{};
  std::int64_t term_count = 0;
  double residual = 0;          // max |value + coarse - f g| on the grid
  double relative_residual = 0; // residual / (||f||_2 ||g||_2)
};

// Evaluation box: explicit, or the union of both support boxes (lattice of j_min).
GridFunction pi(int i, const CoeffField& f, const CoeffField& g, const WaveletSystem& sys, int K_out);
GridFunction pi(int i, const CoeffField& f, const CoeffField& g, const WaveletSystem& sys, int K_out,
                const Index& lo, const Index& hi);
ParaproductResult renormalize(const CoeffField& f, const CoeffField& g, const WaveletSystem& sys, int K_out);
ParaproductResult renormalize(const CoeffField& f, const CoeffField& g, const WaveletSystem& sys, int K_out,
                              const Index& lo, const Index& hi);
void paraproduct_box(const CoeffField& f, const CoeffField& g, const WaveletSystem& sys, int K_out, Index& lo,
                     Index& hi);

// CSV per component plus manifest.json with the term counts and residuals.
void write_bundle(const std::filesystem::path& dir, const ParaproductResult& r);

// Truncated trilinear kernel of Pi_i: Pi_i(f,g)(x) = int int K(x,y,z) f(y) g(z) dy dz.
struct KernelOptions {
  int j_lo = -6;
  int j_hi = 10; // inclusive
  // only cubes I (and I') inside [region_lo, region_hi) contribute, when set
  std::optional<Point> region_lo, region_hi;
};

struct KernelValue {
  double value = 0;
  double tail = 0; // |contribution of the two boundary scales|, a proxy for the truncation error
};

KernelValue kernel_value(int i, const WaveletSystem& sys, int n, const Point& x, const Point& y, const Point& z,
                         const KernelOptions& opt = {});

struct ProbeTriple {
  Point x, y, z;
  Point x_shift; // x' used for the regularity quotient
};

struct KernelProbe {
  std::vector<ProbeTriple> points;
  std::vector<double> distance; // |x-y| + |x-z| + |y-z|
  std::vector<double> values;
  std::vector<double> tails;
  std::vector<double> quotients; // |K(x,y,z) - K(x',y,z)| / |x-x'|
  double fitted_slope = 0;
  double fitted_constant = 0;
  double regularity_slope = 0;
  double regularity_constant = 0;
  double regularity_spread = 0; // max/min of quotient * distance^(2n+1)
};

// Self-similar probes at separations s = 2^-t: x = 3s/4, y = z = 7s/4 along every axis
// when `diagonal_yz`, otherwise z = x - s; x' = x + s/4.
std::vector<ProbeTriple> self_similar_probes(int n, int t_first, int t_last, bool diagonal_yz);

KernelProbe kernel_probe(int i, const WaveletSystem& sys, int n, const std::vector<ProbeTriple>& probes,
                         const KernelOptions& opt = {});

struct MoleculeReport {
  int order = 0;                // |gamma|
  double integral = 0;          // int |I|^{1/2} phi_I psi_{I + l_I k'}
  double constant = 0;          // C used for the decay bound
  double worst_ratio = 0;       // max over grid of |d^gamma F| / bound
  std::int64_t points = 0;
  std::int64_t violations = 0;  // points with |d^gamma F| > C * bound
  bool identically_zero = false;
};

// Fits C at the unit cube I_{0,0} with the same shift and lambda.
double molecule_constant(const WaveletSystem& sys, int n, const Index& shift, unsigned lambda, int M,
                         const std::array<int, kMaxDim>& gamma);
// constant <= 0 fits C on this cube instead.
MoleculeReport molecule_check(const WaveletSystem& sys, const DyadicCube& I, const Index& shift, unsigned lambda,
                              int M, const std::array<int, kMaxDim>& gamma, double constant = 0);

struct Pi2SplitReport {
  double g_mean = 0;      // g_R
  double c = 0;           // normalizing constant of h2
  double identity_residual = 0;  // max |Pi2(a,g) - h1 - c h2 g_R| / max |Pi2(a,g)|
  double lowpass_residual = 0;   // max |Pi2(a,g) - a P_j g - Pi2(a,b)| / max |Pi2(a,g)|
  double h2_l2 = 0;
  double h2_bound = 0;    // |2mR|^{1/2-1/p}
  double h2_integral = 0;
  bool h2_support_ok = false;
  bool h2_is_atom = false;
  std::size_t b_entries = 0;
  GridFunction pi2, h1, h2;
};

// a: H^p atom on R with wavelet entries at scales >= j(R); g sampled on a box aligned to
// 2^-j(R) that contains 2mR.
Pi2SplitReport pi2_split_check(const CoeffField& a, const DyadicCube& R, const GridFunction& g, double p,
                               const WaveletSystem& sys);

} // namespace ppk
