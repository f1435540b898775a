#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ppk/mra.hpp"

namespace ppk {

struct Exponents {
  int n = 1;
  double p = 0.95;
  double alpha = 0; // n (1/p - 1)

  // p must lie in (n/(n+1), 1)
  static Exponents from_p(int n, double p);
  int moment_order() const;
};

// w(x) = (1+|x|)^{-n(1-p)}, or (1+|x|)^{-gamma} when gamma is set.
struct Weight {
  int n = 1;
  double p = 1;
  std::optional<double> gamma;

  double exponent() const { return gamma ? *gamma : n * (1 - p); }
  double operator()(const Point& x) const;
};

double lp_norm(const GridFunction& f, double p, const std::optional<Weight>& w = std::nullopt);

// (sum |c_I|^2 |I|^{-1} chi_I)^{1/2} on the 2^-K grid; the box defaults to the cubes' hull.
GridFunction square_function(const CoeffField& c, int K);
GridFunction square_function(const CoeffField& c, int K, const Index& lo, const Index& hi);
// Unweighted: grid at j_max (exact). Weighted: `extra_levels` finer for the weight quadrature.
double sequence_hardy_norm(const CoeffField& c, double p, const std::optional<Weight>& w = std::nullopt,
                           int extra_levels = 4);

double carleson_norm(const CoeffField& c, double alpha);

struct LipschitzOptions {
  bool homogeneous = true;
  int near_radius = 0; // cells; 0 picks 32 in 1-D and 8 otherwise
};
double lipschitz_norm(const GridFunction& f, double alpha, const LipschitzOptions& opt = {});

// Dyadic cubes inside the box at scales j_min..K; j_min defaults to the coarsest that fits.
double bmo_alpha_norm(const GridFunction& f, double alpha, double q, std::optional<int> j_min = std::nullopt);

struct MaximalOptions {
  int dictionary_size = 16;
  std::optional<Weight> weight;
  int t_levels = 0; // dyadic t = 2^-K .. 2^(-K + t_levels); 0 covers the box scale
};
// Lower-bound estimate of || f^* ||_{L^p(w)} over the sampled box.
GridFunction grand_maximal_function(const GridFunction& f, double p, const MaximalOptions& opt = {});
double grand_maximal_norm(const GridFunction& f, double p, const MaximalOptions& opt = {});
double grand_maximal_norm(const CoeffField& c, const WaveletSystem& sys, int K, double p,
                          const MaximalOptions& opt = {}, int pad_cubes = 2);

struct Atom {
  CoeffField coeffs;
  DyadicCube cube;
  double p = 1;
  int dilation = 1; // support is checked against the dilation-times-cube about its center

  double size_bound() const; // |dilation R|^{1/2 - 1/p}
};

struct AtomReport {
  bool support_ok = false;
  bool l2_ok = false;
  bool moments_ok = false;
  double support_excess = 0; // max |a| outside the dilated cube, relative to max |a|
  double l2 = 0;
  double l2_bound = 0;
  double moment_residual = 0; // max |int x^beta a| / ||a||_1 over |beta| <= moment order
  bool passed() const { return support_ok && l2_ok && moments_ok; }
};

int default_dilation(const WaveletSystem& sys);
AtomReport atom_verify(const Atom& a, const WaveletSystem& sys, int extra_levels = 6);

struct AtomicDecomposition {
  std::vector<double> mu;
  std::vector<Atom> atoms;
  double mu_p_norm = 0;   // (sum |mu|^p)^{1/p}
  double hardy_norm = 0;  // sequence_hardy_norm(f, p)
  double ratio = 0;
};

AtomicDecomposition finite_atomic_decompose(const CoeffField& f, double p, const WaveletSystem& sys);
CoeffField recombine(const AtomicDecomposition& d, const CoeffField& like);
void write_atoms_jsonl(std::ostream& os, const AtomicDecomposition& d);

nlohmann::json norm_report(const std::string& norm, double value, const nlohmann::json& params,
                           const nlohmann::json& tolerances);

} // namespace ppk
