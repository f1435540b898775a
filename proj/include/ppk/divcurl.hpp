#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "ppk/mra.hpp"

namespace ppk {

// Periodic functions live on the unit torus: a GridFunction with lo = 0 and 2^K samples per axis.
bool is_periodic_grid(const GridFunction& f);

// Fourier multiplier -i xi_i / |xi| (axis i counted from 0); the zero mode and the Nyquist
// plane of axis i map to zero.
GridFunction riesz_apply(int i, const GridFunction& f);
// Multiplier i xi_i with xi = 2 pi k.
GridFunction spectral_derivative(int i, const GridFunction& f);

enum class FieldKind { curl_free, div_free, general };

struct VectorField {
  std::vector<GridFunction> components;
  FieldKind kind = FieldKind::general;
  int dim() const { return static_cast<int>(components.size()); }
};

// F_i = R_i f. Throws DomainError for a non-periodic grid or nonzero mean.
VectorField curl_free_field(const GridFunction& f);
// G = (d_2 u, -d_1 u); n must be 2.
VectorField div_free_field(const GridFunction& u);
// (curl-free part, div-free part); parts sum to V.
std::pair<VectorField, VectorField> helmholtz_project(const VectorField& V);

// Relative spectral residuals.
double curl_residual(const VectorField& F);  // sum_{i<j} ||d_i F_j - d_j F_i|| / sum ||d_i F_j||
double div_residual(const VectorField& G);   // ||sum d_i G_i|| / sum ||d_i G_i||
double riesz_sum_residual(const VectorField& G); // ||sum R_i G_i|| / ||G||
double riesz_roundtrip_residual(const GridFunction& f); // ||-sum R_i R_i f - f|| / ||f||

double almost_diag_weight(const DyadicCube& I, const DyadicCube& J, double delta);

// Real zero-mean trigonometric polynomial with frequencies |k|_inf <= max_freq and amplitudes
// uniform in [-1,1) times (1+|k|)^-decay, drawn from SplitMix64 in lexicographic k order.
GridFunction random_band_limited(std::uint64_t seed, int n, int K, int max_freq, double decay = 1.0);

struct DivCurlOptions {
  int jmin = 0;
  bool window = true; // smooth cutoff before the wavelet side (ignored for Haar)
};

// F curl-free, G div-free on the same periodic grid. Returns the report described in the README.
nlohmann::json divcurl_experiment(const VectorField& F, const VectorField& G, double p, const WaveletSystem& sys,
                                  const DivCurlOptions& opt = {});

} // namespace ppk
