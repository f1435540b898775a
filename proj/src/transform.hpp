#pragma once

#include <array>
#include <vector>

#include "ppk/grid.hpp"
#include "ppk/mra.hpp"
#include "ppk/wavelet_core.hpp"

namespace ppk::detail {

// One level of the separable pyramid. Band index is the lambda mask (0 = scaling).
std::vector<Block> analysis_step(const Block& fine, const FilterBank& fb);
// Inverse of analysis_step; empty bands are treated as zero. Returns an empty block if all are empty.
Block synthesis_step(const std::vector<Block>& bands, const FilterBank& fb);

// target += scale * sum_k w_k prod_d prof_d(2^r x_d - k_d) on the target's grid, where the
// coefficients live at level j and the target at level j + r (r = prof.resolution).
void expand_add(const Block& coeffs, const std::array<const ProfileSamples*, kMaxDim>& prof, double scale,
                Block& target);

// Level-K scaling coefficients whose point values reproduce f (least squares on the box).
Block point_values_to_coeffs(const GridFunction& f, const WaveletSystem& sys);

Block gather_scaling(const CoeffField& c);
// Dense detail blocks at scale j on one shared box, indexed by lambda; all empty if there are none.
std::vector<Block> gather_details(const CoeffField& c, int j);

// Per-axis profile pointers for a lambda mask.
std::array<const ProfileSamples*, kMaxDim> pick(unsigned lambda, int n, const ProfileSamples& zero,
                                                const ProfileSamples& one);

} // namespace ppk::detail
