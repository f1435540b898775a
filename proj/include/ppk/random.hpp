#pragma once

#include <cstdint>

#include "ppk/mra.hpp"

namespace ppk {

// SplitMix64 (Steele, Lea, Flood 2014). State advances by the golden-ratio increment;
// outputs are the standard mix. Every draw in the library goes through this generator.
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  // top 53 bits scaled into [0, 1)
  double uniform();
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  // next() % n, n > 0
  std::uint64_t below(std::uint64_t n) { return next() % n; }

private:
  std::uint64_t state_;
};

struct RandomFieldSpec {
  int n = 1;
  int j_min = 0;
  int j_max = 5;
  std::int64_t span = 1;     // cubes per axis at level j_min, starting at corner 0
  int entries = 100;         // number of draws; repeated indices accumulate
  double amplitude = 1.0;    // values uniform in [-amplitude, amplitude)
  double scale_decay = 0.0;  // extra factor 2^(-scale_decay (j - j_min))
  bool with_scaling = false; // also fill every scaling coefficient on the span
};

// Draw order per entry: j, then k_1..k_n, then lambda, then value; scaling values last,
// in lexicographic cube order.
CoeffField random_field(std::uint64_t seed, const RandomFieldSpec& spec);

// sum_t c_t |x - x_t|^alpha on the grid box, c_t uniform in [-1, 1), x_t uniform in the box.
// Draw order per term: x_t coordinates, then c_t.
GridFunction random_holder_function(std::uint64_t seed, int n, int K, const Index& lo, const Index& hi, double alpha,
                                    int terms = 3);

} // namespace ppk
