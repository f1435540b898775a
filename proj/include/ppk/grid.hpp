#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace ppk {

inline constexpr int kMaxDim = 3;

using Index = std::array<std::int64_t, kMaxDim>;
using Point = std::array<double, kMaxDim>;

// Floor/ceil division for possibly negative numerators, positive d.
inline std::int64_t floor_div(std::int64_t a, std::int64_t d) {
  std::int64_t q = a / d;
  if ((a % d != 0) && (a < 0)) --q;
  return q;
}
inline std::int64_t ceil_div(std::int64_t a, std::int64_t d) { return -floor_div(-a, d); }

inline double exp2i(int e) { return std::ldexp(1.0, e); }

// Deterministic summation used for every reduction that ends up in a report.
double pairwise_sum(std::span<const double> v);

// Dense n-dimensional array over the integer box [lo, lo+ext), last axis fastest.
// Axes beyond n have lo = 0, ext = 1.
struct Block {
  int n = 1;
  Index lo{0, 0, 0};
  Index ext{0, 1, 1};
  std::vector<double> v;

  Block() = default;
  Block(int n, const Index& lo, const Index& ext);

  std::size_t size() const { return v.size(); }
  bool empty() const { return v.empty(); }
  Index hi() const;
  std::int64_t stride(int axis) const;
  bool contains(const Index& idx) const;
  std::size_t offset(const Index& idx) const;
  Index index_of(std::size_t flat) const;
  double at(const Index& idx) const { return contains(idx) ? v[offset(idx)] : 0.0; }
  double& ref(const Index& idx) { return v[offset(idx)]; }
};

// Copy of b on a new box; values outside b are zero, values outside the box are dropped.
Block embed(const Block& b, const Index& lo, const Index& ext);
// Smallest box holding both (ignores empty blocks).
void union_box(const Block& a, const Block& b, Index& lo, Index& ext);

class GridFunction {
public:
  GridFunction() = default;
  // Zero function on grid indices lo <= m < hi at step 2^-K.
  GridFunction(int n, int K, const Index& lo, const Index& hi);
  GridFunction(int K, Block data);

  static GridFunction from_function(int n, int K, const Index& lo, const Index& hi,
                                    const std::function<double(const Point&)>& f);

  int dim() const { return data_.n; }
  int level() const { return K_; }
  double step() const { return exp2i(-K_); }
  double cell_volume() const { return exp2i(-K_ * data_.n); }
  const Index& lo() const { return data_.lo; }
  Index hi() const { return data_.hi(); }
  const Index& extent() const { return data_.ext; }
  std::size_t size() const { return data_.v.size(); }
  bool empty() const { return data_.v.empty(); }

  std::span<double> values() { return data_.v; }
  std::span<const double> values() const { return data_.v; }
  Block& block() { return data_; }
  const Block& block() const { return data_; }

  double value_at(const Index& m) const { return data_.at(m); }
  Point point(std::size_t flat) const;
  Point point_of(const Index& m) const;

  double integral() const;
  double max_abs() const;
  double l2_norm() const;

  GridFunction restricted(const Index& lo, const Index& hi) const;
  bool same_grid(const GridFunction& o) const;

  GridFunction& operator+=(const GridFunction& o);
  GridFunction& operator-=(const GridFunction& o);
  GridFunction& operator*=(const GridFunction& o);
  GridFunction& operator*=(double s);

private:
  int K_ = 0;
  Block data_;
};

GridFunction operator+(GridFunction a, const GridFunction& b);
GridFunction operator-(GridFunction a, const GridFunction& b);
GridFunction operator*(GridFunction a, const GridFunction& b);
GridFunction operator*(double s, GridFunction a);

double max_abs_difference(const GridFunction& a, const GridFunction& b);

} // namespace ppk
