#pragma once

// Exponent functions p(.) sampled piecewise-constant on the depth-J cells of
// [0,1)^n, with 1 < p_- <= p_+ < infinity.

#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "vlgreedy/dyadic_grid.hpp"

namespace vlg {

struct ConstantExponent {
  double value = 2.0;
};

// Axis-parallel box [lo, hi) with dyadic endpoints aligned to the grid.
struct ExponentPiece {
  std::vector<double> lo;
  std::vector<double> hi;
  double value = 2.0;
};

// Later pieces override earlier ones; cells covered by no piece take
// `fallback`, and are an error if it is unset.
struct PiecewiseExponent {
  std::vector<ExponentPiece> pieces;
  std::optional<double> fallback;
};

// p_left + (p_right - p_left) * s(t), s(t) = 3t^2 - 2t^3, with t the clamped
// position of the cell center along `axis` inside [start, end].
struct SmoothstepExponent {
  double p_left = 2.0;
  double p_right = 4.0;
  double start = 0.25;
  double end = 0.75;
  int axis = 0;
};

struct SampledExponent {
  std::vector<double> values;
};

using ExponentRecipe = std::variant<ConstantExponent, PiecewiseExponent, SmoothstepExponent, SampledExponent>;

class ExponentField {
 public:
  ExponentField(Grid grid, std::vector<double> values);

  const Grid& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](CellIndex cell) const { return values_[cell]; }
  double p_minus() const noexcept { return p_minus_; }
  double p_plus() const noexcept { return p_plus_; }
  bool is_constant() const noexcept { return p_minus_ == p_plus_; }
  std::uint64_t hash() const noexcept { return hash_; }

 private:
  Grid grid_;
  std::vector<double> values_;
  double p_minus_ = 0.0;
  double p_plus_ = 0.0;
  std::uint64_t hash_ = 0;
};

ExponentField build_exponent(const Grid& grid, const ExponentRecipe& recipe);

struct ExponentRange {
  double p_minus;
  double p_plus;
};

ExponentRange exponent_range(const ExponentField& p, const CellSet& region);
ExponentRange exponent_range(const ExponentField& p);

// Cellwise 1/p + 1/p' = 1.
ExponentField conjugate(const ExponentField& p);

// p_Q with 1/p_Q equal to the mean of 1/p over Q.
double harmonic_mean_exponent(const ExponentField& p, const DyadicCube& cube);

struct LevelSets {
  double epsilon;
  CellSet g_cells;  // p <= p_- + epsilon
  CellSet h_cells;  // p >= p_+ - epsilon
};

LevelSets level_sets(const ExponentField& p, double epsilon);

// Smallest C0 with |p(x) - p(y)| <= C0 / (-log|x - y|) over all pairs of cell
// centers closer than 1/2. Exhaustive over pairs, so quadratic in the cell
// count; a diagnostic only.
double log_holder_constant(const ExponentField& p);

}  // namespace vlg
