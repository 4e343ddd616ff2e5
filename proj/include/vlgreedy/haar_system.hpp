#pragma once

// Nonhomogeneous tensor-product Haar system on [0,1)^n:
//   {phi = chi_[0,1)^n} together with psi^l_Q for dyadic Q of scale j < J and
//   types l = 1 .. 2^n - 1.
// Bit i of l selects the oscillating factor along axis i, so
//   psi^l_Q(x) = |Q|^{-1/2} * prod_{i in l} (+1 on the lower half of Q along
//   axis i, -1 on the upper half).

#include <compare>
#include <cstddef>
#include <span>
#include <vector>

#include "vlgreedy/dyadic_grid.hpp"
#include "vlgreedy/exponent_field.hpp"

namespace vlg {

// Default ordering is the canonical basis order: scaling first, then scale
// ascending, k lexicographic, type ascending.
struct HaarIndex {
  bool is_detail = false;
  DyadicCube cube{};
  int type = 0;

  static HaarIndex scaling(int dim) { return {false, DyadicCube::unit(dim), 0}; }
  static HaarIndex detail(int type, const DyadicCube& cube) { return {true, cube, type}; }

  auto operator<=>(const HaarIndex&) const = default;
};

// Dense coefficient table. Storage follows the canonical basis order, so the
// flat position of an index is also its canonical rank.
class HaarCoefficients {
 public:
  explicit HaarCoefficients(const Grid& grid);

  const Grid& grid() const noexcept { return grid_; }
  int type_count() const noexcept { return (1 << grid_.dim()) - 1; }
  std::size_t size() const noexcept { return values_.size(); }

  double scaling() const noexcept { return values_[0]; }
  double& scaling() noexcept { return values_[0]; }
  double detail(int type, const DyadicCube& cube) const { return values_[position(HaarIndex::detail(type, cube))]; }
  double& detail(int type, const DyadicCube& cube) { return values_[position(HaarIndex::detail(type, cube))]; }
  double operator[](const HaarIndex& idx) const { return values_[position(idx)]; }
  double& operator[](const HaarIndex& idx) { return values_[position(idx)]; }

  std::size_t position(const HaarIndex& idx) const;
  HaarIndex index_at(std::size_t position) const;
  std::span<const double> flat() const noexcept { return values_; }
  std::span<double> flat() noexcept { return values_; }

  // Non-zero entries in canonical order.
  std::vector<HaarIndex> support() const;

 private:
  Grid grid_;
  std::vector<double> values_;
};

HaarCoefficients analyze(const GridFunction& f);
GridFunction synthesize(const HaarCoefficients& c);

// Adds coef * b_idx onto `values` (cells of idx's grid), touching only the
// support of the basis element.
void add_basis_term(std::span<double> values, const Grid& grid, const HaarIndex& idx, double coef);

GridFunction basis_function(const Grid& grid, const HaarIndex& idx);

// (scaling^2 + sum_{l,Q} |c_{l,Q}|^2 |Q|^{-1} chi_Q)^{1/2}; the scaling term
// enters as a cube of measure one.
GridFunction square_function(const HaarCoefficients& c);

// ||psi^l_Q||_{p(.)} = |Q|^{-1/2} ||chi_Q||_{p(.)}; requires scale(Q) < J.
double basis_norm(const DyadicCube& cube, int type, const ExponentField& p);
double basis_norm(const HaarIndex& idx, const ExponentField& p);

// ||square_function(analyze(f))|| / ||f||.
double equivalence_ratio(const GridFunction& f, const ExponentField& p);

}  // namespace vlg
