#pragma once

// Dyadic cubes on [0,1)^n, piecewise-constant grid functions at a fixed
// depth J, and the lighted/shaded decomposition of finite cube families.
//
// Cells are the dyadic cubes of scale J. A cell (or any cube) is addressed by
// the lexicographic index of its integer translate k, axis 0 most
// significant, so cell c has axis-i coordinate (c >> J*(n-1-i)) & (2^J - 1).

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vlg {

using CellIndex = std::uint32_t;

// Sorted, duplicate-free list of cell indices.
using CellSet = std::vector<CellIndex>;

inline constexpr int kMaxGridBits = 28;

class Grid {
 public:
  Grid(int dim, int depth);

  int dim() const noexcept { return dim_; }
  int depth() const noexcept { return depth_; }
  std::size_t cell_count() const noexcept { return std::size_t{1} << (dim_ * depth_); }
  double cell_measure() const noexcept;

  std::uint32_t axis_coord(CellIndex cell, int axis) const noexcept {
    return (cell >> (depth_ * (dim_ - 1 - axis))) & ((std::uint32_t{1} << depth_) - 1);
  }
  std::vector<double> cell_center(CellIndex cell) const;
  CellSet all_cells() const;

  bool operator==(const Grid&) const = default;

 private:
  int dim_;
  int depth_;
};

// Q_{j,k} = 2^{-j}([0,1)^n + k). Default ordering is the canonical one:
// scale ascending, then k lexicographic.
struct DyadicCube {
  int dim = 1;
  int scale = 0;
  std::uint32_t code = 0;

  static DyadicCube from_index(int dim, int scale, std::span<const std::uint32_t> k);
  static DyadicCube unit(int dim) { return DyadicCube{dim, 0, 0}; }

  std::uint32_t axis(int i) const noexcept {
    return (code >> (scale * (dim - 1 - i))) & ((std::uint32_t{1} << scale) - 1);
  }
  std::vector<std::uint32_t> index() const;
  double measure() const noexcept;

  // The unique cube of scale s <= this->scale containing this cube.
  DyadicCube ancestor(int s) const;
  DyadicCube child(std::uint32_t pattern) const;
  bool contains(const DyadicCube& other) const;
  bool disjoint(const DyadicCube& other) const { return !contains(other) && !other.contains(*this); }

  auto operator<=>(const DyadicCube&) const = default;
};

bool in_domain(const Grid& grid, const DyadicCube& cube) noexcept;

DyadicCube cube_of_cell(const Grid& grid, CellIndex cell, int scale);

// Visits the cells of `cube` in ascending index order; cube.scale <= depth.
template <class Fn>
void for_each_cell(const Grid& grid, const DyadicCube& cube, Fn&& fn) {
  const int n = grid.dim();
  const int J = grid.depth();
  const int m = J - cube.scale;
  CellIndex base = 0;
  for (int i = 0; i < n; ++i) base |= (cube.axis(i) << m) << (J * (n - 1 - i));
  if (n == 1) {
    const CellIndex count = CellIndex{1} << m;
    for (CellIndex t = 0; t < count; ++t) fn(base + t);
    return;
  }
  const std::uint32_t mask = (std::uint32_t{1} << m) - 1;
  const std::uint64_t count = std::uint64_t{1} << (n * m);
  for (std::uint64_t t = 0; t < count; ++t) {
    CellIndex cell = base;
    for (int i = 0; i < n; ++i) {
      const auto off = static_cast<std::uint32_t>(t >> (m * (n - 1 - i))) & mask;
      cell |= off << (J * (n - 1 - i));
    }
    fn(cell);
  }
}

CellSet cells_of(const Grid& grid, const DyadicCube& cube);

// "j:k0[,k1,...]"
std::string to_string(const DyadicCube& cube);
DyadicCube parse_cube(std::string_view text, int dim);

struct GridFunction {
  Grid grid;
  std::vector<double> values;

  GridFunction(Grid g, std::vector<double> v);
  static GridFunction zeros(const Grid& g);
  static GridFunction constant(const Grid& g, double c);
  static GridFunction indicator(const Grid& g, const CellSet& cells);
  static GridFunction indicator(const Grid& g, const DyadicCube& cube);

  double max_abs() const noexcept;
  bool is_zero() const noexcept;
};

// Finite set of dyadic cubes, stored in canonical order.
class CubeFamily {
 public:
  CubeFamily() = default;
  explicit CubeFamily(std::vector<DyadicCube> cubes);

  std::size_t size() const noexcept { return cubes_.size(); }
  bool empty() const noexcept { return cubes_.empty(); }
  const DyadicCube& operator[](std::size_t i) const { return cubes_[i]; }
  auto begin() const noexcept { return cubes_.begin(); }
  auto end() const noexcept { return cubes_.end(); }
  const std::vector<DyadicCube>& cubes() const noexcept { return cubes_; }
  int max_scale() const noexcept;
  bool pairwise_disjoint() const;

 private:
  std::vector<DyadicCube> cubes_;
};

std::vector<DyadicCube> enumerate_cubes(const Grid& grid, int j_min, int j_max);

// Exact cell sum of f over `region` times the cell measure.
double integrate(const GridFunction& f, const CellSet& region);
double integrate(const GridFunction& f);

// For each cell, the position in `family` of the smallest member containing
// it, or -1 outside the union.
std::vector<std::int32_t> minimal_cube_indices(const Grid& grid, const CubeFamily& family);
std::vector<std::optional<DyadicCube>> minimal_cube_map(const Grid& grid, const CubeFamily& family);

struct LightShadeDecomposition {
  // Indexed like the family (canonical order).
  std::vector<CellSet> shade;
  std::vector<CellSet> light;
  std::vector<DyadicCube> gamma_min;
  std::vector<DyadicCube> gamma_lighted;
  CellSet union_cells;
};

LightShadeDecomposition light_shade(const Grid& grid, const CubeFamily& family);

}  // namespace vlg
