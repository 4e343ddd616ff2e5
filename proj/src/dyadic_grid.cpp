#include "vlgreedy/dyadic_grid.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "vlgreedy/error.hpp"

namespace vlg {

Grid::Grid(int dim, int depth) : dim_(dim), depth_(depth) {
  if (dim < 1) throw Error(ErrorKind::InvalidParameter, "grid dimension must be positive");
  if (depth < 0) throw Error(ErrorKind::InvalidParameter, "grid depth must be non-negative");
  if (dim * depth > kMaxGridBits)
    throw Error(ErrorKind::InvalidParameter,
                "grid has 2^" + std::to_string(dim * depth) + " cells, limit is 2^" +
                    std::to_string(kMaxGridBits));
}

double Grid::cell_measure() const noexcept { return std::ldexp(1.0, -dim_ * depth_); }

std::vector<double> Grid::cell_center(CellIndex cell) const {
  std::vector<double> x(static_cast<std::size_t>(dim_));
  for (int i = 0; i < dim_; ++i) x[i] = std::ldexp(axis_coord(cell, i) + 0.5, -depth_);
  return x;
}

CellSet Grid::all_cells() const {
  CellSet cells(cell_count());
  for (std::size_t c = 0; c < cells.size(); ++c) cells[c] = static_cast<CellIndex>(c);
  return cells;
}

DyadicCube DyadicCube::from_index(int dim, int scale, std::span<const std::uint32_t> k) {
  if (static_cast<int>(k.size()) != dim)
    throw Error(ErrorKind::InvalidInput, "cube index has wrong number of axes");
  if (scale < 0 || dim * scale > kMaxGridBits)
    throw Error(ErrorKind::OutOfDomain, "cube scale out of range");
  DyadicCube q{dim, scale, 0};
  for (int i = 0; i < dim; ++i) {
    if (k[i] >= (std::uint32_t{1} << scale))
      throw Error(ErrorKind::OutOfDomain, "cube index outside the unit cube");
    q.code |= k[i] << (scale * (dim - 1 - i));
  }
  return q;
}

std::vector<std::uint32_t> DyadicCube::index() const {
  std::vector<std::uint32_t> k(static_cast<std::size_t>(dim));
  for (int i = 0; i < dim; ++i) k[i] = axis(i);
  return k;
}

double DyadicCube::measure() const noexcept { return std::ldexp(1.0, -dim * scale); }

DyadicCube DyadicCube::ancestor(int s) const {
  if (s < 0 || s > scale) throw Error(ErrorKind::InvalidRange, "ancestor scale out of range");
  DyadicCube q{dim, s, 0};
  for (int i = 0; i < dim; ++i) q.code |= (axis(i) >> (scale - s)) << (s * (dim - 1 - i));
  return q;
}

DyadicCube DyadicCube::child(std::uint32_t pattern) const {
  DyadicCube q{dim, scale + 1, 0};
  for (int i = 0; i < dim; ++i) {
    const std::uint32_t bit = (pattern >> i) & 1U;
    q.code |= ((axis(i) << 1) | bit) << (q.scale * (dim - 1 - i));
  }
  return q;
}

bool DyadicCube::contains(const DyadicCube& other) const {
  if (other.dim != dim || other.scale < scale) return false;
  return other.ancestor(scale).code == code;
}

bool in_domain(const Grid& grid, const DyadicCube& cube) noexcept {
  if (cube.dim != grid.dim() || cube.scale < 0 || cube.scale > grid.depth()) return false;
  return cube.code < (std::uint64_t{1} << (cube.dim * cube.scale));
}

DyadicCube cube_of_cell(const Grid& grid, CellIndex cell, int scale) {
  if (scale < 0 || scale > grid.depth()) throw Error(ErrorKind::InvalidRange, "scale outside [0, J]");
  const DyadicCube c{grid.dim(), grid.depth(), cell};
  return c.ancestor(scale);
}

CellSet cells_of(const Grid& grid, const DyadicCube& cube) {
  if (!in_domain(grid, cube)) throw Error(ErrorKind::OutOfDomain, "cube " + to_string(cube) + " not on grid");
  CellSet cells;
  cells.reserve(std::size_t{1} << (grid.dim() * (grid.depth() - cube.scale)));
  for_each_cell(grid, cube, [&](CellIndex c) { cells.push_back(c); });
  // For n > 1 the visit order is ascending as well, so no sort is needed.
  return cells;
}

std::string to_string(const DyadicCube& cube) {
  std::string s = std::to_string(cube.scale) + ":";
  for (int i = 0; i < cube.dim; ++i) {
    if (i) s += ',';
    s += std::to_string(cube.axis(i));
  }
  return s;
}

DyadicCube parse_cube(std::string_view text, int dim) {
  auto bad = [&] { return Error(ErrorKind::InvalidInput, "malformed cube '" + std::string(text) + "'"); };
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw bad();
  auto parse_uint = [&](std::string_view part) {
    std::uint32_t v = 0;
    const auto* end = part.data() + part.size();
    auto [ptr, ec] = std::from_chars(part.data(), end, v);
    if (ec != std::errc{} || ptr != end || part.empty()) throw bad();
    return v;
  };
  const auto scale = static_cast<int>(parse_uint(text.substr(0, colon)));
  std::vector<std::uint32_t> k;
  std::string_view rest = text.substr(colon + 1);
  while (true) {
    const auto comma = rest.find(',');
    k.push_back(parse_uint(rest.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return DyadicCube::from_index(dim, scale, k);
}

GridFunction::GridFunction(Grid g, std::vector<double> v) : grid(g), values(std::move(v)) {
  if (values.size() != grid.cell_count())
    throw Error(ErrorKind::AlignmentError, "grid function needs " + std::to_string(grid.cell_count()) +
                                               " values, got " + std::to_string(values.size()));
}

GridFunction GridFunction::zeros(const Grid& g) { return GridFunction(g, std::vector<double>(g.cell_count(), 0.0)); }

GridFunction GridFunction::constant(const Grid& g, double c) {
  return GridFunction(g, std::vector<double>(g.cell_count(), c));
}

GridFunction GridFunction::indicator(const Grid& g, const CellSet& cells) {
  auto f = zeros(g);
  for (auto c : cells) {
    if (c >= f.values.size()) throw Error(ErrorKind::OutOfDomain, "cell index outside grid");
    f.values[c] = 1.0;
  }
  return f;
}

GridFunction GridFunction::indicator(const Grid& g, const DyadicCube& cube) { return indicator(g, cells_of(g, cube)); }

double GridFunction::max_abs() const noexcept {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

bool GridFunction::is_zero() const noexcept {
  return std::all_of(values.begin(), values.end(), [](double v) { return v == 0.0; });
}

CubeFamily::CubeFamily(std::vector<DyadicCube> cubes) : cubes_(std::move(cubes)) {
  std::sort(cubes_.begin(), cubes_.end());
  if (std::adjacent_find(cubes_.begin(), cubes_.end()) != cubes_.end())
    throw Error(ErrorKind::InvalidInput, "cube family contains duplicates");
  if (!cubes_.empty()) {
    const int dim = cubes_.front().dim;
    for (const auto& q : cubes_)
      if (q.dim != dim) throw Error(ErrorKind::InvalidInput, "cube family mixes dimensions");
  }
}

int CubeFamily::max_scale() const noexcept {
  int s = -1;
  for (const auto& q : cubes_) s = std::max(s, q.scale);
  return s;
}

bool CubeFamily::pairwise_disjoint() const {
  for (std::size_t a = 0; a < cubes_.size(); ++a)
    for (std::size_t b = a + 1; b < cubes_.size(); ++b)
      if (!cubes_[a].disjoint(cubes_[b])) return false;
  return true;
}

std::vector<DyadicCube> enumerate_cubes(const Grid& grid, int j_min, int j_max) {
  if (j_min < 0 || j_max > grid.depth() || j_min > j_max)
    throw Error(ErrorKind::InvalidRange, "scale range [" + std::to_string(j_min) + ", " + std::to_string(j_max) +
                                             "] outside [0, " + std::to_string(grid.depth()) + "]");
  std::vector<DyadicCube> out;
  for (int j = j_min; j <= j_max; ++j) {
    const std::uint32_t count = std::uint32_t{1} << (grid.dim() * j);
    for (std::uint32_t code = 0; code < count; ++code) out.push_back(DyadicCube{grid.dim(), j, code});
  }
  return out;
}

double integrate(const GridFunction& f, const CellSet& region) {
  double sum = 0.0;
  for (auto c : region) sum += f.values.at(c);
  return sum * f.grid.cell_measure();
}

double integrate(const GridFunction& f) {
  double sum = 0.0;
  for (double v : f.values) sum += v;
  return sum * f.grid.cell_measure();
}

std::vector<std::int32_t> minimal_cube_indices(const Grid& grid, const CubeFamily& family) {
  std::vector<std::int32_t> owner(grid.cell_count(), -1);
  // Canonical order visits coarse cubes first, so finer members overwrite.
  for (std::size_t i = 0; i < family.size(); ++i) {
    const auto& q = family[i];
    if (!in_domain(grid, q)) throw Error(ErrorKind::OutOfDomain, "cube " + to_string(q) + " not on grid");
    for_each_cell(grid, q, [&](CellIndex c) { owner[c] = static_cast<std::int32_t>(i); });
  }
  return owner;
}

std::vector<std::optional<DyadicCube>> minimal_cube_map(const Grid& grid, const CubeFamily& family) {
  const auto owner = minimal_cube_indices(grid, family);
  std::vector<std::optional<DyadicCube>> out(owner.size());
  for (std::size_t c = 0; c < owner.size(); ++c)
    if (owner[c] >= 0) out[c] = family[static_cast<std::size_t>(owner[c])];
  return out;
}

LightShadeDecomposition light_shade(const Grid& grid, const CubeFamily& family) {
  const auto owner = minimal_cube_indices(grid, family);
  LightShadeDecomposition d;
  d.shade.resize(family.size());
  d.light.resize(family.size());
  for (std::size_t i = 0; i < family.size(); ++i) {
    for_each_cell(grid, family[i], [&](CellIndex c) {
      if (owner[c] == static_cast<std::int32_t>(i))
        d.light[i].push_back(c);
      else
        d.shade[i].push_back(c);
    });
    if (!d.light[i].empty()) d.gamma_min.push_back(family[i]);
    const std::size_t cube_cells = d.light[i].size() + d.shade[i].size();
    if (!d.light[i].empty() && (d.light[i].size() << grid.dim()) >= cube_cells) d.gamma_lighted.push_back(family[i]);
  }
  for (std::size_t c = 0; c < owner.size(); ++c)
    if (owner[c] >= 0) d.union_cells.push_back(static_cast<CellIndex>(c));
  return d;
}

}  // namespace vlg
