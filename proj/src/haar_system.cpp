#include "vlgreedy/haar_system.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "vlgreedy/error.hpp"
#include "vlgreedy/variable_norm.hpp"

namespace vlg {

namespace {

// |Q|^{-1/2} for a cube of scale j in dimension n.
double amplitude(int scale, int dim) { return std::sqrt(std::ldexp(1.0, scale * dim)); }

// Bit i is set when the cell lies in the upper half of its scale-j ancestor
// along axis i.
std::uint32_t half_pattern(const Grid& grid, CellIndex cell, int scale) {
  std::uint32_t pattern = 0;
  const int shift = grid.depth() - scale - 1;
  for (int i = 0; i < grid.dim(); ++i) pattern |= ((grid.axis_coord(cell, i) >> shift) & 1U) << i;
  return pattern;
}

double type_sign(int type, std::uint32_t pattern) {
  return (std::popcount(static_cast<std::uint32_t>(type) & pattern) & 1) ? -1.0 : 1.0;
}

std::uint32_t ancestor_code(const Grid& grid, CellIndex cell, int scale) {
  const int n = grid.dim();
  std::uint32_t code = 0;
  for (int i = 0; i < n; ++i) code |= (grid.axis_coord(cell, i) >> (grid.depth() - scale)) << (scale * (n - 1 - i));
  return code;
}

}  // namespace

HaarCoefficients::HaarCoefficients(const Grid& grid) : grid_(grid), values_(grid.cell_count(), 0.0) {}

std::size_t HaarCoefficients::position(const HaarIndex& idx) const {
  if (!idx.is_detail) return 0;
  const int n = grid_.dim();
  if (idx.type < 1 || idx.type > type_count())
    throw Error(ErrorKind::InvalidInput, "Haar type " + std::to_string(idx.type) + " out of range");
  if (idx.cube.scale >= grid_.depth())
    throw Error(ErrorKind::ResolutionError, "Haar cube " + to_string(idx.cube) + " not resolved at depth " +
                                                std::to_string(grid_.depth()));
  if (!in_domain(grid_, idx.cube)) throw Error(ErrorKind::OutOfDomain, "Haar cube outside domain");
  const std::size_t offset = std::size_t{1} << (idx.cube.scale * n);
  return offset + static_cast<std::size_t>(idx.cube.code) * type_count() + static_cast<std::size_t>(idx.type - 1);
}

HaarIndex HaarCoefficients::index_at(std::size_t pos) const {
  const int n = grid_.dim();
  if (pos >= values_.size()) throw Error(ErrorKind::OutOfDomain, "coefficient position out of range");
  if (pos == 0) return HaarIndex::scaling(n);
  const int scale = (std::bit_width(pos) - 1) / n;
  const std::size_t rem = pos - (std::size_t{1} << (scale * n));
  const auto types = static_cast<std::size_t>(type_count());
  return HaarIndex::detail(static_cast<int>(rem % types) + 1,
                           DyadicCube{n, scale, static_cast<std::uint32_t>(rem / types)});
}

std::vector<HaarIndex> HaarCoefficients::support() const {
  std::vector<HaarIndex> out;
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (values_[i] != 0.0) out.push_back(index_at(i));
  return out;
}

HaarCoefficients analyze(const GridFunction& f) {
  const Grid& grid = f.grid;
  const int n = grid.dim();
  const int J = grid.depth();
  HaarCoefficients out(grid);
  const int types = out.type_count();
  auto flat = out.flat();
  const double mu = grid.cell_measure();
  for (CellIndex c = 0; c < f.values.size(); ++c) {
    const double v = f.values[c];
    if (v == 0.0) continue;
    flat[0] += v * mu;
    for (int j = 0; j < J; ++j) {
      const double amp = v * mu * amplitude(j, n);
      const std::uint32_t pattern = half_pattern(grid, c, j);
      const std::size_t base =
          (std::size_t{1} << (j * n)) + static_cast<std::size_t>(ancestor_code(grid, c, j)) * types;
      for (int l = 1; l <= types; ++l) flat[base + l - 1] += type_sign(l, pattern) * amp;
    }
  }
  return out;
}

GridFunction synthesize(const HaarCoefficients& c) {
  const Grid& grid = c.grid();
  const int n = grid.dim();
  const int J = grid.depth();
  const int types = c.type_count();
  const auto flat = c.flat();
  auto f = GridFunction::constant(grid, c.scaling());
  for (CellIndex cell = 0; cell < f.values.size(); ++cell) {
    double v = f.values[cell];
    for (int j = 0; j < J; ++j) {
      const std::uint32_t pattern = half_pattern(grid, cell, j);
      const std::size_t base =
          (std::size_t{1} << (j * n)) + static_cast<std::size_t>(ancestor_code(grid, cell, j)) * types;
      double level = 0.0;
      for (int l = 1; l <= types; ++l) level += type_sign(l, pattern) * flat[base + l - 1];
      v += level * amplitude(j, n);
    }
    f.values[cell] = v;
  }
  return f;
}

void add_basis_term(std::span<double> values, const Grid& grid, const HaarIndex& idx, double coef) {
  if (values.size() != grid.cell_count()) throw Error(ErrorKind::AlignmentError, "value span does not match grid");
  if (!idx.is_detail) {
    for (double& v : values) v += coef;
    return;
  }
  if (idx.cube.scale >= grid.depth()) throw Error(ErrorKind::ResolutionError, "Haar cube finer than the grid");
  const double amp = coef * amplitude(idx.cube.scale, grid.dim());
  for_each_cell(grid, idx.cube, [&](CellIndex cell) {
    values[cell] += type_sign(idx.type, half_pattern(grid, cell, idx.cube.scale)) * amp;
  });
}

GridFunction basis_function(const Grid& grid, const HaarIndex& idx) {
  auto f = GridFunction::zeros(grid);
  add_basis_term(f.values, grid, idx, 1.0);
  return f;
}

GridFunction square_function(const HaarCoefficients& c) {
  const Grid& grid = c.grid();
  const int n = grid.dim();
  const int types = c.type_count();
  const auto flat = c.flat();
  auto w = GridFunction::constant(grid, c.scaling() * c.scaling());
  for (CellIndex cell = 0; cell < w.values.size(); ++cell) {
    double sum = w.values[cell];
    for (int j = 0; j < grid.depth(); ++j) {
      const std::size_t base =
          (std::size_t{1} << (j * n)) + static_cast<std::size_t>(ancestor_code(grid, cell, j)) * types;
      double level = 0.0;
      for (int l = 0; l < types; ++l) level += flat[base + l] * flat[base + l];
      sum += level * std::ldexp(1.0, j * n);
    }
    w.values[cell] = std::sqrt(sum);
  }
  return w;
}

double basis_norm(const DyadicCube& cube, int type, const ExponentField& p) {
  const Grid& grid = p.grid();
  if (type < 1 || type >= (1 << grid.dim())) throw Error(ErrorKind::InvalidInput, "Haar type out of range");
  if (cube.scale >= grid.depth())
    throw Error(ErrorKind::ResolutionError, "Haar cube " + to_string(cube) + " not resolved at depth " +
                                                std::to_string(grid.depth()));
  return amplitude(cube.scale, grid.dim()) * char_norm(p, cube);
}

double basis_norm(const HaarIndex& idx, const ExponentField& p) {
  if (!idx.is_detail) return char_norm(p, DyadicCube::unit(p.grid().dim()));
  return basis_norm(idx.cube, idx.type, p);
}

double equivalence_ratio(const GridFunction& f, const ExponentField& p) {
  const double nf = luxemburg_norm(f, p);
  if (nf == 0.0) throw Error(ErrorKind::UndefinedRatio, "equivalence ratio of the zero function");
  return luxemburg_norm(square_function(analyze(f)), p) / nf;
}

}  // namespace vlg
