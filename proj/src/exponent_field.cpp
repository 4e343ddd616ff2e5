#include "vlgreedy/exponent_field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "vlgreedy/error.hpp"
#include "vlgreedy/hashing.hpp"

namespace vlg {

namespace {

void check_exponent_value(double v) {
  if (!std::isfinite(v) || v <= 1.0)
    throw Error(ErrorKind::InvalidExponent, "exponent value " + std::to_string(v) + " not in (1, inf)");
}

// Converts a box endpoint to a grid coordinate, rejecting non-aligned values.
std::uint32_t aligned_coord(double x, int depth) {
  if (!(x >= 0.0 && x <= 1.0)) throw Error(ErrorKind::AlignmentError, "region endpoint outside [0, 1]");
  const double scaled = std::ldexp(x, depth);
  if (scaled != std::floor(scaled))
    throw Error(ErrorKind::AlignmentError,
                "region endpoint " + std::to_string(x) + " not aligned to depth-" + std::to_string(depth) + " cells");
  return static_cast<std::uint32_t>(scaled);
}

std::vector<double> sample(const Grid& grid, const ConstantExponent& r) {
  check_exponent_value(r.value);
  return std::vector<double>(grid.cell_count(), r.value);
}

std::vector<double> sample(const Grid& grid, const PiecewiseExponent& r) {
  const double unset = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> values(grid.cell_count(), r.fallback.value_or(unset));
  const int n = grid.dim();
  for (const auto& piece : r.pieces) {
    if (static_cast<int>(piece.lo.size()) != n || static_cast<int>(piece.hi.size()) != n)
      throw Error(ErrorKind::AlignmentError, "piece bounds must have one entry per axis");
    check_exponent_value(piece.value);
    std::vector<std::uint32_t> lo(n), hi(n);
    for (int i = 0; i < n; ++i) {
      lo[i] = aligned_coord(piece.lo[i], grid.depth());
      hi[i] = aligned_coord(piece.hi[i], grid.depth());
      if (lo[i] >= hi[i]) throw Error(ErrorKind::AlignmentError, "empty piece region");
    }
    for (CellIndex c = 0; c < values.size(); ++c) {
      bool inside = true;
      for (int i = 0; i < n && inside; ++i) {
        const auto x = grid.axis_coord(c, i);
        inside = x >= lo[i] && x < hi[i];
      }
      if (inside) values[c] = piece.value;
    }
  }
  for (double v : values)
    if (std::isnan(v)) throw Error(ErrorKind::InvalidExponent, "piecewise exponent leaves cells uncovered");
  return values;
}

std::vector<double> sample(const Grid& grid, const SmoothstepExponent& r) {
  check_exponent_value(r.p_left);
  check_exponent_value(r.p_right);
  if (!(r.start < r.end)) throw Error(ErrorKind::InvalidParameter, "smoothstep needs start < end");
  if (r.axis < 0 || r.axis >= grid.dim()) throw Error(ErrorKind::InvalidParameter, "smoothstep axis out of range");
  std::vector<double> values(grid.cell_count());
  for (CellIndex c = 0; c < values.size(); ++c) {
    const double x = std::ldexp(grid.axis_coord(c, r.axis) + 0.5, -grid.depth());
    const double t = std::clamp((x - r.start) / (r.end - r.start), 0.0, 1.0);
    values[c] = r.p_left + (r.p_right - r.p_left) * t * t * (3.0 - 2.0 * t);
  }
  return values;
}

std::vector<double> sample(const Grid& grid, const SampledExponent& r) {
  if (r.values.size() != grid.cell_count())
    throw Error(ErrorKind::AlignmentError, "sampled exponent needs " + std::to_string(grid.cell_count()) + " values");
  return r.values;
}

}  // namespace

ExponentField::ExponentField(Grid grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.cell_count())
    throw Error(ErrorKind::AlignmentError, "exponent field needs one value per cell");
  for (double v : values_) check_exponent_value(v);
  const auto [lo, hi] = std::minmax_element(values_.begin(), values_.end());
  p_minus_ = *lo;
  p_plus_ = *hi;
  Fnv1a h;
  h.add(static_cast<std::uint64_t>(grid_.dim())).add(static_cast<std::uint64_t>(grid_.depth()));
  h.add_span(std::span<const double>(values_));
  hash_ = h.digest();
}

ExponentField build_exponent(const Grid& grid, const ExponentRecipe& recipe) {
  return ExponentField(grid, std::visit([&](const auto& r) { return sample(grid, r); }, recipe));
}

ExponentRange exponent_range(const ExponentField& p, const CellSet& region) {
  if (region.empty()) throw Error(ErrorKind::EmptyRegion, "exponent range over an empty region");
  ExponentRange r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (auto c : region) {
    if (c >= p.values().size()) throw Error(ErrorKind::OutOfDomain, "cell index outside grid");
    r.p_minus = std::min(r.p_minus, p[c]);
    r.p_plus = std::max(r.p_plus, p[c]);
  }
  return r;
}

ExponentRange exponent_range(const ExponentField& p) { return {p.p_minus(), p.p_plus()}; }

ExponentField conjugate(const ExponentField& p) {
  std::vector<double> values(p.values().begin(), p.values().end());
  for (double& v : values) v = v / (v - 1.0);
  return ExponentField(p.grid(), std::move(values));
}

double harmonic_mean_exponent(const ExponentField& p, const DyadicCube& cube) {
  if (!in_domain(p.grid(), cube)) throw Error(ErrorKind::OutOfDomain, "cube " + to_string(cube) + " outside domain");
  double sum = 0.0;
  std::size_t count = 0;
  for_each_cell(p.grid(), cube, [&](CellIndex c) {
    sum += 1.0 / p[c];
    ++count;
  });
  return static_cast<double>(count) / sum;
}

LevelSets level_sets(const ExponentField& p, double epsilon) {
  if (!(epsilon > 0.0)) throw Error(ErrorKind::InvalidParameter, "level-set epsilon must be positive");
  LevelSets out{epsilon, {}, {}};
  const double g_threshold = p.p_minus() + epsilon;
  const double h_threshold = p.p_plus() - epsilon;
  for (CellIndex c = 0; c < p.values().size(); ++c) {
    if (p[c] <= g_threshold) out.g_cells.push_back(c);
    if (p[c] >= h_threshold) out.h_cells.push_back(c);
  }
  return out;
}

double log_holder_constant(const ExponentField& p) {
  const Grid& grid = p.grid();
  const std::size_t cells = grid.cell_count();
  const int n = grid.dim();
  std::vector<double> centers(cells * static_cast<std::size_t>(n));
  for (CellIndex c = 0; c < cells; ++c)
    for (int i = 0; i < n; ++i) centers[c * n + i] = std::ldexp(grid.axis_coord(c, i) + 0.5, -grid.depth());

  double c0 = 0.0;
  for (std::size_t a = 0; a < cells; ++a) {
    for (std::size_t b = a + 1; b < cells; ++b) {
      const double dp = std::abs(p[a] - p[b]);
      if (dp == 0.0) continue;
      double d2 = 0.0;
      for (int i = 0; i < n; ++i) {
        const double d = centers[a * n + i] - centers[b * n + i];
        d2 += d * d;
      }
      if (d2 >= 0.25) continue;
      c0 = std::max(c0, dp * -0.5 * std::log(d2));
    }
  }
  return c0;
}

}  // namespace vlg
