#pragma once

// Independent reference implementations. Nothing here calls into the library
// beyond reading grid geometry, so agreement is evidence, not tautology.

#include <cmath>
#include <cstdint>
#include <vector>

#include "vlgreedy/dyadic_grid.hpp"

namespace oracle {

// Luxemburg norm of a simple function by plain bisection in long double.
inline double norm(const std::vector<double>& values, const std::vector<double>& exponents, double cell_measure) {
  long double top = 0;
  for (double v : values) top = std::max<long double>(top, std::fabs(v));
  if (top == 0) return 0.0;
  auto modular = [&](long double lambda) {
    long double s = 0;
    for (std::size_t i = 0; i < values.size(); ++i)
      if (values[i] != 0) s += cell_measure * std::pow(std::fabs(values[i]) / lambda, exponents[i]);
    return s;
  };
  long double lo = top, hi = top;
  while (modular(lo) <= 1) lo /= 2;
  for (int it = 0; it < 200; ++it) {
    const long double mid = (lo + hi) / 2;
    (modular(mid) > 1 ? lo : hi) = mid;
  }
  return static_cast<double>((lo + hi) / 2);
}

inline bool cell_in_cube(const vlg::Grid& g, vlg::CellIndex cell, const vlg::DyadicCube& q) {
  for (int i = 0; i < g.dim(); ++i)
    if ((g.axis_coord(cell, i) >> (g.depth() - q.scale)) != q.axis(i)) return false;
  return true;
}

inline bool strictly_inside(const vlg::DyadicCube& a, const vlg::DyadicCube& b) {
  if (a.scale <= b.scale) return false;
  for (int i = 0; i < a.dim; ++i)
    if ((a.axis(i) >> (a.scale - b.scale)) != b.axis(i)) return false;
  return true;
}

// Dyadic maximal function by averaging over every covering cube.
inline std::vector<double> maximal(const vlg::Grid& g, const std::vector<double>& f) {
  std::vector<double> out(f.size(), 0.0);
  for (vlg::CellIndex x = 0; x < f.size(); ++x) {
    for (int s = 0; s <= g.depth(); ++s) {
      double sum = 0;
      std::size_t count = 0;
      for (vlg::CellIndex y = 0; y < f.size(); ++y) {
        bool same = true;
        for (int i = 0; i < g.dim(); ++i)
          same = same && (g.axis_coord(x, i) >> (g.depth() - s)) == (g.axis_coord(y, i) >> (g.depth() - s));
        if (same) {
          sum += std::fabs(f[y]);
          ++count;
        }
      }
      out[x] = std::max(out[x], sum / static_cast<double>(count));
    }
  }
  return out;
}

// Light cells of each member: cells of Q not inside any strictly smaller member.
inline std::vector<std::vector<vlg::CellIndex>> light_sets(const vlg::Grid& g,
                                                            const std::vector<vlg::DyadicCube>& family) {
  std::vector<std::vector<vlg::CellIndex>> out(family.size());
  for (std::size_t a = 0; a < family.size(); ++a) {
    for (vlg::CellIndex c = 0; c < g.cell_count(); ++c) {
      if (!cell_in_cube(g, c, family[a])) continue;
      bool shaded = false;
      for (std::size_t b = 0; b < family.size() && !shaded; ++b)
        shaded = strictly_inside(family[b], family[a]) && cell_in_cube(g, c, family[b]);
      if (!shaded) out[a].push_back(c);
    }
  }
  return out;
}

// Haar detail element psi^l_Q on the grid, from the tensor-product formula.
inline std::vector<double> haar_detail(const vlg::Grid& g, int type, const vlg::DyadicCube& q) {
  std::vector<double> out(g.cell_count(), 0.0);
  const double amp = std::pow(2.0, q.scale * g.dim() / 2.0);
  const int half_bit = g.depth() - q.scale - 1;
  for (vlg::CellIndex c = 0; c < out.size(); ++c) {
    if (!cell_in_cube(g, c, q)) continue;
    double v = amp;
    for (int i = 0; i < g.dim(); ++i)
      if ((type >> i) & 1) v *= ((g.axis_coord(c, i) >> half_bit) & 1) ? -1.0 : 1.0;
    out[c] = v;
  }
  return out;
}

inline double inner(const std::vector<double>& a, const std::vector<double>& b, double cell_measure) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s * cell_measure;
}

// Exhaustive best fixed-coefficient subset: min over every N-subset of the
// terms (given as full grid vectors already scaled by their coefficients).
inline double best_subset(const std::vector<double>& f, const std::vector<std::vector<double>>& scaled_terms,
                          std::size_t n, const std::vector<double>& exponents, double cell_measure) {
  const std::size_t m = scaled_terms.size();
  double best = INFINITY;
  for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != n) continue;
    std::vector<double> r = f;
    for (std::size_t i = 0; i < m; ++i)
      if ((mask >> i) & 1)
        for (std::size_t c = 0; c < r.size(); ++c) r[c] -= scaled_terms[i][c];
    best = std::min(best, norm(r, exponents, cell_measure));
  }
  return best;
}

}  // namespace oracle
