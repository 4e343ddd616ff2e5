#pragma once

// Modular, Luxemburg norm and dyadic maximal operator on L^{p(.)}([0,1)^n).

#include <cstddef>
#include <cstdint>
#include <span>

#include "vlgreedy/dyadic_grid.hpp"
#include "vlgreedy/exponent_field.hpp"

namespace vlg {

// Integral of (|f| / lambda)^{p(x)}, as an exact cell sum.
double modular(const GridFunction& f, const ExponentField& p, double lambda);

/// Luxemburg norm: 0 for f == 0, otherwise the unique lambda with
/// modular(f, p, lambda) == 1.
///
/// The root is bracketed by [lambda_lo, max|f|], with lambda_lo found by
/// halving from max|f| until the modular exceeds 1 (the domain has measure
/// one, so the modular is at most 1 at max|f|). Inside the bracket a
/// safeguarded Newton iteration on t = log(lambda) runs to a relative width
/// below 1e-13; the modular is convex and decreasing in t, so Newton steps
/// from the left of the root are monotone and bisection only catches
/// rounding noise.
double luxemburg_norm(const GridFunction& f, const ExponentField& p);

// Same as above for raw cell values on p's grid.
double luxemburg_norm(std::span<const double> values, const ExponentField& p);

// Norm of a simple function equal to values[k] with exponent exponents[k] on
// a set of measure weights[k]; the sets are disjoint, so the weights sum to at
// most one.
double luxemburg_norm_weighted(std::span<const double> values, std::span<const double> exponents,
                               std::span<const double> weights);

// Norm of the indicator of `cells`, memoized on (field hash, cell-set hash).
double char_norm(const ExponentField& p, const CellSet& cells);
double char_norm(const ExponentField& p, const DyadicCube& cube);

struct NormCacheStats {
  std::size_t entries = 0;
  std::size_t hits = 0;
  std::size_t misses = 0;
};

NormCacheStats norm_cache_stats();
void clear_norm_cache();

// Mf(x) = max over dyadic cubes Q containing x (scales 0..J) of the mean of
// |f| over Q.
GridFunction dyadic_maximal(const GridFunction& f);

// 2 ||f||_{p} ||g||_{p'} - integral |f g|; non-negative by Hoelder.
double holder_defect(const GridFunction& f, const GridFunction& g, const ExponentField& p);

struct EmbeddingReport {
  double ratio_measure = 0.0;  // |E| / |Q|
  double ratio_norm = 0.0;     // ||chi_E|| / ||chi_Q||
  double diening_lhs = 0.0;    // |Q|^{1/p_Q}
  double diening_rhs = 0.0;    // 2 ||chi_Q||
  double maximal_lower = 0.0;  // ||M chi_E|| / ||chi_E||
  double norm_e = 0.0;
  double norm_q = 0.0;
  double maximal_norm = 0.0;   // ||M chi_E||

  bool jensen_holds() const noexcept { return diening_lhs <= diening_rhs; }
  // (|E|/|Q|) ||chi_Q|| <= ||M chi_E||, since M chi_E >= |E|/|Q| on Q.
  bool weak_type_holds(double rel_tol = 1e-12) const noexcept {
    return ratio_measure * norm_q <= maximal_norm * (1.0 + rel_tol);
  }
};

EmbeddingReport embedding_checks(const ExponentField& p, const CellSet& e, const DyadicCube& q);

// max ||Mf|| / ||f|| over a seeded battery of `count` functions: indicators
// of random cubes alternating with Gaussian noise. A lower bound for the
// operator norm of M, which is never assumed known.
double maximal_operator_lower_bound(const ExponentField& p, std::uint64_t seed, int count = 64);

}  // namespace vlg
