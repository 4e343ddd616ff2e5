#pragma once

// Greedy N-term approximation in the Haar system and a fixed-coefficient
// best-subset oracle for the N-term error.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "vlgreedy/dyadic_grid.hpp"
#include "vlgreedy/exponent_field.hpp"
#include "vlgreedy/haar_system.hpp"

namespace vlg {

struct GreedyTerm {
  HaarIndex index;
  double coefficient = 0.0;
  double weight = 0.0;  // |coefficient| * ||b||_{p(.)}
};

// Non-zero terms by decreasing weight; ties keep canonical basis order.
struct GreedyOrdering {
  std::vector<GreedyTerm> terms;
};

GreedyOrdering greedy_order(const HaarCoefficients& c, const ExponentField& p);

// ||f - G_N f||_{p(.)}.
double greedy_residual(const GridFunction& f, const ExponentField& p, std::size_t n_terms);
double greedy_residual(const GridFunction& f, const GreedyOrdering& order, const ExponentField& p,
                       std::size_t n_terms);

struct SearchBudget {
  enum class Mode { Auto, Exhaustive, LocalSearch };
  Mode mode = Mode::Auto;
  // Auto enumerates every subset when C(m, N) is at most this.
  double exhaustive_limit = 1e6;
  // Local search stops after swap_factor * m candidate evaluations.
  std::size_t swap_factor = 200;
  // Coordinate-descent refinement of the retained coefficients.
  bool refine_coefficients = false;
  int refine_sweeps = 50;
};

struct SubsetResult {
  double error = 0.0;
  std::vector<HaarIndex> subset;
  std::vector<double> coefficients;  // differ from the expansion only after refinement
  bool exhaustive = false;
  std::size_t evaluations = 0;
};

// Minimum of ||f - sum_{i in S} c_i b_i|| over |S| = N subsets of the
// expansion's support, with c_i the expansion's own coefficients. An upper
// bound for the true best N-term error, and never above greedy_residual.
SubsetResult best_subset(const GridFunction& f, const ExponentField& p, std::size_t n_terms,
                         const SearchBudget& budget = {});
double best_subset_residual(const GridFunction& f, const ExponentField& p, std::size_t n_terms,
                            const SearchBudget& budget = {});

struct ProfileRow {
  std::size_t n_terms = 0;
  double greedy_error = 0.0;
  double oracle_error = 0.0;
  // greedy / oracle; 1 when both vanish.
  double ratio = 1.0;
};

struct ApproximationProfile {
  std::vector<ProfileRow> rows;
  // Non-fatal findings, e.g. a greedy error that grew with N.
  std::vector<std::string> warnings;
};

ApproximationProfile lebesgue_profile(const GridFunction& f, const ExponentField& p,
                                      const std::vector<std::size_t>& n_list, const SearchBudget& budget = {});

// Seeded test function: `terms` distinct Haar elements at scales 1..J-1,
// alternating between the lower and upper half of axis 0, with random signs
// and coefficients u / ||b||_{p(.)}, u uniform in [0.5, 1.5].
GridFunction mixed_mass_function(const ExponentField& p, std::size_t terms, std::uint64_t seed);

}  // namespace vlg
