#pragma once

// Democracy sums over cube families, the extremal families used to show the
// bounds are sharp, and estimation of the democracy functions h_r, h_l.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vlgreedy/dyadic_grid.hpp"
#include "vlgreedy/exponent_field.hpp"

namespace vlg {

// || sum_{Q in family} psi^l_Q / ||psi^l_Q|| ||, by synthesis on the grid.
double democracy_norm(const CubeFamily& family, int type, const ExponentField& p);

// S(x) = (sum_Q chi_Q(x) / ||chi_Q||^2)^{1/2}.
GridFunction square_sum_function(const CubeFamily& family, const ExponentField& p);
double square_sum_norm(const CubeFamily& family, const ExponentField& p);

// sum over the minimal cubes of chi_{light(Q)} / ||chi_Q||.
GridFunction linearized_function(const CubeFamily& family, const ExponentField& p);
double linearized_norm(const CubeFamily& family, const ExponentField& p);

// Range over the cells of the union of S(x) * ||chi_{Q_x}||, Q_x the smallest
// member containing x. The lower end is at least 1.
struct PointwiseRatio {
  double min = 0.0;
  double max = 0.0;
};
PointwiseRatio pointwise_ratio(const CubeFamily& family, const ExponentField& p);

/// N pairwise disjoint cubes with |G_eps ∩ Q| / |Q| >= 1/2, where
/// G_eps = {p <= p_- + eps}.
///
/// Scales are scanned from `max_scale` (default J) down to 0; the first scale
/// holding at least N qualifying cubes supplies its first N in canonical
/// order. Throws CapacityError with the largest single-scale count otherwise.
CubeFamily construct_gamma1(const ExponentField& p, double epsilon, std::size_t n, int max_scale = -1);

/// N pairwise disjoint cubes with |H_eps ∩ Q| / |Q| > 1 - 1/(2N) and
/// 1/p_Q < 1/(p_+ - eps), where H_eps = {p >= p_+ - eps}. Same scan as
/// construct_gamma1. Requires 0 < eps < p_+ - 1.
CubeFamily construct_gamma2(const ExponentField& p, double epsilon, std::size_t n, int max_scale = -1);

// r_min * N^{1/(p_- + eps)}, r_min = min over the family of
// ||chi_{G_eps ∩ Q}|| / ||chi_Q||.
double gamma1_lower_bound(const CubeFamily& family, const ExponentField& p, double epsilon);

// 2^{p_+/p_- + 1/(p_+ - eps)} * N^{1/(p_+ - eps)}.
double gamma2_upper_bound(const ExponentField& p, double epsilon, std::size_t n);

struct PowerFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

// Least squares of log(value) against log(N). Needs >= 3 pairs with distinct
// N >= 1 and positive values.
PowerFit fit_exponent(const std::vector<std::pair<double, double>>& pairs);

// Same fit with arbitrary positive abscissae.
PowerFit fit_loglog(const std::vector<double>& xs, const std::vector<double>& ys);

enum class Strategy { DisjointInG, Gamma1, Gamma2, NestedTower, UniformRandom, StratifiedRandom };

std::string_view to_string(Strategy s) noexcept;
Strategy parse_strategy(std::string_view name);
std::vector<Strategy> all_strategies();

struct DemocracyOptions {
  std::vector<std::size_t> ns;
  std::vector<Strategy> strategies = all_strategies();
  std::vector<double> epsilons{0.25, 0.5};
  std::uint64_t seed = 0;
  // Families drawn per N by each random strategy.
  std::size_t random_families = 100;
  int type = 1;
  unsigned threads = 1;
};

struct FamilyRecord {
  std::size_t n = 0;
  Strategy strategy{};
  std::string label;
  double epsilon = 0.0;  // level-set parameter; 0 when unused
  CubeFamily family;
  double value = 0.0;       // democracy_norm
  double square_sum = 0.0;  // square_sum_norm
  std::optional<bool> gamma1_lower_ok;
  std::optional<bool> gamma2_upper_ok;
  double bound = 0.0;  // gamma bound checked, if any
};

struct DemocracyRow {
  std::size_t n = 0;
  double h_l_est = 0.0;
  double h_r_est = 0.0;
  std::string argmin;
  std::string argmax;
  // min of square_sum / N^{1/p_+} and max of square_sum / N^{1/p_-}.
  double sandwich_lower = 0.0;
  double sandwich_upper = 0.0;
  std::size_t families = 0;
};

struct CapacityNote {
  Strategy strategy{};
  std::string label;
  std::size_t n = 0;
  std::size_t max_feasible = 0;
};

/// Per-N estimates of the democracy functions.
///
/// h_r_est is the maximum of democracy_norm over the generated families and
/// so a lower bound for h_r; h_l_est is the minimum and an upper bound for
/// h_l. Families come from structured generators (extremal constructions,
/// towers) and seeded random ones; the output does not depend on `threads`.
struct DemocracyRecord {
  std::vector<DemocracyRow> rows;
  std::vector<FamilyRecord> families;
  std::vector<CapacityNote> capacity_errors;
  std::optional<PowerFit> fit_r;
  std::optional<PowerFit> fit_l;
  std::optional<PowerFit> sandwich_lower_fit;
  std::optional<PowerFit> sandwich_upper_fit;
};

DemocracyRecord estimate_democracy(const ExponentField& p, const DemocracyOptions& options);

// Generators, exposed for tests and batteries. All cubes have scale <= J-1.
CubeFamily nested_tower_family(const ExponentField& p, const CellSet& region, std::size_t n);
CubeFamily disjoint_inside_family(const ExponentField& p, const CellSet& region, std::size_t n);
CubeFamily uniform_random_family(const Grid& grid, std::size_t n, std::uint64_t seed);
CubeFamily stratified_random_family(const Grid& grid, const CellSet& low_region, const CellSet& high_region,
                                    double low_fraction, std::size_t n, std::uint64_t seed);

}  // namespace vlg
