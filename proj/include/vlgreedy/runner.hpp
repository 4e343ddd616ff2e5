#pragma once

// Configuration-driven experiment runner behind the vlgreedy tool.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vlgreedy/democracy_lab.hpp"
#include "vlgreedy/exponent_field.hpp"
#include "vlgreedy/greedy_approx.hpp"

namespace vlg {

enum class Experiment { Norm, Greedy, Democracy, Verify, Report };

std::string_view to_string(Experiment e) noexcept;
Experiment parse_experiment(std::string_view name);

struct NormSettings {
  // Cubes of scale 0..max_scale go to norm.csv; -1 picks min(J, 8).
  int max_scale = -1;
};

struct GreedySettings {
  std::size_t functions = 4;
  std::size_t terms = 40;
  SearchBudget budget;
  bool write_coefficients = false;
};

struct VerifySettings {
  std::size_t families = 200;
  std::size_t pairs = 200;
  std::size_t functions = 4;
  // Replaces the tolerance of the named check.
  std::map<std::string, double> tolerance_overrides;
};

struct ExperimentConfig {
  int dimension = 1;
  int depth = 10;
  ExponentRecipe exponent = ConstantExponent{2.0};
  std::optional<Experiment> experiment;
  std::optional<std::uint64_t> seed;
  std::vector<std::size_t> ns;
  std::vector<double> epsilons{0.25, 0.5};
  std::vector<Strategy> strategies = all_strategies();
  std::size_t random_families = 100;
  int haar_type = 1;
  unsigned threads = 1;
  std::string output_dir = "results";
  NormSettings norm;
  GreedySettings greedy;
  VerifySettings verify;
};

inline constexpr int kMaxConfigBits = 24;

// Throws Error(ConfigError) naming the offending JSON path.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

// Canonical JSON of the effective configuration.
std::string config_echo(const ExperimentConfig& config);
// 16 hex digits of the FNV-1a hash of config_echo, leaving out threads and
// output_dir since neither changes results.
std::string config_hash(const ExperimentConfig& config);

// Powers of two from 1 to min(2^{n(J-1)}, 1024); the default N grid.
std::vector<std::size_t> default_ns(const ExperimentConfig& config);

ExponentField build_field(const ExperimentConfig& config);

struct RunOptions {
  std::optional<std::filesystem::path> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitCapacity = 3;
inline constexpr int kExitVerify = 4;

/// Runs one subcommand and returns the process exit status.
///
/// Outputs land in the output directory via temp file + rename. CSV bodies
/// depend only on the effective config; timestamps and timings live in
/// summary.json. Messages go to `log`.
int run_experiment(Experiment command, const std::filesystem::path& config_path, const RunOptions& options,
                   std::ostream& log);

// One verification outcome. `pass` follows the relation between measured and
// bound, with the tolerance applied on the lenient side.
struct CheckResult {
  enum class Relation { AtMost, AtLeast, Above };
  std::string check;
  double measured = 0.0;
  double bound = 0.0;
  double tolerance = 0.0;
  Relation relation = Relation::AtMost;
  bool pass = false;
  // Reported but never fails a run.
  bool advisory = false;
  std::string detail;
};

std::string_view to_string(CheckResult::Relation r) noexcept;
CheckResult make_check(std::string name, double measured, CheckResult::Relation relation, double bound,
                       double tolerance, std::string detail = {});

// Every battery below, sized by config.verify and seeded by config.seed.
std::vector<CheckResult> verify_suite(const ExperimentConfig& config);

// Batteries, usable on their own.
std::vector<CheckResult> norm_battery(const ExponentField& p, std::size_t samples, std::uint64_t seed);
std::vector<CheckResult> lemma_battery(const ExponentField& p, std::size_t pairs, std::uint64_t seed);
std::vector<CheckResult> haar_battery(const ExponentField& p, std::size_t samples, std::uint64_t seed);
std::vector<CheckResult> linearization_battery(const ExponentField& p, std::size_t families, std::uint64_t seed);
std::vector<CheckResult> gamma_battery(const ExponentField& p, const std::vector<double>& epsilons,
                                       const std::vector<std::size_t>& ns);
std::vector<CheckResult> greedy_battery(const ExponentField& p, std::size_t functions, std::size_t terms,
                                        const std::vector<std::size_t>& ns, std::uint64_t seed);

// Smallest fitted slope of log(||chi_E|| / ||chi_Q||) against log(|E| / |Q|)
// over chains E shrinking geometrically inside a few cubes Q.
double norm_decay_exponent(const ExponentField& p, std::uint64_t seed, int chains = 8);

// Seeded family of 1..max_size cubes built by repeatedly refining members,
// so nesting is frequent.
CubeFamily nesting_heavy_family(const Grid& grid, std::size_t max_size, std::uint64_t seed);

}  // namespace vlg
