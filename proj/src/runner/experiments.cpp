#include <chrono>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "artifacts.hpp"
#include "json.hpp"
#include "vlgreedy/error.hpp"
#include "vlgreedy/haar_system.hpp"
#include "vlgreedy/parallel.hpp"
#include "vlgreedy/runner.hpp"
#include "vlgreedy/variable_norm.hpp"

#ifndef VLGREEDY_VERSION
#define VLGREEDY_VERSION "0.0.0"
#endif

namespace vlg {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;
using artifacts::number;

std::uint64_t function_seed(std::uint64_t seed, std::size_t i) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (i + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

json fit_json(const std::optional<PowerFit>& fit) {
  if (!fit) return nullptr;
  return {{"slope", fit->slope}, {"intercept", fit->intercept}, {"r_squared", fit->r_squared}};
}

std::string flag(const std::optional<bool>& b) { return b ? (*b ? "true" : "false") : ""; }

struct Context {
  ExperimentConfig config;
  ExponentField field;
  fs::path out;
  std::string hash;
  std::ostream& log;
};

// Filled by each experiment; the caller adds the common metadata.
struct Outcome {
  int exit_code = kExitOk;
  std::string status = "ok";
  json results = json::object();
};

Outcome run_norm(Context& ctx) {
  const auto& p = ctx.field;
  const Grid& grid = p.grid();
  const int top = ctx.config.norm.max_scale < 0 ? std::min(grid.depth(), 8) : ctx.config.norm.max_scale;
  artifacts::CsvTable csv({"cube", "measure", "char_norm", "p_Q", "jensen_lhs", "jensen_rhs", "config_hash"});
  std::size_t violations = 0;
  double worst = 0.0;
  for (const auto& q : enumerate_cubes(grid, 0, top)) {
    const double pq = harmonic_mean_exponent(p, q);
    const double norm = char_norm(p, q);
    const double lhs = std::pow(q.measure(), 1.0 / pq);
    const double rhs = 2.0 * norm;
    violations += lhs > rhs ? 1 : 0;
    worst = std::max(worst, lhs / rhs);
    csv.add({to_string(q), number(q.measure()), number(norm), number(pq), number(lhs), number(rhs), ctx.hash});
  }
  artifacts::write_atomic(ctx.out / "norm.csv", csv.str());

  Outcome o;
  o.results = {{"p_minus", p.p_minus()},
               {"p_plus", p.p_plus()},
               {"cubes", csv.rows()},
               {"max_scale", top},
               {"jensen_violations", violations},
               {"jensen_max_ratio", worst}};
  if (grid.cell_count() <= 4096)
    o.results["log_holder_constant"] = log_holder_constant(p);
  else
    o.results["log_holder_constant"] = nullptr;
  const std::uint64_t seed = ctx.config.seed.value_or(0);
  o.results["maximal_operator_lower_bound"] = {{"value", maximal_operator_lower_bound(p, seed)},
                                               {"functions", 64},
                                               {"seed", seed}};
  ctx.log << "norm: " << csv.rows() << " cubes, p in [" << p.p_minus() << ", " << p.p_plus() << "], " << violations
          << " Jensen violations\n";
  return o;
}

Outcome run_greedy(Context& ctx) {
  const auto& cfg = ctx.config;
  const auto& p = ctx.field;
  std::vector<std::size_t> ns;
  for (auto n : cfg.ns.empty() ? default_ns(cfg) : cfg.ns)
    if (n <= cfg.greedy.terms) ns.push_back(n);
  if (ns.empty()) throw Error(ErrorKind::ConfigError, "/ns: no N within the number of terms");

  const std::size_t count = cfg.greedy.functions;
  std::vector<GridFunction> functions(count, GridFunction::zeros(p.grid()));
  std::vector<ApproximationProfile> profiles(count);
  parallel_for(count, cfg.threads, [&](std::size_t i) {
    functions[i] = mixed_mass_function(p, cfg.greedy.terms, function_seed(*cfg.seed, i));
    profiles[i] = lebesgue_profile(functions[i], p, ns, cfg.greedy.budget);
  });

  artifacts::CsvTable csv({"N", "greedy_error", "oracle_error", "ratio", "function", "config_hash"});
  json per_function = json::array();
  json warnings = json::array();
  double min_ratio = std::numeric_limits<double>::infinity();
  double max_slope = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < count; ++i) {
    std::vector<double> xs, ys;
    for (const auto& row : profiles[i].rows) {
      csv.add({std::to_string(row.n_terms), number(row.greedy_error), number(row.oracle_error), number(row.ratio),
               std::to_string(i), ctx.hash});
      min_ratio = std::min(min_ratio, row.ratio);
      if (row.oracle_error > 0.0) {
        xs.push_back(static_cast<double>(row.n_terms));
        ys.push_back(row.ratio);
      }
    }
    std::optional<PowerFit> fit;
    if (xs.size() >= 3) fit = fit_loglog(xs, ys);
    if (fit) max_slope = std::max(max_slope, fit->slope);
    per_function.push_back({{"function", i}, {"ratio_fit", fit_json(fit)}});
    for (const auto& w : profiles[i].warnings) warnings.push_back("function " + std::to_string(i) + ": " + w);
  }
  artifacts::write_atomic(ctx.out / "greedy.csv", csv.str());

  if (cfg.greedy.write_coefficients) {
    const int n = p.grid().dim();
    std::vector<std::string> header{"function", "type", "j"};
    for (int i = 0; i < n; ++i) header.push_back("k" + std::to_string(i));
    header.push_back("value");
    header.push_back("config_hash");
    artifacts::CsvTable coef(header);
    for (std::size_t i = 0; i < count; ++i) {
      const auto c = analyze(functions[i]);
      for (const auto& idx : c.support()) {
        std::vector<std::string> row{std::to_string(i), std::to_string(idx.type), std::to_string(idx.cube.scale)};
        for (int a = 0; a < n; ++a) row.push_back(std::to_string(idx.is_detail ? idx.cube.axis(a) : 0));
        row.push_back(number(c[idx]));
        row.push_back(ctx.hash);
        coef.add(std::move(row));
      }
    }
    artifacts::write_atomic(ctx.out / "coefficients.csv", coef.str());
  }

  Outcome o;
  o.results = {{"functions", count},
               {"terms", cfg.greedy.terms},
               {"ns", ns},
               {"min_ratio", min_ratio},
               {"max_ratio_slope", std::isfinite(max_slope) ? json(max_slope) : json(nullptr)},
               {"slope_target", 1.0 / p.p_minus() - 1.0 / p.p_plus()},
               {"per_function", per_function},
               {"warnings", warnings},
               {"oracle", "fixed-coefficient best subset; an upper bound for the best N-term error"}};
  ctx.log << "greedy: " << count << " functions, min ratio " << min_ratio << "\n";
  return o;
}

Outcome run_democracy(Context& ctx) {
  const auto& cfg = ctx.config;
  DemocracyOptions opt;
  opt.ns = cfg.ns.empty() ? default_ns(cfg) : cfg.ns;
  opt.strategies = cfg.strategies;
  opt.epsilons = cfg.epsilons;
  opt.seed = *cfg.seed;
  opt.random_families = cfg.random_families;
  opt.type = cfg.haar_type;
  opt.threads = cfg.threads;
  const auto rec = estimate_democracy(ctx.field, opt);

  artifacts::CsvTable csv({"N", "strategy", "family", "value", "gamma1_lower_ok", "gamma2_upper_ok", "square_sum",
                           "bound", "config_hash"});
  for (const auto& fr : rec.families)
    csv.add({std::to_string(fr.n), std::string(to_string(fr.strategy)), fr.label, number(fr.value),
             flag(fr.gamma1_lower_ok), flag(fr.gamma2_upper_ok), number(fr.square_sum),
             fr.gamma1_lower_ok || fr.gamma2_upper_ok ? number(fr.bound) : "", ctx.hash});
  artifacts::write_atomic(ctx.out / "democracy.csv", csv.str());

  json rows = json::array();
  for (const auto& r : rec.rows)
    rows.push_back({{"N", r.n},
                    {"h_l_est", r.h_l_est},
                    {"h_r_est", r.h_r_est},
                    {"argmin", r.argmin},
                    {"argmax", r.argmax},
                    {"sandwich_lower", r.sandwich_lower},
                    {"sandwich_upper", r.sandwich_upper},
                    {"families", r.families}});
  json capacity = json::array();
  for (const auto& c : rec.capacity_errors)
    capacity.push_back({{"strategy", to_string(c.strategy)}, {"family", c.label}, {"N", c.n},
                        {"max_feasible", c.max_feasible}});
  std::map<std::string, std::size_t> battery;
  std::size_t gamma_violations = 0;
  for (const auto& fr : rec.families) {
    ++battery[std::string(to_string(fr.strategy))];
    if ((fr.gamma1_lower_ok && !*fr.gamma1_lower_ok) || (fr.gamma2_upper_ok && !*fr.gamma2_upper_ok))
      ++gamma_violations;
  }

  Outcome o;
  o.results = {{"rows", rows},
               {"slope_r", rec.fit_r ? json(rec.fit_r->slope) : json(nullptr)},
               {"slope_l", rec.fit_l ? json(rec.fit_l->slope) : json(nullptr)},
               {"fit_r", fit_json(rec.fit_r)},
               {"fit_l", fit_json(rec.fit_l)},
               {"sandwich_lower_fit", fit_json(rec.sandwich_lower_fit)},
               {"sandwich_upper_fit", fit_json(rec.sandwich_upper_fit)},
               {"targets", {{"slope_r", 1.0 / ctx.field.p_minus()}, {"slope_l", 1.0 / ctx.field.p_plus()}}},
               {"battery_sizes", battery},
               {"gamma_bound_violations", gamma_violations},
               {"capacity_errors", capacity},
               {"notes",
                {"h_r_est is a maximum over generated families, hence a lower bound for h_r; h_l_est is a minimum, "
                 "hence an upper bound for h_l",
                 "gamma1 bounds use the measured per-family r_min in place of the unknown maximal operator norm"}}};
  if (!rec.capacity_errors.empty()) {
    o.exit_code = kExitCapacity;
    o.status = "partial";
    ctx.log << "democracy: " << rec.capacity_errors.size() << " infeasible (strategy, N) requests\n";
  }
  if (rec.fit_r && rec.fit_l)
    ctx.log << "democracy: slope_r " << rec.fit_r->slope << " (R^2 " << rec.fit_r->r_squared << "), slope_l "
            << rec.fit_l->slope << " (R^2 " << rec.fit_l->r_squared << ")\n";
  return o;
}

json checks_json(const std::vector<CheckResult>& checks) {
  json out = json::array();
  for (const auto& c : checks)
    out.push_back({{"check", c.check},
                   {"measured", c.measured},
                   {"bound", c.bound},
                   {"tolerance", c.tolerance},
                   {"relation", to_string(c.relation)},
                   {"pass", c.pass},
                   {"advisory", c.advisory},
                   {"detail", c.detail}});
  return out;
}

Outcome run_verify(Context& ctx) {
  const auto checks = verify_suite(ctx.config);
  artifacts::write_atomic(ctx.out / "verify.json", checks_json(checks).dump(2) + "\n");
  Outcome o;
  json failing = json::array();
  std::size_t passed = 0;
  for (const auto& c : checks) {
    if (c.pass) ++passed;
    if (!c.pass && !c.advisory) failing.push_back(c.check);
    if (!c.pass) ctx.log << (c.advisory ? "warning: " : "FAIL: ") << c.check << " measured " << c.measured << " "
                         << to_string(c.relation) << " " << c.bound << " (tolerance " << c.tolerance << ")\n";
  }
  o.results = {{"checks", checks.size()}, {"passed", passed}, {"failing", failing}};
  if (!failing.empty()) {
    o.exit_code = kExitVerify;
    o.status = "verification-failed";
  }
  ctx.log << "verify: " << passed << "/" << checks.size() << " checks pass\n";
  return o;
}

std::string render_report(const fs::path& dir) {
  std::ostringstream os;
  auto read = [](const fs::path& path) {
    std::ifstream in(path);
    return json::parse(in);
  };
  const auto summary_path = dir / "summary.json";
  if (!fs::exists(summary_path)) throw Error(ErrorKind::InvalidInput, "no summary.json in " + dir.string());
  const auto s = read(summary_path);
  os << "experiment: " << s.value("experiment", "?") << "\n";
  os << "status: " << s.value("status", "?") << "\n";
  os << "config_hash: " << s.value("config_hash", "?") << "\n";
  os << "timestamp: " << s.value("timestamp", "?") << "\n";
  if (s.contains("wall_clock_seconds")) os << "wall_clock_seconds: " << s["wall_clock_seconds"].dump() << "\n";
  if (s.contains("results")) {
    const auto& r = s["results"];
    for (const char* key : {"slope_r", "slope_l", "min_ratio", "max_ratio_slope", "p_minus", "p_plus",
                            "jensen_violations", "checks", "passed"})
      if (r.contains(key)) os << key << ": " << r[key].dump() << "\n";
    if (r.contains("rows"))
      for (const auto& row : r["rows"])
        os << "  N=" << row["N"].dump() << " h_l_est=" << row["h_l_est"].dump()
           << " h_r_est=" << row["h_r_est"].dump() << "\n";
    if (r.contains("failing") && !r["failing"].empty()) os << "failing: " << r["failing"].dump() << "\n";
  }
  const auto verify_path = dir / "verify.json";
  if (fs::exists(verify_path))
    for (const auto& c : read(verify_path))
      os << "  [" << (c["pass"].get<bool>() ? "pass" : (c["advisory"].get<bool>() ? "warn" : "FAIL")) << "] "
         << c["check"].get<std::string>() << " measured=" << c["measured"].dump() << " "
         << c["relation"].get<std::string>() << " " << c["bound"].dump() << "\n";
  return os.str();
}

}  // namespace

int run_experiment(Experiment command, const fs::path& config_path, const RunOptions& options, std::ostream& log) {
  ExperimentConfig config;
  std::optional<ExponentField> field;
  try {
    config = load_config(config_path);
    if (options.seed) config.seed = options.seed;
    if (options.threads) config.threads = std::max(1U, *options.threads);
    if (options.out_dir) config.output_dir = options.out_dir->string();
    if (config.experiment && *config.experiment != command && command != Experiment::Report)
      throw Error(ErrorKind::ConfigError, "/experiment: config is for '" + std::string(to_string(*config.experiment)) +
                                              "', not '" + std::string(to_string(command)) + "'");
    const bool randomized =
        command == Experiment::Greedy || command == Experiment::Democracy || command == Experiment::Verify;
    if (randomized && !config.seed)
      throw Error(ErrorKind::ConfigError, "/seed: required for " + std::string(to_string(command)));
    if (command != Experiment::Report) field = build_field(config);
  } catch (const Error& e) {
    log << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    log << "config error: " << e.what() << "\n";
    return kExitConfig;
  }

  const fs::path out = config.output_dir;
  if (command == Experiment::Report) {
    try {
      const auto text = render_report(out);
      log << text;
      artifacts::write_atomic(out / "report.txt", text);
      return kExitOk;
    } catch (const std::exception& e) {
      log << "report failed: " << e.what() << "\n";
      return kExitFailure;
    }
  }

  Context ctx{config, *field, out, config_hash(config), log};
  const auto start = std::chrono::steady_clock::now();
  Outcome outcome;
  std::string error;
  try {
    switch (command) {
      case Experiment::Norm: outcome = run_norm(ctx); break;
      case Experiment::Greedy: outcome = run_greedy(ctx); break;
      case Experiment::Democracy: outcome = run_democracy(ctx); break;
      case Experiment::Verify: outcome = run_verify(ctx); break;
      case Experiment::Report: break;
    }
  } catch (const CapacityError& e) {
    outcome.exit_code = kExitCapacity;
    outcome.status = "capacity-error";
    error = e.what();
  } catch (const Error& e) {
    outcome.exit_code = e.kind() == ErrorKind::ConfigError ? kExitConfig : kExitFailure;
    outcome.status = "failed";
    error = e.what();
  } catch (const std::exception& e) {
    outcome.exit_code = kExitFailure;
    outcome.status = "failed";
    error = e.what();
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  json summary{{"tool", "vlgreedy"},
               {"version", VLGREEDY_VERSION},
               {"experiment", to_string(command)},
               {"status", outcome.status},
               {"config_hash", ctx.hash},
               {"config", json::parse(config_echo(config))},
               {"timestamp", artifacts::utc_timestamp()},
               {"wall_clock_seconds", seconds},
               {"results", outcome.results}};
  if (!error.empty()) {
    summary["error"] = error;
    log << "error: " << error << "\n";
  }
  try {
    artifacts::write_atomic(out / "summary.json", summary.dump(2) + "\n");
  } catch (const std::exception& e) {
    log << "cannot write summary: " << e.what() << "\n";
    return kExitFailure;
  }
  return outcome.exit_code;
}

}  // namespace vlg
