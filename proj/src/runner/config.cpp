#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "vlgreedy/error.hpp"
#include "vlgreedy/hashing.hpp"
#include "vlgreedy/runner.hpp"

namespace vlg {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw Error(ErrorKind::ConfigError, (path.empty() ? "/" : path) + ": " + message);
}

// Object reader that tracks its JSON path and rejects unknown keys.
class Node {
 public:
  Node(const json& value, std::string path) : value_(value), path_(std::move(path)) {
    if (!value_.is_object()) fail(path_, "expected an object");
  }

  bool has(const char* key) {
    seen_.insert(key);
    return value_.contains(key);
  }

  const json& at(const char* key) {
    seen_.insert(key);
    return value_.at(key);
  }

  std::string path(const char* key) const { return path_ + "/" + key; }

  void finish() const {
    for (const auto& [key, _] : value_.items())
      if (!seen_.count(key)) fail(path_ + "/" + key, "unknown key");
  }

 private:
  const json& value_;
  std::string path_;
  std::set<std::string> seen_;
};

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  return v.get<double>();
}

std::int64_t as_integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  return v.get<std::int64_t>();
}

std::size_t as_count(const json& v, const std::string& path, std::size_t min = 0) {
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0))
    fail(path, "expected a non-negative integer");
  const auto n = v.get<std::uint64_t>();
  if (n < min) fail(path, "must be at least " + std::to_string(min));
  return static_cast<std::size_t>(n);
}

bool as_bool(const json& v, const std::string& path) {
  if (!v.is_boolean()) fail(path, "expected a boolean");
  return v.get<bool>();
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

std::vector<double> as_numbers(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_number(v[i], path + "/" + std::to_string(i)));
  return out;
}

ExponentRecipe parse_exponent(const json& v, const std::string& path) {
  Node node(v, path);
  if (!node.has("kind")) fail(path, "missing 'kind'");
  const std::string kind = as_string(node.at("kind"), node.path("kind"));
  ExponentRecipe out;
  if (kind == "constant") {
    if (!node.has("value")) fail(path, "missing 'value'");
    out = ConstantExponent{as_number(node.at("value"), node.path("value"))};
  } else if (kind == "piecewise") {
    PiecewiseExponent pw;
    if (!node.has("pieces") || !node.at("pieces").is_array()) fail(node.path("pieces"), "expected an array");
    const auto& pieces = node.at("pieces");
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      const std::string pp = node.path("pieces") + "/" + std::to_string(i);
      Node piece(pieces[i], pp);
      for (const char* key : {"lo", "hi", "value"})
        if (!piece.has(key)) fail(pp, std::string("missing '") + key + "'");
      pw.pieces.push_back({as_numbers(piece.at("lo"), piece.path("lo")), as_numbers(piece.at("hi"), piece.path("hi")),
                           as_number(piece.at("value"), piece.path("value"))});
      piece.finish();
    }
    if (node.has("default")) pw.fallback = as_number(node.at("default"), node.path("default"));
    out = pw;
  } else if (kind == "smoothstep") {
    SmoothstepExponent s;
    if (node.has("p_left")) s.p_left = as_number(node.at("p_left"), node.path("p_left"));
    if (node.has("p_right")) s.p_right = as_number(node.at("p_right"), node.path("p_right"));
    if (node.has("start")) s.start = as_number(node.at("start"), node.path("start"));
    if (node.has("end")) s.end = as_number(node.at("end"), node.path("end"));
    if (node.has("axis")) s.axis = static_cast<int>(as_integer(node.at("axis"), node.path("axis")));
    out = s;
  } else if (kind == "samples") {
    if (!node.has("values")) fail(path, "missing 'values'");
    out = SampledExponent{as_numbers(node.at("values"), node.path("values"))};
  } else {
    fail(node.path("kind"), "unknown exponent kind '" + kind + "'");
  }
  node.finish();
  return out;
}

json exponent_json(const ExponentRecipe& recipe) {
  return std::visit(
      [](const auto& r) -> json {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, ConstantExponent>) {
          return {{"kind", "constant"}, {"value", r.value}};
        } else if constexpr (std::is_same_v<T, PiecewiseExponent>) {
          json pieces = json::array();
          for (const auto& piece : r.pieces) pieces.push_back({{"lo", piece.lo}, {"hi", piece.hi}, {"value", piece.value}});
          json out{{"kind", "piecewise"}, {"pieces", pieces}};
          if (r.fallback) out["default"] = *r.fallback;
          return out;
        } else if constexpr (std::is_same_v<T, SmoothstepExponent>) {
          return {{"kind", "smoothstep"}, {"p_left", r.p_left}, {"p_right", r.p_right},
                  {"start", r.start},     {"end", r.end},         {"axis", r.axis}};
        } else {
          return {{"kind", "samples"}, {"values", r.values}};
        }
      },
      recipe);
}

std::string_view mode_name(SearchBudget::Mode m) {
  switch (m) {
    case SearchBudget::Mode::Auto: return "auto";
    case SearchBudget::Mode::Exhaustive: return "exhaustive";
    case SearchBudget::Mode::LocalSearch: return "local";
  }
  return "auto";
}

json config_json(const ExperimentConfig& c, bool for_hash) {
  json strategies = json::array();
  for (auto s : c.strategies) strategies.push_back(std::string(to_string(s)));
  json out{
      {"dimension", c.dimension},
      {"depth", c.depth},
      {"exponent", exponent_json(c.exponent)},
      {"epsilons", c.epsilons},
      {"strategies", strategies},
      {"random_families", c.random_families},
      {"haar_type", c.haar_type},
      {"norm", {{"max_scale", c.norm.max_scale}}},
      {"greedy",
       {{"functions", c.greedy.functions},
        {"terms", c.greedy.terms},
        {"search", mode_name(c.greedy.budget.mode)},
        {"exhaustive_limit", c.greedy.budget.exhaustive_limit},
        {"swap_factor", c.greedy.budget.swap_factor},
        {"refine_coefficients", c.greedy.budget.refine_coefficients},
        {"refine_sweeps", c.greedy.budget.refine_sweeps},
        {"write_coefficients", c.greedy.write_coefficients}}},
      {"verify",
       {{"families", c.verify.families},
        {"pairs", c.verify.pairs},
        {"functions", c.verify.functions},
        {"tolerance_overrides", c.verify.tolerance_overrides}}},
  };
  // Absent keys stay absent so the echo parses back to the same config.
  if (c.experiment) out["experiment"] = std::string(to_string(*c.experiment));
  if (c.seed) out["seed"] = *c.seed;
  if (!c.ns.empty()) out["ns"] = c.ns;
  if (!for_hash) {
    out["threads"] = c.threads;
    out["output_dir"] = c.output_dir;
  }
  return out;
}

}  // namespace

std::string_view to_string(Experiment e) noexcept {
  switch (e) {
    case Experiment::Norm: return "norm";
    case Experiment::Greedy: return "greedy";
    case Experiment::Democracy: return "democracy";
    case Experiment::Verify: return "verify";
    case Experiment::Report: return "report";
  }
  return "unknown";
}

Experiment parse_experiment(std::string_view name) {
  for (auto e : {Experiment::Norm, Experiment::Greedy, Experiment::Democracy, Experiment::Verify, Experiment::Report})
    if (to_string(e) == name) return e;
  throw Error(ErrorKind::ConfigError, "unknown experiment '" + std::string(name) + "'");
}

ExperimentConfig parse_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::ConfigError, std::string("malformed JSON: ") + e.what());
  }
  ExperimentConfig c;
  Node root(doc, "");
  if (root.has("dimension")) c.dimension = static_cast<int>(as_integer(root.at("dimension"), "/dimension"));
  if (root.has("depth")) c.depth = static_cast<int>(as_integer(root.at("depth"), "/depth"));
  if (c.dimension < 1) fail("/dimension", "must be at least 1");
  if (c.depth < 1) fail("/depth", "must be at least 1");
  if (c.dimension * c.depth > kMaxConfigBits)
    fail("/depth", "dimension * depth = " + std::to_string(c.dimension * c.depth) + " exceeds " +
                       std::to_string(kMaxConfigBits));
  if (!root.has("exponent")) fail("/exponent", "missing");
  c.exponent = parse_exponent(root.at("exponent"), "/exponent");
  if (root.has("experiment")) {
    try {
      c.experiment = parse_experiment(as_string(root.at("experiment"), "/experiment"));
    } catch (const Error&) {
      fail("/experiment", "unknown experiment");
    }
  }
  if (root.has("seed")) {
    const auto& s = root.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0))
      fail("/seed", "expected a non-negative integer");
    c.seed = s.get<std::uint64_t>();
  }
  if (root.has("ns")) {
    const auto& v = root.at("ns");
    if (!v.is_array() || v.empty()) fail("/ns", "expected a non-empty array");
    for (std::size_t i = 0; i < v.size(); ++i) {
      const auto n = as_count(v[i], "/ns/" + std::to_string(i), 1);
      if (!c.ns.empty() && n <= c.ns.back()) fail("/ns/" + std::to_string(i), "must be strictly ascending");
      c.ns.push_back(n);
    }
  }
  if (root.has("epsilons")) {
    c.epsilons = as_numbers(root.at("epsilons"), "/epsilons");
    if (c.epsilons.empty()) fail("/epsilons", "must not be empty");
    for (std::size_t i = 0; i < c.epsilons.size(); ++i)
      if (!(c.epsilons[i] > 0.0)) fail("/epsilons/" + std::to_string(i), "must be positive");
  }
  if (root.has("strategies")) {
    const auto& v = root.at("strategies");
    if (!v.is_array() || v.empty()) fail("/strategies", "expected a non-empty array");
    c.strategies.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string p = "/strategies/" + std::to_string(i);
      try {
        c.strategies.push_back(parse_strategy(as_string(v[i], p)));
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::ConfigError) throw;
        fail(p, e.what());
      }
    }
  }
  if (root.has("random_families")) c.random_families = as_count(root.at("random_families"), "/random_families");
  if (root.has("haar_type")) c.haar_type = static_cast<int>(as_integer(root.at("haar_type"), "/haar_type"));
  if (c.haar_type < 1 || c.haar_type >= (1 << c.dimension)) fail("/haar_type", "must lie in 1 .. 2^n - 1");
  if (root.has("threads")) c.threads = static_cast<unsigned>(as_count(root.at("threads"), "/threads", 1));
  if (root.has("output_dir")) c.output_dir = as_string(root.at("output_dir"), "/output_dir");

  if (root.has("norm")) {
    Node n(root.at("norm"), "/norm");
    if (n.has("max_scale")) c.norm.max_scale = static_cast<int>(as_integer(n.at("max_scale"), n.path("max_scale")));
    if (c.norm.max_scale > c.depth) fail("/norm/max_scale", "exceeds depth");
    n.finish();
  }
  if (root.has("greedy")) {
    Node g(root.at("greedy"), "/greedy");
    auto& b = c.greedy.budget;
    if (g.has("functions")) c.greedy.functions = as_count(g.at("functions"), g.path("functions"), 1);
    if (g.has("terms")) c.greedy.terms = as_count(g.at("terms"), g.path("terms"), 1);
    if (g.has("search")) {
      const auto m = as_string(g.at("search"), g.path("search"));
      if (m == "auto")
        b.mode = SearchBudget::Mode::Auto;
      else if (m == "exhaustive")
        b.mode = SearchBudget::Mode::Exhaustive;
      else if (m == "local")
        b.mode = SearchBudget::Mode::LocalSearch;
      else
        fail(g.path("search"), "expected auto, exhaustive or local");
    }
    if (g.has("exhaustive_limit")) b.exhaustive_limit = as_number(g.at("exhaustive_limit"), g.path("exhaustive_limit"));
    if (g.has("swap_factor")) b.swap_factor = as_count(g.at("swap_factor"), g.path("swap_factor"), 1);
    if (g.has("refine_coefficients"))
      b.refine_coefficients = as_bool(g.at("refine_coefficients"), g.path("refine_coefficients"));
    if (g.has("refine_sweeps"))
      b.refine_sweeps = static_cast<int>(as_count(g.at("refine_sweeps"), g.path("refine_sweeps"), 1));
    if (g.has("write_coefficients"))
      c.greedy.write_coefficients = as_bool(g.at("write_coefficients"), g.path("write_coefficients"));
    g.finish();
  }
  if (root.has("verify")) {
    Node v(root.at("verify"), "/verify");
    if (v.has("families")) c.verify.families = as_count(v.at("families"), v.path("families"), 1);
    if (v.has("pairs")) c.verify.pairs = as_count(v.at("pairs"), v.path("pairs"), 1);
    if (v.has("functions")) c.verify.functions = as_count(v.at("functions"), v.path("functions"), 1);
    if (v.has("tolerance_overrides")) {
      const auto& t = v.at("tolerance_overrides");
      if (!t.is_object()) fail(v.path("tolerance_overrides"), "expected an object");
      for (const auto& [name, value] : t.items())
        c.verify.tolerance_overrides[name] = as_number(value, v.path("tolerance_overrides") + "/" + name);
    }
    v.finish();
  }
  root.finish();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ConfigError, "cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string config_echo(const ExperimentConfig& config) { return config_json(config, false).dump(); }

std::string config_hash(const ExperimentConfig& config) {
  Fnv1a h;
  h.add(std::string_view(config_json(config, true).dump()));
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h.digest()));
  return buf;
}

std::vector<std::size_t> default_ns(const ExperimentConfig& config) {
  const std::size_t cap = std::min<std::size_t>(std::size_t{1} << (config.dimension * (config.depth - 1)), 1024);
  std::vector<std::size_t> out;
  for (std::size_t n = 1; n <= cap; n *= 2) out.push_back(n);
  return out;
}

ExponentField build_field(const ExperimentConfig& config) {
  try {
    return build_exponent(Grid(config.dimension, config.depth), config.exponent);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ConfigError) throw;
    throw Error(ErrorKind::ConfigError, std::string("/exponent: ") + e.what());
  }
}

}  // namespace vlg
