#include "vlgreedy/variable_norm.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <shared_mutex>
#include <unordered_map>

#include "vlgreedy/error.hpp"
#include "vlgreedy/hashing.hpp"
#include "vlgreedy/random.hpp"

namespace vlg {

namespace {

void check_same_grid(const Grid& a, const Grid& b) {
  if (!(a == b)) throw Error(ErrorKind::AlignmentError, "function and exponent live on different grids");
}

// Terms w_k * (|f_k| / lambda)^{p_k}, stored as log|f_k|.
struct Atoms {
  std::vector<double> log_abs;
  std::vector<double> exponent;
  std::vector<double> weight;
};

// Returns the unique lambda with sum_k w_k exp(p_k (a_k - log lambda)) == 1.
// Requires sum_k w_k <= 1 and at least one atom.
double solve_unit_modular(const Atoms& atoms) {
  const std::size_t n = atoms.log_abs.size();
  auto phi = [&](double t, double* slope) {
    double value = 0.0;
    double deriv = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double term = atoms.weight[k] * std::exp(atoms.exponent[k] * (atoms.log_abs[k] - t));
      value += term;
      deriv += atoms.exponent[k] * term;
    }
    if (slope) *slope = -deriv;
    return value - 1.0;
  };

  double hi = *std::max_element(atoms.log_abs.begin(), atoms.log_abs.end());
  double phi_hi = phi(hi, nullptr);
  if (phi_hi == 0.0) return std::exp(hi);
  double lo = hi;
  double phi_lo = phi_hi;
  while (phi_lo <= 0.0) {
    hi = lo;
    lo -= std::numbers::ln2;
    phi_lo = phi(lo, nullptr);
  }

  double t = lo;
  for (int iter = 0; iter < 100; ++iter) {
    double slope = 0.0;
    const double value = phi(t, &slope);
    if (value > 0.0)
      lo = t;
    else if (value < 0.0)
      hi = t;
    else
      return std::exp(t);
    double next = t - value / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double scale = std::max(1.0, std::abs(t));
    if (std::abs(next - t) <= 1e-15 * scale || hi - lo <= 1e-13 * scale) {
      t = next;
      break;
    }
    t = next;
  }
  return std::exp(t);
}

struct CacheKey {
  std::uint64_t field;
  std::uint64_t cells;
  std::size_t size;
  bool operator==(const CacheKey&) const = default;
};

struct CacheKeyHash {
  std::size_t operator()(const CacheKey& k) const noexcept {
    return static_cast<std::size_t>(k.field * 0x9e3779b97f4a7c15ULL ^ k.cells ^ (k.size << 1));
  }
};

class NormCache {
 public:
  static constexpr std::size_t kMaxEntries = std::size_t{1} << 20;

  bool lookup(const CacheKey& key, double& out) {
    std::shared_lock lock(mutex_);
    auto it = map_.find(key);
    if (it == map_.end()) {
      ++misses_;
      return false;
    }
    ++hits_;
    out = it->second;
    return true;
  }

  void insert(const CacheKey& key, double value) {
    std::unique_lock lock(mutex_);
    if (map_.size() >= kMaxEntries) map_.clear();
    map_.emplace(key, value);
  }

  NormCacheStats stats() {
    std::shared_lock lock(mutex_);
    return {map_.size(), hits_.load(), misses_.load()};
  }

  void clear() {
    std::unique_lock lock(mutex_);
    map_.clear();
    hits_ = 0;
    misses_ = 0;
  }

 private:
  std::shared_mutex mutex_;
  std::unordered_map<CacheKey, double, CacheKeyHash> map_;
  std::atomic<std::size_t> hits_{0};
  std::atomic<std::size_t> misses_{0};
};

NormCache& cache() {
  static NormCache instance;
  return instance;
}

double char_norm_uncached(const ExponentField& p, const CellSet& cells) {
  // Indicator modular only depends on how many cells carry each exponent.
  std::vector<double> exps;
  exps.reserve(cells.size());
  for (auto c : cells) exps.push_back(p[c]);
  std::sort(exps.begin(), exps.end());
  Atoms atoms;
  const double mu = p.grid().cell_measure();
  for (std::size_t i = 0; i < exps.size();) {
    std::size_t j = i;
    while (j < exps.size() && exps[j] == exps[i]) ++j;
    atoms.log_abs.push_back(0.0);
    atoms.exponent.push_back(exps[i]);
    atoms.weight.push_back(static_cast<double>(j - i) * mu);
    i = j;
  }
  return solve_unit_modular(atoms);
}

}  // namespace

double modular(const GridFunction& f, const ExponentField& p, double lambda) {
  check_same_grid(f.grid, p.grid());
  if (!(lambda > 0.0)) throw Error(ErrorKind::InvalidParameter, "modular needs lambda > 0");
  double sum = 0.0;
  for (std::size_t c = 0; c < f.values.size(); ++c) {
    const double a = std::abs(f.values[c]);
    if (a != 0.0) sum += std::pow(a / lambda, p[static_cast<CellIndex>(c)]);
  }
  return sum * f.grid.cell_measure();
}

double luxemburg_norm(std::span<const double> values, const ExponentField& p) {
  if (values.size() != p.grid().cell_count())
    throw Error(ErrorKind::AlignmentError, "function and exponent live on different grids");
  Atoms atoms;
  const double mu = p.grid().cell_measure();
  for (std::size_t c = 0; c < values.size(); ++c) {
    const double v = values[c];
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidInput, "non-finite function value");
    if (v == 0.0) continue;
    atoms.log_abs.push_back(std::log(std::abs(v)));
    atoms.exponent.push_back(p[static_cast<CellIndex>(c)]);
    atoms.weight.push_back(mu);
  }
  if (atoms.log_abs.empty()) return 0.0;
  return solve_unit_modular(atoms);
}

double luxemburg_norm_weighted(std::span<const double> values, std::span<const double> exponents,
                               std::span<const double> weights) {
  if (values.size() != exponents.size() || values.size() != weights.size())
    throw Error(ErrorKind::AlignmentError, "values, exponents and weights differ in length");
  Atoms atoms;
  double total = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!std::isfinite(values[k])) throw Error(ErrorKind::InvalidInput, "non-finite function value");
    if (!(exponents[k] > 1.0) || !std::isfinite(exponents[k]))
      throw Error(ErrorKind::InvalidExponent, "exponent outside (1, infinity)");
    if (!(weights[k] >= 0.0)) throw Error(ErrorKind::InvalidInput, "negative weight");
    total += weights[k];
    if (values[k] == 0.0 || weights[k] == 0.0) continue;
    atoms.log_abs.push_back(std::log(std::abs(values[k])));
    atoms.exponent.push_back(exponents[k]);
    atoms.weight.push_back(weights[k]);
  }
  if (total > 1.0 + 1e-12) throw Error(ErrorKind::InvalidInput, "weights exceed the measure of the domain");
  if (atoms.log_abs.empty()) return 0.0;
  return solve_unit_modular(atoms);
}

double luxemburg_norm(const GridFunction& f, const ExponentField& p) {
  check_same_grid(f.grid, p.grid());
  return luxemburg_norm(std::span<const double>(f.values), p);
}

double char_norm(const ExponentField& p, const CellSet& cells) {
  if (cells.empty()) return 0.0;
  Fnv1a h;
  h.add_span(std::span<const CellIndex>(cells));
  const CacheKey key{p.hash(), h.digest(), cells.size()};
  double value = 0.0;
  if (cache().lookup(key, value)) return value;
  for (auto c : cells)
    if (c >= p.grid().cell_count()) throw Error(ErrorKind::OutOfDomain, "cell index outside grid");
  value = char_norm_uncached(p, cells);
  cache().insert(key, value);
  return value;
}

double char_norm(const ExponentField& p, const DyadicCube& cube) { return char_norm(p, cells_of(p.grid(), cube)); }

NormCacheStats norm_cache_stats() { return cache().stats(); }

void clear_norm_cache() { cache().clear(); }

GridFunction dyadic_maximal(const GridFunction& f) {
  const Grid& grid = f.grid;
  const int J = grid.depth();
  const int n = grid.dim();
  // averages[j][code]: mean of |f| over the scale-j cube with that code.
  std::vector<std::vector<double>> averages(static_cast<std::size_t>(J) + 1);
  averages[J].resize(f.values.size());
  for (std::size_t c = 0; c < f.values.size(); ++c) averages[J][c] = std::abs(f.values[c]);
  const double inv_children = std::ldexp(1.0, -n);
  for (int j = J - 1; j >= 0; --j) {
    auto& level = averages[j];
    level.assign(std::size_t{1} << (n * j), 0.0);
    for (std::uint32_t code = 0; code < level.size(); ++code) {
      const DyadicCube q{n, j, code};
      double sum = 0.0;
      for (std::uint32_t pattern = 0; pattern < (1U << n); ++pattern) sum += averages[j + 1][q.child(pattern).code];
      level[code] = sum * inv_children;
    }
  }
  auto out = GridFunction::zeros(grid);
  for (CellIndex c = 0; c < out.values.size(); ++c) {
    const DyadicCube cell{n, J, c};
    double best = 0.0;
    for (int j = 0; j <= J; ++j) best = std::max(best, averages[j][cell.ancestor(j).code]);
    out.values[c] = best;
  }
  return out;
}

double holder_defect(const GridFunction& f, const GridFunction& g, const ExponentField& p) {
  check_same_grid(f.grid, p.grid());
  check_same_grid(g.grid, p.grid());
  const double nf = luxemburg_norm(f, p);
  const double ng = luxemburg_norm(g, conjugate(p));
  double pairing = 0.0;
  for (std::size_t c = 0; c < f.values.size(); ++c) pairing += std::abs(f.values[c] * g.values[c]);
  return 2.0 * nf * ng - pairing * f.grid.cell_measure();
}

EmbeddingReport embedding_checks(const ExponentField& p, const CellSet& e, const DyadicCube& q) {
  const Grid& grid = p.grid();
  if (e.empty()) throw Error(ErrorKind::EmptyRegion, "embedding check needs a non-empty E");
  const CellSet q_cells = cells_of(grid, q);
  for (auto c : e)
    if (!std::binary_search(q_cells.begin(), q_cells.end(), c))
      throw Error(ErrorKind::ContainmentError, "E is not contained in " + to_string(q));

  EmbeddingReport r;
  r.norm_e = char_norm(p, e);
  r.norm_q = char_norm(p, q_cells);
  r.ratio_measure = static_cast<double>(e.size()) / static_cast<double>(q_cells.size());
  r.ratio_norm = r.norm_e / r.norm_q;
  r.diening_lhs = std::pow(q.measure(), 1.0 / harmonic_mean_exponent(p, q));
  r.diening_rhs = 2.0 * r.norm_q;
  r.maximal_norm = luxemburg_norm(dyadic_maximal(GridFunction::indicator(grid, e)), p);
  r.maximal_lower = r.maximal_norm / r.norm_e;
  return r;
}

double maximal_operator_lower_bound(const ExponentField& p, std::uint64_t seed, int count) {
  const Grid& grid = p.grid();
  Rng rng(seed);
  double best = 0.0;
  for (int i = 0; i < count; ++i) {
    GridFunction f = GridFunction::zeros(grid);
    if (i % 2 == 0) {
      const int scale = static_cast<int>(rng.below(static_cast<std::uint64_t>(grid.depth()) + 1));
      const auto code = static_cast<std::uint32_t>(rng.below(std::uint64_t{1} << (grid.dim() * scale)));
      f = GridFunction::indicator(grid, DyadicCube{grid.dim(), scale, code});
    } else {
      for (double& v : f.values) v = rng.normal();
    }
    const double nf = luxemburg_norm(f, p);
    if (nf > 0.0) best = std::max(best, luxemburg_norm(dyadic_maximal(f), p) / nf);
  }
  return best;
}

}  // namespace vlg
