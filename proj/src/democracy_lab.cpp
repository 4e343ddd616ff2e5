#include "vlgreedy/democracy_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "vlgreedy/error.hpp"
#include "vlgreedy/haar_system.hpp"
#include "vlgreedy/parallel.hpp"
#include "vlgreedy/random.hpp"
#include "vlgreedy/variable_norm.hpp"

namespace vlg {

namespace {

void check_family_grid(const CubeFamily& family, const Grid& grid, int max_scale) {
  for (const auto& q : family) {
    if (q.dim != grid.dim()) throw Error(ErrorKind::AlignmentError, "cube dimension differs from grid");
    if (q.scale > max_scale)
      throw Error(ErrorKind::ResolutionError,
                  "cube " + to_string(q) + " finer than allowed scale " + std::to_string(max_scale));
    if (!in_domain(grid, q)) throw Error(ErrorKind::OutOfDomain, "cube " + to_string(q) + " outside domain");
  }
}

// Per-scale sums of a cell quantity over every dyadic cube.
class Pyramid {
 public:
  template <class Fn>
  Pyramid(const Grid& grid, Fn&& cell_value) : grid_(grid), levels_(static_cast<std::size_t>(grid.depth()) + 1) {
    const int J = grid.depth();
    const int n = grid.dim();
    for (int s = 0; s <= J; ++s) levels_[s].assign(std::size_t{1} << (s * n), 0.0);
    for (CellIndex c = 0; c < grid.cell_count(); ++c) levels_[J][c] = cell_value(c);
    for (int s = J; s > 0; --s) {
      const auto& fine = levels_[s];
      auto& coarse = levels_[s - 1];
      for (std::uint32_t code = 0; code < fine.size(); ++code)
        coarse[DyadicCube{n, s, code}.ancestor(s - 1).code] += fine[code];
    }
  }

  double sum(const DyadicCube& q) const { return levels_[q.scale][q.code]; }
  std::size_t count(int scale) const { return levels_[scale].size(); }

 private:
  Grid grid_;
  std::vector<std::vector<double>> levels_;
};

Pyramid membership(const Grid& grid, const CellSet& region) {
  std::vector<char> in(grid.cell_count(), 0);
  for (auto c : region) in[c] = 1;
  return Pyramid(grid, [&](CellIndex c) { return in[c] ? 1.0 : 0.0; });
}

double cells_in(const DyadicCube& q, const Grid& grid) { return std::ldexp(1.0, grid.dim() * (grid.depth() - q.scale)); }

// Scans scales from max_scale down to 0; the first scale with at least n
// qualifying cubes supplies its first n.
template <class Pred>
CubeFamily scan_fine_to_coarse(const Grid& grid, std::size_t n, int max_scale, Pred&& qualifies,
                               const std::string& what) {
  std::size_t best = 0;
  for (int s = max_scale; s >= 0; --s) {
    std::vector<DyadicCube> picked;
    std::size_t found = 0;
    const std::uint64_t total = std::uint64_t{1} << (s * grid.dim());
    for (std::uint64_t code = 0; code < total; ++code) {
      const DyadicCube q{grid.dim(), s, static_cast<std::uint32_t>(code)};
      if (!qualifies(q)) continue;
      ++found;
      if (picked.size() < n) picked.push_back(q);
    }
    best = std::max(best, found);
    if (found >= n) return CubeFamily(std::move(picked));
  }
  throw CapacityError(what + ": N = " + std::to_string(n) + " exceeds the largest single-scale count " +
                          std::to_string(best),
                      best);
}

int resolve_max_scale(const Grid& grid, int max_scale) {
  if (max_scale < 0) return grid.depth();
  if (max_scale > grid.depth()) throw Error(ErrorKind::InvalidParameter, "max_scale exceeds grid depth");
  return max_scale;
}

// Cubes with scale in [lo, hi] lying inside `region`, canonical order.
std::vector<DyadicCube> cubes_inside(const Grid& grid, const Pyramid& inside, int lo, int hi) {
  std::vector<DyadicCube> out;
  for (int s = lo; s <= hi; ++s) {
    const std::uint64_t total = std::uint64_t{1} << (s * grid.dim());
    for (std::uint64_t code = 0; code < total; ++code) {
      const DyadicCube q{grid.dim(), s, static_cast<std::uint32_t>(code)};
      if (inside.sum(q) == cells_in(q, grid)) out.push_back(q);
    }
  }
  return out;
}

// k distinct values in [0, m), Floyd's sampling.
std::vector<std::uint64_t> sample_distinct(std::uint64_t m, std::size_t k, Rng& rng) {
  std::set<std::uint64_t> chosen;
  for (std::uint64_t j = m - k; j < m; ++j) {
    const std::uint64_t t = rng.below(j + 1);
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  return {chosen.begin(), chosen.end()};
}

std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, Strategy s, std::size_t n, std::size_t r) {
  std::uint64_t z = mix(seed + 0x9e3779b97f4a7c15ULL);
  z = mix(z ^ (static_cast<std::uint64_t>(s) + 1));
  z = mix(z ^ static_cast<std::uint64_t>(n));
  return mix(z ^ static_cast<std::uint64_t>(r));
}

std::string eps_label(double eps) {
  std::ostringstream os;
  os << eps;
  return os.str();
}

int random_scale_lo(const Grid& grid) { return grid.depth() / 2; }
int random_scale_hi(const Grid& grid) { return std::max(grid.depth() - 1, random_scale_lo(grid)); }

}  // namespace

double democracy_norm(const CubeFamily& family, int type, const ExponentField& p) {
  const Grid& grid = p.grid();
  if (type < 1 || type >= (1 << grid.dim())) throw Error(ErrorKind::InvalidInput, "Haar type out of range");
  check_family_grid(family, grid, grid.depth() - 1);
  std::vector<double> sum(grid.cell_count(), 0.0);
  for (const auto& q : family) {
    const auto idx = HaarIndex::detail(type, q);
    add_basis_term(sum, grid, idx, 1.0 / basis_norm(idx, p));
  }
  return luxemburg_norm(std::span<const double>(sum), p);
}

GridFunction square_sum_function(const CubeFamily& family, const ExponentField& p) {
  const Grid& grid = p.grid();
  check_family_grid(family, grid, grid.depth());
  auto s = GridFunction::zeros(grid);
  for (const auto& q : family) {
    const double w = 1.0 / std::pow(char_norm(p, q), 2);
    for_each_cell(grid, q, [&](CellIndex c) { s.values[c] += w; });
  }
  for (double& v : s.values) v = std::sqrt(v);
  return s;
}

double square_sum_norm(const CubeFamily& family, const ExponentField& p) {
  return luxemburg_norm(square_sum_function(family, p), p);
}

GridFunction linearized_function(const CubeFamily& family, const ExponentField& p) {
  const Grid& grid = p.grid();
  check_family_grid(family, grid, grid.depth());
  auto out = GridFunction::zeros(grid);
  const auto ls = light_shade(grid, family);
  for (std::size_t i = 0; i < family.size(); ++i) {
    if (ls.light[i].empty()) continue;
    const double w = 1.0 / char_norm(p, family[i]);
    for (auto c : ls.light[i]) out.values[c] = w;
  }
  return out;
}

double linearized_norm(const CubeFamily& family, const ExponentField& p) {
  return luxemburg_norm(linearized_function(family, p), p);
}

PointwiseRatio pointwise_ratio(const CubeFamily& family, const ExponentField& p) {
  const Grid& grid = p.grid();
  const auto s = square_sum_function(family, p);
  const auto owner = minimal_cube_indices(grid, family);
  std::vector<double> norms(family.size());
  for (std::size_t i = 0; i < family.size(); ++i) norms[i] = char_norm(p, family[i]);
  PointwiseRatio r;
  bool any = false;
  for (std::size_t c = 0; c < owner.size(); ++c) {
    if (owner[c] < 0) continue;
    const double v = s.values[c] * norms[static_cast<std::size_t>(owner[c])];
    r.min = any ? std::min(r.min, v) : v;
    r.max = any ? std::max(r.max, v) : v;
    any = true;
  }
  return r;
}

CubeFamily construct_gamma1(const ExponentField& p, double epsilon, std::size_t n, int max_scale) {
  if (!(epsilon > 0.0)) throw Error(ErrorKind::InvalidParameter, "epsilon must be positive");
  if (n == 0) throw Error(ErrorKind::InvalidParameter, "N must be at least 1");
  const Grid& grid = p.grid();
  const int top = resolve_max_scale(grid, max_scale);
  const auto g = membership(grid, level_sets(p, epsilon).g_cells);
  return scan_fine_to_coarse(
      grid, n, top, [&](const DyadicCube& q) { return 2.0 * g.sum(q) >= cells_in(q, grid); }, "gamma1");
}

CubeFamily construct_gamma2(const ExponentField& p, double epsilon, std::size_t n, int max_scale) {
  if (!(epsilon > 0.0) || !(epsilon < p.p_plus() - 1.0))
    throw Error(ErrorKind::InvalidParameter, "epsilon must lie in (0, p_+ - 1)");
  if (n == 0) throw Error(ErrorKind::InvalidParameter, "N must be at least 1");
  const Grid& grid = p.grid();
  const int top = resolve_max_scale(grid, max_scale);
  const auto h = membership(grid, level_sets(p, epsilon).h_cells);
  const Pyramid inv_p(grid, [&](CellIndex c) { return 1.0 / p[c]; });
  const double target = p.p_plus() - epsilon;
  const double two_n = 2.0 * static_cast<double>(n);
  return scan_fine_to_coarse(
      grid, n, top,
      [&](const DyadicCube& q) {
        const double cells = cells_in(q, grid);
        // |H ∩ Q| / |Q| > 1 - 1/(2N) and mean(1/p) < 1/(p_+ - eps)
        return two_n * h.sum(q) > (two_n - 1.0) * cells && inv_p.sum(q) * target < cells;
      },
      "gamma2");
}

double gamma1_lower_bound(const CubeFamily& family, const ExponentField& p, double epsilon) {
  if (family.empty()) throw Error(ErrorKind::InvalidInput, "empty family");
  const auto& g = level_sets(p, epsilon).g_cells;
  double r_min = std::numeric_limits<double>::infinity();
  for (const auto& q : family) {
    const auto cells = cells_of(p.grid(), q);
    CellSet meet;
    std::set_intersection(cells.begin(), cells.end(), g.begin(), g.end(), std::back_inserter(meet));
    r_min = std::min(r_min, char_norm(p, meet) / char_norm(p, q));
  }
  return r_min * std::pow(static_cast<double>(family.size()), 1.0 / (p.p_minus() + epsilon));
}

double gamma2_upper_bound(const ExponentField& p, double epsilon, std::size_t n) {
  const double q = p.p_plus() - epsilon;
  return std::pow(2.0, p.p_plus() / p.p_minus() + 1.0 / q) * std::pow(static_cast<double>(n), 1.0 / q);
}

PowerFit fit_loglog(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw Error(ErrorKind::FitError, "abscissa and ordinate counts differ");
  if (xs.size() < 3) throw Error(ErrorKind::FitError, "need at least 3 points");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0) || !std::isfinite(xs[i]) || !std::isfinite(ys[i]))
      throw Error(ErrorKind::FitError, "log-log fit needs positive finite data");
    lx.push_back(std::log(xs[i]));
    ly.push_back(std::log(ys[i]));
  }
  auto sorted = xs;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw Error(ErrorKind::FitError, "abscissae must be distinct");
  const double m = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  PowerFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double e = ly[i] - (fit.intercept + fit.slope * lx[i]);
    ss_res += e * e;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

PowerFit fit_exponent(const std::vector<std::pair<double, double>>& pairs) {
  std::vector<double> xs, ys;
  for (const auto& [n, v] : pairs) {
    if (!(n >= 1.0)) throw Error(ErrorKind::FitError, "N must be at least 1");
    xs.push_back(n);
    ys.push_back(v);
  }
  return fit_loglog(xs, ys);
}

std::string_view to_string(Strategy s) noexcept {
  switch (s) {
    case Strategy::DisjointInG: return "disjoint-in-G";
    case Strategy::Gamma1: return "gamma1";
    case Strategy::Gamma2: return "gamma2";
    case Strategy::NestedTower: return "nested-tower";
    case Strategy::UniformRandom: return "uniform-random";
    case Strategy::StratifiedRandom: return "stratified-random";
  }
  return "unknown";
}

Strategy parse_strategy(std::string_view name) {
  for (auto s : all_strategies())
    if (to_string(s) == name) return s;
  throw Error(ErrorKind::InvalidInput, "unknown strategy '" + std::string(name) + "'");
}

std::vector<Strategy> all_strategies() {
  return {Strategy::DisjointInG, Strategy::Gamma1,        Strategy::Gamma2,
          Strategy::NestedTower, Strategy::UniformRandom, Strategy::StratifiedRandom};
}

CubeFamily nested_tower_family(const ExponentField& p, const CellSet& region, std::size_t n) {
  if (n == 0) throw Error(ErrorKind::InvalidParameter, "N must be at least 1");
  const Grid& grid = p.grid();
  const int J = grid.depth();
  const auto inside = membership(grid, region);
  std::size_t best = 0;
  for (int s0 = 0; s0 < J; ++s0) {
    const auto bases = cubes_inside(grid, inside, s0, s0);
    const auto height = static_cast<std::size_t>(J - s0);
    best = std::max(best, bases.size() * height);
    if (bases.size() * height < n) continue;
    std::vector<DyadicCube> out;
    for (const auto& base : bases) {
      DyadicCube q = base;
      for (std::size_t h = 0; h < height && out.size() < n; ++h) {
        out.push_back(q);
        if (q.scale + 1 < J) q = q.child(0);
      }
      if (out.size() == n) break;
    }
    return CubeFamily(std::move(out));
  }
  throw CapacityError("nested-tower: N = " + std::to_string(n) + " exceeds " + std::to_string(best), best);
}

CubeFamily disjoint_inside_family(const ExponentField& p, const CellSet& region, std::size_t n) {
  if (n == 0) throw Error(ErrorKind::InvalidParameter, "N must be at least 1");
  const Grid& grid = p.grid();
  const auto inside = membership(grid, region);
  std::size_t best = 0;
  for (int s = 0; s < grid.depth(); ++s) {
    auto cubes = cubes_inside(grid, inside, s, s);
    best = std::max(best, cubes.size());
    if (cubes.size() < n) continue;
    cubes.resize(n);
    return CubeFamily(std::move(cubes));
  }
  throw CapacityError("disjoint-in-G: N = " + std::to_string(n) + " exceeds " + std::to_string(best), best);
}

CubeFamily uniform_random_family(const Grid& grid, std::size_t n, std::uint64_t seed) {
  const int lo = random_scale_lo(grid);
  const int hi = random_scale_hi(grid);
  std::vector<std::uint64_t> offsets;  // first flat index of each scale
  std::uint64_t total = 0;
  for (int s = lo; s <= hi; ++s) {
    offsets.push_back(total);
    total += std::uint64_t{1} << (s * grid.dim());
  }
  if (n > total)
    throw CapacityError("uniform-random: N = " + std::to_string(n) + " exceeds " + std::to_string(total), total);
  Rng rng(seed);
  std::vector<DyadicCube> out;
  for (auto flat : sample_distinct(total, n, rng)) {
    const auto it = std::upper_bound(offsets.begin(), offsets.end(), flat) - 1;
    const int s = lo + static_cast<int>(it - offsets.begin());
    out.push_back(DyadicCube{grid.dim(), s, static_cast<std::uint32_t>(flat - *it)});
  }
  return CubeFamily(std::move(out));
}

CubeFamily stratified_random_family(const Grid& grid, const CellSet& low_region, const CellSet& high_region,
                                    double low_fraction, std::size_t n, std::uint64_t seed) {
  if (!(low_fraction >= 0.0 && low_fraction <= 1.0))
    throw Error(ErrorKind::InvalidParameter, "low_fraction must lie in [0, 1]");
  const int lo = random_scale_lo(grid);
  const int hi = random_scale_hi(grid);
  const auto low = cubes_inside(grid, membership(grid, low_region), lo, hi);
  const auto high = cubes_inside(grid, membership(grid, high_region), lo, hi);
  const auto k_low = static_cast<std::size_t>(std::llround(low_fraction * static_cast<double>(n)));
  const std::size_t k_high = n - k_low;
  if (k_low > low.size())
    throw CapacityError("stratified-random: low stratum holds " + std::to_string(low.size()), low.size());
  Rng rng(seed);
  std::set<DyadicCube> chosen;
  for (auto i : sample_distinct(low.size(), k_low, rng)) chosen.insert(low[i]);
  std::size_t free_high = 0;
  for (const auto& q : high) free_high += chosen.count(q) ? 0 : 1;
  if (k_high > free_high)
    throw CapacityError("stratified-random: high stratum holds " + std::to_string(free_high), free_high);
  std::size_t added = 0;
  while (added < k_high)
    if (chosen.insert(high[rng.below(high.size())]).second) ++added;
  return CubeFamily(std::vector<DyadicCube>(chosen.begin(), chosen.end()));
}

DemocracyRecord estimate_democracy(const ExponentField& p, const DemocracyOptions& options) {
  const Grid& grid = p.grid();
  if (options.ns.empty()) throw Error(ErrorKind::InvalidParameter, "no N values");
  if (options.epsilons.empty()) throw Error(ErrorKind::InvalidParameter, "no epsilon values");
  for (auto n : options.ns)
    if (n == 0) throw Error(ErrorKind::InvalidParameter, "N must be at least 1");
  for (double e : options.epsilons)
    if (!(e > 0.0)) throw Error(ErrorKind::InvalidParameter, "epsilon must be positive");

  std::vector<LevelSets> levels;
  for (double e : options.epsilons) levels.push_back(level_sets(p, e));
  const int max_scale = grid.depth() - 1;

  DemocracyRecord rec;
  auto attempt = [&](Strategy s, const std::string& label, std::size_t n, double eps, auto&& make) {
    try {
      FamilyRecord fr;
      fr.n = n;
      fr.strategy = s;
      fr.label = label;
      fr.epsilon = eps;
      fr.family = make();
      rec.families.push_back(std::move(fr));
      return true;
    } catch (const CapacityError& e) {
      rec.capacity_errors.push_back({s, label, n, e.max_feasible()});
      return false;
    }
  };

  // Families are generated serially so their order depends only on options.
  for (auto n : options.ns) {
    for (auto s : options.strategies) {
      const std::string name(to_string(s));
      switch (s) {
        case Strategy::DisjointInG:
          for (std::size_t e = 0; e < levels.size(); ++e)
            attempt(s, name + ":eps=" + eps_label(levels[e].epsilon), n, levels[e].epsilon,
                    [&] { return disjoint_inside_family(p, levels[e].g_cells, n); });
          break;
        case Strategy::Gamma1:
          for (std::size_t e = 0; e < levels.size(); ++e)
            attempt(s, name + ":eps=" + eps_label(levels[e].epsilon), n, levels[e].epsilon,
                    [&] { return construct_gamma1(p, levels[e].epsilon, n, max_scale); });
          break;
        case Strategy::Gamma2:
          for (std::size_t e = 0; e < levels.size(); ++e) {
            if (!(levels[e].epsilon < p.p_plus() - 1.0)) continue;
            attempt(s, name + ":eps=" + eps_label(levels[e].epsilon), n, levels[e].epsilon,
                    [&] { return construct_gamma2(p, levels[e].epsilon, n, max_scale); });
          }
          break;
        case Strategy::NestedTower:
          for (std::size_t e = 0; e < levels.size(); ++e) {
            const std::string eps = ":eps=" + eps_label(levels[e].epsilon);
            attempt(s, name + ":G" + eps, n, levels[e].epsilon, [&] { return nested_tower_family(p, levels[e].g_cells, n); });
            attempt(s, name + ":H" + eps, n, levels[e].epsilon, [&] { return nested_tower_family(p, levels[e].h_cells, n); });
          }
          break;
        case Strategy::UniformRandom:
          for (std::size_t r = 0; r < options.random_families; ++r)
            if (!attempt(s, name + "#" + std::to_string(r), n, 0.0,
                         [&] { return uniform_random_family(grid, n, stream_seed(options.seed, s, n, r)); }))
              break;
          break;
        case Strategy::StratifiedRandom:
          for (std::size_t r = 0; r < options.random_families; ++r) {
            const double theta = static_cast<double>(r % 9) / 8.0;
            attempt(s, name + "#" + std::to_string(r), n, levels[0].epsilon, [&] {
              return stratified_random_family(grid, levels[0].g_cells, levels[0].h_cells, theta, n,
                                              stream_seed(options.seed, s, n, r));
            });
          }
          break;
      }
    }
  }

  parallel_for(rec.families.size(), options.threads, [&](std::size_t i) {
    auto& fr = rec.families[i];
    fr.value = democracy_norm(fr.family, options.type, p);
    fr.square_sum = square_sum_norm(fr.family, p);
    if (fr.strategy == Strategy::Gamma1) {
      fr.bound = gamma1_lower_bound(fr.family, p, fr.epsilon);
      fr.gamma1_lower_ok = fr.square_sum >= fr.bound * (1.0 - 1e-12);
    } else if (fr.strategy == Strategy::Gamma2) {
      fr.bound = gamma2_upper_bound(p, fr.epsilon, fr.n);
      fr.gamma2_upper_ok = fr.square_sum <= fr.bound;
    }
  });

  std::vector<std::pair<double, double>> pts_r, pts_l, pts_lo, pts_hi;
  for (auto n : options.ns) {
    DemocracyRow row;
    row.n = n;
    const double nd = static_cast<double>(n);
    const double lo_scale = std::pow(nd, 1.0 / p.p_plus());
    const double hi_scale = std::pow(nd, 1.0 / p.p_minus());
    for (const auto& fr : rec.families) {
      if (fr.n != n) continue;
      const double lo = fr.square_sum / lo_scale;
      const double hi = fr.square_sum / hi_scale;
      if (row.families == 0 || fr.value < row.h_l_est) {
        row.h_l_est = fr.value;
        row.argmin = fr.label;
      }
      if (row.families == 0 || fr.value > row.h_r_est) {
        row.h_r_est = fr.value;
        row.argmax = fr.label;
      }
      row.sandwich_lower = row.families == 0 ? lo : std::min(row.sandwich_lower, lo);
      row.sandwich_upper = row.families == 0 ? hi : std::max(row.sandwich_upper, hi);
      ++row.families;
    }
    if (row.families == 0) continue;
    pts_r.emplace_back(nd, row.h_r_est);
    pts_l.emplace_back(nd, row.h_l_est);
    pts_lo.emplace_back(nd, row.sandwich_lower);
    pts_hi.emplace_back(nd, row.sandwich_upper);
    rec.rows.push_back(std::move(row));
  }
  auto try_fit = [](const std::vector<std::pair<double, double>>& pts) -> std::optional<PowerFit> {
    try {
      return fit_exponent(pts);
    } catch (const Error&) {
      return std::nullopt;
    }
  };
  rec.fit_r = try_fit(pts_r);
  rec.fit_l = try_fit(pts_l);
  rec.sandwich_lower_fit = try_fit(pts_lo);
  rec.sandwich_upper_fit = try_fit(pts_hi);
  return rec;
}

}  // namespace vlg
