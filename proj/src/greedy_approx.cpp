#include "vlgreedy/greedy_approx.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "vlgreedy/error.hpp"
#include "vlgreedy/random.hpp"
#include "vlgreedy/variable_norm.hpp"

namespace vlg {

namespace {

// Relative improvement a swap must achieve to count; keeps rounding noise
// from driving the search.
constexpr double kImprovement = 1e-12;

constexpr double kZeroCoefficient = 1e-12;

double binomial(std::size_t m, std::size_t k) {
  k = std::min(k, m - k);
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(m - k + i) / static_cast<double>(i);
  return r;
}

// The retained expansion restricted to atoms: maximal cell groups on which
// every candidate term and the exponent are constant. Residual norms then
// cost one pass over the atoms instead of the grid.
struct Candidates {
  std::vector<GreedyTerm> terms;  // greedy rank order
  std::vector<std::vector<double>> basis;  // basis[i][a] = b_i on atom a
  std::vector<double> total;               // sum_i c_i b_i on each atom
  std::vector<double> exponent;
  std::vector<double> weight;

  std::size_t atoms() const noexcept { return weight.size(); }
  double norm(const std::vector<double>& values) const {
    return luxemburg_norm_weighted(values, exponent, weight);
  }
};

std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Candidates make_candidates(const GridFunction& f, const ExponentField& p) {
  const Grid& grid = f.grid;
  if (!(grid == p.grid())) throw Error(ErrorKind::AlignmentError, "function and exponent live on different grids");
  Candidates cand;
  cand.terms = greedy_order(analyze(f), p).terms;
  const std::size_t m = cand.terms.size();

  // Cell signature: exponent plus the sign pattern of every term touching it.
  std::vector<std::uint64_t> sig(grid.cell_count());
  for (CellIndex c = 0; c < sig.size(); ++c) sig[c] = mix(std::bit_cast<std::uint64_t>(p[c]));
  std::vector<double> cell_values(grid.cell_count());
  for (std::size_t i = 0; i < m; ++i) {
    std::fill(cell_values.begin(), cell_values.end(), 0.0);
    add_basis_term(cell_values, grid, cand.terms[i].index, 1.0);
    for (CellIndex c = 0; c < sig.size(); ++c)
      if (cell_values[c] != 0.0) sig[c] = mix(sig[c] ^ (2 * i + (cell_values[c] > 0.0 ? 1 : 0) + 0x51ed27ULL));
  }
  std::unordered_map<std::uint64_t, std::size_t> atom_of;
  std::vector<CellIndex> representative;
  const double mu = grid.cell_measure();
  for (CellIndex c = 0; c < sig.size(); ++c) {
    auto [it, fresh] = atom_of.try_emplace(sig[c], representative.size());
    if (fresh) {
      representative.push_back(c);
      cand.exponent.push_back(p[c]);
      cand.weight.push_back(0.0);
    }
    cand.weight[it->second] += mu;
  }
  cand.basis.assign(m, std::vector<double>(representative.size(), 0.0));
  cand.total.assign(representative.size(), 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    std::fill(cell_values.begin(), cell_values.end(), 0.0);
    add_basis_term(cell_values, grid, cand.terms[i].index, 1.0);
    for (std::size_t a = 0; a < representative.size(); ++a) {
      cand.basis[i][a] = cell_values[representative[a]];
      cand.total[a] += cand.terms[i].coefficient * cand.basis[i][a];
    }
  }
  return cand;
}

// ||sum_i c_i b_i - sum_{k} coefs[k] b_{chosen[k]}||.
double subset_error(const Candidates& cand, const std::vector<std::size_t>& chosen, const std::vector<double>& coefs,
                    std::vector<double>& scratch) {
  scratch = cand.total;
  for (std::size_t k = 0; k < chosen.size(); ++k) {
    const auto& b = cand.basis[chosen[k]];
    for (std::size_t a = 0; a < scratch.size(); ++a) scratch[a] -= coefs[k] * b[a];
  }
  return cand.norm(scratch);
}

// Residual built directly from the terms left out of the subset; used when
// that side of the split is the smaller one.
double complement_error(const Candidates& cand, const std::vector<std::size_t>& left_out,
                        std::vector<double>& scratch) {
  std::fill(scratch.begin(), scratch.end(), 0.0);
  for (auto i : left_out) {
    const double c = cand.terms[i].coefficient;
    const auto& b = cand.basis[i];
    for (std::size_t a = 0; a < scratch.size(); ++a) scratch[a] += c * b[a];
  }
  return cand.norm(scratch);
}

void exhaustive(const Candidates& cand, std::size_t n_terms, SubsetResult& out, std::vector<std::size_t>& best) {
  const std::size_t m = cand.terms.size();
  // Enumerate whichever side of the split is smaller.
  const bool by_complement = m - n_terms < n_terms;
  const std::size_t k = by_complement ? m - n_terms : n_terms;
  std::vector<std::size_t> comb(k);
  std::iota(comb.begin(), comb.end(), std::size_t{0});
  std::vector<double> scratch(cand.atoms());
  std::vector<double> coefs(k);
  double best_error = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> best_comb;
  while (true) {
    double err;
    if (by_complement) {
      err = complement_error(cand, comb, scratch);
    } else {
      for (std::size_t i = 0; i < k; ++i) coefs[i] = cand.terms[comb[i]].coefficient;
      err = subset_error(cand, comb, coefs, scratch);
    }
    ++out.evaluations;
    if (err < best_error) {
      best_error = err;
      best_comb = comb;
    }
    // Next combination in lexicographic order.
    std::size_t i = k;
    while (i > 0 && comb[i - 1] == m - k + i - 1) --i;
    if (i == 0) break;
    ++comb[i - 1];
    for (std::size_t j = i; j < k; ++j) comb[j] = comb[j - 1] + 1;
  }
  if (by_complement) {
    std::vector<bool> excluded(m, false);
    for (auto i : best_comb) excluded[i] = true;
    best.clear();
    for (std::size_t i = 0; i < m; ++i)
      if (!excluded[i]) best.push_back(i);
  } else {
    best = best_comb;
  }
  out.error = best_error;
  out.exhaustive = true;
}

void local_search(const Candidates& cand, std::size_t n_terms, const SearchBudget& budget, SubsetResult& out,
                  std::vector<std::size_t>& chosen) {
  const std::size_t m = cand.terms.size();
  chosen.resize(n_terms);
  std::iota(chosen.begin(), chosen.end(), std::size_t{0});
  std::vector<std::size_t> others(m - n_terms);
  std::iota(others.begin(), others.end(), n_terms);

  std::vector<double> residual = cand.total;
  for (auto i : chosen)
    for (std::size_t a = 0; a < residual.size(); ++a) residual[a] -= cand.terms[i].coefficient * cand.basis[i][a];
  double current = cand.norm(residual);
  ++out.evaluations;

  const std::size_t cap = budget.swap_factor * m;
  std::vector<double> trial(residual.size());
  bool improved = true;
  while (improved && out.evaluations < cap) {
    improved = false;
    for (std::size_t a = 0; a < chosen.size() && !improved && out.evaluations < cap; ++a) {
      const double c_out = cand.terms[chosen[a]].coefficient;
      const auto& b_out = cand.basis[chosen[a]];
      for (std::size_t b = 0; b < others.size() && out.evaluations < cap; ++b) {
        const double c_in = cand.terms[others[b]].coefficient;
        const auto& b_in = cand.basis[others[b]];
        for (std::size_t t = 0; t < trial.size(); ++t) trial[t] = residual[t] + c_out * b_out[t] - c_in * b_in[t];
        const double err = cand.norm(trial);
        ++out.evaluations;
        if (err < current * (1.0 - kImprovement)) {
          std::swap(chosen[a], others[b]);
          residual.swap(trial);
          current = err;
          improved = true;
          break;
        }
      }
    }
  }
  out.error = current;
  out.exhaustive = false;
}

// Cyclic golden-section minimization over each retained coefficient.
void refine(const Candidates& cand, const std::vector<std::size_t>& chosen, const ExponentField& p,
            const SearchBudget& budget, SubsetResult& out) {
  std::vector<double> coefs(chosen.size());
  for (std::size_t k = 0; k < chosen.size(); ++k) coefs[k] = cand.terms[chosen[k]].coefficient;
  std::vector<double> scratch(cand.atoms());
  double current = subset_error(cand, chosen, coefs, scratch);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int sweep = 0; sweep < budget.refine_sweeps; ++sweep) {
    const double sweep_start = current;
    for (std::size_t k = 0; k < chosen.size(); ++k) {
      const double bnorm = basis_norm(cand.terms[chosen[k]].index, p);
      // Any c farther than 2||r|| / ||b|| from the current value is worse.
      const double radius = 2.0 * current / bnorm;
      double lo = coefs[k] - radius;
      double hi = coefs[k] + radius;
      auto eval = [&](double c) {
        const double saved = coefs[k];
        coefs[k] = c;
        const double e = subset_error(cand, chosen, coefs, scratch);
        coefs[k] = saved;
        ++out.evaluations;
        return e;
      };
      double x1 = hi - inv_phi * (hi - lo);
      double x2 = lo + inv_phi * (hi - lo);
      double f1 = eval(x1);
      double f2 = eval(x2);
      for (int it = 0; it < 60; ++it) {
        if (f1 < f2) {
          hi = x2;
          x2 = x1;
          f2 = f1;
          x1 = hi - inv_phi * (hi - lo);
          f1 = eval(x1);
        } else {
          lo = x1;
          x1 = x2;
          f1 = f2;
          x2 = lo + inv_phi * (hi - lo);
          f2 = eval(x2);
        }
      }
      const double x = f1 < f2 ? x1 : x2;
      const double fx = std::min(f1, f2);
      if (fx < current) {
        coefs[k] = x;
        current = fx;
      }
    }
    if (current >= sweep_start * (1.0 - kImprovement)) break;
  }
  out.coefficients = coefs;
  out.error = std::min(out.error, current);
}

}  // namespace

GreedyOrdering greedy_order(const HaarCoefficients& c, const ExponentField& p) {
  if (!(c.grid() == p.grid())) throw Error(ErrorKind::AlignmentError, "coefficients and exponent differ in grid");
  GreedyOrdering order;
  const auto flat = c.flat();
  double largest = 0.0;
  for (double v : flat) largest = std::max(largest, std::abs(v));
  // Analysis of a synthesized expansion leaves roundoff where exact zeros
  // belong; those do not count as terms.
  const double floor = kZeroCoefficient * largest;
  for (std::size_t i = 0; i < flat.size(); ++i) {
    if (std::abs(flat[i]) <= floor) continue;
    const HaarIndex idx = c.index_at(i);
    order.terms.push_back({idx, flat[i], std::abs(flat[i]) * basis_norm(idx, p)});
  }
  std::stable_sort(order.terms.begin(), order.terms.end(),
                   [](const GreedyTerm& a, const GreedyTerm& b) { return a.weight > b.weight; });
  return order;
}

double greedy_residual(const GridFunction& f, const GreedyOrdering& order, const ExponentField& p,
                       std::size_t n_terms) {
  if (n_terms >= order.terms.size()) return 0.0;
  std::vector<double> residual = f.values;
  for (std::size_t k = 0; k < n_terms; ++k)
    add_basis_term(residual, f.grid, order.terms[k].index, -order.terms[k].coefficient);
  return luxemburg_norm(residual, p);
}

double greedy_residual(const GridFunction& f, const ExponentField& p, std::size_t n_terms) {
  return greedy_residual(f, greedy_order(analyze(f), p), p, n_terms);
}

SubsetResult best_subset(const GridFunction& f, const ExponentField& p, std::size_t n_terms,
                         const SearchBudget& budget) {
  const Candidates cand = make_candidates(f, p);
  const std::size_t m = cand.terms.size();
  SubsetResult out;
  if (n_terms >= m) {
    for (const auto& t : cand.terms) {
      out.subset.push_back(t.index);
      out.coefficients.push_back(t.coefficient);
    }
    out.error = 0.0;
    out.exhaustive = true;
    return out;
  }
  std::vector<std::size_t> chosen;
  const bool use_exhaustive =
      budget.mode == SearchBudget::Mode::Exhaustive ||
      (budget.mode == SearchBudget::Mode::Auto && binomial(m, n_terms) <= budget.exhaustive_limit);
  if (use_exhaustive)
    exhaustive(cand, n_terms, out, chosen);
  else
    local_search(cand, n_terms, budget, out, chosen);
  std::sort(chosen.begin(), chosen.end());
  for (auto i : chosen) {
    out.subset.push_back(cand.terms[i].index);
    out.coefficients.push_back(cand.terms[i].coefficient);
  }
  if (budget.refine_coefficients && !chosen.empty()) refine(cand, chosen, p, budget, out);
  return out;
}

double best_subset_residual(const GridFunction& f, const ExponentField& p, std::size_t n_terms,
                            const SearchBudget& budget) {
  return best_subset(f, p, n_terms, budget).error;
}

ApproximationProfile lebesgue_profile(const GridFunction& f, const ExponentField& p,
                                      const std::vector<std::size_t>& n_list, const SearchBudget& budget) {
  if (n_list.empty()) throw Error(ErrorKind::InvalidParameter, "lebesgue profile needs at least one N");
  if (!std::is_sorted(n_list.begin(), n_list.end()))
    throw Error(ErrorKind::InvalidParameter, "lebesgue profile N list must be ascending");
  const GreedyOrdering order = greedy_order(analyze(f), p);
  ApproximationProfile profile;
  for (auto n : n_list) {
    ProfileRow row;
    row.n_terms = n;
    row.greedy_error = greedy_residual(f, order, p, n);
    row.oracle_error = best_subset_residual(f, p, n, budget);
    if (row.oracle_error > 0.0)
      row.ratio = row.greedy_error / row.oracle_error;
    else
      row.ratio = row.greedy_error == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
    if (!profile.rows.empty() && row.greedy_error > profile.rows.back().greedy_error * (1.0 + 1e-9) + 1e-12)
      profile.warnings.push_back("greedy error increased from N=" + std::to_string(profile.rows.back().n_terms) +
                                 " to N=" + std::to_string(n));
    profile.rows.push_back(row);
  }
  return profile;
}

GridFunction mixed_mass_function(const ExponentField& p, std::size_t terms, std::uint64_t seed) {
  const Grid& grid = p.grid();
  const int n = grid.dim();
  const int J = grid.depth();
  if (J < 2) throw Error(ErrorKind::InvalidParameter, "mixed-mass functions need depth >= 2");
  HaarCoefficients c(grid);
  // Detail elements at scales 1..J-1 split evenly between the two halves.
  const std::size_t per_half = (c.size() - (std::size_t{1} << n)) / 2;
  if (terms > 2 * per_half) throw Error(ErrorKind::InvalidParameter, "too many terms for the grid");
  Rng rng(seed);
  const int types = c.type_count();
  const std::uint32_t half_axis0 = 1;
  std::size_t placed = 0;
  while (placed < terms) {
    const int scale = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(J - 1)));
    std::vector<std::uint32_t> k(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) k[i] = static_cast<std::uint32_t>(rng.below(std::uint64_t{1} << scale));
    // Force the half along axis 0: even terms low, odd terms high.
    const std::uint32_t want_high = static_cast<std::uint32_t>(placed % 2);
    const std::uint32_t top_bit = half_axis0 << (scale - 1);
    k[0] = (k[0] & ~top_bit) | (want_high ? top_bit : 0U);
    const int type = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(types)));
    const HaarIndex idx = HaarIndex::detail(type, DyadicCube::from_index(n, scale, k));
    const double u = rng.uniform(0.5, 1.5);
    const double sign = rng.coin() ? -1.0 : 1.0;
    if (c[idx] != 0.0) continue;
    c[idx] = sign * u / basis_norm(idx, p);
    ++placed;
  }
  return synthesize(c);
}

}  // namespace vlg
