#include <algorithm>
#include <cmath>
#include <random>

#include "support.hpp"
#include "vlgreedy/exponent_field.hpp"

using namespace vlg;

TEST_CASE("constant recipe fills every cell") {
  const auto p = testing::constant(1, 2, 2.0);
  CHECK(testing::exponents_of(p) == std::vector<double>{2, 2, 2, 2});
  CHECK(p.is_constant());
}

TEST_CASE("piecewise halves assign cells directly") {
  const auto p = testing::two_four(1, 2);
  CHECK(testing::exponents_of(p) == std::vector<double>{2, 2, 4, 4});
  CHECK(p.p_minus() == 2.0);
  CHECK(p.p_plus() == 4.0);
}

TEST_CASE("later pieces override earlier ones and the fallback fills gaps") {
  PiecewiseExponent pw;
  pw.pieces.push_back({{0.0}, {1.0}, 3.0});
  pw.pieces.push_back({{0.25}, {0.5}, 5.0});
  auto p = build_exponent(Grid(1, 2), pw);
  CHECK(testing::exponents_of(p) == std::vector<double>{3, 5, 3, 3});

  PiecewiseExponent gap;
  gap.pieces.push_back({{0.0}, {0.5}, 2.0});
  CHECK_ERROR_KIND(build_exponent(Grid(1, 2), gap), ErrorKind::InvalidExponent);
  gap.fallback = 6.0;
  CHECK(testing::exponents_of(build_exponent(Grid(1, 2), gap)) == std::vector<double>{2, 2, 6, 6});
}

TEST_CASE("exponent values must exceed one and stay finite") {
  CHECK_ERROR_KIND(testing::constant(1, 3, 1.0), ErrorKind::InvalidExponent);
  CHECK_ERROR_KIND(testing::constant(2, 2, 0.5), ErrorKind::InvalidExponent);
  CHECK_ERROR_KIND(build_exponent(Grid(1, 1), SampledExponent{{2.0, INFINITY}}), ErrorKind::InvalidExponent);
}

TEST_CASE("piece edges must fall on cell boundaries") {
  PiecewiseExponent pw;
  pw.pieces.push_back({{0.0}, {0.3}, 2.0});
  pw.fallback = 3.0;
  CHECK_ERROR_KIND(build_exponent(Grid(1, 3), pw), ErrorKind::AlignmentError);
}

TEST_CASE("sampled recipe needs one value per cell") {
  CHECK_ERROR_KIND(build_exponent(Grid(1, 2), SampledExponent{{2, 2, 2}}), ErrorKind::AlignmentError);
}

TEST_CASE("smoothstep is monotone between its end values") {
  const auto p = build_exponent(Grid(1, 6), SmoothstepExponent{2.0, 4.0, 0.25, 0.75, 0});
  const auto v = testing::exponents_of(p);
  CHECK(std::is_sorted(v.begin(), v.end()));
  CHECK(v.front() == doctest::Approx(2.0));
  CHECK(v.back() == doctest::Approx(4.0));
}

TEST_CASE("exponent_range on regions") {
  const auto p = testing::two_four(1, 4);
  auto full = exponent_range(p);
  CHECK(full.p_minus == 2.0);
  CHECK(full.p_plus == 4.0);
  auto left = exponent_range(p, cells_of(p.grid(), DyadicCube{1, 1, 0}));
  CHECK(left.p_minus == 2.0);
  CHECK(left.p_plus == 2.0);
  CHECK_ERROR_KIND(exponent_range(p, CellSet{}), ErrorKind::EmptyRegion);
}

TEST_CASE("conjugate values and involution") {
  CHECK(testing::exponents_of(conjugate(testing::constant(1, 3, 2.0)))[0] == doctest::Approx(2.0));
  CHECK(testing::exponents_of(conjugate(testing::constant(1, 3, 4.0)))[5] == doctest::Approx(4.0 / 3.0));

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(1.05, 9.0);
  std::vector<double> vals(256);
  for (auto& v : vals) v = u(rng);
  const ExponentField p(Grid(2, 4), vals);
  const auto back = conjugate(conjugate(p));
  for (std::size_t i = 0; i < vals.size(); ++i) CHECK(std::abs(back[i] - vals[i]) <= 1e-12 * vals[i]);
}

TEST_CASE("harmonic mean exponent") {
  const auto p = testing::two_four(1, 5);
  CHECK(harmonic_mean_exponent(p, DyadicCube{1, 0, 0}) == doctest::Approx(8.0 / 3.0).epsilon(1e-14));
  CHECK(harmonic_mean_exponent(p, DyadicCube{1, 1, 0}) == 2.0);
  CHECK(harmonic_mean_exponent(testing::constant(1, 3, 3.0), DyadicCube{1, 2, 1}) == doctest::Approx(3.0));
  CHECK_ERROR_KIND(harmonic_mean_exponent(p, DyadicCube{1, 2, 4}), ErrorKind::OutOfDomain);
}

TEST_CASE("harmonic mean lies within the local range on random fields") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(1.1, 6.0);
  const Grid g(2, 4);
  std::vector<double> vals(g.cell_count());
  for (auto& v : vals) v = u(rng);
  const ExponentField p(g, vals);
  for (const auto& q : enumerate_cubes(g, 0, 4)) {
    const auto r = exponent_range(p, cells_of(g, q));
    const double pq = harmonic_mean_exponent(p, q);
    CHECK(pq >= r.p_minus * (1 - 1e-14));
    CHECK(pq <= r.p_plus * (1 + 1e-14));
  }
}

TEST_CASE("range shrinks on subsets") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(1.1, 6.0);
  const Grid g(1, 8);
  std::vector<double> vals(g.cell_count());
  for (auto& v : vals) v = u(rng);
  const ExponentField p(g, vals);
  for (int trial = 0; trial < 50; ++trial) {
    CellSet e;
    for (CellIndex c = 0; c < g.cell_count(); ++c)
      if (rng() % 3 == 0) e.push_back(c);
    if (e.empty()) continue;
    CellSet sub;
    for (auto c : e)
      if (rng() % 2 == 0) sub.push_back(c);
    if (sub.empty()) sub.push_back(e.front());
    const auto outer = exponent_range(p, e);
    const auto inner = exponent_range(p, sub);
    CHECK(inner.p_minus >= outer.p_minus);
    CHECK(inner.p_plus <= outer.p_plus);
  }
}

TEST_CASE("level sets") {
  const auto p = testing::two_four(1, 4);
  const auto ls = level_sets(p, 0.1);
  CHECK(ls.g_cells == cells_of(p.grid(), DyadicCube{1, 1, 0}));
  CHECK(ls.h_cells == cells_of(p.grid(), DyadicCube{1, 1, 1}));
  const auto wide = level_sets(p, 2.0);
  CHECK(wide.g_cells.size() == 16);
  CHECK(wide.h_cells.size() == 16);
  const auto flat = level_sets(testing::constant(1, 3, 3.0), 0.01);
  CHECK(flat.g_cells.size() == 8);
  CHECK(flat.h_cells.size() == 8);
  CHECK_ERROR_KIND(level_sets(p, 0.0), ErrorKind::InvalidParameter);
}

TEST_CASE("level sets grow with epsilon") {
  const auto p = build_exponent(Grid(1, 7), SmoothstepExponent{1.5, 5.0, 0.1, 0.9, 0});
  for (double e = 0.05; e < 3.5; e += 0.3) {
    const auto a = level_sets(p, e);
    const auto b = level_sets(p, e + 0.2);
    CHECK(std::includes(b.g_cells.begin(), b.g_cells.end(), a.g_cells.begin(), a.g_cells.end()));
    CHECK(std::includes(b.h_cells.begin(), b.h_cells.end(), a.h_cells.begin(), a.h_cells.end()));
    CHECK(!a.g_cells.empty());
    CHECK(!a.h_cells.empty());
  }
}

TEST_CASE("log-Hoelder diagnostic") {
  CHECK(log_holder_constant(testing::constant(1, 5, 2.5)) == 0.0);
  CHECK(log_holder_constant(testing::two_four(1, 4)) == doctest::Approx(2.0 * std::log(16.0)).epsilon(1e-12));
  const double c6 = log_holder_constant(build_exponent(Grid(1, 6), SmoothstepExponent{}));
  const double c10 = log_holder_constant(build_exponent(Grid(1, 10), SmoothstepExponent{}));
  CHECK(std::abs(c10 / c6 - 1.0) <= 0.10);
}
