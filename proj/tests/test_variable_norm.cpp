#include <cmath>
#include <random>

#include "oracles.hpp"
#include "support.hpp"
#include "vlgreedy/variable_norm.hpp"

using namespace vlg;

namespace {

// lambda with (1/4) lambda^{-2} + (1/4) lambda^{-4} = 1.
const double kMiddleNorm = 1.0 / std::sqrt((-1.0 + std::sqrt(17.0)) / 2.0);

std::vector<double> random_values(std::mt19937_64& rng, std::size_t n, double sparsity = 0.3) {
  std::normal_distribution<double> z;
  std::uniform_real_distribution<double> u;
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng) < sparsity ? 0.0 : z(rng);
  return v;
}

ExponentField random_field(const Grid& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(1.1, 7.0);
  std::vector<double> v(g.cell_count());
  for (auto& x : v) x = u(rng);
  return ExponentField(g, v);
}

}  // namespace

// lambda = u^{-1/2}, u the positive root of u^2 + u - 4.
TEST_CASE("closed-form middle interval constant") { CHECK(kMiddleNorm == doctest::Approx(0.80024259022012).epsilon(1e-13)); }

TEST_CASE("modular examples") {
  const auto p24 = testing::two_four(1, 4);
  CHECK(modular(GridFunction::constant(p24.grid(), 1.0), p24, 1.0) == doctest::Approx(1.0));
  const auto p2 = testing::constant(1, 4, 2.0);
  CHECK(modular(GridFunction::indicator(p2.grid(), DyadicCube{1, 2, 0}), p2, 0.5) == doctest::Approx(1.0));
  const auto mid = GridFunction::indicator(p24.grid(), DyadicCube{1, 2, 1});
  CellSet middle;
  for (CellIndex c = 4; c < 12; ++c) middle.push_back(c);
  CHECK(std::abs(modular(GridFunction::indicator(p24.grid(), middle), p24, kMiddleNorm) - 1.0) <= 1e-6);
  CHECK_ERROR_KIND(modular(mid, p24, 0.0), ErrorKind::InvalidParameter);
  CHECK_ERROR_KIND(modular(GridFunction::zeros(Grid(1, 3)), p24, 1.0), ErrorKind::AlignmentError);
}

TEST_CASE("luxemburg norm examples") {
  const auto p24 = testing::two_four(1, 4);
  CHECK(luxemburg_norm(GridFunction::constant(p24.grid(), 1.0), p24) == doctest::Approx(1.0).epsilon(1e-13));
  const auto p2 = testing::constant(1, 4, 2.0);
  CHECK(luxemburg_norm(GridFunction::indicator(p2.grid(), DyadicCube{1, 2, 0}), p2) ==
        doctest::Approx(0.5).epsilon(1e-13));
  CHECK(luxemburg_norm(GridFunction::indicator(p24.grid(), DyadicCube{1, 1, 1}), p24) ==
        doctest::Approx(std::pow(2.0, -0.25)).epsilon(1e-13));
  CHECK(luxemburg_norm(GridFunction::zeros(p24.grid()), p24) == 0.0);
  auto bad = GridFunction::zeros(p24.grid());
  bad.values[3] = NAN;
  CHECK_ERROR_KIND(luxemburg_norm(bad, p24), ErrorKind::InvalidInput);
}

TEST_CASE("char_norm examples and cache") {
  const auto p24 = testing::two_four(1, 6);
  CHECK(char_norm(p24, p24.grid().all_cells()) == doctest::Approx(1.0));
  const auto p3 = testing::constant(1, 6, 3.0);
  CHECK(char_norm(p3, DyadicCube{1, 3, 0}) == doctest::Approx(0.5).epsilon(1e-13));
  CellSet middle;
  for (CellIndex c = 16; c < 48; ++c) middle.push_back(c);
  CHECK(char_norm(p24, middle) == doctest::Approx(kMiddleNorm).epsilon(1e-12));
  const auto before = norm_cache_stats();
  CHECK(char_norm(p24, middle) == doctest::Approx(kMiddleNorm).epsilon(1e-12));
  CHECK(norm_cache_stats().hits == before.hits + 1);
}

TEST_CASE("weighted atoms reproduce the grid norm") {
  const auto p24 = testing::two_four(1, 4);
  const double direct = luxemburg_norm(GridFunction(p24.grid(), {0, 0, 0, 0, 1, 1, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0}), p24);
  const std::vector<double> v{1.0, 1.0}, e{2.0, 4.0}, w{0.25, 0.25};
  CHECK(luxemburg_norm_weighted(v, e, w) == doctest::Approx(direct).epsilon(1e-13));
  const std::vector<double> heavy{0.7, 0.7};
  CHECK_ERROR_KIND(luxemburg_norm_weighted(v, e, heavy), ErrorKind::InvalidInput);
  CHECK_ERROR_KIND(luxemburg_norm_weighted(v, std::vector<double>{2.0}, w), ErrorKind::AlignmentError);
}

TEST_CASE("luxemburg norm matches the bisection oracle on random inputs") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 60; ++trial) {
    const Grid g(1 + trial % 2, trial % 2 ? 3 : 6);
    const auto p = random_field(g, rng);
    const auto v = random_values(rng, g.cell_count());
    const double expected = oracle::norm(v, testing::exponents_of(p), g.cell_measure());
    const double got = luxemburg_norm(v, p);
    CHECK(got == doctest::Approx(expected).epsilon(1e-11));
    if (got > 0) CHECK(std::abs(modular(GridFunction(g, v), p, got) - 1.0) <= 1e-9);
  }
}

TEST_CASE("norm axioms on random inputs") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> scale(-5.0, 5.0);
  const Grid g(1, 7);
  for (int trial = 0; trial < 60; ++trial) {
    const auto p = random_field(g, rng);
    const auto f = random_values(rng, g.cell_count());
    const auto h = random_values(rng, g.cell_count());
    const double nf = luxemburg_norm(f, p);
    const double c = scale(rng);
    auto cf = f;
    for (auto& x : cf) x *= c;
    CHECK(std::abs(luxemburg_norm(cf, p) - std::abs(c) * nf) <= 1e-10 * std::max(1.0, std::abs(c) * nf));

    auto sum = f;
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += h[i];
    CHECK(luxemburg_norm(sum, p) <= nf + luxemburg_norm(h, p) + 1e-9);

    auto bigger = f;
    for (auto& x : bigger) x = std::abs(x) + std::abs(scale(rng)) * 0.1;
    CHECK(nf <= luxemburg_norm(bigger, p) + 1e-12);

    if (nf > 0) {
      const double m1 = modular(GridFunction(g, f), p, nf * 0.9);
      const double m2 = modular(GridFunction(g, f), p, nf * 1.1);
      CHECK(m1 > 1.0);
      CHECK(m2 < 1.0);
    }
  }
}

TEST_CASE("constant exponent gives the classical Lq norm") {
  std::mt19937_64 rng(29);
  for (double q : {1.5, 2.0, 3.0, 6.5}) {
    const auto p = testing::constant(2, 4, q);
    for (int trial = 0; trial < 10; ++trial) {
      const auto f = random_values(rng, p.grid().cell_count());
      double s = 0;
      for (double x : f) s += std::pow(std::abs(x), q) * p.grid().cell_measure();
      CHECK(luxemburg_norm(f, p) == doctest::Approx(std::pow(s, 1.0 / q)).epsilon(1e-10));
    }
  }
}

TEST_CASE("dyadic maximal examples") {
  const Grid g(1, 3);
  const auto mc = dyadic_maximal(GridFunction::constant(g, -2.5));
  for (double v : mc.values) CHECK(v == 2.5);
  const auto half = dyadic_maximal(GridFunction::indicator(g, DyadicCube{1, 1, 0}));
  for (CellIndex c = 0; c < 8; ++c) CHECK(half.values[c] == (c < 4 ? 1.0 : 0.5));
  const Grid g2(1, 2);
  const auto quarter = dyadic_maximal(GridFunction::indicator(g2, DyadicCube{1, 2, 0}));
  CHECK(quarter.values == std::vector<double>{1.0, 0.5, 0.25, 0.25});
}

TEST_CASE("dyadic maximal agrees with brute force") {
  std::mt19937_64 rng(31);
  for (int dim = 1; dim <= 2; ++dim) {
    const Grid g(dim, dim == 1 ? 6 : 3);
    for (int trial = 0; trial < 10; ++trial) {
      const auto f = random_values(rng, g.cell_count());
      const auto expected = oracle::maximal(g, f);
      const auto got = dyadic_maximal(GridFunction(g, f));
      double mean = 0;
      for (double x : f) mean += std::abs(x) * g.cell_measure();
      for (std::size_t i = 0; i < f.size(); ++i) {
        CHECK(got.values[i] == doctest::Approx(expected[i]).epsilon(1e-13));
        CHECK(got.values[i] >= std::abs(f[i]));
        CHECK(got.values[i] >= mean * (1 - 1e-14));
      }
    }
  }
}

TEST_CASE("Hoelder defect") {
  const auto p2 = testing::constant(1, 4, 2.0);
  const auto one = GridFunction::constant(p2.grid(), 1.0);
  CHECK(holder_defect(one, one, p2) == doctest::Approx(1.0));
  CHECK(holder_defect(GridFunction::zeros(p2.grid()), one, p2) == 0.0);
  const auto p24 = testing::two_four(1, 4);
  const auto left = GridFunction::indicator(p24.grid(), DyadicCube{1, 1, 0});
  const auto right = GridFunction::indicator(p24.grid(), DyadicCube{1, 1, 1});
  CHECK(holder_defect(left, right, p24) > 0.0);

  std::mt19937_64 rng(37);
  const Grid g(1, 6);
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = random_field(g, rng);
    const GridFunction f(g, random_values(rng, g.cell_count()));
    const GridFunction h(g, random_values(rng, g.cell_count()));
    CHECK(holder_defect(f, h, p) >= -1e-9);
  }
  CHECK_ERROR_KIND(holder_defect(GridFunction::zeros(Grid(1, 3)), left, p24), ErrorKind::AlignmentError);
}

TEST_CASE("embedding checks examples") {
  const auto p24 = testing::two_four(1, 5);
  const auto all = p24.grid().all_cells();
  auto r = embedding_checks(p24, all, DyadicCube::unit(1));
  CHECK(r.diening_lhs == doctest::Approx(1.0));
  CHECK(r.diening_rhs == doctest::Approx(2.0));
  CHECK(r.jensen_holds());

  const auto p2 = testing::constant(1, 5, 2.0);
  r = embedding_checks(p2, cells_of(p2.grid(), DyadicCube{1, 1, 0}), DyadicCube::unit(1));
  CHECK(r.ratio_norm == doctest::Approx(std::sqrt(0.5)));
  CHECK(r.ratio_measure == 0.5);
  r = embedding_checks(p2, all, DyadicCube::unit(1));
  CHECK(r.ratio_norm == doctest::Approx(1.0));
  CHECK(r.maximal_lower >= 1.0 - 1e-12);

  CHECK_ERROR_KIND(embedding_checks(p2, all, DyadicCube{1, 1, 0}), ErrorKind::ContainmentError);
  CHECK_ERROR_KIND(embedding_checks(p2, CellSet{}, DyadicCube{1, 1, 0}), ErrorKind::EmptyRegion);
}

TEST_CASE("Jensen bound and weak-type chain on random pairs") {
  std::mt19937_64 rng(41);
  const Grid g(1, 7);
  for (int trial = 0; trial < 40; ++trial) {
    const auto p = random_field(g, rng);
    for (const auto& q : enumerate_cubes(g, 0, 7)) {
      if (rng() % 8 != 0) continue;
      const auto qc = cells_of(g, q);
      CellSet e;
      for (auto c : qc)
        if (rng() % 3 == 0) e.push_back(c);
      if (e.empty()) e.push_back(qc.back());
      const auto r = embedding_checks(p, e, q);
      CHECK(r.jensen_holds());
      CHECK(r.weak_type_holds());
      CHECK(r.ratio_norm <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("maximal operator lower bound is at least one") {
  CHECK(maximal_operator_lower_bound(testing::two_four(1, 6), 3, 16) >= 1.0 - 1e-12);
}
