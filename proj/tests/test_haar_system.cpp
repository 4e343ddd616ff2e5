#include <cmath>
#include <random>

#include "oracles.hpp"
#include "support.hpp"
#include "vlgreedy/haar_system.hpp"
#include "vlgreedy/variable_norm.hpp"

using namespace vlg;

namespace {

std::vector<double> gaussian(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> z;
  std::vector<double> v(n);
  for (auto& x : v) x = z(rng);
  return v;
}

}  // namespace

TEST_CASE("analysis examples") {
  const Grid g(1, 3);
  auto c = analyze(GridFunction::indicator(g, DyadicCube{1, 1, 0}));
  CHECK(c.scaling() == doctest::Approx(0.5));
  CHECK(c.detail(1, DyadicCube{1, 0, 0}) == doctest::Approx(0.5));
  CHECK(c.support().size() == 2);

  c = analyze(GridFunction::constant(g, -1.75));
  CHECK(c.scaling() == doctest::Approx(-1.75));
  CHECK(c.support().size() == 1);

  const Grid g2(1, 2);
  c = analyze(GridFunction(g2, {1, 0, 0, 0}));
  CHECK(c.scaling() == doctest::Approx(0.25));
  CHECK(c.detail(1, DyadicCube{1, 0, 0}) == doctest::Approx(0.25));
  CHECK(c.detail(1, DyadicCube{1, 1, 0}) == doctest::Approx(std::sqrt(2.0) / 4));
  CHECK(c.detail(1, DyadicCube{1, 1, 1}) == 0.0);
}

TEST_CASE("synthesis examples") {
  const Grid g(1, 3);
  HaarCoefficients c(g);
  c.scaling() = 1.0;
  CHECK(synthesize(c).values == GridFunction::constant(g, 1.0).values);
  HaarCoefficients d(g);
  d.detail(1, DyadicCube{1, 0, 0}) = 1.0;
  const auto f = synthesize(d);
  for (CellIndex i = 0; i < 8; ++i) CHECK(f.values[i] == (i < 4 ? 1.0 : -1.0));
}

TEST_CASE("coefficients equal direct inner products with the tensor formula") {
  std::mt19937_64 rng(43);
  for (int dim = 1; dim <= 3; ++dim) {
    const Grid g(dim, dim == 3 ? 2 : 4);
    const auto f = gaussian(rng, g.cell_count());
    const auto c = analyze(GridFunction(g, f));
    double mean = 0;
    for (double x : f) mean += x * g.cell_measure();
    CHECK(c.scaling() == doctest::Approx(mean).epsilon(1e-13));
    for (const auto& q : enumerate_cubes(g, 0, g.depth() - 1))
      for (int l = 1; l < (1 << dim); ++l)
        CHECK(c.detail(l, q) ==
              doctest::Approx(oracle::inner(f, oracle::haar_detail(g, l, q), g.cell_measure())).epsilon(1e-12));
  }
}

TEST_CASE("positions follow canonical basis order") {
  const Grid g(2, 3);
  const HaarCoefficients c(g);
  REQUIRE(c.size() == g.cell_count());
  for (std::size_t i = 1; i < c.size(); ++i) {
    CHECK(c.index_at(i - 1) < c.index_at(i));
    CHECK(c.position(c.index_at(i)) == i);
  }
  CHECK_ERROR_KIND(c.position(HaarIndex::detail(1, DyadicCube{2, 3, 0})), ErrorKind::ResolutionError);
  CHECK_ERROR_KIND(c.position(HaarIndex::detail(4, DyadicCube{2, 1, 0})), ErrorKind::InvalidInput);
}

TEST_CASE("reconstruction and Parseval on random functions") {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 30; ++trial) {
    const Grid g(1 + trial % 3, trial % 3 == 2 ? 3 : 5);
    const GridFunction f(g, gaussian(rng, g.cell_count()));
    const auto c = analyze(f);
    const auto back = synthesize(c);
    for (std::size_t i = 0; i < f.values.size(); ++i)
      CHECK(std::abs(back.values[i] - f.values[i]) <= 1e-12 * f.max_abs());
    double coef2 = 0, f2 = 0;
    for (double x : c.flat()) coef2 += x * x;
    for (double x : f.values) f2 += x * x * g.cell_measure();
    CHECK(coef2 == doctest::Approx(f2).epsilon(1e-10));
    const auto again = analyze(back);
    for (std::size_t i = 0; i < c.size(); ++i) CHECK(again.flat()[i] == doctest::Approx(c.flat()[i]).epsilon(1e-12));
  }
}

TEST_CASE("square function examples") {
  const Grid g(1, 3);
  HaarCoefficients psi(g);
  psi.detail(1, DyadicCube{1, 0, 0}) = 1.0;
  for (double v : square_function(psi).values) CHECK(v == doctest::Approx(1.0));
  HaarCoefficients phi(g);
  phi.scaling() = 1.0;
  for (double v : square_function(phi).values) CHECK(v == doctest::Approx(1.0));
  for (double v : square_function(analyze(GridFunction::indicator(g, DyadicCube{1, 1, 0}))).values)
    CHECK(v == doctest::Approx(std::sqrt(0.5)));
}

TEST_CASE("square function ignores coefficient signs") {
  std::mt19937_64 rng(53);
  const Grid g(2, 3);
  const auto c = analyze(GridFunction(g, gaussian(rng, g.cell_count())));
  const auto base = square_function(c);
  for (int trial = 0; trial < 20; ++trial) {
    auto flipped = c;
    for (auto& x : flipped.flat())
      if (rng() & 1) x = -x;
    CHECK(square_function(flipped).values == base.values);
  }
}

TEST_CASE("basis norms") {
  const auto p2 = testing::constant(1, 5, 2.0);
  for (const auto& q : enumerate_cubes(p2.grid(), 0, 4)) CHECK(basis_norm(q, 1, p2) == doctest::Approx(1.0));
  CHECK(basis_norm(DyadicCube{1, 1, 0}, 1, testing::constant(1, 5, 4.0)) ==
        doctest::Approx(std::pow(2.0, 0.25)).epsilon(1e-13));
  CHECK(basis_norm(DyadicCube{1, 1, 1}, 1, testing::two_four(1, 5)) ==
        doctest::Approx(std::pow(2.0, 0.25)).epsilon(1e-13));
  CHECK_ERROR_KIND(basis_norm(DyadicCube{1, 5, 0}, 1, p2), ErrorKind::ResolutionError);

  std::mt19937_64 rng(59);
  std::uniform_real_distribution<double> u(1.2, 6.0);
  const Grid g(2, 3);
  std::vector<double> vals(g.cell_count());
  for (auto& v : vals) v = u(rng);
  const ExponentField p(g, vals);
  for (const auto& q : enumerate_cubes(g, 0, 2))
    for (int l = 1; l < 4; ++l) {
      const auto psi = oracle::haar_detail(g, l, q);
      CHECK(basis_norm(q, l, p) == doctest::Approx(oracle::norm(psi, vals, g.cell_measure())).epsilon(1e-10));
    }
}

TEST_CASE("equivalence ratio") {
  std::mt19937_64 rng(61);
  const auto p2 = testing::constant(1, 6, 2.0);
  for (int trial = 0; trial < 10; ++trial)
    CHECK(equivalence_ratio(GridFunction(p2.grid(), gaussian(rng, 64)), p2) == doctest::Approx(1.0).epsilon(1e-9));

  const auto p24 = testing::two_four(1, 6);
  const auto psi = basis_function(p24.grid(), HaarIndex::detail(1, DyadicCube::unit(1)));
  CHECK(equivalence_ratio(psi, p24) ==
        doctest::Approx(char_norm(p24, p24.grid().all_cells()) / luxemburg_norm(psi, p24)).epsilon(1e-12));
  CHECK_ERROR_KIND(equivalence_ratio(GridFunction::zeros(p24.grid()), p24), ErrorKind::UndefinedRatio);

  PiecewiseExponent pw;
  pw.pieces.push_back({{0.0}, {0.5}, 1.5});
  pw.pieces.push_back({{0.5}, {1.0}, 3.0});
  const auto p = build_exponent(Grid(1, 8), pw);
  double lo = INFINITY, hi = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const double r = equivalence_ratio(GridFunction(p.grid(), gaussian(rng, 256)), p);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  CHECK(lo >= 1.0 / 20);
  CHECK(hi <= 20.0);
  MESSAGE("equivalence ratio range [" << lo << ", " << hi << "], spread " << hi / lo);
}
