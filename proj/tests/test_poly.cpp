#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "poly.hpp"

#include <random>

using namespace framecert::poly;

TEST_CASE("basis sizes and ordering") {
  MonomialBasis b10(1, 0);
  CHECK(b10.size() == 1);
  CHECK(b10[0].degree() == 0);

  // Moment-matrix sides used by the bundled problems.
  CHECK(MonomialBasis(9, 2).size() == 55);
  CHECK(MonomialBasis(13, 2).size() == 105);
  CHECK(MonomialBasis(9, 1).size() == 10);
  CHECK(MonomialBasis(13, 1).size() == 14);
  CHECK(MonomialBasis(9, 3).size() == 220);

  MonomialBasis b(2, 2);
  REQUIRE(b.size() == 6);
  CHECK(b[0].exponents() == std::vector<int>{0, 0});
  CHECK(b[1].exponents() == std::vector<int>{1, 0});
  CHECK(b[2].exponents() == std::vector<int>{0, 1});
  CHECK(b[3].exponents() == std::vector<int>{2, 0});
  CHECK(b[4].exponents() == std::vector<int>{1, 1});
  CHECK(b[5].exponents() == std::vector<int>{0, 2});
  for (int i = 0; i < b.size(); ++i) CHECK(b.index_of(b[i]) == i);
}

TEST_CASE("basis cardinality matches binomial for all n <= 15, k <= 6") {
  for (int n = 1; n <= 15; ++n) {
    for (int k = 0; k <= 6; ++k) {
      CHECK(MonomialBasis(n, k).size() == basis_size(n, k));
    }
  }
}

TEST_CASE("multiplication") {
  Polynomial x1 = Polynomial::variable(1, 0);
  Polynomial sq = x1 * x1;
  CHECK(sq.degree() == 2);
  CHECK(sq.coefficient(MultiIndex::unit(1, 0, 2)) == doctest::Approx(1.0));

  Polynomial one = Polynomial::constant(1, 1.0);
  Polynomial p = (one + x1) * (one - x1);
  CHECK(p.coefficient(MultiIndex::zero(1)) == doctest::Approx(1.0));
  CHECK(p.coefficient(MultiIndex::unit(1, 0, 1)) == 0.0);
  CHECK(p.coefficient(MultiIndex::unit(1, 0, 2)) == doctest::Approx(-1.0));

  Polynomial zero(1);
  CHECK((p * zero).is_zero());
  CHECK_THROWS(void(Polynomial::variable(2, 0) * x1));
}

TEST_CASE("multiplication degree additivity") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 3);
    MonomialBasis basis(n, 3);
    auto random_poly = [&]() {
      Polynomial p(n);
      for (int k = 0; k < 4; ++k) {
        p.add_term(basis[static_cast<int>(rng()) % basis.size()], coef(rng));
      }
      return p;
    };
    Polynomial p = random_poly();
    Polynomial q = random_poly();
    if (p.is_zero() || q.is_zero()) continue;
    CHECK((p * q).degree() == p.degree() + q.degree());
  }
}

TEST_CASE("substitute_affine simple cases") {
  Polynomial x = Polynomial::variable(1, 0);
  Polynomial id = x.substitute_affine({{1.0, 0.0}});
  CHECK(id.coefficient(MultiIndex::unit(1, 0)) == doctest::Approx(1.0));
  CHECK(id.terms().size() == 1);

  // x^2 at x = x'/2 + 1/2 -> x'^2/4 + x'/2 + 1/4.
  Polynomial x2 = x * x;
  Polynomial s = x2.substitute_affine({{0.5, 0.5}});
  CHECK(s.coefficient(MultiIndex::zero(1)) == doctest::Approx(0.25));
  CHECK(s.coefficient(MultiIndex::unit(1, 0, 1)) == doctest::Approx(0.5));
  CHECK(s.coefficient(MultiIndex::unit(1, 0, 2)) == doctest::Approx(0.25));
}

TEST_CASE("substitute_affine equals direct evaluation on random cubics") {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> coef(-3.0, 3.0);
  std::uniform_real_distribution<double> par(0.2, 2.0);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 3);
    MonomialBasis basis(n, 3);
    Polynomial p(n);
    for (int i = 0; i < basis.size(); ++i) p.add_term(basis[i], coef(rng));
    std::vector<std::pair<double, double>> maps;
    for (int v = 0; v < n; ++v) maps.emplace_back(par(rng), par(rng) - 1.0);
    Polynomial sub = p.substitute_affine(maps);
    CHECK(sub.degree() <= p.degree());
    for (int pt = 0; pt < 10; ++pt) {
      Eigen::VectorXd xp(n);
      for (int v = 0; v < n; ++v) xp[v] = coef(rng) / 3.0;
      Eigen::VectorXd x(n);
      for (int v = 0; v < n; ++v) x[v] = maps[static_cast<size_t>(v)].first * xp[v] + maps[static_cast<size_t>(v)].second;
      const double direct = p.evaluate(x);
      const double viaSub = sub.evaluate(xp);
      CHECK(viaSub == doctest::Approx(direct).epsilon(1e-10));
    }
  }
}

TEST_CASE("cubic law substitution matches brute-force expansion") {
  // a^3 under a = s*a_s + t with the box-scaling style map s = t = wbar/(2 rho l).
  const double h = 0.141 / (2.0 * 1.0 * 0.75);
  Polynomial a = Polynomial::variable(1, 0);
  Polynomial a3 = a * a * a;
  Polynomial s = a3.substitute_affine({{h, h}});
  CHECK(s.degree() == 3);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> pt(-1.0, 1.0);
  for (int i = 0; i < 10; ++i) {
    Eigen::VectorXd xs(1);
    xs[0] = pt(rng);
    const double direct = std::pow(h * xs[0] + h, 3.0);
    CHECK(s.evaluate(xs) == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("polynomial evaluation") {
  Polynomial x1 = Polynomial::variable(2, 0);
  Polynomial x2 = Polynomial::variable(2, 1);
  Polynomial p = Polynomial::constant(2, 1.0) - x1 * x1;
  Eigen::VectorXd at(2);
  at << 1.0, 0.0;
  CHECK(p.evaluate(at) == doctest::Approx(0.0));
  at << 2.0, 3.0;
  CHECK((x1 * x2).evaluate(at) == doctest::Approx(6.0));
}

TEST_CASE("matrix polynomial symmetry enforcement and evaluation") {
  MatrixPolynomial G(1, 2);
  Eigen::MatrixXd sym(2, 2);
  sym << 2.0, 1.0, 1.0, 2.0;
  G.add_term(MultiIndex::unit(1, 0), sym);
  Eigen::MatrixXd asym(2, 2);
  asym << 0.0, 1.0, -1.0, 0.0;
  CHECK_THROWS(G.add_term(MultiIndex::zero(1), asym));

  Eigen::VectorXd x(1);
  x << 3.0;
  CHECK(G.evaluate(x)(0, 0) == doctest::Approx(6.0));
  CHECK(G.degree() == 1);

  MatrixPolynomial Gs = G.substitute_affine({{2.0, -1.0}});
  x << 0.5;
  Eigen::VectorXd orig(1);
  orig << 2.0 * 0.5 - 1.0;
  CHECK((Gs.evaluate(x) - G.evaluate(orig)).norm() == doctest::Approx(0.0).epsilon(1e-12));
}
