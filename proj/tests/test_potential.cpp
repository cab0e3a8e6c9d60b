#include "frontlab/errors.hpp"
#include "frontlab/potential.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace frontlab;

namespace {

Vec v1(double x) { return Vec::Constant(1, x); }

double fd_check_gradient(const PotentialSpec& p, const Vec& u) {
  const double h = 1e-5;
  const Vec g = p.gradient(u);
  double err = 0.0;
  for (int j = 0; j < p.dim(); ++j) {
    Vec a = u, b = u;
    a(j) += h;
    b(j) -= h;
    err = std::max(err, std::abs(g(j) - (p.value(a) - p.value(b)) / (2 * h)));
  }
  return err / (1.0 + g.norm());
}

double fd_check_hessian(const PotentialSpec& p, const Vec& u) {
  const double h = 1e-5;
  const Mat hess = p.hessian(u);
  double err = 0.0;
  for (int j = 0; j < p.dim(); ++j) {
    Vec a = u, b = u;
    a(j) += h;
    b(j) -= h;
    const Vec col = (p.gradient(a) - p.gradient(b)) / (2 * h);
    err = std::max(err, (hess.col(j) - col).norm());
  }
  return err / (1.0 + hess.norm());
}

PotentialSpec random_polynomial(std::mt19937_64& rng, int dim) {
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::uniform_int_distribution<int> pw(0, 3);
  std::vector<Monomial> terms;
  for (int t = 0; t < 6; ++t) {
    std::vector<int> powers(dim);
    for (auto& q : powers) q = pw(rng);
    terms.push_back({coef(rng), powers});
  }
  std::vector<int> quartic(dim, 0);
  for (int j = 0; j < dim; ++j) {
    quartic.assign(dim, 0);
    quartic[j] = 4;
    terms.push_back({1.0, quartic});
  }
  return PotentialSpec(dim, terms);
}

}  // namespace

TEST_CASE("fisher potential values") {
  const auto p1 = make_fisher(1.0);
  CHECK(p1.value1(1.0) == doctest::Approx(-0.25).epsilon(1e-15));
  CHECK(p1.value1(0.0) == 0.0);
  CHECK(p1.derivative1(0.0) == 0.0);
  CHECK(make_fisher(0.25).value1(1.0) == doctest::Approx(-0.5).epsilon(1e-15));
  for (double nu : {0.25, 0.4, 0.7, 1.0}) {
    const auto p = make_fisher(nu);
    for (double u : {-1.3, -0.2, 0.3, 0.77, 1.6}) {
      CHECK(p.value1(u) == doctest::Approx(oracle::fisher_v(nu, u)).epsilon(1e-13));
      CHECK(p.derivative1(u) == doctest::Approx(oracle::fisher_dv(nu, u)).epsilon(1e-13));
      CHECK(p.second_derivative1(u) == doctest::Approx(oracle::fisher_d2v(nu, u)).epsilon(1e-13));
    }
  }
}

TEST_CASE("fisher rejects nonpositive nu") {
  CHECK_THROWS_AS(make_fisher(0.0), InvalidArgument);
  CHECK_THROWS_AS(make_fisher(-0.5), InvalidArgument);
}

TEST_CASE("fisher critical set") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> nus(0.05, 3.0);
  for (int k = 0; k < 100; ++k) {
    const double nu = nus(rng);
    const auto p = make_fisher(nu);
    for (double u : {-nu, 0.0, 1.0}) CHECK(std::abs(p.derivative1(u)) < 1e-12);
  }
}

TEST_CASE("fisher global minimum is analytic") {
  const auto gm = make_fisher(0.25).global_minimum();
  REQUIRE(gm);
  CHECK(gm->value == doctest::Approx(-0.5));
  CHECK(gm->point(0) == doctest::Approx(1.0));
  const auto gm1 = make_fisher(1.0).global_minimum();
  CHECK(gm1->value == doctest::Approx(-0.25));
}

TEST_CASE("find_critical_point") {
  const auto p = make_fisher(1.0);
  const auto e = find_critical_point(p, v1(0.1));
  CHECK(std::abs(e.location(0)) < 1e-12);
  CHECK(e.mu1() == doctest::Approx(-1.0));
  CHECK(e.c_lin == doctest::Approx(2.0));
  const auto m = find_critical_point(p, v1(0.9));
  CHECK(m.location(0) == doctest::Approx(1.0));
  CHECK(m.mu1() > 0.0);
  for (double guess : {-2.0, 0.3, 5.0}) {
    const auto q = find_critical_point(make_quadratic({0.7}), v1(guess));
    CHECK(std::abs(q.location(0)) < 1e-12);
    CHECK(q.mu1() == doctest::Approx(0.7));
  }
}

TEST_CASE("find_critical_point fails on a singular Hessian") {
  // V = u has no critical point and a vanishing Hessian.
  const PotentialSpec p(1, {{1.0, {1}}});
  CHECK_THROWS_AS(find_critical_point(p, v1(0.5)), NumericalFailure);
}

TEST_CASE("curvatures") {
  CHECK(curvatures(make_fisher(0.25), v1(0.0)).values(0) == doctest::Approx(-1.0));
  CHECK(curvatures(make_fisher(0.25), v1(0.5)).values(0) == doctest::Approx(-1.0));
  const auto s = curvatures(make_quadratic({3.0, -1.0}), Vec::Zero(2));
  CHECK(s.values(0) == doctest::Approx(-1.0));
  CHECK(s.values(1) == doctest::Approx(3.0));
  CHECK(std::abs(std::abs(s.vectors(1, 0)) - 1.0) < 1e-14);
  CHECK((s.vectors.transpose() * s.vectors - Mat::Identity(2, 2)).norm() < 1e-14);
}

TEST_CASE("check_coercivity") {
  CHECK(check_coercivity(make_fisher(1.0), 10.0) > 0.0);
  CHECK(check_coercivity(make_quadratic({1.0}), 1.0) == doctest::Approx(1.0));
  CHECK(check_coercivity(make_quadratic({-1.0}), 1.0) == doctest::Approx(-1.0));
  CHECK(check_coercivity(make_quadratic({1.0, 1.0}), 1.0) == doctest::Approx(1.0));
}

TEST_CASE("separable and quintic families") {
  const auto f = make_fisher(0.25);
  const auto s = make_separable({f, f});
  Vec u(2);
  u << 0.3, -0.7;
  CHECK(s.value(u) == doctest::Approx(f.value1(0.3) + f.value1(-0.7)));
  const auto q = make_quintic_gl(0.1);
  CHECK(q.value1(1.0) == doctest::Approx(0.05 - 0.25 + 1.0 / 6.0));
}

TEST_CASE("property: gradient and Hessian agree with finite differences") {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> box(-2.0, 2.0);
  int cases = 0;
  for (int k = 0; k < 120; ++k) {
    const int dim = 1 + k % 3;
    const auto p = k % 4 == 0 ? make_fisher(0.2 + 0.01 * k) : random_polynomial(rng, dim);
    Vec u(p.dim());
    do {
      for (int j = 0; j < p.dim(); ++j) u(j) = box(rng);
    } while (u.norm() > 2.0);
    CHECK(fd_check_gradient(p, u) < 1e-6);
    CHECK(fd_check_hessian(p, u) < 1e-6);
    ++cases;
  }
  CHECK(cases >= 100);
}

TEST_CASE("global minimum search on a box") {
  // Tilted double well V = u^4 - 2u^2 - 0.1u, minima near +-1.
  const PotentialSpec p(1, {{1.0, {4}}, {-2.0, {2}}, {-0.1, {1}}});
  const auto gm = search_global_minimum(p, -3.0, 3.0);
  CHECK(gm.point(0) > 0.9);
  CHECK_FALSE(gm.on_boundary);
  CHECK(find_local_minima(p, -3.0, 3.0).size() == 2);
  const auto unbounded = search_global_minimum(make_quadratic({-1.0}), -3.0, 3.0);
  CHECK(unbounded.on_boundary);
}
