#include "frontlab/errors.hpp"
#include "frontlab/grid_profile.hpp"
#include "frontlab/speed_atlas.hpp"
#include "frontlab/weighted_profiles.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace frontlab;

namespace {

Vec zero(int d = 1) { return Vec::Zero(d); }

// Exact nu-front on [lo, hi] with exact derivative samples.
GridProfile exact_front(double nu, double lo, double hi, double dx) {
  const int n = static_cast<int>(std::lround((hi - lo) / dx)) + 1;
  std::vector<double> w(n), dw(n);
  for (int i = 0; i < n; ++i) {
    w[i] = oracle::pushed_front(nu, lo + i * dx);
    dw[i] = oracle::pushed_front_d(nu, lo + i * dx);
  }
  GridProfile g(lo, dx, 1, w, zero());
  g.set_derivative(dw);
  return g;
}

double compact_bump(double x, double center, double radius) {
  const double r = (x - center) / radius;
  return std::abs(r) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - r * r)) : 0.0;
}

GridProfile random_bumps(std::mt19937_64& rng, int dim, double x0, double dx, int n, double lo, double hi) {
  std::uniform_real_distribution<double> centers(lo + 3.0, hi - 3.0), radii(0.8, 3.0), amp(-1.0, 1.0);
  std::vector<double> w(static_cast<std::size_t>(n) * dim, 0.0);
  for (int b = 0; b < 3; ++b) {
    const double c = centers(rng), r = radii(rng);
    std::vector<double> a(dim);
    for (auto& v : a) v = amp(rng);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < dim; ++j) w[static_cast<std::size_t>(i) * dim + j] += a[j] * compact_bump(x0 + i * dx, c, r);
  }
  return GridProfile(x0, dx, dim, w, zero(dim));
}

double trapezoid_weight_sum(const GridProfile& g, double c, double ref) {
  double s = 0.0;
  for (int i = 0; i < g.size(); ++i) s += ((i == 0 || i == g.size() - 1) ? 0.5 : 1.0) * std::exp(c * (g.x(i) - ref));
  return s * g.dx();
}

}  // namespace

TEST_CASE("grid profile basics") {
  CHECK_THROWS_AS(GridProfile(0.0, 0.1, 1, std::vector<double>(5, 0.0), zero()), InvalidArgument);
  CHECK_THROWS_AS(GridProfile(0.0, -0.1, 1, std::vector<double>(20, 0.0), zero()), InvalidArgument);
  std::vector<double> w(200);
  for (int i = 0; i < 200; ++i) w[i] = std::sin(0.05 * i);
  GridProfile g(0.0, 0.05, 1, w, zero());
  for (int order : {2, 4, 6}) {
    g.set_stencil_order(order);
    const auto d = g.derivative();
    double err = 0.0;
    for (int i = 10; i < 190; ++i) err = std::max(err, std::abs(d[i] - std::cos(0.05 * i)));
    CHECK(err < std::pow(0.05, order));
  }
  const auto s = g.shifted(3);
  CHECK(s(10, 0) == g(7, 0));
  CHECK(s(1, 0) == 0.0);
  CHECK(profile_csv(g).rfind("x,u1\n", 0) == 0);
}

TEST_CASE("energy of the constant profile vanishes") {
  const auto p = make_fisher(0.25);
  const auto g = GridProfile::constant(0.0, 0.1, 100, zero());
  const auto en = energy(g, p, 1.3, 0.0);
  CHECK(en.value == 0.0);
  CHECK(weighted_h1_sq(g, 1.3, 0.0) == 0.0);
  CHECK(invasion_condition(g, p) == 0.0);
}

TEST_CASE("energy of the exact pushed front at its own speed") {
  const auto p = make_fisher(0.25);
  const auto g = exact_front(0.25, -40.0, 40.0, 0.1);
  const double c = oracle::pushed_speed(0.25);
  const auto en = energy(g, p, c, 0.0);
  CHECK(std::abs(en.value) / en.kinetic < 1e-8);
  CHECK(en.value == doctest::Approx(en.kinetic + en.potential).epsilon(1e-12));
}

TEST_CASE("energy overflow is reported") {
  const auto p = make_fisher(0.25);
  const auto g = exact_front(0.25, -40.0, 40.0, 0.1);
  CHECK_THROWS_AS(energy(g, p, 30.0, -40.0), NumericalFailure);
}

TEST_CASE("rereferencing multiplies by the exact factor") {
  const auto p = make_fisher(0.25);
  const auto g = exact_front(0.25, -30.0, 30.0, 0.1);
  const auto a = energy(g, p, 1.7, 0.0);
  const auto b = energy(g, p, 1.7, 2.5);
  CHECK(b.value == doctest::Approx(a.value * std::exp(-1.7 * 2.5)).epsilon(1e-12));
  CHECK(a.rereferenced(2.5).value == doctest::Approx(b.value).epsilon(1e-12));
}

TEST_CASE("property: energy translation covariance") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> cs(0.1, 3.0);
  std::uniform_int_distribution<int> shifts(-40, 40);
  const auto f1 = make_fisher(0.3);
  const auto f2 = make_separable({make_fisher(0.3), make_fisher(0.8)});
  for (int k = 0; k < 120; ++k) {
    const int dim = 1 + k % 2;
    const auto g = random_bumps(rng, dim, 0.0, 0.05, 1200, 20.0, 40.0);
    const double c = cs(rng);
    const int s = shifts(rng);
    const auto& p = dim == 1 ? f1 : f2;
    const double base = energy(g, p, c, 30.0).value;
    const double moved = energy(g.shifted(s), p, c, 30.0).value;
    CHECK(std::abs(moved - std::exp(c * s * 0.05) * base) <= 1e-12 * std::abs(moved) + 1e-300);
  }
}

TEST_CASE("weighted H1 is a quadratic form") {
  std::mt19937_64 rng(9);
  const auto g = random_bumps(rng, 2, 0.0, 0.05, 600, 5.0, 25.0);
  std::vector<double> twice = g.values();
  for (auto& v : twice) v *= 2.0;
  const GridProfile g2(0.0, 0.05, 2, twice, zero(2));
  CHECK(weighted_h1_sq(g2, 0.8, 10.0) == doctest::Approx(4.0 * weighted_h1_sq(g, 0.8, 10.0)).epsilon(1e-13));
  CHECK(weighted_h1_sq(g, 0.8, 10.0) > 0.0);
}

TEST_CASE("weighted H1 of a plateau at c = 0") {
  // Height h on m interior nodes, zero elsewhere: L2 part m dx h^2 plus two jumps.
  const int n = 100, m = 40;
  const double h = 0.3, dx = 0.1;
  std::vector<double> w(n, 0.0);
  for (int i = 30; i < 30 + m; ++i) w[i] = h;
  const GridProfile g(0.0, dx, 1, w, zero());
  const double l2 = m * dx * h * h;
  // Central differences: (h/(2dx))^2 on the two nodes either side of each jump.
  const double grad = 4.0 * dx * std::pow(h / (2.0 * dx), 2);
  CHECK(weighted_h1_sq(g, 0.0, 0.0) == doctest::Approx(l2 + grad).epsilon(1e-12));
}

TEST_CASE("dissipation of an exact travelling wave vanishes") {
  const auto p = make_fisher(0.25);
  auto g = exact_front(0.25, -40.0, 40.0, 0.05);
  g.set_stencil_order(6);
  const double c = oracle::pushed_speed(0.25);
  const double d = dissipation_functional(g, p, c, 0.0);
  const double scale = energy(g, p, c, 0.0).kinetic;
  CHECK(d / scale < 1e-7);
}

TEST_CASE("dissipation of a non-critical constant") {
  const auto p = make_fisher(0.25);
  const Vec e = zero();
  const auto g0 = GridProfile::constant(0.0, 0.1, 50, e);
  std::vector<double> w(50, 0.4);
  const GridProfile g(0.0, 0.1, 1, w, e);
  const double dv = oracle::fisher_dv(0.25, 0.4);
  const double expect = dv * dv * trapezoid_weight_sum(g0, 0.7, 1.0);
  CHECK(dissipation_functional(g, p, 0.7, 1.0) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(dissipation_functional(g, p, 0.7, 1.0, DissipationForm::expanded) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("two dissipation forms agree to second order") {
  const auto p = make_fisher(0.25);
  auto gap_at = [&](double dx) {
    const int n = static_cast<int>(std::lround(30.0 / dx)) + 1;
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i) {
      const double x = -15.0 + i * dx;
      w[i] = 0.1 * std::exp(-x * x);
    }
    const GridProfile g(-15.0, dx, 1, w, zero());
    const double a = dissipation_functional(g, p, 1.0, 0.0, DissipationForm::residual);
    const double b = dissipation_functional(g, p, 1.0, 0.0, DissipationForm::expanded);
    return std::abs(a - b) / a;
  };
  const double coarse = gap_at(0.1), mid = gap_at(0.05), fine = gap_at(0.025);
  CHECK(coarse / mid > 3.0);
  CHECK(mid / fine > 3.0);
  CHECK(fine < 1e-3);
}

TEST_CASE("property: Poincare gap on random compact bumps") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> cs(0.2, 3.0), starts(0.0, 4.0);
  int cases = 0;
  for (int k = 0; k < 110; ++k) {
    const int dim = 1 + k % 2;
    const auto g = random_bumps(rng, dim, 0.0, 0.02, 1501, 5.0, 25.0);
    const double c = cs(rng), xi0 = starts(rng);
    for (double frac : {0.25, 0.5, 0.75}) {
      const auto gap = poincare_gap(g, c, xi0, frac * c);
      CHECK(gap.gap >= -1e-8 * gap.scale());
      if (frac == 0.5) CHECK(gap.gap > 0.0);
    }
    ++cases;
  }
  CHECK(cases >= 100);
}

TEST_CASE("Poincare gap equality case") {
  const double c = 1.2, lambda = 0.6, dx = 0.01;
  const int n = 6001;
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) {
    const double x = i * dx;
    w[i] = std::exp(-lambda * x) * smooth_step_down((x - 40.0) / 15.0);
  }
  const GridProfile g(0.0, dx, 1, w, zero());
  const auto gap = poincare_gap(g, c, 0.0, lambda);
  CHECK(gap.gap >= -1e-8 * gap.scale());
  CHECK(gap.gap < 1e-2 * gap.scale());
  const auto e = GridProfile::constant(0.0, dx, 100, zero());
  CHECK(poincare_gap(e, c, 0.0, lambda).gap == 0.0);
  CHECK_THROWS_AS(poincare_gap(exact_front(0.25, 0.0, 3.0, 0.1), c, 0.0, lambda), InvalidArgument);
}

TEST_CASE("cutoff truncation") {
  const auto e = GridProfile::constant(0.0, 0.1, 100, zero());
  const auto te = cutoff_truncate(e, 3.0, 2.0);
  for (int i = 0; i < 100; ++i) CHECK(te(i, 0) == 0.0);
  const auto p = make_fisher(0.25);
  const auto g = exact_front(0.25, -40.0, 40.0, 0.1);
  const auto cut = cutoff_truncate(g, 0.0, 5.0);
  for (int i = 0; i < cut.size(); ++i)
    if (cut.x(i) >= 5.0 + 1e-12) CHECK(cut(i, 0) == 0.0);
  const double c = 1.5;
  const double full = energy(g, p, c, 0.0).value;
  const double near = std::abs(energy(cutoff_truncate(g, 20.0, 5.0), p, c, 0.0).value - full);
  const double far = std::abs(energy(cutoff_truncate(g, 30.0, 5.0), p, c, 0.0).value - full);
  CHECK(far < near);
  CHECK(far < 1e-6 * std::abs(full));
}

TEST_CASE("variational speed scan") {
  const auto p = make_fisher(0.25);
  const auto e = GridProfile::constant(0.0, 0.1, 100, zero());
  CHECK(variational_speed_scan(e, p, default_speed_grid(2.4), 0.0).c_var == 0.0);

  std::vector<double> plateau(1001, 0.0);
  for (int i = 0; i < 1001; ++i) plateau[i] = 1.0;
  const auto step = cutoff_truncate(GridProfile(0.0, 0.1, 1, plateau, zero()), 50.0, 5.0);
  CHECK(variational_speed_scan(step, p, default_speed_grid(2.4), 50.0).c_var > 0.05);

  const auto front = exact_front(0.25, -40.0, 40.0, 0.1);
  const auto scan = variational_speed_scan(front, p, default_speed_grid(std::sqrt(6.0)), 0.0);
  CHECK(std::abs(scan.c_var - oracle::pushed_speed(0.25)) < 1e-6);
  CHECK(scan.c_var < oracle::pushed_speed(0.25) + 1e-8);
  const auto grid = default_speed_grid(2.4, 64);
  CHECK(grid.size() == 64);
  CHECK(grid.front() == doctest::Approx(0.05));
  CHECK(grid.back() == doctest::Approx(2.4));
}

TEST_CASE("invasion condition") {
  const auto p = make_fisher(0.25);
  std::vector<double> plateau(1001, 1.0);
  const auto step = cutoff_truncate(GridProfile(0.0, 0.1, 1, plateau, zero()), 40.0, 5.0);
  const double val = invasion_condition(step, p);
  CHECK(val < 0.0);
  CHECK(std::abs(val + 20.0) < 0.1 * 20.0);

  const auto q = make_quintic_gl(0.1);
  std::vector<double> bump(400);
  for (int i = 0; i < 400; ++i) bump[i] = 0.01 * compact_bump(i * 0.1, 20.0, 3.0);
  CHECK(invasion_condition(GridProfile(0.0, 0.1, 1, bump, zero()), q) > 0.0);
}

TEST_CASE("lower energy bound right of the stability radius") {
  const auto p = make_fisher(0.25);
  const auto g = exact_front(0.25, -40.0, 40.0, 0.05);
  const double c0 = 2.05, ds = oracle::delta_stab_quarter(c0);
  int bar = 0;
  while (g(bar, 0) > ds) ++bar;
  const double xi_bar = g.x(bar);
  for (double c : {2.1, 2.3, 2.6}) {
    const double en = energy(g, p, c, xi_bar).value;
    const double bound = energy_lower_bound(c, c0, -0.5, xi_bar, g.deviation(bar), xi_bar);
    CHECK(en >= bound - 1e-9);
  }
  CHECK_THROWS_AS(energy_lower_bound(2.0, 2.05, -0.5, 0.0, 0.1, 0.0), InvalidArgument);
}
