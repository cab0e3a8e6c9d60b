// Acceptance run: one PASS/FAIL line per criterion, exit code 1 if any fails.

#include "frontlab/commands.hpp"
#include "frontlab/pde.hpp"
#include "frontlab/speed_atlas.hpp"
#include "frontlab/wave_ode.hpp"
#include "frontlab/weighted_profiles.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <future>
#include <random>
#include <sstream>
#include <string>

using namespace frontlab;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

Vec v1(double x) { return Vec::Constant(1, x); }
CriticalPoint origin(const PotentialSpec& p) { return find_critical_point(p, Vec::Zero(p.dim())); }

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

const PotentialSpec& quarter() {
  static const PotentialSpec p = make_fisher(0.25);
  return p;
}

struct TimedFront {
  FrontProfile front;
  double seconds = 0.0;
};

const TimedFront& quarter_front() {
  static const TimedFront tf = [] {
    const auto t0 = std::chrono::steady_clock::now();
    FrontProfile f = find_pushed_front(quarter(), origin(quarter()), 2.01, 2.4);
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return TimedFront{std::move(f), s};
  }();
  return tf;
}

InvasionTrace run_bump(double nu, double dt, std::vector<double> tracked) {
  const auto p = make_fisher(nu);
  const auto e = origin(p);
  SimConfig cfg;
  cfg.length = 400.0;
  cfg.dx = 0.1;
  cfg.dt = dt;
  cfg.t_final = 150.0;
  cfg.tracked_speeds = std::move(tracked);
  const double c_hi = nu < 0.5 ? oracle::pushed_speed(nu) : 2.0;
  resolve_radii(p, e, cfg, c_hi);
  return simulate(p, e, bump_ic(cfg, e.location, v1(1.0), 20.0), cfg);
}

Outcome criterion1() {
  const auto& tf = quarter_front();
  const double err = std::abs(tf.front.c - oracle::pushed_speed(0.25));
  return {err < 1e-6 && tf.seconds < 10.0,
          fmt("c* = %.12f, |c* - 3/sqrt2| = %.2e, %.2f s", tf.front.c, err, tf.seconds)};
}

Outcome criterion2() {
  const auto& f = quarter_front().front;
  const auto id = front_energy_identity(f, quarter(), f.c);
  return {id.residual < 1e-6, fmt("|E_c*| / int e^{c* xi} phi'^2 = %.2e", id.residual)};
}

Outcome criterion3() {
  const auto& f = quarter_front().front;
  bool ok = true;
  std::ostringstream os;
  for (double cp : {1.6, 1.8, 2.0, 2.05}) {
    const auto id = front_energy_identity(f, quarter(), cp);
    ok = ok && id.residual < 1e-4 && id.energy < 0.0;
    os << fmt("c'=%.2f res %.1e E %.3g; ", cp, id.residual, id.energy);
  }
  for (double cp : {2.2, 2.5}) {
    const auto id = front_energy_identity(f, quarter(), cp);
    ok = ok && id.energy > 0.0;
    os << fmt("c'=%.2f E %.3g; ", cp, id.energy);
  }
  return {ok, os.str()};
}

Outcome criterion4() {
  const auto e = origin(quarter());
  const double mu = mu_quad_hull(quarter(), e);
  const double cq = c_lin_of_mu(mu);
  const double cs = quarter_front().front.c;
  const bool ok = std::abs(mu - oracle::mu_quad_quarter) < 1e-6 && std::abs(cq - std::sqrt(6.0)) < 1e-6 &&
                  e.c_lin < cs && cs < cq && std::abs(e.c_lin - 2.0) < 1e-12;
  return {ok, fmt("mu_quad = %.10f, c_quad = %.10f, c* = %.6f", mu, cq, cs)};
}

struct PdeRuns {
  InvasionTrace quarter, quarter_fine, one;
};

const PdeRuns& pde_runs() {
  static const PdeRuns runs = [] {
    const std::vector<double> tracked{1.5, 2.0, 2.2};
    auto a = std::async(std::launch::async, run_bump, 0.25, 5e-3, tracked);
    auto b = std::async(std::launch::async, run_bump, 0.25, 2.5e-3, tracked);
    auto c = std::async(std::launch::async, run_bump, 1.0, 5e-3, std::vector<double>{1.5});
    return PdeRuns{a.get(), b.get(), c.get()};
  }();
  return runs;
}

Outcome criterion5() {
  const auto& r = pde_runs();
  const double s4 = fit_invasion_speed(r.quarter).speed, s1 = fit_invasion_speed(r.one).speed;
  const double e4 = std::abs(s4 / oracle::pushed_speed(0.25) - 1.0), e1 = std::abs(s1 / 2.0 - 1.0);
  return {e4 < 0.02 && e1 < 0.03, fmt("nu=1/4: %.6f (%.3f%%), nu=1: %.6f", s4, 100 * e4, s1) + fmt(" (%.3f%%)", 100 * e1)};
}

Outcome criterion6() {
  const auto& r = pde_runs();
  double worst = 0.0, worst_ratio = 1e300;
  for (const auto& s : r.quarter.speeds) {
    const double coarse = energy_balance_check(r.quarter, s.c);
    const double fine = energy_balance_check(r.quarter_fine, s.c);
    worst = std::max(worst, coarse);
    worst_ratio = std::min(worst_ratio, coarse / fine);
  }
  return {worst < 1e-3 && worst_ratio >= 3.0, fmt("max defect %.2e at dt=5e-3, min reduction %.2fx at dt/2", worst, worst_ratio)};
}

Outcome criterion7() {
  bool ok = true;
  std::ostringstream os;
  std::vector<std::future<std::pair<NonlinEstimate, double>>> jobs;
  for (double nu : {0.25, 0.4}) {
    jobs.push_back(std::async(std::launch::async, [nu] {
      const auto p = make_fisher(nu);
      const auto e = origin(p);
      const double cq = c_lin_of_mu(mu_quad_hull(p, e));
      const double shot = find_pushed_front(p, e, 2.001, cq).c;
      return std::make_pair(estimate_c_nonlin(p, e, e.c_lin, cq), shot);
    }));
  }
  for (auto& j : jobs) {
    const auto [est, shot] = j.get();
    const bool inside = est.bracket.lo <= shot && shot <= est.bracket.hi;
    ok = ok && est.resolved && est.bracket.width() <= 0.02 && inside;
    os << fmt("[%.5f, %.5f] vs c* %.5f; ", est.bracket.lo, est.bracket.hi, shot);
  }
  return {ok, os.str()};
}

Outcome criterion8() {
  const auto config = default_config();
  const std::vector<double> nus{1.0, 0.7, 0.5, 0.25};
  const std::vector<int> cases{2, 3, 3, 4};
  const std::vector<std::string> verdicts{"pulled", "pulled", "pulled", "pushed"};
  bool ok = true;
  std::ostringstream os;
  for (std::size_t k = 0; k < nus.size(); ++k) {
    const auto row = fisher_row(nus[k], config);
    ok = ok && row.case_label == cases[k] && row.verdict == verdicts[k];
    os << "nu=" << nus[k] << ": case " << row.case_label << " " << row.verdict << "; ";
  }
  return {ok, os.str()};
}

double compact_bump(double x, double center, double radius) {
  const double r = (x - center) / radius;
  return std::abs(r) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - r * r)) : 0.0;
}

GridProfile random_profile(std::mt19937_64& rng, int n, double dx) {
  std::uniform_real_distribution<double> centers(8.0, 22.0), radii(0.8, 3.0), amp(-1.0, 1.0);
  std::vector<double> w(n, 0.0);
  for (int b = 0; b < 3; ++b) {
    const double c = centers(rng), r = radii(rng), a = amp(rng);
    for (int i = 0; i < n; ++i) w[i] += a * compact_bump(i * dx, c, r);
  }
  return GridProfile(0.0, dx, 1, w, v1(0.0));
}

Outcome criterion9() {
  std::mt19937_64 rng(424242);
  const int cases = 100;
  int fails[5] = {0, 0, 0, 0, 0};
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  for (int k = 0; k < 1000; ++k) {
    const double c = 0.01 + 10.0 * unit(rng), mu = -30.0 + 60.0 * unit(rng);
    const auto r = lambda_pm(c, mu);
    for (const auto l : {r.minus, r.plus})
      if (!(std::abs(l * l + c * l - mu) < 1e-12 * (1.0 + std::abs(mu)))) ++fails[0];
  }

  for (int k = 0; k < cases; ++k) {
    const auto g = random_profile(rng, 1501, 0.02);
    const double c = 0.2 + 2.8 * unit(rng);
    for (double f : {0.25, 0.5, 0.75}) {
      const auto gap = poincare_gap(g, c, 4.0 * unit(rng), f * c);
      if (!(gap.gap >= -1e-8 * gap.scale())) ++fails[1];
    }
  }

  const auto p = make_fisher(0.3);
  for (int k = 0; k < cases; ++k) {
    const auto g = random_profile(rng, 1200, 0.05);
    const double c = 0.1 + 2.9 * unit(rng);
    const int s = static_cast<int>(std::lround(-40.0 + 80.0 * unit(rng)));
    const double base = energy(g, p, c, 30.0).value, moved = energy(g.shifted(s), p, c, 30.0).value;
    if (!(std::abs(moved - std::exp(c * s * 0.05) * base) <= 1e-12 * std::abs(moved))) ++fails[2];
  }

  for (int k = 0; k < cases; ++k) {
    std::vector<Monomial> terms;
    for (int t = 0; t < 6; ++t) terms.push_back({-1.0 + 2.0 * unit(rng), {static_cast<int>(5 * unit(rng)), static_cast<int>(5 * unit(rng))}});
    const PotentialSpec q(2, terms);
    Vec u(2);
    do {
      u << -2.0 + 4.0 * unit(rng), -2.0 + 4.0 * unit(rng);
    } while (u.norm() > 2.0);
    const double h = 1e-5;
    const Vec g = q.gradient(u);
    const Mat hess = q.hessian(u);
    for (int j = 0; j < 2; ++j) {
      Vec a = u, b = u;
      a(j) += h;
      b(j) -= h;
      if (!(std::abs(g(j) - (q.value(a) - q.value(b)) / (2 * h)) / (1.0 + g.norm()) < 1e-6)) ++fails[3];
      if (!((hess.col(j) - (q.gradient(a) - q.gradient(b)) / (2 * h)).norm() / (1.0 + hess.norm()) < 1e-6)) ++fails[3];
    }
  }

  for (int k = 0; k < cases; ++k) {
    const double nu = 0.1 + 0.35 * unit(rng);
    const auto f = make_fisher(nu);
    const auto e = origin(f);
    const double cq = c_lin_of_mu(mu_quad_hull(f, e));
    const double c0 = e.c_lin + (0.02 + 0.96 * unit(rng)) * (cq - e.c_lin);
    if (!(delta_hess(f, e, c0) <= delta_stab(f, e, c0) + 1e-10)) ++fails[4];
  }

  const bool ok = fails[0] + fails[1] + fails[2] + fails[3] + fails[4] == 0;
  std::ostringstream os;
  os << "failures: lambda " << fails[0] << "/2000, poincare " << fails[1] << "/300, translation " << fails[2]
     << "/100, derivatives " << fails[3] << "/400, radii " << fails[4] << "/100";
  return {ok, os.str()};
}

Outcome criterion10() {
  const auto& f = quarter_front().front;
  const double rel = std::abs(f.steep.rate / -std::sqrt(2.0) - 1.0);
  const double c = 2.2, lp = lambda_pm(c, -1.0).plus.real();
  std::vector<double> xi, dev;
  for (int i = 0; i <= 3000; ++i) {
    xi.push_back(0.01 * i);
    dev.push_back(1e-4 * std::exp(lp * 0.01 * i));
  }
  const auto synthetic = steepness(xi, dev, c);
  const bool ok = rel < 0.01 && f.steep.rate < -f.c / 2.0 && synthetic.verdict != SteepnessVerdict::pushed;
  return {ok, fmt("rate %.6f (%.3f%% from -sqrt2), -c*/2 = %.4f", f.steep.rate, 100 * rel, -f.c / 2.0) +
                  ", synthetic lambda_+ tail: " + to_string(synthetic.verdict)};
}

Outcome criterion11() {
  const auto e = origin(quarter());
  const double cs = quarter_front().front.c;
  bool ok = true;
  std::ostringstream os;
  for (double c0 : {2.05, 2.2}) {
    const double cu = c_upp(-0.5, delta_stab(quarter(), e, c0));
    ok = ok && cu > cs;
    os << fmt("c_upp(%.2f) = %.4f; ", c0, cu);
  }
  const double ds = delta_stab(quarter(), e, 2.2);
  ok = ok && std::abs(ds - 0.1192) < 1e-4 && std::abs(ds - oracle::delta_stab_quarter(2.2)) < 1e-8;
  os << fmt("delta_stab(2.2) = %.8f (oracle %.8f)", ds, oracle::delta_stab_quarter(2.2));
  return {ok, os.str()};
}

}  // namespace

int main() {
  const std::vector<std::function<Outcome()>> criteria{criterion1, criterion2, criterion3, criterion4,
                                                       criterion5, criterion6, criterion7, criterion8,
                                                       criterion9, criterion10, criterion11};
  // Start the long simulations early; criteria 5 and 6 collect them.
  auto warm = std::async(std::launch::async, [] { pde_runs(); });
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k]();
    } catch (const std::exception& ex) {
      o = {false, std::string("exception: ") + ex.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s criterion %zu: %s\n", o.pass ? "PASS" : "FAIL", k + 1, o.detail.c_str());
    std::fflush(stdout);
  }
  warm.get();
  return failed == 0 ? 0 : 1;
}
