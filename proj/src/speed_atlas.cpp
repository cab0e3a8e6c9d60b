#include "frontlab/speed_atlas.hpp"

#include "frontlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

namespace frontlab {

LambdaPair lambda_pm(double c, double mu) {
  const double disc = 0.25 * c * c + mu;
  LambdaPair r;
  if (disc >= 0.0) {
    // Larger-magnitude root first; the other from the product of roots (-mu).
    const double big = -0.5 * c - std::sqrt(disc);
    const double small = big != 0.0 ? -mu / big : 0.0;
    r.minus = std::min(big, small);
    r.plus = std::max(big, small);
    r.real = true;
  } else {
    const double im = std::sqrt(-disc);
    r.minus = {-0.5 * c, -im};
    r.plus = {-0.5 * c, im};
    r.real = false;
  }
  return r;
}

double lambda_minus(double c, double mu) {
  const auto r = lambda_pm(c, mu);
  if (!r.real) throw InvalidArgument("complex eigenvalues: speed below the linear speed");
  return r.minus.real();
}

double c_lin_of_mu(double mu) { return mu < 0.0 ? 2.0 * std::sqrt(-mu) : 0.0; }

namespace {

std::vector<Vec> ray_directions(const CriticalPoint& e, const SearchBox& box) {
  const int d = static_cast<int>(e.location.size());
  std::vector<Vec> dirs;
  if (d == 1) {
    dirs = {Vec::Constant(1, 1.0), Vec::Constant(1, -1.0)};
    return dirs;
  }
  if (d == 2) {
    const int n = std::max(4, box.rays_per_dim);
    for (int k = 0; k < n; ++k) {
      const double a = 2.0 * M_PI * k / n;
      Vec s(2);
      s << std::cos(a), std::sin(a);
      dirs.push_back(s);
    }
  } else {
    long n = 1;
    for (int j = 1; j < d && n < 4096; ++j) n *= std::max(4, box.rays_per_dim);
    n = std::min<long>(n, 4096);
    std::mt19937_64 rng(7919);
    std::normal_distribution<double> normal;
    for (long k = 0; k < n; ++k) {
      Vec s(d);
      for (int j = 0; j < d; ++j) s(j) = normal(rng);
      dirs.push_back(s.normalized());
    }
  }
  for (int j = 0; j < d; ++j) {
    const Vec v = e.spectrum.vectors.col(j);
    dirs.push_back(v);
    dirs.push_back(-v);
    Vec axis = Vec::Zero(d);
    axis(j) = 1.0;
    dirs.push_back(axis);
    dirs.push_back(-axis);
  }
  return dirs;
}

// Largest r with e + r s inside the box.
double ray_extent(const Vec& e, const Vec& s, const SearchBox& box) {
  double r = std::numeric_limits<double>::infinity();
  for (int j = 0; j < e.size(); ++j) {
    if (s(j) > 1e-14) r = std::min(r, (box.hi - e(j)) / s(j));
    if (s(j) < -1e-14) r = std::min(r, (box.lo - e(j)) / s(j));
  }
  return std::max(0.0, r);
}

double golden_min(const std::function<double(double)>& f, double a, double b, double tol) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = f(x2);
    }
  }
  return std::min(f1, f2);
}

double min_hessian_eigenvalue(const PotentialSpec& p, const Vec& u) {
  if (p.dim() == 1) return p.second_derivative1(u(0));
  Mat h = p.hessian(u);
  h = 0.5 * (h + h.transpose());
  return Eigen::SelfAdjointEigenSolver<Mat>(h, Eigen::EigenvaluesOnly).eigenvalues()(0);
}

// Smallest radius along any ray at which the predicate first holds.
double first_violation_radius(const CriticalPoint& e, const SearchBox& box,
                              const std::function<bool(const Vec&, double)>& violates,
                              const char* what) {
  const Vec& x0 = e.location;
  double best = std::numeric_limits<double>::infinity();
  const int m = e.location.size() == 1 ? box.radial_samples : std::max(200, box.radial_samples / 4);
  for (const Vec& s : ray_directions(e, box)) {
    const double rmax = std::min(ray_extent(x0, s, box), best);
    double prev = 0.0;
    for (int k = 1; k <= m; ++k) {
      const double r = rmax * k / m;
      if (!violates(s, r)) {
        prev = r;
        continue;
      }
      double lo = prev, hi = r;
      while (hi - lo > 1e-10 * std::max(1.0, hi)) {
        const double mid = 0.5 * (lo + hi);
        (violates(s, mid) ? hi : lo) = mid;
      }
      best = std::min(best, hi);
      break;
    }
  }
  if (!std::isfinite(best))
    throw InvalidArgument(std::string("empty violating set for ") + what +
                          ": c0 is at or above the quadratic-hull speed, or the box is too small");
  return best;
}

}  // namespace

double mu_quad_hull(const PotentialSpec& p, const CriticalPoint& e, const SearchBox& box) {
  const Vec& x0 = e.location;
  const double v0 = p.value(x0);
  const double r_excl = 1e-8;
  double best = std::numeric_limits<double>::infinity();
  Vec best_dir;
  double best_r = 0.0, best_step = 0.0;
  bool best_on_edge = false;
  const int m = x0.size() == 1 ? box.radial_samples : std::max(200, box.radial_samples / 4);
  for (const Vec& s : ray_directions(e, box)) {
    const double rmax = ray_extent(x0, s, box);
    if (rmax <= r_excl) continue;
    auto ratio = [&](double r) { return 2.0 * (p.value(Vec(x0 + r * s)) - v0) / (r * r); };
    double ray_best = std::numeric_limits<double>::infinity();
    int ray_k = 0;
    for (int k = 1; k <= m; ++k) {
      const double r = rmax * k / m;
      if (r < r_excl) continue;
      const double g = ratio(r);
      if (g < ray_best) {
        ray_best = g;
        ray_k = k;
      }
    }
    const double step = rmax / m;
    bool edge = false;
    if (ray_k == m) {
      const double inner = ratio(rmax - 0.01 * step);
      edge = ray_best < inner - 1e-12 * (1.0 + std::abs(ray_best));
    }
    if (ray_best < best) {
      best = ray_best;
      best_dir = s;
      best_r = step * ray_k;
      best_step = step;
      best_on_edge = edge;
    }
  }
  if (best_on_edge)
    throw InvalidArgument("quadratic-hull infimum lies on the search box boundary; enlarge the box");
  if (best_dir.size() > 0) {
    auto ratio = [&](double r) {
      return 2.0 * (p.value(Vec(x0 + r * best_dir)) - v0) / (r * r);
    };
    const double a = std::max(r_excl, best_r - best_step);
    const double b = best_r + best_step;
    best = std::min(best, golden_min(ratio, a, b, 1e-11 * std::max(1.0, b)));
  }
  return std::min(best, e.mu1());
}

double delta_stab(const PotentialSpec& p, const CriticalPoint& e, double c0,
                  const SearchBox& box) {
  const double mu0 = mu_of_speed(c0);
  const double v0 = p.value(e.location);
  return first_violation_radius(
      e, box,
      [&](const Vec& s, double r) {
        return p.value(Vec(e.location + r * s)) - v0 < 0.5 * mu0 * r * r;
      },
      "delta_stab");
}

double delta_hess(const PotentialSpec& p, const CriticalPoint& e, double c0,
                  const SearchBox& box) {
  const double mu0 = mu_of_speed(c0);
  return first_violation_radius(
      e, box,
      [&](const Vec& s, double r) {
        return min_hessian_eigenvalue(p, Vec(e.location + r * s)) < mu0;
      },
      "delta_hess");
}

double c_upp(double v_min_relative, double delta_stab_c0) {
  if (!(delta_stab_c0 > 0.0)) throw InvalidArgument("delta_stab must be positive");
  return 2.0 * std::sqrt(std::abs(v_min_relative)) / delta_stab_c0;
}

UppDiagBound c_upp_diag(const PotentialSpec& p, const CriticalPoint& e, double c_quad,
                        const SearchBox& box, int scan_points, double bracket_tol) {
  const double c_lin = e.c_lin;
  if (!(c_quad > c_lin)) throw InvalidArgument("c_upp_diag needs c_lin < c_quad");
  const auto& gm = p.global_minimum();
  const double vmin =
      (gm ? gm->value : search_global_minimum(p, box.lo, box.hi).value) - p.value(e.location);
  auto holds = [&](double c0) {
    double ds;
    try {
      ds = delta_stab(p, e, c0, box);
    } catch (const InvalidArgument&) {
      return true;
    }
    return c0 <= c_upp(vmin, ds);
  };
  double lo = c_lin, hi = c_quad;
  bool failed = false;
  for (int k = 1; k <= scan_points; ++k) {
    const double c0 = c_lin + (c_quad - c_lin) * k / (scan_points + 1);
    if (holds(c0)) {
      lo = c0;
    } else {
      hi = c0;
      failed = true;
      break;
    }
  }
  if (!failed) return {lo, c_quad, true};
  while (hi - lo > bracket_tol) {
    const double mid = 0.5 * (lo + hi);
    (holds(mid) ? lo : hi) = mid;
  }
  return {lo, hi, false};
}

int classify_case(double c_lin, double c_nonlin, double c_quad, double tol) {
  const bool lin_zero = c_lin <= tol;
  const bool nl_is_lin = std::abs(c_nonlin - c_lin) <= tol;
  const bool nl_is_quad = std::abs(c_quad - c_nonlin) <= tol;
  if (c_nonlin < c_lin - tol || c_nonlin > c_quad + tol)
    throw InvalidArgument("speed ordering c_lin <= c_nonlin <= c_quad violated");
  if (lin_zero && c_nonlin > tol && !nl_is_quad) return 1;
  if (!lin_zero && nl_is_lin && nl_is_quad) return 2;
  if (!lin_zero && nl_is_lin && !nl_is_quad) return 3;
  if (!lin_zero && !nl_is_lin && !nl_is_quad) return 4;
  throw InvalidArgument("speed pattern matches none of the four cases");
}

int classify_case(const SpeedAtlas& atlas, double tol) {
  if (!atlas.c_nonlin) throw InvalidArgument("atlas has no nonlinear speed bracket");
  return classify_case(atlas.c_lin, atlas.c_nonlin->mid(), atlas.c_quad_hull, tol);
}

SpeedAtlas compute_atlas(const PotentialSpec& p, const CriticalPoint& e,
                         const AtlasOptions& opts) {
  SpeedAtlas a;
  a.c_lin = e.c_lin;
  a.mu_1 = e.mu1();
  GlobalMinimum gm = p.global_minimum() ? *p.global_minimum()
                                        : search_global_minimum(p, opts.box.lo, opts.box.hi);
  if (gm.on_boundary)
    throw InvalidArgument("V attains its box minimum on the boundary; V may be unbounded below");
  a.v_min_relative = gm.value - p.value(e.location);
  if (!(a.v_min_relative < 0.0))
    throw InvalidArgument("V_min >= V(e): the critical point cannot be invaded (requires V_min < 0)");
  a.mu_quad_hull = mu_quad_hull(p, e, opts.box);
  a.c_quad_hull = c_lin_of_mu(a.mu_quad_hull);
  if (a.c_quad_hull - a.c_lin <= 1e-9 * std::max(1.0, a.c_quad_hull)) return a;

  std::vector<double> c0s = opts.c0_values;
  if (c0s.empty())
    for (int k = 1; k <= 8; ++k) c0s.push_back(a.c_lin + (a.c_quad_hull - a.c_lin) * k / 9.0);
  for (double c0 : c0s) {
    if (!(c0 > a.c_lin && c0 < a.c_quad_hull)) continue;
    RadiusRow row;
    row.c0 = c0;
    try {
      row.delta_stab = delta_stab(p, e, c0, opts.box);
      row.delta_hess = delta_hess(p, e, c0, opts.box);
    } catch (const InvalidArgument&) {
      continue;
    }
    row.c_upp = c_upp(a.v_min_relative, row.delta_stab);
    a.radii.push_back(row);
  }
  if (opts.compute_upp_diag) a.c_upp_diag = c_upp_diag(p, e, a.c_quad_hull, opts.box);
  return a;
}

void merge_nonlin(SpeedAtlas& atlas, const NonlinBracket& found, double tol) {
  if (!atlas.c_nonlin) {
    atlas.c_nonlin = found;
    return;
  }
  NonlinBracket& cur = *atlas.c_nonlin;
  const double lo = std::max(cur.lo, found.lo);
  const double hi = std::min(cur.hi, found.hi);
  if (lo > hi + tol)
    throw NumericalFailure("nonlinear speed brackets disagree: [" + std::to_string(cur.lo) + ", " +
                           std::to_string(cur.hi) + "] vs [" + std::to_string(found.lo) + ", " +
                           std::to_string(found.hi) + "]");
  cur.lo = std::min(lo, hi);
  cur.hi = std::max(lo, hi);
  if (cur.method != found.method) cur.method = "both";
}

}  // namespace frontlab
