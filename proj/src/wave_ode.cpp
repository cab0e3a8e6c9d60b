#include "frontlab/wave_ode.hpp"

#include "frontlab/errors.hpp"
#include "frontlab/speed_atlas.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

namespace frontlab {

std::string to_string(ShotStatus s) {
  switch (s) {
    case ShotStatus::connected: return "connected";
    case ShotStatus::overshoot: return "overshoot";
    case ShotStatus::undershoot: return "undershoot";
    case ShotStatus::escaped: return "escaped";
    case ShotStatus::undetermined: return "undetermined";
  }
  return "unknown";
}

std::string to_string(SteepnessVerdict v) {
  switch (v) {
    case SteepnessVerdict::pushed: return "pushed";
    case SteepnessVerdict::not_pushed: return "not_pushed";
    case SteepnessVerdict::ambiguous: return "ambiguous";
  }
  return "unknown";
}

Vec Trajectory::phi_at(std::size_t i) const {
  return Eigen::Map<const Vec>(phi.data() + i * dim, dim);
}

Vec Trajectory::dphi_at(std::size_t i) const {
  return Eigen::Map<const Vec>(dphi.data() + i * dim, dim);
}

SteepIC steep_ic(const CriticalPoint& e, double c, double eps, const Vec& s) {
  const int d = static_cast<int>(e.location.size());
  if (s.size() != d) throw InvalidArgument("direction has the wrong dimension");
  if (!(c > e.c_lin)) throw InvalidArgument("steep initial condition needs c > c_lin");
  SteepIC ic{e.location, Vec::Zero(d)};
  for (int j = 0; j < d; ++j) {
    const Vec u = e.spectrum.vectors.col(j);
    ic.phi += eps * s(j) * u;
    ic.dphi += eps * s(j) * lambda_minus(c, e.spectrum.values(j)) * u;
  }
  return ic;
}

namespace {

OdeRhs wave_rhs(const PotentialSpec& p, double c) {
  const int d = p.dim();
  return [&p, c, d](double, const double* y, double* dy) {
    double g[64];
    std::vector<double> gv;
    double* gp = g;
    if (d > 64) {
      gv.resize(d);
      gp = gv.data();
    }
    p.gradient(std::span<const double>(y, d), std::span<double>(gp, d));
    for (int j = 0; j < d; ++j) {
      dy[j] = y[d + j];
      dy[d + j] = -c * y[d + j] + gp[j];
    }
  };
}

std::vector<double> pack(const SteepIC& ic) {
  const int d = static_cast<int>(ic.phi.size());
  std::vector<double> y(2 * d);
  for (int j = 0; j < d; ++j) {
    y[j] = ic.phi(j);
    y[d + j] = ic.dphi(j);
  }
  return y;
}

void append(Trajectory& t, double xi, const double* y) {
  t.xi.push_back(xi);
  t.phi.insert(t.phi.end(), y, y + t.dim);
  t.dphi.insert(t.dphi.end(), y + t.dim, y + 2 * t.dim);
}

// Uniform samples origin + k dir step, k = 1, 2, ..., taken from the dense
// output of each accepted step.
class Sampler {
 public:
  Sampler(double origin, double step, double dir) : origin_(origin), step_(step), dir_(dir) {}
  template <class F>
  void feed(const DenseStep& st, std::vector<double>& buf, F&& emit) {
    while (dir_ * (st.t_new - next()) >= 0.0) {
      const double x = next();
      st.evaluate(x, buf.data());
      if (!emit(x, buf.data())) return;
      ++count_;
    }
  }

 private:
  double next() const { return origin_ + dir_ * step_ * count_; }
  double origin_;
  double step_;
  double dir_;
  long count_ = 1;
};

struct Classifier {
  Vec e;
  std::vector<Vec> targets;
  double tol;
  double r_esc;
  double closest = 1e300;
  int closest_target = -1;
  double xi_closest = 0.0;

  std::optional<ShotStatus> update(double xi, const double* y, int d) {
    Eigen::Map<const Vec> phi(y, d), psi(y + d, d);
    if (phi.norm() > r_esc) return ShotStatus::escaped;
    for (std::size_t k = 0; k < targets.size(); ++k) {
      const double dist = std::sqrt((phi - targets[k]).squaredNorm() + psi.squaredNorm());
      if (dist < closest) {
        closest = dist;
        closest_target = static_cast<int>(k);
        xi_closest = xi;
      }
      if (dist < tol) return ShotStatus::connected;
    }
    if (d == 1 && !targets.empty()) {
      const double sigma = targets[0](0) >= e(0) ? 1.0 : -1.0;
      const double ahead = sigma * (phi(0) - targets[0](0));
      const bool outward = sigma * psi(0) < 0.0;
      if (ahead > tol) return ShotStatus::overshoot;
      if (!outward && ahead < -tol) return ShotStatus::undershoot;
    }
    return std::nullopt;
  }
};

double default_escape_radius(const Vec& e, const std::vector<Vec>& targets) {
  double m = e.norm();
  for (const auto& t : targets) m = std::max(m, t.norm());
  return 10.0 * (1.0 + m);
}

}  // namespace

Trajectory integrate_profile(const PotentialSpec& p, double c, const SteepIC& ic, double xi_start,
                             double xi_end, const ProfileIntegration& opts) {
  const int d = p.dim();
  Trajectory t;
  t.dim = d;
  std::vector<double> y0 = pack(ic), buf(2 * d);
  append(t, xi_start, y0.data());
  const double dir = xi_end >= xi_start ? 1.0 : -1.0;
  Sampler sampler(xi_start, opts.sample_step, dir);
  bool escaped = false;
  Dopri5 solver(opts.ode);
  solver.integrate(wave_rhs(p, c), xi_start, y0, xi_end, [&](const DenseStep& st, const double*) {
    sampler.feed(st, buf, [&](double xi, const double* y) {
      if (dir * (xi - xi_end) > 1e-12 * std::max(1.0, std::abs(xi_end))) return false;
      if (Eigen::Map<const Vec>(y, d).norm() > opts.escape_radius) {
        escaped = true;
        return false;
      }
      append(t, xi, y);
      return true;
    });
    return !escaped;
  });
  if (escaped) throw NumericalFailure("profile left the escape radius");
  return t;
}

double ode_residual(const PotentialSpec& p, double c, const Trajectory& traj) {
  const int d = traj.dim;
  const std::size_t n = traj.size();
  if (n < 5) return 0.0;
  const double h = traj.xi[1] - traj.xi[0];
  std::vector<double> g(d);
  double worst = 0.0;
  for (std::size_t i = 2; i + 2 < n; ++i) {
    p.gradient(std::span<const double>(traj.phi.data() + i * d, d), g);
    for (int j = 0; j < d; ++j) {
      auto q = [&](std::size_t k) { return traj.dphi[k * d + j]; };
      const double d2 = (-q(i + 2) + 8.0 * q(i + 1) - 8.0 * q(i - 1) + q(i - 2)) / (12.0 * h);
      worst = std::max(worst, std::abs(d2 + c * q(i) - g[j]));
    }
  }
  return worst;
}

Shot shoot(const PotentialSpec& p, double c, const SteepIC& ic, const std::vector<Vec>& targets,
           const ShotOptions& opts) {
  const int d = p.dim();
  Shot shot;
  shot.traj.dim = d;
  Classifier cls{ic.phi, targets, opts.tol_conn,
                 opts.escape_radius > 0.0 ? opts.escape_radius
                                          : default_escape_radius(ic.phi, targets)};
  std::vector<double> y0 = pack(ic), buf(2 * d);
  append(shot.traj, 0.0, y0.data());
  OdeOptions ode;
  ode.rtol = opts.rtol;
  // Absolute tolerance scaled to the initial deviation so the tail is resolved.
  ode.atol = std::min(1e-13, 1e-3 * opts.rtol * ic.dphi.norm() + 1e-30);
  Sampler sampler(0.0, opts.sample_step, -1.0);
  std::optional<ShotStatus> verdict;
  Dopri5 solver(ode);
  try {
    solver.integrate(wave_rhs(p, c), 0.0, y0, -opts.xi_span, [&](const DenseStep& st, const double*) {
      sampler.feed(st, buf, [&](double xi, const double* y) {
        append(shot.traj, xi, y);
        verdict = cls.update(xi, y, d);
        return !verdict;
      });
      return !verdict;
    });
  } catch (const NumericalFailure&) {
    verdict = ShotStatus::escaped;
  }
  shot.status = verdict.value_or(ShotStatus::undetermined);
  shot.closest = cls.closest;
  shot.target = cls.closest_target;
  shot.xi_closest = cls.xi_closest;
  return shot;
}

ShotStatus classify_shot(const Trajectory& traj, const Vec& e, const std::vector<Vec>& targets,
                         double tol_conn, double escape_radius) {
  Classifier cls{e, targets, tol_conn,
                 escape_radius > 0.0 ? escape_radius : default_escape_radius(e, targets)};
  std::vector<double> y(2 * traj.dim);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    std::copy_n(traj.phi.begin() + i * traj.dim, traj.dim, y.begin());
    std::copy_n(traj.dphi.begin() + i * traj.dim, traj.dim, y.begin() + traj.dim);
    if (auto v = cls.update(traj.xi[i], y.data(), traj.dim)) return *v;
  }
  return ShotStatus::undetermined;
}

Steepness steepness(const std::vector<double>& xi, const std::vector<double>& dev, double c,
                    const SteepnessWindow& window) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  Steepness s;
  s.xi_lo = 1e300;
  s.xi_hi = -1e300;
  for (std::size_t i = 0; i < xi.size(); ++i) {
    if (!(dev[i] > window.dev_lo && dev[i] < window.dev_hi)) continue;
    const double y = std::log(dev[i]);
    sx += xi[i];
    sy += y;
    sxx += xi[i] * xi[i];
    sxy += xi[i] * y;
    ++n;
    s.xi_lo = std::min(s.xi_lo, xi[i]);
    s.xi_hi = std::max(s.xi_hi, xi[i]);
  }
  if (n < 3) throw InvalidArgument("steepness window contains fewer than 3 samples");
  const double denom = n * sxx - sx * sx;
  s.rate = (n * sxy - sx * sy) / denom;
  s.samples = n;
  const double margin = window.margin_fraction * c;
  if (s.rate < -0.5 * c - margin)
    s.verdict = SteepnessVerdict::pushed;
  else if (s.rate > -0.5 * c + margin)
    s.verdict = SteepnessVerdict::not_pushed;
  else
    s.verdict = SteepnessVerdict::ambiguous;
  return s;
}

std::vector<double> FrontProfile::deviation() const {
  std::vector<double> dev(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) dev[i] = (traj.phi_at(i) - e).norm();
  return dev;
}

Steepness steepness(const FrontProfile& front, const SteepnessWindow& window) {
  return steepness(front.traj.xi, front.deviation(), front.c, window);
}

namespace {

FrontProfile build_front(const Shot& shot, double c, const CriticalPoint& e, const Vec& target,
                         double eps, const Vec& s, const SteepnessWindow& window) {
  FrontProfile f;
  f.c = c;
  f.status = shot.status;
  f.e = e.location;
  f.target = target;
  f.eps = eps;
  f.direction = s;
  f.mu_tail = e.mu1();
  f.lambda_tail = lambda_minus(c, e.mu1());
  f.closest = shot.closest;
  f.traj.dim = shot.traj.dim;
  // Keep the part of the shot up to its closest approach to the target.
  std::size_t last = shot.traj.size() - 1;
  for (std::size_t i = 0; i < shot.traj.size(); ++i)
    if (shot.traj.xi[i] == shot.xi_closest) {
      last = i;
      break;
    }
  const int d = shot.traj.dim;
  for (std::size_t k = last + 1; k-- > 0;) {
    f.traj.xi.push_back(shot.traj.xi[k]);
    f.traj.phi.insert(f.traj.phi.end(), shot.traj.phi.begin() + k * d,
                      shot.traj.phi.begin() + (k + 1) * d);
    f.traj.dphi.insert(f.traj.dphi.end(), shot.traj.dphi.begin() + k * d,
                       shot.traj.dphi.begin() + (k + 1) * d);
  }
  try {
    f.steep = steepness(f, window);
  } catch (const InvalidArgument&) {
  }
  return f;
}

}  // namespace

FrontProfile find_pushed_front(const PotentialSpec& p, const CriticalPoint& e, double c_lo,
                               double c_hi, const FrontSearchOptions& opts) {
  if (p.dim() != 1) throw InvalidArgument("pushed-front bisection is implemented for d = 1");
  if (!(c_lo < c_hi)) throw InvalidArgument("empty speed bracket");
  if (!(c_lo > e.c_lin)) throw InvalidArgument("bracket must lie above the linear speed");
  Vec target;
  if (opts.target) {
    target = *opts.target;
  } else {
    const auto gm = p.global_minimum() ? *p.global_minimum() : search_global_minimum(p, -3.0, 3.0);
    target = gm.point;
  }
  if ((target - e.location).norm() < 1e-12)
    throw InvalidArgument("target minimum coincides with the invaded point");
  double eps = opts.eps;
  if (eps <= 0.0) {
    double delta;
    try {
      delta = delta_hess(p, e, 0.5 * (e.c_lin + c_lo));
    } catch (const InvalidArgument&) {
      delta = 0.1 * (target - e.location).norm();
    }
    eps = 1e-6 * delta;
  }
  const double u1 = e.spectrum.vectors(0, 0);
  Vec s = Vec::Constant(1, (target(0) >= e.location(0) ? 1.0 : -1.0) * (u1 >= 0 ? 1.0 : -1.0));
  const std::vector<Vec> targets{target};

  auto run = [&](double c) { return shoot(p, c, steep_ic(e, c, eps, s), targets, opts.shot); };
  auto usable = [](ShotStatus st) {
    return st == ShotStatus::overshoot || st == ShotStatus::undershoot ||
           st == ShotStatus::connected;
  };

  Shot lo_shot = run(c_lo), hi_shot = run(c_hi);
  if (!usable(lo_shot.status) || !usable(hi_shot.status))
    throw Inconclusive("bracket end classified as " + to_string(lo_shot.status) + " / " +
                       to_string(hi_shot.status));
  double lo = c_lo, hi = c_hi;
  std::optional<Shot> best;
  double best_c = 0.0;
  if (lo_shot.status == ShotStatus::connected) {
    best = lo_shot;
    best_c = lo;
    hi = lo;
  } else if (hi_shot.status == ShotStatus::connected) {
    best = hi_shot;
    best_c = hi;
    lo = hi;
  } else if (lo_shot.status == hi_shot.status) {
    throw NumericalFailure("no pushed front detected in bracket [" + std::to_string(c_lo) + ", " +
                           std::to_string(c_hi) + "]: both ends " + to_string(lo_shot.status));
  }
  const ShotStatus lo_status = lo_shot.status;
  while (!best || best->status != ShotStatus::connected) {
    const bool coarse = hi - lo > opts.c_tol;
    const bool at_precision = hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi;
    if (!coarse && (at_precision || (best && best->status == ShotStatus::connected))) break;
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    Shot m = run(mid);
    if (!best || m.closest < best->closest || m.status == ShotStatus::connected) {
      best = m;
      best_c = mid;
    }
    if (m.status == ShotStatus::connected) {
      lo = hi = mid;
      break;
    }
    if (!usable(m.status))
      throw Inconclusive("ambiguous shot classification (" + to_string(m.status) + ") at c = " +
                         std::to_string(mid));
    (m.status == lo_status ? lo : hi) = mid;
  }
  FrontProfile f = build_front(*best, best_c, e, target, eps, s, opts.window);
  f.c_lo = lo;
  f.c_hi = hi;
  return f;
}

EnergyIdentity front_energy_identity(const FrontProfile& front, const PotentialSpec& p,
                                     double c_prime) {
  const double rate = front.steep.samples > 0 ? front.steep.rate : front.lambda_tail;
  if (!(c_prime > 0.0 && c_prime < 2.0 * std::abs(rate)))
    throw InvalidArgument("c' outside the convergence window (0, 2|steepness|)");
  const auto& t = front.traj;
  const int d = t.dim;
  const std::size_t n = t.size();
  if (n < 3) throw InvalidArgument("front has too few samples");
  const double ve = p.value(front.e);
  const auto dev = front.deviation();
  const double half = 0.5 * (front.target - front.e).norm();
  double ref = t.xi.front();
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (dev[i] >= half && dev[i + 1] < half) {
      ref = t.xi[i] + (t.xi[i + 1] - t.xi[i]) * (dev[i] - half) / (dev[i] - dev[i + 1]);
      break;
    }
  double en = 0.0, kin2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double tau = (i == 0 || i == n - 1) ? 0.5 : 1.0;
    const double w = tau * std::exp(c_prime * (t.xi[i] - ref));
    double dd = 0.0;
    for (int j = 0; j < d; ++j) dd += t.dphi[i * d + j] * t.dphi[i * d + j];
    en += w * (0.5 * dd + p.value(std::span<const double>(t.phi.data() + i * d, d)) - ve);
    kin2 += w * dd;
  }
  const double h = t.xi[1] - t.xi[0];
  en *= h;
  kin2 *= h;
  // Left of the profile phi sits at the target; right of xi0 it follows the linear steep tail.
  const double xl = t.xi.front(), x0 = t.xi.back();
  en += (p.value(front.target) - ve) * std::exp(c_prime * (xl - ref)) / c_prime;
  const double lam = front.lambda_tail;
  const double a = dev.back();
  const double tail = a * a * std::exp(c_prime * (x0 - ref)) / std::abs(c_prime + 2.0 * lam);
  en += tail * 0.5 * (lam * lam + front.mu_tail);
  kin2 += tail * lam * lam;

  EnergyIdentity r;
  r.c_prime = c_prime;
  r.energy = en;
  r.weighted_dphi_sq = kin2;
  r.predicted = (1.0 - front.c / c_prime) * kin2;
  r.residual = std::abs(en - r.predicted) / kin2;
  r.xi_ref = ref;
  return r;
}

MonotoneRadius monotone_radius_check(const std::vector<double>& xi, const std::vector<double>& phi,
                                     const std::vector<double>& dphi, int dim, const Vec& e,
                                     double delta) {
  const std::size_t n = xi.size();
  std::vector<double> dev(n);
  for (std::size_t i = 0; i < n; ++i)
    dev[i] = (Eigen::Map<const Vec>(phi.data() + i * dim, dim) - e).norm();
  MonotoneRadius r;
  std::size_t first = n;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double a = dev[i] - delta, b = dev[i + 1] - delta;
    if ((a > 0.0 && b <= 0.0) || (a <= 0.0 && b > 0.0)) {
      const double x = xi[i] + (xi[i + 1] - xi[i]) * a / (a - b);
      ++r.crossings;
      if (r.crossings == 1) {
        r.xi_hat = x;
        first = i;
      } else if (r.crossings == 2) {
        r.ok = false;
        r.violation_xi = x;
      }
    }
  }
  if (r.crossings != 1) return r;
  for (std::size_t i = first + 1; i < n; ++i) {
    bool decreasing;
    if (!dphi.empty()) {
      double dot = 0.0;
      for (int j = 0; j < dim; ++j) dot += (phi[i * dim + j] - e(j)) * dphi[i * dim + j];
      decreasing = dot < 0.0;
    } else {
      decreasing = i + 1 >= n || dev[i + 1] < dev[i];
    }
    if (!decreasing) {
      r.ok = false;
      r.violation_xi = xi[i];
      break;
    }
  }
  return r;
}

MonotoneRadius monotone_radius_check(const FrontProfile& front, double delta) {
  return monotone_radius_check(front.traj.xi, front.traj.phi, front.traj.dphi, front.traj.dim,
                               front.e, delta);
}

GridProfile to_grid_profile(const FrontProfile& front, double xi_left, double xi_right) {
  const auto& t = front.traj;
  const int d = t.dim;
  const double h = t.xi[1] - t.xi[0];
  // Samples sit on multiples of h up to rounding; snap before flooring.
  const long k_lo = static_cast<long>(std::floor(xi_left / h + 1e-9));
  const long k_hi = static_cast<long>(std::ceil(xi_right / h - 1e-9));
  const long first = std::lround(t.xi.front() / h);
  std::vector<double> w, dw;
  for (long k = k_lo; k <= k_hi; ++k) {
    const double x = k * h;
    if (k < first) {
      for (int j = 0; j < d; ++j) {
        w.push_back(front.target(j));
        dw.push_back(0.0);
      }
    } else if (k <= 0) {
      const std::size_t i = static_cast<std::size_t>(k - first);
      for (int j = 0; j < d; ++j) {
        w.push_back(t.phi[i * d + j]);
        dw.push_back(t.dphi[i * d + j]);
      }
    } else {
      // Linear tail continued from the last sample.
      const Vec last = t.phi_at(t.size() - 1) - front.e;
      const double g = std::exp(front.lambda_tail * x);
      for (int j = 0; j < d; ++j) {
        w.push_back(front.e(j) + last(j) * g);
        dw.push_back(front.lambda_tail * last(j) * g);
      }
    }
  }
  GridProfile gp(k_lo * h, h, d, std::move(w), front.e);
  gp.set_derivative(std::move(dw));
  return gp;
}

std::string front_csv(const FrontProfile& front) {
  std::ostringstream os;
  const int d = front.traj.dim;
  os << "xi";
  for (int j = 0; j < d; ++j) os << ",phi_" << (j + 1);
  for (int j = 0; j < d; ++j) os << ",dphi_" << (j + 1);
  os << "\n";
  char buf[32];
  for (std::size_t i = 0; i < front.traj.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", front.traj.xi[i]);
    os << buf;
    for (int j = 0; j < d; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", front.traj.phi[i * d + j]);
      os << "," << buf;
    }
    for (int j = 0; j < d; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", front.traj.dphi[i * d + j]);
      os << "," << buf;
    }
    os << "\n";
  }
  return os.str();
}

ForwardValidation forward_validate(const PotentialSpec& p, const CriticalPoint& e, double c,
                                   double eps, const Vec& s, double delta, double xi_span) {
  const SteepIC ic = steep_ic(e, c, eps, s);
  ProfileIntegration opts;
  opts.ode.rtol = 1e-11;
  opts.ode.atol = 1e-14 * eps;
  opts.sample_step = 0.05;
  const Trajectory t = integrate_profile(p, c, ic, 0.0, xi_span, opts);
  ForwardValidation v;
  std::vector<double> dev(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    dev[i] = (t.phi_at(i) - e.location).norm();
    v.max_deviation = std::max(v.max_deviation, dev[i]);
  }
  v.stayed_in_ball = v.max_deviation <= delta;
  v.steep = steepness(t.xi, dev, c, {eps * 1e-12, eps * 1.0001, 0.01});
  return v;
}

std::vector<Candidate> search_pushed_candidates(const PotentialSpec& p, const CriticalPoint& e,
                                                const std::vector<double>& speeds,
                                                const std::vector<Vec>& targets, int directions,
                                                double eps, double accept,
                                                const ShotOptions& opts) {
  const int d = p.dim();
  std::vector<Vec> dirs;
  if (d == 1) {
    dirs = {Vec::Constant(1, 1.0), Vec::Constant(1, -1.0)};
  } else if (d == 2) {
    for (int k = 0; k < directions; ++k) {
      const double a = 2.0 * M_PI * k / directions;
      Vec v(2);
      v << std::cos(a), std::sin(a);
      dirs.push_back(v);
    }
  } else {
    std::mt19937_64 rng(4242);
    std::normal_distribution<double> normal;
    for (int k = 0; k < directions; ++k) {
      Vec v(d);
      for (int j = 0; j < d; ++j) v(j) = normal(rng);
      dirs.push_back(v.normalized());
    }
  }
  std::vector<Candidate> out;
  for (double c : speeds) {
    if (!(c > e.c_lin)) continue;
    for (const Vec& s : dirs) {
      const Shot sh = shoot(p, c, steep_ic(e, c, eps, s), targets, opts);
      if (sh.closest < accept) out.push_back({c, s, sh.target, sh.closest});
    }
  }
  return out;
}

}  // namespace frontlab
