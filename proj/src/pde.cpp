#include "frontlab/pde.hpp"

#include "frontlab/errors.hpp"
#include "frontlab/stencils.hpp"
#include "frontlab/weighted_profiles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <sstream>

namespace frontlab {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kMaxExponent = 700.0;
}  // namespace

int SimConfig::nodes() const { return static_cast<int>(std::lround(length / dx)) + 1; }
int SimConfig::steps() const { return static_cast<int>(std::lround(t_final / dt)); }
int SimConfig::snapshot_stride() const {
  return std::max(1, static_cast<int>(std::lround(snapshot_every / dt)));
}

void SimConfig::validate() const {
  if (!(dx > 0.0) || !(dt > 0.0) || !(t_final > 0.0) || !(length > 0.0))
    throw InvalidArgument("dx, dt, t_final and length must be positive");
  if (!(snapshot_every > 0.0)) throw InvalidArgument("snapshot interval must be positive");
  if (!(margin >= 20.0 * dx)) throw InvalidArgument("safety margin must be at least 20 dx");
  if (stencil_order != 2 && stencil_order != 4 && stencil_order != 6)
    throw InvalidArgument("stencil order must be 2, 4 or 6");
  if (nodes() < 8 * (stencil_order / 2 + 1)) throw InvalidArgument("grid too coarse for the stencil");
  if (profile_stride < 0) throw InvalidArgument("profile stride must be nonnegative");
}

ImexStepper::ImexStepper(const PotentialSpec& p, Vec e, int nodes, double dx, double dt,
                         int stencil_order, double frame_speed)
    : p_(p), e_(std::move(e)), n_(nodes), d_(p.dim()), dx_(dx), dt_(dt), cf_(frame_speed),
      order_(stencil_order) {
  if (e_.size() != d_) throw InvalidArgument("reference point has the wrong dimension");
  const auto s = stencil::central(order_);
  if (n_ <= 2 * s.half + 1) throw InvalidArgument("grid too small for the stencil");
  const int last = n_ - 1;
  std::vector<Eigen::Triplet<double>> trip;
  for (int i = 0; i < last; ++i) {
    trip.emplace_back(i, i, 1.0);
    for (int o = -s.half; o <= s.half; ++o) {
      const double w = s.second[o + s.half] / (dx_ * dx_) + cf_ * s.first[o + s.half] / dx_;
      int k = i + o;
      double sign = 1.0;
      if (k < 0) k = -k;  // even reflection: zero flux
      if (k > last) {     // odd reflection about the pinned value
        k = 2 * last - k;
        sign = -1.0;
      }
      trip.emplace_back(i, k, -0.5 * dt_ * sign * w);
    }
  }
  trip.emplace_back(last, last, 1.0);
  a_.resize(n_, n_);
  a_.setFromTriplets(trip.begin(), trip.end());
  a_.makeCompressed();
  lu_.compute(a_);
  if (lu_.info() != Eigen::Success) throw NumericalFailure("Crank-Nicolson matrix factorization failed");
  half_.resize(static_cast<std::size_t>(n_) * d_);
  gh_.resize(half_.size());
  col_.resize(n_);
}

double ImexStepper::ghost(const std::vector<double>& z, int k, int j) const {
  const int last = n_ - 1;
  if (k < 0) return z[static_cast<std::size_t>(-k) * d_ + j];
  if (k > last) return -z[static_cast<std::size_t>(2 * last - k) * d_ + j];
  return z[static_cast<std::size_t>(k) * d_ + j];
}

void ImexStepper::linear_part(const std::vector<double>& z, std::vector<double>& out) const {
  const auto s = stencil::central(order_);
  out.assign(z.size(), 0.0);
  const int last = n_ - 1;
  std::array<double, 7> w{};
  for (int o = 0; o < 2 * s.half + 1; ++o) w[o] = s.second[o] / (dx_ * dx_) + cf_ * s.first[o] / dx_;
  for (int i = 0; i < last; ++i) {
    const bool interior = i >= s.half && i + s.half < last;
    for (int j = 0; j < d_; ++j) {
      double acc = 0.0;
      if (interior) {
        const double* zp = z.data() + static_cast<std::size_t>(i - s.half) * d_ + j;
        for (int o = 0; o < 2 * s.half + 1; ++o) acc += w[o] * zp[static_cast<std::size_t>(o) * d_];
      } else {
        for (int o = -s.half; o <= s.half; ++o) acc += w[o + s.half] * ghost(z, i + o, j);
      }
      out[static_cast<std::size_t>(i) * d_ + j] = acc;
    }
  }
}

void ImexStepper::first_derivative(const std::vector<double>& z, std::vector<double>& out) const {
  const auto s = stencil::central(order_);
  out.assign(z.size(), 0.0);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < d_; ++j) {
      double acc = 0.0;
      for (int o = -s.half; o <= s.half; ++o) acc += s.first[o + s.half] * ghost(z, i + o, j);
      out[static_cast<std::size_t>(i) * d_ + j] = acc / dx_;
    }
}

void ImexStepper::reaction(const std::vector<double>& z, std::vector<double>& out) const {
  out.resize(z.size());
  const int last = n_ - 1;
  if (d_ == 1) {
    const double e0 = e_(0);
    for (int i = 0; i < last; ++i) out[i] = p_.derivative1(z[i] + e0);
    out[last] = 0.0;
    return;
  }
  std::vector<double> u(d_);
  for (int i = 0; i < last; ++i) {
    for (int j = 0; j < d_; ++j) u[j] = z[static_cast<std::size_t>(i) * d_ + j] + e_(j);
    p_.gradient(u, std::span<double>(out.data() + static_cast<std::size_t>(i) * d_, d_));
  }
  for (int j = 0; j < d_; ++j) out[static_cast<std::size_t>(last) * d_ + j] = 0.0;
}

void ImexStepper::step(std::vector<double>& z, const std::vector<double>& lz,
                       const std::vector<double>& gz) {
  const std::size_t m = z.size();
  const std::size_t pinned = static_cast<std::size_t>(n_ - 1) * d_;
  for (std::size_t k = 0; k < m; ++k) half_[k] = z[k] + 0.5 * dt_ * (lz[k] - gz[k]);
  for (int j = 0; j < d_; ++j) half_[pinned + j] = 0.0;
  reaction(half_, gh_);
  for (int j = 0; j < d_; ++j) {
    Eigen::VectorXd rhs(n_);
    for (int i = 0; i < n_; ++i) {
      const std::size_t k = static_cast<std::size_t>(i) * d_ + j;
      rhs(i) = z[k] + 0.5 * dt_ * lz[k] - dt_ * gh_[k];
    }
    rhs(n_ - 1) = 0.0;
    const Eigen::VectorXd sol = lu_.solve(rhs);
    for (int i = 0; i < n_; ++i) {
      const double v = sol(i);
      if (!std::isfinite(v)) throw NumericalFailure("non-finite PDE state (blow-up)");
      z[static_cast<std::size_t>(i) * d_ + j] = v;
    }
  }
}

void ImexStepper::step(std::vector<double>& z) {
  std::vector<double> lz, gz;
  linear_part(z, lz);
  reaction(z, gz);
  step(z, lz, gz);
}

namespace {

std::vector<double> deviation_state(const GridProfile& w) {
  std::vector<double> z(w.values());
  const int d = w.dim();
  for (int i = 0; i < w.size(); ++i)
    for (int j = 0; j < d; ++j) z[static_cast<std::size_t>(i) * d + j] -= w.reference()(j);
  return z;
}

GridProfile state_profile(const std::vector<double>& z, double x0, double dx, const Vec& e) {
  const int d = static_cast<int>(e.size());
  std::vector<double> u(z);
  for (std::size_t k = 0; k < u.size(); ++k) u[k] += e(static_cast<int>(k % d));
  return GridProfile(x0, dx, d, std::move(u), e);
}

std::optional<double> rightmost_crossing(const std::vector<double>& z, int n, int d, double x0,
                                         double dx, double delta) {
  auto dev = [&](int i) {
    double s = 0.0;
    for (int j = 0; j < d; ++j) s += z[static_cast<std::size_t>(i) * d + j] * z[static_cast<std::size_t>(i) * d + j];
    return std::sqrt(s);
  };
  for (int i = n - 1; i >= 0; --i) {
    const double a = dev(i);
    if (a > delta) {
      if (i == n - 1) return x0 + i * dx;
      const double b = dev(i + 1);
      return x0 + dx * (i + (a - delta) / (a - b));
    }
  }
  return std::nullopt;
}

}  // namespace

GridProfile step(const GridProfile& state, const PotentialSpec& p, double dt, int stencil_order) {
  ImexStepper st(p, state.reference(), state.size(), state.dx(), dt, stencil_order);
  std::vector<double> z = deviation_state(state);
  for (int j = 0; j < state.dim(); ++j) z[static_cast<std::size_t>(state.size() - 1) * state.dim() + j] = 0.0;
  st.step(z);
  GridProfile out = state_profile(z, state.x0(), state.dx(), state.reference());
  out.set_stencil_order(state.stencil_order());
  return out;
}

std::optional<double> invasion_point(const GridProfile& w, const Vec& e, double delta) {
  std::vector<double> z(w.values());
  for (std::size_t k = 0; k < z.size(); ++k) z[k] -= e(static_cast<int>(k % w.dim()));
  return rightmost_crossing(z, w.size(), w.dim(), w.x0(), w.dx(), delta);
}

bool InvasionTrace::invaded() const {
  return std::any_of(xbar.begin(), xbar.end(), [](double v) { return std::isfinite(v); });
}

const SpeedSeries& InvasionTrace::series(double c) const {
  for (const auto& s : speeds)
    if (std::abs(s.c - c) < 1e-12) return s;
  throw InvalidArgument("speed " + std::to_string(c) + " was not tracked");
}

void resolve_radii(const PotentialSpec& p, const CriticalPoint& e, SimConfig& cfg, double c_hi) {
  if (cfg.c0 <= 0.0) cfg.c0 = 0.5 * (e.c_lin + c_hi);
  if (cfg.delta_stab > 0.0 && cfg.delta_hess > 0.0) return;
  try {
    cfg.delta_stab = delta_stab(p, e, cfg.c0);
    cfg.delta_hess = delta_hess(p, e, cfg.c0);
  } catch (const InvalidArgument&) {
    const auto gm = p.global_minimum() ? *p.global_minimum() : search_global_minimum(p, -3.0, 3.0);
    cfg.delta_stab = cfg.delta_hess = 0.1 * (gm.point - e.location).norm();
  }
}

namespace {

// Weighted trapezoid sums sum_i tau_i exp(base_i + shift) f_i dx for one
// tracked speed over one snapshot interval.
class IntervalWeights {
 public:
  void reset(const std::vector<double>& base, double dx) {
    base_ = base;
    dx_ = dx;
    w_.resize(base.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
      const double tau = (i == 0 || i + 1 == base.size()) ? 0.5 : 1.0;
      w_[i] = base[i] <= kMaxExponent ? tau * std::exp(base[i]) : kNaN;
    }
  }
  double sum(const std::vector<double>& f, double shift) const {
    double acc = 0.0, big = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (f[i] == 0.0) continue;
      if (!std::isnan(w_[i])) {
        acc += w_[i] * f[i];
      } else {
        const double lg = base_[i] + shift + std::log(std::abs(f[i]));
        if (lg > kMaxExponent)
          throw NumericalFailure("weighted diagnostic overflows; the front is too close to the right boundary");
        const double tau = (i == 0 || i + 1 == f.size()) ? 0.5 : 1.0;
        big += tau * std::copysign(std::exp(lg), f[i]);
      }
    }
    return (acc * std::exp(shift) + big) * dx_;
  }

 private:
  std::vector<double> base_;
  std::vector<double> w_;
  double dx_ = 0.0;
};

struct Tracker {
  double c = 0.0;
  double c_rel = 0.0;
  double ref = 0.0;
  double t_start = 0.0;
  IntervalWeights weights;
  double e_start = 0.0;
  double d_prev = 0.0;
  double cum_d = 0.0;
  bool open = false;
};

}  // namespace

InvasionTrace simulate(const PotentialSpec& p, const CriticalPoint& e, const GridProfile& ic,
                       SimConfig cfg) {
  cfg.validate();
  const int n = cfg.nodes();
  const int d = p.dim();
  if (ic.size() != n || ic.dim() != d || std::abs(ic.dx() - cfg.dx) > 1e-12 * cfg.dx)
    throw InvalidArgument("initial condition does not match the configured grid");
  if (cfg.delta_stab <= 0.0 || cfg.delta_hess <= 0.0) {
    const double c_hi = c_lin_of_mu(mu_quad_hull(p, e));
    resolve_radii(p, e, cfg, c_hi);
  }
  const Vec& eloc = e.location;
  const double ve = p.value(eloc);
  const auto gm = p.global_minimum() ? *p.global_minimum() : search_global_minimum(p, -3.0, 3.0);

  InvasionTrace trace;
  trace.delta_stab = cfg.delta_stab;
  trace.delta_hess = cfg.delta_hess;
  trace.c0 = cfg.c0;
  trace.v_min_relative = gm.value - ve;
  trace.frame_speed = cfg.frame_speed;

  ImexStepper stepper(p, eloc, n, cfg.dx, cfg.dt, cfg.stencil_order, cfg.frame_speed);
  std::vector<double> z = deviation_state(ic);
  for (int j = 0; j < d; ++j) z[static_cast<std::size_t>(n - 1) * d + j] = 0.0;

  std::vector<Tracker> trackers;
  for (double c : cfg.tracked_speeds) {
    Tracker tr;
    tr.c = c;
    tr.c_rel = c - cfg.frame_speed;
    trackers.push_back(tr);
    SpeedSeries s;
    s.c = c;
    trace.speeds.push_back(s);
  }

  const int steps = cfg.steps();
  const int stride = cfg.snapshot_stride();
  const double x_right = cfg.x_left + (n - 1) * cfg.dx;
  std::vector<double> lz, gz, zx, f_energy(n), f_diss(n), f_kin(n), base(n);
  double last_ref_point = cfg.x_left;
  int snapshot_index = 0;

  for (int k = 0; k <= steps; ++k) {
    const double t = k * cfg.dt;
    stepper.linear_part(z, lz);
    stepper.reaction(z, gz);
    const bool snap = k % stride == 0 || k == steps;
    if (!trackers.empty()) {
      stepper.first_derivative(z, zx);
      for (int i = 0; i < n; ++i) {
        double kin = 0.0;
        for (int j = 0; j < d; ++j) {
          const double g = zx[static_cast<std::size_t>(i) * d + j];
          kin += g * g;
        }
        f_kin[i] = 0.5 * kin;
        if (d == 1)
          f_energy[i] = f_kin[i] + p.value1(z[i] + eloc(0)) - ve;
        else {
          Vec u = Eigen::Map<const Vec>(z.data() + static_cast<std::size_t>(i) * d, d) + eloc;
          f_energy[i] = f_kin[i] + p.value(u) - ve;
        }
      }
    }
    std::vector<double> e_now(trackers.size()), d_now(trackers.size());
    for (std::size_t s = 0; s < trackers.size(); ++s) {
      Tracker& tr = trackers[s];
      if (!tr.open) continue;
      for (int i = 0; i < n; ++i) {
        double v2 = 0.0;
        for (int j = 0; j < d; ++j) {
          const std::size_t q = static_cast<std::size_t>(i) * d + j;
          const double vt = lz[q] - gz[q] + tr.c_rel * zx[q];
          v2 += vt * vt;
        }
        f_diss[i] = v2;
      }
      const double shift = -tr.c * tr.c_rel * (t - tr.t_start);
      e_now[s] = tr.weights.sum(f_energy, shift);
      d_now[s] = tr.weights.sum(f_diss, shift);
      tr.cum_d += 0.5 * cfg.dt * (tr.d_prev + d_now[s]);
      tr.d_prev = d_now[s];
    }

    if (snap) {
      const auto xb = rightmost_crossing(z, n, d, cfg.x_left, cfg.dx, cfg.delta_stab);
      const auto xh = rightmost_crossing(z, n, d, cfg.x_left, cfg.dx, cfg.delta_hess);
      trace.t.push_back(t);
      trace.xbar.push_back(xb.value_or(kNaN));
      trace.xhat.push_back(xh.value_or(kNaN));
      if (xb) last_ref_point = *xb;
      for (std::size_t s = 0; s < trackers.size(); ++s) {
        Tracker& tr = trackers[s];
        SpeedSeries& ser = trace.speeds[s];
        if (tr.open) {
          const double de = e_now[s] - tr.e_start;
          ser.delta_energy.push_back(de);
          ser.dissipated.push_back(tr.cum_d);
          ser.balance_defect.push_back(std::abs(de + tr.cum_d) /
                                       (std::abs(de) + 1e-14 * (std::abs(e_now[s]) + std::abs(tr.e_start)) + 1e-300));
        }
        // New interval referenced at the current invasion point (or the fixed point).
        tr.ref = cfg.reference == ReferenceMode::fixed ? cfg.fixed_reference
                                                       : last_ref_point - tr.c_rel * t;
        tr.t_start = t;
        for (int i = 0; i < n; ++i) base[i] = tr.c * (cfg.x_left + i * cfg.dx - tr.c_rel * t - tr.ref);
        tr.weights.reset(base, cfg.dx);
        for (int i = 0; i < n; ++i) {
          double v2 = 0.0;
          for (int j = 0; j < d; ++j) {
            const std::size_t q = static_cast<std::size_t>(i) * d + j;
            const double vt = lz[q] - gz[q] + tr.c_rel * zx[q];
            v2 += vt * vt;
          }
          f_diss[i] = v2;
        }
        const double en = tr.weights.sum(f_energy, 0.0);
        const double di = tr.weights.sum(f_diss, 0.0);
        const double kin = tr.weights.sum(f_kin, 0.0);
        tr.e_start = en;
        tr.d_prev = di;
        tr.cum_d = 0.0;
        tr.open = true;
        ser.energy.push_back(en);
        ser.dissipation.push_back(di);
        ser.kinetic.push_back(kin);
        ser.reference.push_back(tr.ref);
        const double hat_ref = xh ? *xh - tr.c_rel * t : kNaN;
        ser.energy_hat.push_back(xh ? en * std::exp(tr.c * (tr.ref - hat_ref)) : kNaN);
      }
      if (cfg.profile_stride > 0 && snapshot_index % cfg.profile_stride == 0) {
        trace.profile_times.push_back(t);
        trace.profiles.push_back(state_profile(z, cfg.x_left, cfg.dx, eloc));
      }
      ++snapshot_index;
      if (xb && *xb > x_right - cfg.margin) {
        trace.stop_reason = "boundary";
        break;
      }
    }
    if (k == steps) break;
    stepper.step(z, lz, gz);
  }
  if (trace.stop_reason == "completed" && !trace.invaded()) trace.stop_reason = "no-invasion";
  return trace;
}

double energy_balance_check(const InvasionTrace& trace, double c) {
  const auto& s = trace.series(c);
  double worst = 0.0;
  for (double v : s.balance_defect)
    if (std::isfinite(v)) worst = std::max(worst, v);
  return worst;
}

SpeedFit fit_invasion_speed(const InvasionTrace& trace, double window_fraction) {
  if (!(window_fraction > 0.0 && window_fraction <= 1.0))
    throw InvalidArgument("window fraction must lie in (0, 1]");
  if (!trace.invaded()) throw NumericalFailure("no invasion points recorded");
  const double t0 = trace.t.front(), t1 = trace.t.back();
  const double start = t1 - window_fraction * (t1 - t0);
  std::vector<double> ts, xs;
  for (std::size_t k = 0; k < trace.t.size(); ++k)
    if (trace.t[k] >= start && std::isfinite(trace.xbar[k])) {
      ts.push_back(trace.t[k]);
      xs.push_back(trace.xbar[k]);
    }
  if (ts.size() < 10) throw NumericalFailure("fewer than 10 invasion points in the fit window");
  const double n = static_cast<double>(ts.size());
  double mt = 0, mx = 0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    mt += ts[k];
    mx += xs[k];
  }
  mt /= n;
  mx /= n;
  double stt = 0, stx = 0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    stt += (ts[k] - mt) * (ts[k] - mt);
    stx += (ts[k] - mt) * (xs[k] - mx);
  }
  SpeedFit f;
  f.speed = stx / stt;
  f.samples = static_cast<int>(ts.size());
  double rss = 0.0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    const double r = xs[k] - (mx + f.speed * (ts[k] - mt));
    rss += r * r;
  }
  f.confidence = std::sqrt(rss / n) / (ts.back() - ts.front());
  return f;
}

GridProfile bump_ic(const SimConfig& cfg, const Vec& e, const Vec& u_minus, double width,
                    double edge) {
  const int n = cfg.nodes();
  GridProfile w = GridProfile::constant(cfg.x_left, cfg.dx, n, e);
  for (int i = 0; i < n - 1; ++i) {
    const double chi = 0.5 * (1.0 - std::tanh((w.x(i) - cfg.x_left - width) / edge));
    for (int j = 0; j < w.dim(); ++j) w(i, j) = e(j) + chi * (u_minus(j) - e(j));
  }
  w.set_stencil_order(cfg.stencil_order);
  return w;
}

GridProfile plateau_seed(const SimConfig& cfg, const Vec& e, const Vec& u_minus, double cut,
                         double ramp) {
  const int n = cfg.nodes();
  GridProfile w = GridProfile::constant(cfg.x_left, cfg.dx, n, e);
  for (int i = 0; i < n - 1; ++i) {
    const double chi = smooth_step_down((w.x(i) - cut) / ramp);
    for (int j = 0; j < w.dim(); ++j) w(i, j) = e(j) + chi * (u_minus(j) - e(j));
  }
  w.set_stencil_order(cfg.stencil_order);
  return w;
}

std::string to_string(NonlinVerdict v) {
  switch (v) {
    case NonlinVerdict::negative_energy: return "negative_energy";
    case NonlinVerdict::plateau: return "plateau";
    case NonlinVerdict::ambiguous: return "ambiguous";
  }
  return "unknown";
}

NonlinProbe classify_speed(const PotentialSpec& p, const CriticalPoint& e, double c,
                           const NonlinOptions& opts) {
  if (!(c > 0.0)) throw InvalidArgument("probe speed must be positive");
  SimConfig cfg;
  cfg.x_left = opts.xi_left;
  cfg.length = opts.xi_right - opts.xi_left;
  cfg.dx = opts.dx;
  cfg.dt = opts.dt;
  cfg.stencil_order = opts.stencil_order;
  const int n = cfg.nodes();
  const int d = p.dim();
  const auto gm = p.global_minimum() ? *p.global_minimum() : search_global_minimum(p, -3.0, 3.0);
  const double ve = p.value(e.location);
  const double vmin = gm.value - ve;
  if (!(vmin < 0.0)) throw InvalidArgument("V_min >= V(e): nothing to invade");

  GridProfile seed = plateau_seed(cfg, e.location, gm.point, opts.seed_cut, opts.seed_ramp);
  std::vector<double> z = deviation_state(seed);
  ImexStepper stepper(p, e.location, n, cfg.dx, cfg.dt, cfg.stencil_order, c);

  const double scale = std::abs(vmin) * std::exp(c * opts.seed_cut) / c;
  std::vector<double> weight(n);
  for (int i = 0; i < n; ++i) {
    const double tau = (i == 0 || i == n - 1) ? 0.5 : 1.0;
    weight[i] = tau * std::exp(c * (cfg.x_left + i * cfg.dx)) * cfg.dx / scale;
  }
  std::vector<double> zx;
  auto normalized_energy = [&]() {
    stepper.first_derivative(z, zx);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      double f = 0.0;
      for (int j = 0; j < d; ++j) f += 0.5 * zx[static_cast<std::size_t>(i) * d + j] * zx[static_cast<std::size_t>(i) * d + j];
      if (d == 1)
        f += p.value1(z[i] + e.location(0)) - ve;
      else
        f += p.value(Vec(Eigen::Map<const Vec>(z.data() + static_cast<std::size_t>(i) * d, d) + e.location)) - ve;
      acc += weight[i] * f;
    }
    return acc;
  };

  const int stride = std::max(1, static_cast<int>(std::lround(0.5 / cfg.dt)));
  const int lag = std::max(1, static_cast<int>(std::lround(opts.rate_lag / (stride * cfg.dt))));
  const int window = std::max(2, static_cast<int>(std::lround(opts.t_plateau / (stride * cfg.dt))));
  const int steps = static_cast<int>(std::lround(opts.t_max / cfg.dt));
  std::vector<double> log_e;
  std::deque<double> rates;
  NonlinProbe probe;
  probe.c = c;
  for (int k = 0;; ++k) {
    if (k % stride == 0) {
      const double en = normalized_energy();
      probe.t_end = k * cfg.dt;
      probe.energy_end = en;
      if (en < -opts.tol_neg) {
        probe.verdict = NonlinVerdict::negative_energy;
        return probe;
      }
      if (en < 1e-250) {
        probe.verdict = NonlinVerdict::plateau;
        return probe;
      }
      log_e.push_back(std::log(en));
      if (static_cast<int>(log_e.size()) > lag) {
        const double r = (log_e.back() - log_e[log_e.size() - 1 - lag]) / (lag * stride * cfg.dt);
        rates.push_back(r);
        if (static_cast<int>(rates.size()) > window) rates.pop_front();
        probe.log_rate = r;
        if (static_cast<int>(rates.size()) == window) {
          const auto [mn, mx] = std::minmax_element(rates.begin(), rates.end());
          double mean = 0.0;
          for (double v : rates) mean += v;
          mean /= window;
          if (*mx - *mn <= opts.plateau_spread * std::abs(mean) && mean < -opts.min_rate) {
            probe.verdict = NonlinVerdict::plateau;
            probe.log_rate = mean;
            return probe;
          }
        }
      }
    }
    if (k >= steps) break;
    stepper.step(z);
  }
  probe.verdict = NonlinVerdict::ambiguous;
  return probe;
}

NonlinEstimate estimate_c_nonlin(const PotentialSpec& p, const CriticalPoint& e, double c_lo,
                                 double c_hi, const NonlinOptions& opts) {
  if (!(c_lo < c_hi)) throw InvalidArgument("empty speed bracket");
  NonlinEstimate est;
  double lo = c_lo, hi = c_hi;
  while (hi - lo > opts.resolution) {
    const double w = hi - lo;
    bool moved = false;
    for (double frac : {0.5, 0.375, 0.625}) {
      const double c = lo + frac * w;
      const NonlinProbe pr = classify_speed(p, e, c, opts);
      est.probes.push_back(pr);
      if (pr.verdict == NonlinVerdict::negative_energy) {
        lo = c;
        moved = true;
        break;
      }
      if (pr.verdict == NonlinVerdict::plateau) {
        hi = c;
        moved = true;
        break;
      }
    }
    if (!moved) {
      est.warnings.push_back("ambiguous verdicts inside [" + std::to_string(lo) + ", " +
                             std::to_string(hi) + "]; bracket left wide");
      break;
    }
  }
  est.bracket = {lo, hi, "energy-bisection"};
  est.resolved = hi - lo <= opts.resolution;
  return est;
}

std::string trace_csv(const InvasionTrace& trace) {
  std::ostringstream os;
  os << "t,xbar,xhat,c,E_c,D_c,Ehat_c,F_c\n";
  char buf[256];
  for (std::size_t k = 0; k < trace.t.size(); ++k)
    for (const auto& s : trace.speeds) {
      if (k >= s.energy.size()) continue;
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                    trace.t[k], trace.xbar[k], trace.xhat[k], s.c, s.energy[k], s.dissipation[k],
                    s.energy_hat[k], s.kinetic[k]);
      os << buf;
    }
  return os.str();
}

}  // namespace frontlab
