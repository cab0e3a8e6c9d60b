#pragma once

#include "frontlab/grid_profile.hpp"
#include "frontlab/potential.hpp"
#include "frontlab/speed_atlas.hpp"

#include <Eigen/SparseLU>

#include <optional>
#include <string>
#include <vector>

namespace frontlab {

enum class ReferenceMode {
  invasion_point,  ///< weights referenced at the current invasion point (delta_stab)
  fixed,           ///< weights referenced at a fixed frame coordinate
};

/// Grid, time stepping and diagnostics for u_t = -grad V(u) + u_xx on
/// [x_left, x_left + length], zero flux on the left, u = e on the right.
/// With frame_speed != 0 the state lives in the frame xi = x - frame_speed t.
struct SimConfig {
  double x_left = 0.0;
  double length = 400.0;
  double dx = 0.1;
  double dt = 5e-3;
  double t_final = 150.0;
  double snapshot_every = 0.5;
  std::vector<double> tracked_speeds;
  double c0 = 0.0;          ///< 0: chosen from the speed atlas
  double delta_stab = 0.0;  ///< 0: delta_stab(c0)
  double delta_hess = 0.0;  ///< 0: delta_hess(c0)
  double margin = 30.0;
  int stencil_order = 6;
  double frame_speed = 0.0;
  ReferenceMode reference = ReferenceMode::invasion_point;
  double fixed_reference = 0.0;
  int profile_stride = 0;  ///< keep every k-th snapshot profile (0: none)

  int nodes() const;
  int steps() const;
  int snapshot_stride() const;
  /// Throws InvalidArgument on nonpositive steps or a margin below 20 dx.
  void validate() const;
};

/// Crank-Nicolson diffusion (and frame advection) with the reaction taken
/// explicitly at a predicted half-step state. Works on the deviation z = u - e.
class ImexStepper {
 public:
  ImexStepper(const PotentialSpec& p, Vec e, int nodes, double dx, double dt, int stencil_order,
              double frame_speed = 0.0);

  int nodes() const { return n_; }
  int dim() const { return d_; }

  /// Advances z by one step; lz and gz must hold linear_part(z) and
  /// reaction(z). Throws NumericalFailure on non-finite values.
  void step(std::vector<double>& z, const std::vector<double>& lz, const std::vector<double>& gz);
  void step(std::vector<double>& z);

  /// (D2 + frame_speed D1) z with ghost nodes; zero on the pinned node.
  void linear_part(const std::vector<double>& z, std::vector<double>& out) const;
  /// grad V(z + e); zero on the pinned node.
  void reaction(const std::vector<double>& z, std::vector<double>& out) const;
  /// D1 z with ghost nodes.
  void first_derivative(const std::vector<double>& z, std::vector<double>& out) const;

 private:
  double ghost(const std::vector<double>& z, int k, int j) const;
  const PotentialSpec& p_;
  Vec e_;
  int n_;
  int d_;
  double dx_;
  double dt_;
  double cf_;
  int order_;
  Eigen::SparseMatrix<double> a_;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
  mutable std::vector<double> half_, gh_, col_;
};

/// One step of the scheme on a grid profile (right node pinned to its reference).
GridProfile step(const GridProfile& state, const PotentialSpec& p, double dt,
                 int stencil_order = 6);

/// Rightmost x with |w(x) - e| > delta, interpolated linearly between nodes.
std::optional<double> invasion_point(const GridProfile& w, const Vec& e, double delta);

/// Per tracked speed c: snapshot series and per-interval energy balance.
struct SpeedSeries {
  double c = 0.0;
  std::vector<double> energy;       ///< E_c, weights referenced at the invasion point
  std::vector<double> dissipation;  ///< D_c, same reference
  std::vector<double> energy_hat;   ///< E_c referenced at the delta_hess point
  std::vector<double> kinetic;      ///< F_c = int weight |v_xi|^2 / 2
  std::vector<double> reference;    ///< frame coordinate of the weight reference
  std::vector<double> delta_energy;     ///< per interval, common reference
  std::vector<double> dissipated;       ///< per interval, int D dt
  std::vector<double> balance_defect;   ///< per interval
};

struct InvasionTrace {
  std::vector<double> t;
  std::vector<double> xbar;  ///< NaN when no invasion point
  std::vector<double> xhat;
  std::vector<SpeedSeries> speeds;
  std::vector<double> profile_times;
  std::vector<GridProfile> profiles;
  std::string stop_reason = "completed";  ///< completed | boundary | no-invasion
  double delta_stab = 0.0;
  double delta_hess = 0.0;
  double c0 = 0.0;
  double v_min_relative = 0.0;
  double frame_speed = 0.0;
  bool invaded() const;
  const SpeedSeries& series(double c) const;
};

/// Fills cfg.c0 / delta_stab / delta_hess when unset. c_hi is the best upper
/// speed estimate; when c_lin = c_quad the radii fall back to 0.1 |u_- - e|.
void resolve_radii(const PotentialSpec& p, const CriticalPoint& e, SimConfig& cfg, double c_hi);

/// Runs the simulation; stops early when the invasion point enters the right
/// margin (stop_reason = "boundary"). Throws NumericalFailure on blow-up.
InvasionTrace simulate(const PotentialSpec& p, const CriticalPoint& e, const GridProfile& ic,
                       SimConfig cfg);

/// max over snapshot intervals of |dE + int D dt| / (|dE| + tiny).
double energy_balance_check(const InvasionTrace& trace, double c);

struct SpeedFit {
  double speed = 0.0;
  double confidence = 0.0;  ///< residual RMS / window length
  int samples = 0;
};

/// Least-squares slope of xbar(t) over the trailing window_fraction of the run.
SpeedFit fit_invasion_speed(const InvasionTrace& trace, double window_fraction = 0.5);

/// e + (u_minus - e) chi(x) with chi = 1 on [0, width] and tanh edges.
GridProfile bump_ic(const SimConfig& cfg, const Vec& e, const Vec& u_minus, double width,
                    double edge = 1.0);

/// e + (u_minus - e) on x <= cut, smooth cutoff ramp to e over [cut, cut + ramp].
GridProfile plateau_seed(const SimConfig& cfg, const Vec& e, const Vec& u_minus, double cut,
                         double ramp);

enum class NonlinVerdict { negative_energy, plateau, ambiguous };
std::string to_string(NonlinVerdict v);

struct NonlinOptions {
  double xi_left = -150.0;
  double xi_right = 50.0;
  double dx = 0.1;
  double dt = 0.01;
  double t_max = 2000.0;
  double t_plateau = 50.0;
  double tol_neg = 1e-6;     ///< relative to |V_min| e^{c cut} / c
  double rate_lag = 5.0;     ///< time lag of the log-rate estimate
  double plateau_spread = 0.02;  ///< relative spread of the log-rate over t_plateau
  double min_rate = 1e-5;    ///< plateaus slower than this are ambiguous
  double seed_cut = -40.0;
  double seed_ramp = 10.0;
  double resolution = 0.02;
  int stencil_order = 6;
};

struct NonlinProbe {
  double c = 0.0;
  NonlinVerdict verdict = NonlinVerdict::ambiguous;
  double t_end = 0.0;
  double energy_end = 0.0;  ///< normalized
  double log_rate = 0.0;
};

/// Evolves the frame-c equation from the plateau seed and decides whether
/// c belongs to the negative-energy set (conclusive) or shows a plateaued
/// energy decay (evidence for the nonnegative set).
NonlinProbe classify_speed(const PotentialSpec& p, const CriticalPoint& e, double c,
                           const NonlinOptions& opts = {});

struct NonlinEstimate {
  NonlinBracket bracket;
  std::vector<NonlinProbe> probes;
  bool resolved = false;
  std::vector<std::string> warnings;
};

/// Bisection on the probe verdicts until the bracket is no wider than
/// opts.resolution. An ambiguous midpoint is retried at the quarter points;
/// if those are ambiguous too the bracket is returned wide with a warning.
NonlinEstimate estimate_c_nonlin(const PotentialSpec& p, const CriticalPoint& e, double c_lo,
                                 double c_hi, const NonlinOptions& opts = {});

/// Trace CSV: `t,xbar,xhat,c,E_c,D_c,Ehat_c,F_c`, one row per snapshot and speed.
std::string trace_csv(const InvasionTrace& trace);

}  // namespace frontlab
