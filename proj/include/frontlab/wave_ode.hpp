#pragma once

#include "frontlab/grid_profile.hpp"
#include "frontlab/ode.hpp"
#include "frontlab/potential.hpp"

#include <optional>
#include <string>
#include <vector>

namespace frontlab {

// Travelling waves phi'' = -c phi' + grad V(phi), written as the first-order
// system (phi, psi)' = (psi, -c psi + grad V(phi)).

enum class ShotStatus { connected, overshoot, undershoot, escaped, undetermined };
std::string to_string(ShotStatus s);

struct SteepIC {
  Vec phi;
  Vec dphi;
};

/// phi0 = e + eps sum_j s_j u_j, phi0' = eps sum_j s_j lambda_{c,-}(mu_j) u_j,
/// with s given in eigen-coordinates. Requires c > c_lin.
SteepIC steep_ic(const CriticalPoint& e, double c, double eps, const Vec& s);

/// Samples (xi_i, phi_i, phi'_i), node-major, in integration order.
struct Trajectory {
  int dim = 1;
  std::vector<double> xi;
  std::vector<double> phi;
  std::vector<double> dphi;
  std::size_t size() const { return xi.size(); }
  Vec phi_at(std::size_t i) const;
  Vec dphi_at(std::size_t i) const;
};

struct ProfileIntegration {
  OdeOptions ode;
  double sample_step = 0.01;
  double escape_radius = 1e6;
};

/// Integrates from xi_start to xi_end (either direction) and samples the
/// dense output every sample_step. Throws NumericalFailure on escape.
Trajectory integrate_profile(const PotentialSpec& p, double c, const SteepIC& ic, double xi_start,
                             double xi_end, const ProfileIntegration& opts = {});

/// Max over interior samples of |phi'' + c phi' - grad V(phi)|, with phi''
/// from fourth-order central differences of the sampled phi'.
double ode_residual(const PotentialSpec& p, double c, const Trajectory& traj);

struct ShotOptions {
  double tol_conn = 1e-8;
  double escape_radius = 0.0;  ///< 0: 10 (1 + max |critical point|)
  double xi_span = 1000.0;     ///< maximal backward integration length
  double sample_step = 0.01;
  double rtol = 1e-11;
};

struct Shot {
  ShotStatus status = ShotStatus::undetermined;
  int target = -1;           ///< index into targets of the closest approach
  double closest = 1e300;    ///< min |(phi - u_target, phi')| along the shot
  double xi_closest = 0.0;
  Trajectory traj;           ///< samples in decreasing xi
};

/// Backward shot (xi decreasing from 0) from a steep initial condition,
/// classified against the target critical points. In d = 1 overshoot and
/// undershoot are judged against targets[0] (the invading minimum).
Shot shoot(const PotentialSpec& p, double c, const SteepIC& ic, const std::vector<Vec>& targets,
           const ShotOptions& opts);

/// Status of an already computed backward trajectory against the targets.
ShotStatus classify_shot(const Trajectory& traj, const Vec& e, const std::vector<Vec>& targets,
                         double tol_conn, double escape_radius);

enum class SteepnessVerdict { pushed, not_pushed, ambiguous };
std::string to_string(SteepnessVerdict v);

struct Steepness {
  double rate = 0.0;  ///< fitted slope of ln|phi - e|
  double xi_lo = 0.0;
  double xi_hi = 0.0;
  int samples = 0;
  SteepnessVerdict verdict = SteepnessVerdict::ambiguous;
};

struct SteepnessWindow {
  double dev_lo = 1e-12;
  double dev_hi = 1e-3;
  double margin_fraction = 0.01;  ///< verdict margin in units of c
};

/// Least-squares slope of ln(dev) against xi over samples with dev in the
/// window; pushed iff rate < -c/2 - margin. Throws InvalidArgument if fewer
/// than 3 samples fall in the window.
Steepness steepness(const std::vector<double>& xi, const std::vector<double>& dev, double c,
                    const SteepnessWindow& window = {});

struct FrontProfile {
  double c = 0.0;
  double c_lo = 0.0;  ///< final shooting bracket
  double c_hi = 0.0;
  ShotStatus status = ShotStatus::undetermined;
  Trajectory traj;  ///< ascending xi, ending at the steep initial point xi = 0
  Vec e;
  Vec target;
  double eps = 0.0;
  Vec direction;            ///< eigen-coordinates of the steep initial condition
  double lambda_tail = 0.0; ///< lambda_{c,-}(mu_1) at the profile speed
  double mu_tail = 0.0;     ///< mu_1 at e
  double closest = 0.0;
  Steepness steep;

  std::vector<double> deviation() const;
};

struct FrontSearchOptions {
  double c_tol = 1e-7;
  double eps = 0.0;  ///< 0: 1e-6 delta_hess(c0) with c0 halfway between c_lin and the bracket
  std::optional<Vec> target;  ///< default: global minimum point of V
  ShotOptions shot;
  SteepnessWindow window;
};

/// Bisection in c on the overshoot/undershoot classification (d = 1).
/// Throws NumericalFailure if the bracket ends share a classification and
/// Inconclusive if an end is escaped or undetermined.
FrontProfile find_pushed_front(const PotentialSpec& p, const CriticalPoint& e, double c_lo,
                               double c_hi, const FrontSearchOptions& opts = {});

Steepness steepness(const FrontProfile& front, const SteepnessWindow& window = {});

/// Both sides of E_{c'}[phi] = (1 - c/c') int e^{c' xi} |phi'|^2, weights
/// referenced at the half-height crossing, with analytic tail corrections.
struct EnergyIdentity {
  double c_prime = 0.0;
  double energy = 0.0;
  double weighted_dphi_sq = 0.0;
  double predicted = 0.0;
  double residual = 0.0;  ///< |energy - predicted| / weighted_dphi_sq
  double xi_ref = 0.0;
};

/// Requires 0 < c' < 2 |lambda_tail|.
EnergyIdentity front_energy_identity(const FrontProfile& front, const PotentialSpec& p,
                                     double c_prime);

struct MonotoneRadius {
  bool ok = true;
  int crossings = 0;
  std::optional<double> xi_hat;
  std::optional<double> violation_xi;
};

/// Unique crossing of |phi - e| = delta and strict decrease of |phi - e|
/// to its right. dphi may be empty, in which case differences are used.
MonotoneRadius monotone_radius_check(const std::vector<double>& xi, const std::vector<double>& phi,
                                     const std::vector<double>& dphi, int dim, const Vec& e,
                                     double delta);
MonotoneRadius monotone_radius_check(const FrontProfile& front, double delta);

/// Front samples on a uniform grid, extended to the right of xi = 0 by the
/// linear steep tail up to xi_right, with exact derivatives attached.
GridProfile to_grid_profile(const FrontProfile& front, double xi_left, double xi_right);

/// Front CSV: `xi,phi_1..phi_d,dphi_1..dphi_d`.
std::string front_csv(const FrontProfile& front);

// --- d >= 2 best-effort support -------------------------------------------

struct ForwardValidation {
  bool stayed_in_ball = false;
  double max_deviation = 0.0;
  Steepness steep;
};

/// Integrates forward from steep_ic and checks that the orbit stays within
/// delta of e and decays faster than exp(-c xi / 2).
ForwardValidation forward_validate(const PotentialSpec& p, const CriticalPoint& e, double c,
                                   double eps, const Vec& s, double delta, double xi_span = 40.0);

struct Candidate {
  double c = 0.0;
  Vec direction;
  int target = -1;
  double closest = 0.0;
};

/// Grid search over steep directions on the unit sphere and over the given
/// speeds; reports shots passing within `accept` of a target. An empty
/// result means none found at this resolution, not that none exist.
std::vector<Candidate> search_pushed_candidates(const PotentialSpec& p, const CriticalPoint& e,
                                                const std::vector<double>& speeds,
                                                const std::vector<Vec>& targets, int directions,
                                                double eps, double accept = 1e-3,
                                                const ShotOptions& opts = {});

}  // namespace frontlab
