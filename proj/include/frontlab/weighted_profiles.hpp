#pragma once

#include "frontlab/grid_profile.hpp"
#include "frontlab/potential.hpp"

#include <vector>

namespace frontlab {

// All weighted integrals use the weight exp(c (x - xi_ref)) and subtract
// V(e) from the potential, e being the profile's reference point. Quadrature
// is the trapezoid rule on the grid nodes.

struct WeightedEnergy {
  double value = 0.0;
  double kinetic = 0.0;    ///< int weight |w'|^2 / 2
  double potential = 0.0;  ///< int weight (V(w) - V(e))
  double xi_ref = 0.0;
  double c = 0.0;

  /// Same energy referenced at another point: multiplied by exp(c (xi_ref - new_ref)).
  WeightedEnergy rereferenced(double new_ref) const;
};

WeightedEnergy energy(const GridProfile& w, const PotentialSpec& p, double c, double xi_ref);

/// int weight (|w - e|^2 + |w'|^2).
double weighted_h1_sq(const GridProfile& w, double c, double xi_ref);

enum class DissipationForm {
  residual,  ///< |-grad V(w) + c w' + w''|^2
  expanded,  ///< |grad V|^2 + 2 D^2V(w) w'.w' + |w''|^2, equal after integration by parts
};

double dissipation_functional(const GridProfile& w, const PotentialSpec& p, double c,
                              double xi_ref, DissipationForm form = DissipationForm::residual);

/// The three terms of the weighted Poincare inequality on [xi0, end) and
/// their difference `gap` = lhs - boundary - bulk, weights referenced at xi0.
struct PoincareGap {
  double gap = 0.0;
  double lhs = 0.0;       ///< int e^{c(x-xi0)} |w'|^2
  double boundary = 0.0;  ///< lambda |w(xi0) - e|^2
  double bulk = 0.0;      ///< lambda (c - lambda) int e^{c(x-xi0)} |w - e|^2
  double scale() const { return std::abs(lhs) + std::abs(boundary) + std::abs(bulk); }
};

/// xi0 is rounded to the nearest node. Requires w = e at the right end.
PoincareGap poincare_gap(const GridProfile& w, double c, double xi0, double lambda);

/// Smooth step: 1 for s <= 0, 0 for s >= 1, C-infinity and monotone between.
double smooth_step_down(double s);

/// e + chi((x - x_cut) / ramp_width) (w - e).
GridProfile cutoff_truncate(const GridProfile& w, double x_cut, double ramp_width);

struct VariationalScan {
  double c_var = 0.0;                ///< largest speed with negative energy (0 if none)
  std::vector<double> speeds;        ///< scanned grid
  std::vector<double> energies;      ///< E_c at each grid speed (NaN when excluded)
  std::vector<double> excluded;      ///< speeds dropped for overflow
};

/// sup{c : E_c[w] < 0} on c_grid, refined by bisection between the last
/// negative and the next non-negative grid speed.
VariationalScan variational_speed_scan(const GridProfile& w, const PotentialSpec& p,
                                       const std::vector<double>& c_grid, double xi_ref,
                                       int bisection_steps = 40);

/// Default scan grid: `points` speeds evenly spaced on [0.05, c_max].
std::vector<double> default_speed_grid(double c_max, int points = 64);

/// int over the whole grid of |w'|^2/2 + V(w) - V(e); negative values mean
/// small speeds have negative energy.
double invasion_condition(const GridProfile& w, const PotentialSpec& p);

/// Lower energy bound for a profile staying within delta_stab(c0) of e to
/// the right of xi_bar, for c > c0, referenced at xi_ref:
/// exp(c (xi_bar - xi_ref)) (-|V_min|/c + |lambda_{c,-}(mu0)| |w(xi_bar) - e|^2 / 2).
double energy_lower_bound(double c, double c0, double v_min_relative, double xi_bar,
                          double deviation_at_xi_bar, double xi_ref);

}  // namespace frontlab
