#pragma once

#include "frontlab/potential.hpp"

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace frontlab {

/// Roots of lambda^2 + c lambda - mu = 0, ordered so that Re(minus) <= Re(plus).
struct LambdaPair {
  std::complex<double> minus;
  std::complex<double> plus;
  bool real = true;
};

LambdaPair lambda_pm(double c, double mu);

/// Steep (more negative) real root; requires mu >= -c^2/4.
double lambda_minus(double c, double mu);

/// 2 sqrt(-mu) for mu < 0, else 0.
double c_lin_of_mu(double mu);

/// Speed whose squared half is -mu, i.e. mu = -c^2/4.
inline double mu_of_speed(double c) { return -0.25 * c * c; }

struct SearchBox {
  double lo = -3.0;
  double hi = 3.0;
  int rays_per_dim = 64;  ///< direction samples per sphere dimension (d >= 2)
  int radial_samples = 4000;
};

/// Infimum over u != e of 2 (V(u) - V(e)) / |u - e|^2. Exact up to refinement
/// tolerance in d = 1; a ray-sampled estimate in d >= 2. Throws
/// InvalidArgument if the infimum sits on the search box boundary.
double mu_quad_hull(const PotentialSpec& p, const CriticalPoint& e, const SearchBox& box = {});

/// inf{|u - e| : V(u) - V(e) < mu0 |u - e|^2 / 2}, mu0 = -c0^2/4.
/// Throws InvalidArgument if the violating set is empty inside the box.
double delta_stab(const PotentialSpec& p, const CriticalPoint& e, double c0,
                  const SearchBox& box = {});

/// inf{|u - e| : smallest eigenvalue of D^2V(u) < mu0}.
double delta_hess(const PotentialSpec& p, const CriticalPoint& e, double c0,
                  const SearchBox& box = {});

/// 2 sqrt(|V_min - V(e)|) / delta_stab(c0).
double c_upp(double v_min_relative, double delta_stab_c0);

/// The set {c0 in (c_lin, c_quad) : c0 <= c_upp(c0)} is an initial interval;
/// its supremum is bracketed by [lo, hi]. `saturated` means the whole
/// interval qualifies and the supremum is c_quad.
struct UppDiagBound {
  double lo = 0.0;
  double hi = 0.0;
  bool saturated = false;
  double value() const { return saturated ? hi : 0.5 * (lo + hi); }
};

UppDiagBound c_upp_diag(const PotentialSpec& p, const CriticalPoint& e, double c_quad,
                        const SearchBox& box = {}, int scan_points = 64,
                        double bracket_tol = 1e-6);

struct RadiusRow {
  double c0 = 0.0;
  double delta_stab = 0.0;
  double delta_hess = 0.0;
  double c_upp = 0.0;
};

struct NonlinBracket {
  double lo = 0.0;
  double hi = 0.0;
  std::string method;  ///< shooting | energy-bisection | both
  double mid() const { return 0.5 * (lo + hi); }
  double width() const { return hi - lo; }
};

struct SpeedAtlas {
  double c_lin = 0.0;
  double mu_1 = 0.0;
  double v_min_relative = 0.0;  ///< V_min - V(e)
  double mu_quad_hull = 0.0;
  double c_quad_hull = 0.0;
  std::optional<NonlinBracket> c_nonlin;
  std::optional<UppDiagBound> c_upp_diag;
  std::optional<int> case_label;
  std::vector<RadiusRow> radii;
};

/// Case label from the (0, c_lin, c_nonlin, c_quad) equality pattern:
/// 1: c_lin ~ 0 < c_nonlin < c_quad; 2: 0 < c_lin ~ c_nonlin ~ c_quad;
/// 3: 0 < c_lin ~ c_nonlin < c_quad; 4: all strict.
/// Throws InvalidArgument when no pattern fits.
int classify_case(double c_lin, double c_nonlin, double c_quad, double tol);
int classify_case(const SpeedAtlas& atlas, double tol);

/// Default tolerance for speed equality: 1e-3 c_quad.
inline double default_case_tol(const SpeedAtlas& atlas) { return 1e-3 * atlas.c_quad_hull; }

struct AtlasOptions {
  SearchBox box;
  std::vector<double> c0_values;  ///< empty: 8 interior points of (c_lin, c_quad)
  bool compute_upp_diag = true;
};

/// Everything except the nonlinear speed bracket and the case label.
/// Throws InvalidArgument if V_min >= V(e).
SpeedAtlas compute_atlas(const PotentialSpec& p, const CriticalPoint& e,
                         const AtlasOptions& opts = {});

/// Intersects a new bracket into the atlas. Disjoint brackets (beyond tol)
/// raise NumericalFailure.
void merge_nonlin(SpeedAtlas& atlas, const NonlinBracket& found, double tol);

}  // namespace frontlab
