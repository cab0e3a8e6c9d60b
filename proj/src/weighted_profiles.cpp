#include "frontlab/weighted_profiles.hpp"

#include "frontlab/errors.hpp"
#include "frontlab/speed_atlas.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace frontlab {

namespace {

constexpr double kMaxExponent = 700.0;

// Trapezoid accumulator for sum_i tau_i dx exp(a_i) f_i without forming
// exp(a_i) when it would overflow.
class WeightedSum {
 public:
  WeightedSum(double dx, int n) : dx_(dx), n_(n) {}
  void add(int i, double exponent, double f) {
    if (f == 0.0) return;
    const double tau = (i == 0 || i == n_ - 1) ? 0.5 : 1.0;
    double term;
    if (exponent <= kMaxExponent) {
      term = std::exp(exponent) * f;
    } else {
      const double lg = exponent + std::log(std::abs(f));
      if (lg > kMaxExponent)
        throw NumericalFailure("weighted integrand overflows at a node (exponent " +
                               std::to_string(exponent) + "); use a larger xi_ref");
      term = std::copysign(std::exp(lg), f);
    }
    sum_ += tau * term;
  }
  double value() const { return sum_ * dx_; }

 private:
  double dx_;
  int n_;
  double sum_ = 0.0;
};

double sq_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

}  // namespace

WeightedEnergy WeightedEnergy::rereferenced(double new_ref) const {
  const double f = std::exp(c * (xi_ref - new_ref));
  WeightedEnergy r = *this;
  r.value *= f;
  r.kinetic *= f;
  r.potential *= f;
  r.xi_ref = new_ref;
  return r;
}

WeightedEnergy energy(const GridProfile& w, const PotentialSpec& p, double c, double xi_ref) {
  if (p.dim() != w.dim()) throw InvalidArgument("profile and potential dimensions differ");
  const int n = w.size(), d = w.dim();
  const double ve = p.value(w.reference());
  const auto dw = w.derivative();
  WeightedSum kin(w.dx(), n), pot(w.dx(), n);
  for (int i = 0; i < n; ++i) {
    const double a = c * (w.x(i) - xi_ref);
    kin.add(i, a, 0.5 * sq_norm({dw.data() + static_cast<std::size_t>(i) * d, static_cast<std::size_t>(d)}));
    pot.add(i, a, p.value(w.node(i)) - ve);
  }
  WeightedEnergy e;
  e.kinetic = kin.value();
  e.potential = pot.value();
  e.value = e.kinetic + e.potential;
  e.xi_ref = xi_ref;
  e.c = c;
  return e;
}

double weighted_h1_sq(const GridProfile& w, double c, double xi_ref) {
  const int n = w.size(), d = w.dim();
  const auto dw = w.derivative();
  WeightedSum s(w.dx(), n);
  for (int i = 0; i < n; ++i) {
    double f = w.deviation(i);
    f *= f;
    for (int j = 0; j < d; ++j) f += dw[static_cast<std::size_t>(i) * d + j] * dw[static_cast<std::size_t>(i) * d + j];
    s.add(i, c * (w.x(i) - xi_ref), f);
  }
  return s.value();
}

double dissipation_functional(const GridProfile& w, const PotentialSpec& p, double c,
                              double xi_ref, DissipationForm form) {
  if (p.dim() != w.dim()) throw InvalidArgument("profile and potential dimensions differ");
  const int n = w.size(), d = w.dim();
  const auto dw = w.derivative();
  const auto d2w = w.second_derivative();
  std::vector<double> g(d), h(static_cast<std::size_t>(d) * d);
  WeightedSum s(w.dx(), n);
  for (int i = 0; i < n; ++i) {
    const std::size_t o = static_cast<std::size_t>(i) * d;
    p.gradient(w.node(i), g);
    double f = 0.0;
    if (form == DissipationForm::residual) {
      for (int j = 0; j < d; ++j) {
        const double r = -g[j] + c * dw[o + j] + d2w[o + j];
        f += r * r;
      }
    } else {
      p.hessian(w.node(i), h);
      for (int j = 0; j < d; ++j) {
        f += g[j] * g[j] + d2w[o + j] * d2w[o + j];
        for (int k = 0; k < d; ++k) f += 2.0 * h[j * d + k] * dw[o + j] * dw[o + k];
      }
    }
    s.add(i, c * (w.x(i) - xi_ref), f);
  }
  return s.value();
}

PoincareGap poincare_gap(const GridProfile& w, double c, double xi0, double lambda) {
  if (!(lambda > 0.0)) throw InvalidArgument("Poincare parameter lambda must be positive");
  const int n = w.size(), d = w.dim();
  double max_dev = 0.0;
  for (int i = 0; i < n; ++i) max_dev = std::max(max_dev, w.deviation(i));
  if (w.deviation(n - 1) > 1e-12 * max_dev)
    throw InvalidArgument("profile support touches the right boundary");
  const int i0 = std::clamp(static_cast<int>(std::lround((xi0 - w.x0()) / w.dx())), 0, n - 2);
  const double x_start = w.x(i0);
  const auto dw = w.derivative();
  // Trapezoid on [x_start, end]: half weight at both ends of the sub-grid.
  double lhs = 0.0, l2 = 0.0;
  for (int i = i0; i < n; ++i) {
    const double tau = (i == i0 || i == n - 1) ? 0.5 : 1.0;
    const double wt = tau * std::exp(c * (w.x(i) - x_start));
    const double dev = w.deviation(i);
    lhs += wt * sq_norm({dw.data() + static_cast<std::size_t>(i) * d, static_cast<std::size_t>(d)});
    l2 += wt * dev * dev;
  }
  PoincareGap r;
  r.lhs = lhs * w.dx();
  const double dev0 = w.deviation(i0);
  r.boundary = lambda * dev0 * dev0;
  r.bulk = lambda * (c - lambda) * l2 * w.dx();
  r.gap = r.lhs - r.boundary - r.bulk;
  return r;
}

double smooth_step_down(double s) {
  if (s <= 0.0) return 1.0;
  if (s >= 1.0) return 0.0;
  const double a = std::exp(-1.0 / (1.0 - s));
  const double b = std::exp(-1.0 / s);
  return a / (a + b);
}

namespace {

double smooth_step_down_slope(double s) {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  const double a = std::exp(-1.0 / (1.0 - s));
  const double b = std::exp(-1.0 / s);
  const double q = 1.0 / ((1.0 - s) * (1.0 - s)) + 1.0 / (s * s);
  return -a * b * q / ((a + b) * (a + b));
}

}  // namespace

GridProfile cutoff_truncate(const GridProfile& w, double x_cut, double ramp_width) {
  if (!(ramp_width > 0.0)) throw InvalidArgument("cutoff ramp width must be positive");
  GridProfile out(w.x0(), w.dx(), w.dim(), w.values(), w.reference());
  out.set_stencil_order(w.stencil_order());
  const Vec& e = w.reference();
  const int d = w.dim();
  const bool exact = w.has_exact_derivative();
  const std::vector<double> dw = exact ? w.derivative() : std::vector<double>{};
  std::vector<double> dout(exact ? dw.size() : 0);
  for (int i = 0; i < w.size(); ++i) {
    const double s = (w.x(i) - x_cut) / ramp_width;
    const double chi = smooth_step_down(s);
    const double slope = smooth_step_down_slope(s) / ramp_width;
    for (int j = 0; j < d; ++j) {
      out(i, j) = chi == 0.0 ? e(j) : e(j) + chi * (w(i, j) - e(j));
      if (exact) {
        const std::size_t k = static_cast<std::size_t>(i) * d + j;
        dout[k] = chi * dw[k] + slope * (w(i, j) - e(j));
      }
    }
  }
  if (exact) out.set_derivative(std::move(dout));
  return out;
}

std::vector<double> default_speed_grid(double c_max, int points) {
  std::vector<double> g(points);
  for (int k = 0; k < points; ++k)
    g[k] = points == 1 ? c_max : 0.05 + (c_max - 0.05) * k / (points - 1);
  return g;
}

VariationalScan variational_speed_scan(const GridProfile& w, const PotentialSpec& p,
                                       const std::vector<double>& c_grid, double xi_ref,
                                       int bisection_steps) {
  VariationalScan r;
  r.speeds = c_grid;
  r.energies.assign(c_grid.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t k = 0; k < c_grid.size(); ++k) {
    try {
      r.energies[k] = energy(w, p, c_grid[k], xi_ref).value;
    } catch (const NumericalFailure&) {
      r.excluded.push_back(c_grid[k]);
    }
  }
  int last_neg = -1;
  for (std::size_t k = 0; k < c_grid.size(); ++k)
    if (r.energies[k] < 0.0) last_neg = static_cast<int>(k);
  if (last_neg < 0) return r;
  double lo = c_grid[last_neg];
  const std::size_t next = static_cast<std::size_t>(last_neg) + 1;
  if (next < c_grid.size() && !std::isnan(r.energies[next])) {
    double hi = c_grid[next];
    for (int s = 0; s < bisection_steps; ++s) {
      const double mid = 0.5 * (lo + hi);
      double em;
      try {
        em = energy(w, p, mid, xi_ref).value;
      } catch (const NumericalFailure&) {
        break;
      }
      (em < 0.0 ? lo : hi) = mid;
    }
  }
  r.c_var = lo;
  return r;
}

double invasion_condition(const GridProfile& w, const PotentialSpec& p) {
  const int n = w.size(), d = w.dim();
  const double ve = p.value(w.reference());
  const auto dw = w.derivative();
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const double tau = (i == 0 || i == n - 1) ? 0.5 : 1.0;
    total += tau * (0.5 * sq_norm({dw.data() + static_cast<std::size_t>(i) * d, static_cast<std::size_t>(d)}) +
                    p.value(w.node(i)) - ve);
  }
  return total * w.dx();
}

double energy_lower_bound(double c, double c0, double v_min_relative, double xi_bar,
                          double deviation_at_xi_bar, double xi_ref) {
  if (!(c > c0)) throw InvalidArgument("lower energy bound needs c > c0");
  const double lm = std::abs(lambda_minus(c, mu_of_speed(c0)));
  return std::exp(c * (xi_bar - xi_ref)) *
         (-std::abs(v_min_relative) / c + 0.5 * lm * deviation_at_xi_bar * deviation_at_xi_bar);
}

}  // namespace frontlab
