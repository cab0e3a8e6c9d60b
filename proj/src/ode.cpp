#include "frontlab/ode.hpp"

#include "frontlab/errors.hpp"

#include <algorithm>
#include <cmath>

namespace frontlab {

namespace {

constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

}  // namespace

void DenseStep::evaluate(double t, double* y) const {
  const double h = t_new - t_old;
  const double s = h == 0.0 ? 1.0 : (t - t_old) / h;
  const double s1 = 1.0 - s;
  for (int i = 0; i < n_; ++i)
    y[i] = r1_[i] + s * (r2_[i] + s1 * (r3_[i] + s * (r4_[i] + s1 * r5_[i])));
}

OdeResult Dopri5::integrate(const OdeRhs& f, double t0, std::vector<double> y0, double t_end,
                            const StepObserver& observer) const {
  const int n = static_cast<int>(y0.size());
  const double dir = t_end >= t0 ? 1.0 : -1.0;
  std::vector<double> y = std::move(y0), yn(n), tmp(n), k1(n), k2(n), k3(n), k4(n), k5(n), k6(n),
                      k7(n), err(n);
  OdeResult res;
  double t = t0;
  f(t, y.data(), k1.data());

  auto norm = [&](const std::vector<double>& v, const std::vector<double>& ya,
                  const std::vector<double>& yb) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      const double sc = opts_.atol + opts_.rtol * std::max(std::abs(ya[i]), std::abs(yb[i]));
      s += (v[i] / sc) * (v[i] / sc);
    }
    return std::sqrt(s / std::max(1, n));
  };

  double h = opts_.initial_step;
  if (h <= 0.0) {
    const double d0 = norm(y, y, y), d1n = norm(k1, y, y);
    h = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
    h = std::min(h, std::abs(t_end - t0));
  }
  if (opts_.max_step > 0.0) h = std::min(h, opts_.max_step);
  h *= dir;

  DenseStep dense;
  dense.n_ = n;
  dense.r1_.resize(n);
  dense.r2_.resize(n);
  dense.r3_.resize(n);
  dense.r4_.resize(n);
  dense.r5_.resize(n);

  while (dir * (t_end - t) > 0.0) {
    if (res.steps + res.rejected >= opts_.max_steps)
      throw NumericalFailure("ODE step limit reached");
    if (dir * (t + h - t_end) > 0.0) h = t_end - t;
    if (std::abs(h) < opts_.min_step * std::max(1.0, std::abs(t)))
      throw NumericalFailure("ODE step size underflow at t = " + std::to_string(t));

    for (int i = 0; i < n; ++i) tmp[i] = y[i] + h * a21 * k1[i];
    f(t + c2 * h, tmp.data(), k2.data());
    for (int i = 0; i < n; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    f(t + c3 * h, tmp.data(), k3.data());
    for (int i = 0; i < n; ++i) tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    f(t + c4 * h, tmp.data(), k4.data());
    for (int i = 0; i < n; ++i)
      tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    f(t + c5 * h, tmp.data(), k5.data());
    for (int i = 0; i < n; ++i)
      tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    f(t + h, tmp.data(), k6.data());
    for (int i = 0; i < n; ++i)
      yn[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
    f(t + h, yn.data(), k7.data());
    for (int i = 0; i < n; ++i)
      err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
    const double en = norm(err, y, yn);
    if (!std::isfinite(en)) {
      h *= 0.2;
      ++res.rejected;
      continue;
    }
    const double fac = std::clamp(0.9 * std::pow(std::max(en, 1e-10), -0.2), 0.2, 10.0);
    if (en > 1.0) {
      h *= std::min(1.0, fac);
      ++res.rejected;
      continue;
    }
    for (int i = 0; i < n; ++i) {
      const double dy = yn[i] - y[i];
      const double bspl = h * k1[i] - dy;
      dense.r1_[i] = y[i];
      dense.r2_[i] = dy;
      dense.r3_[i] = bspl;
      dense.r4_[i] = dy - h * k7[i] - bspl;
      dense.r5_[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
    }
    dense.t_old = t;
    dense.t_new = t + h;
    t += h;
    y.swap(yn);
    k1.swap(k7);
    ++res.steps;
    for (double v : y)
      if (!std::isfinite(v)) throw NumericalFailure("non-finite ODE state at t = " + std::to_string(t));
    if (observer && !observer(dense, y.data())) {
      res.stopped_by_observer = true;
      break;
    }
    h *= fac;
    if (opts_.max_step > 0.0 && std::abs(h) > opts_.max_step) h = dir * opts_.max_step;
  }
  res.t = t;
  res.y = std::move(y);
  return res;
}

}  // namespace frontlab
