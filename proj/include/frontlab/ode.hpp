#pragma once

#include <functional>
#include <vector>

namespace frontlab {

/// y' = f(t, y); writes f into dydt.
using OdeRhs = std::function<void(double t, const double* y, double* dydt)>;

struct OdeOptions {
  double rtol = 1e-11;
  double atol = 1e-13;
  double initial_step = 0.0;  ///< 0: chosen from the initial derivative
  double max_step = 0.0;      ///< 0: unbounded
  double min_step = 1e-13;    ///< relative to max(1, |t|)
  long max_steps = 2'000'000;
};

/// Continuous extension of one accepted step, valid on [t_old, t_new].
class DenseStep {
 public:
  double t_old = 0.0;
  double t_new = 0.0;
  void evaluate(double t, double* y) const;
  int size() const { return n_; }

 private:
  friend class Dopri5;
  int n_ = 0;
  std::vector<double> r1_, r2_, r3_, r4_, r5_;
};

/// Called after each accepted step with the step's dense output and the new
/// state; returning false stops the integration.
using StepObserver = std::function<bool(const DenseStep& step, const double* y_new)>;

struct OdeResult {
  double t = 0.0;
  std::vector<double> y;
  long steps = 0;
  long rejected = 0;
  bool stopped_by_observer = false;
};

/// Dormand-Prince 5(4) with FSAL, elementary step-size control and 4th-order
/// dense output. Integrates in either direction of t.
class Dopri5 {
 public:
  explicit Dopri5(OdeOptions opts = {}) : opts_(opts) {}

  /// Throws NumericalFailure on step-size underflow, step limit or
  /// non-finite state.
  OdeResult integrate(const OdeRhs& f, double t0, std::vector<double> y0, double t_end,
                      const StepObserver& observer = {}) const;

 private:
  OdeOptions opts_;
};

}  // namespace frontlab
