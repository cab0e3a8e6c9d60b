#pragma once

#include <Eigen/Dense>

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace frontlab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// One term `coefficient * prod_j u_j^powers[j]` of a polynomial potential.
struct Monomial {
  double coefficient = 0.0;
  std::vector<int> powers;
};

enum class PotentialFamily { fisher, quintic_ginzburg_landau, polynomial };

std::string to_string(PotentialFamily family);

/// Lowest value of V found on the search domain and where it is attained.
struct GlobalMinimum {
  double value = 0.0;
  Vec point;
  /// True when the minimizer sits on the search box boundary, i.e. V may be
  /// unbounded below and `value` is only a box-restricted minimum.
  bool on_boundary = false;
};

/// Polynomial potential V : R^d -> R with symbolic first and second
/// derivatives generated from its monomial table. Immutable after
/// construction; every member function is const and reentrant.
class PotentialSpec {
 public:
  PotentialSpec(int dim, std::vector<Monomial> terms,
                PotentialFamily family = PotentialFamily::polynomial,
                std::map<std::string, double> parameters = {});

  int dim() const { return dim_; }
  PotentialFamily family() const { return family_; }
  const std::map<std::string, double>& parameters() const { return parameters_; }
  const std::vector<Monomial>& terms() const { return terms_; }

  double value(std::span<const double> u) const;
  void gradient(std::span<const double> u, std::span<double> out) const;
  void hessian(std::span<const double> u, std::span<double> out_row_major) const;

  double value(const Vec& u) const;
  Vec gradient(const Vec& u) const;
  Mat hessian(const Vec& u) const;

  /// Scalar shortcuts; only valid when dim() == 1.
  double value1(double u) const;
  double derivative1(double u) const;
  double second_derivative1(double u) const;

  const std::optional<GlobalMinimum>& global_minimum() const { return global_min_; }
  PotentialSpec with_global_minimum(GlobalMinimum m) const;

 private:
  int dim_;
  std::vector<Monomial> terms_;
  PotentialFamily family_;
  std::map<std::string, double> parameters_;
  std::optional<GlobalMinimum> global_min_;
  // Dense coefficients of the scalar polynomial (index = power), d == 1 only.
  std::vector<double> coeffs1_;
};

/// V(u) = -u^2/2 + (1 - 1/nu) u^3 / 3 + u^4 / (4 nu), so that -V' = u(1-u)(1+u/nu).
PotentialSpec make_fisher(double nu);

/// Subcritical quintic Ginzburg-Landau potential V(u) = mu1 u^2/2 - u^4/4 + u^6/6.
PotentialSpec make_quintic_gl(double mu1);

/// V(u) = sum_j mu_j u_j^2 / 2.
PotentialSpec make_quadratic(const std::vector<double>& mus);

/// Sum of scalar potentials, one per coordinate: V(u) = sum_j V_j(u_j).
PotentialSpec make_separable(const std::vector<PotentialSpec>& scalar_parts);

/// Generic polynomial; the global minimum is searched on [box_lo, box_hi]^d.
PotentialSpec make_polynomial(int dim, std::vector<Monomial> terms,
                              double box_lo = -3.0, double box_hi = 3.0);

/// Multi-start damped-Newton minimization of V on the box [lo, hi]^d.
GlobalMinimum search_global_minimum(const PotentialSpec& p, double lo, double hi,
                                    int starts_per_dim = 41);

/// Distinct local minimum points of V found from a grid of starts on [lo, hi]^d.
std::vector<Vec> find_local_minima(const PotentialSpec& p, double lo, double hi,
                                   int starts_per_dim = 41);

struct Spectrum {
  Vec values;   ///< ascending
  Mat vectors;  ///< orthonormal columns, vectors.col(j) pairs with values(j)
};

/// Symmetric eigendecomposition of D^2V(e), ascending.
Spectrum curvatures(const PotentialSpec& p, const Vec& e);

struct CriticalPoint {
  Vec location;
  double residual = 0.0;  ///< |grad V(location)|
  Spectrum spectrum;
  double c_lin = 0.0;
  double value = 0.0;  ///< V(location)

  double mu1() const { return spectrum.values(0); }
};

struct NewtonOptions {
  double tolerance = 1e-12;
  int max_iterations = 100;
};

/// Damped Newton iteration on grad V; each step is halved until |grad V|
/// decreases. Throws NumericalFailure on non-convergence or singular Hessian.
CriticalPoint find_critical_point(const PotentialSpec& p, const Vec& guess,
                                  const NewtonOptions& opts = {});

/// Sampled infimum of u.grad V(u)/|u|^2 over R <= |u| <= 10 R. A positive
/// value is a coercivity certificate at that scale, not a proof.
double check_coercivity(const PotentialSpec& p, double radius, int samples = 256);

}  // namespace frontlab
