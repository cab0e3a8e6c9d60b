#pragma once

#include "frontlab/potential.hpp"

#include <optional>
#include <span>
#include <vector>

namespace frontlab {

/// Values w_i in R^d on the uniform grid x_i = x0 + i dx, stored node-major
/// (the d components of node i are contiguous), with a reference point e
/// for deviation norms.
class GridProfile {
 public:
  GridProfile(double x0, double dx, int dim, std::vector<double> values, Vec reference);

  /// Profile equal to `reference` at every node.
  static GridProfile constant(double x0, double dx, int nodes, const Vec& reference);

  int size() const { return n_; }
  int dim() const { return d_; }
  double x0() const { return x0_; }
  double dx() const { return dx_; }
  double x(int i) const { return x0_ + i * dx_; }
  double x_end() const { return x(n_ - 1); }
  const Vec& reference() const { return e_; }

  double operator()(int i, int j) const { return w_[static_cast<std::size_t>(i) * d_ + j]; }
  double& operator()(int i, int j) { return w_[static_cast<std::size_t>(i) * d_ + j]; }
  std::span<const double> node(int i) const {
    return {w_.data() + static_cast<std::size_t>(i) * d_, static_cast<std::size_t>(d_)};
  }
  const std::vector<double>& values() const { return w_; }

  /// |w_i - e|.
  double deviation(int i) const;

  /// Finite-difference order used for derivatives (2, 4 or 6).
  int stencil_order() const { return order_; }
  void set_stencil_order(int order);

  /// Attaches exact derivative samples, used instead of finite differences.
  void set_derivative(std::vector<double> dw);
  bool has_exact_derivative() const { return dw_.has_value(); }

  /// w' at every node: exact samples if attached, else central differences
  /// of the stencil order in the interior and one-sided at the ends.
  std::vector<double> derivative() const;
  /// w'' at every node by finite differences.
  std::vector<double> second_derivative() const;

  /// Translation by k nodes to the right; vacated nodes are set to e.
  GridProfile shifted(int k) const;

 private:
  double x0_;
  double dx_;
  int d_;
  int n_;
  std::vector<double> w_;
  Vec e_;
  int order_ = 2;
  std::optional<std::vector<double>> dw_;
};

/// Profile CSV with header `x,u1,...,ud`, 17 significant digits.
std::string profile_csv(const GridProfile& w);

}  // namespace frontlab
