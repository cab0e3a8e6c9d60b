#include "frontlab/grid_profile.hpp"

#include "frontlab/errors.hpp"
#include "frontlab/stencils.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace frontlab {

GridProfile::GridProfile(double x0, double dx, int dim, std::vector<double> values, Vec reference)
    : x0_(x0), dx_(dx), d_(dim), w_(std::move(values)), e_(std::move(reference)) {
  if (!(dx_ > 0.0)) throw InvalidArgument("grid spacing must be positive");
  if (d_ < 1 || e_.size() != d_) throw InvalidArgument("reference point has the wrong dimension");
  if (w_.size() % static_cast<std::size_t>(d_) != 0)
    throw InvalidArgument("value count is not a multiple of the dimension");
  n_ = static_cast<int>(w_.size() / d_);
  if (n_ < 8) throw InvalidArgument("a grid profile needs at least 8 nodes");
}

GridProfile GridProfile::constant(double x0, double dx, int nodes, const Vec& reference) {
  const int d = static_cast<int>(reference.size());
  std::vector<double> w(static_cast<std::size_t>(nodes) * d);
  for (int i = 0; i < nodes; ++i)
    for (int j = 0; j < d; ++j) w[static_cast<std::size_t>(i) * d + j] = reference(j);
  return GridProfile(x0, dx, d, std::move(w), reference);
}

double GridProfile::deviation(int i) const {
  double s = 0.0;
  for (int j = 0; j < d_; ++j) {
    const double v = (*this)(i, j) - e_(j);
    s += v * v;
  }
  return std::sqrt(s);
}

void GridProfile::set_stencil_order(int order) {
  if (order != 2 && order != 4 && order != 6)
    throw InvalidArgument("stencil order must be 2, 4 or 6");
  order_ = order;
}

void GridProfile::set_derivative(std::vector<double> dw) {
  if (dw.size() != w_.size()) throw InvalidArgument("derivative samples have the wrong size");
  dw_ = std::move(dw);
}

namespace {

// Derivative at node i using the widest central stencil that fits, then a
// one-sided second-order formula at the two end nodes.
template <bool Second>
double diff_at(const std::vector<double>& w, int n, int d, int i, int j, int order, double dx) {
  auto at = [&](int k) { return w[static_cast<std::size_t>(k) * d + j]; };
  int ord = order;
  while (ord > 2 && (i < ord / 2 || i > n - 1 - ord / 2)) ord -= 2;
  if (i >= 1 && i <= n - 2) {
    const auto s = stencil::central(ord);
    double acc = 0.0;
    for (int k = -s.half; k <= s.half; ++k)
      acc += (Second ? s.second : s.first)[k + s.half] * at(i + k);
    return Second ? acc / (dx * dx) : acc / dx;
  }
  const int sg = i == 0 ? 1 : -1;
  if (Second)
    return (2.0 * at(i) - 5.0 * at(i + sg) + 4.0 * at(i + 2 * sg) - at(i + 3 * sg)) / (dx * dx);
  return sg * (-3.0 * at(i) + 4.0 * at(i + sg) - at(i + 2 * sg)) / (2.0 * dx);
}

}  // namespace

std::vector<double> GridProfile::derivative() const {
  if (dw_) return *dw_;
  std::vector<double> out(w_.size());
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < d_; ++j)
      out[static_cast<std::size_t>(i) * d_ + j] = diff_at<false>(w_, n_, d_, i, j, order_, dx_);
  return out;
}

std::vector<double> GridProfile::second_derivative() const {
  std::vector<double> out(w_.size());
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < d_; ++j)
      out[static_cast<std::size_t>(i) * d_ + j] = diff_at<true>(w_, n_, d_, i, j, order_, dx_);
  return out;
}

GridProfile GridProfile::shifted(int k) const {
  GridProfile out = constant(x0_, dx_, n_, e_);
  out.order_ = order_;
  for (int i = 0; i < n_; ++i) {
    const int src = i - k;
    if (src < 0 || src >= n_) continue;
    for (int j = 0; j < d_; ++j) out(i, j) = (*this)(src, j);
  }
  if (dw_) {
    std::vector<double> dw(w_.size(), 0.0);
    for (int i = 0; i < n_; ++i) {
      const int src = i - k;
      if (src < 0 || src >= n_) continue;
      for (int j = 0; j < d_; ++j) dw[static_cast<std::size_t>(i) * d_ + j] = (*dw_)[static_cast<std::size_t>(src) * d_ + j];
    }
    out.dw_ = std::move(dw);
  }
  return out;
}

std::string profile_csv(const GridProfile& w) {
  std::ostringstream os;
  os << "x";
  for (int j = 0; j < w.dim(); ++j) os << ",u" << (j + 1);
  os << "\n";
  char buf[32];
  for (int i = 0; i < w.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", w.x(i));
    os << buf;
    for (int j = 0; j < w.dim(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", w(i, j));
      os << "," << buf;
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace frontlab
