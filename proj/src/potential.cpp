#include "frontlab/potential.hpp"

#include "frontlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace frontlab {

std::string to_string(PotentialFamily family) {
  switch (family) {
    case PotentialFamily::fisher:
      return "fisher";
    case PotentialFamily::quintic_ginzburg_landau:
      return "quintic_gl";
    case PotentialFamily::polynomial:
      return "polynomial";
  }
  return "unknown";
}

namespace {

double ipow(double x, int n) {
  double r = 1.0;
  for (int k = 0; k < n; ++k) r *= x;
  return r;
}

}  // namespace

PotentialSpec::PotentialSpec(int dim, std::vector<Monomial> terms,
                             PotentialFamily family,
                             std::map<std::string, double> parameters)
    : dim_(dim),
      terms_(std::move(terms)),
      family_(family),
      parameters_(std::move(parameters)) {
  if (dim_ < 1) throw InvalidArgument("potential dimension must be positive");
  for (const auto& t : terms_) {
    if (static_cast<int>(t.powers.size()) != dim_)
      throw InvalidArgument("monomial power list does not match the dimension");
    for (int p : t.powers)
      if (p < 0) throw InvalidArgument("monomial powers must be nonnegative");
  }
  if (dim_ == 1) {
    int degree = 0;
    for (const auto& t : terms_) degree = std::max(degree, t.powers[0]);
    coeffs1_.assign(degree + 1, 0.0);
    for (const auto& t : terms_) coeffs1_[t.powers[0]] += t.coefficient;
  }
}

double PotentialSpec::value1(double u) const {
  double r = 0.0;
  for (auto it = coeffs1_.rbegin(); it != coeffs1_.rend(); ++it) r = r * u + *it;
  return r;
}

double PotentialSpec::derivative1(double u) const {
  double r = 0.0;
  for (std::size_t k = coeffs1_.size(); k-- > 1;) r = r * u + static_cast<double>(k) * coeffs1_[k];
  return r;
}

double PotentialSpec::second_derivative1(double u) const {
  double r = 0.0;
  for (std::size_t k = coeffs1_.size(); k-- > 2;)
    r = r * u + static_cast<double>(k * (k - 1)) * coeffs1_[k];
  return r;
}

double PotentialSpec::value(std::span<const double> u) const {
  if (dim_ == 1) return value1(u[0]);
  double v = 0.0;
  for (const auto& t : terms_) {
    double m = t.coefficient;
    for (int j = 0; j < dim_; ++j) m *= ipow(u[j], t.powers[j]);
    v += m;
  }
  return v;
}

void PotentialSpec::gradient(std::span<const double> u, std::span<double> out) const {
  if (dim_ == 1) {
    out[0] = derivative1(u[0]);
    return;
  }
  std::fill(out.begin(), out.begin() + dim_, 0.0);
  for (const auto& t : terms_) {
    for (int j = 0; j < dim_; ++j) {
      if (t.powers[j] == 0) continue;
      double m = t.coefficient * t.powers[j] * ipow(u[j], t.powers[j] - 1);
      for (int l = 0; l < dim_; ++l)
        if (l != j) m *= ipow(u[l], t.powers[l]);
      out[j] += m;
    }
  }
}

void PotentialSpec::hessian(std::span<const double> u, std::span<double> out) const {
  if (dim_ == 1) {
    out[0] = second_derivative1(u[0]);
    return;
  }
  std::fill(out.begin(), out.begin() + dim_ * dim_, 0.0);
  for (const auto& t : terms_) {
    for (int j = 0; j < dim_; ++j) {
      for (int k = j; k < dim_; ++k) {
        double m = t.coefficient;
        if (j == k) {
          const int p = t.powers[j];
          if (p < 2) continue;
          m *= p * (p - 1) * ipow(u[j], p - 2);
        } else {
          const int pj = t.powers[j];
          const int pk = t.powers[k];
          if (pj == 0 || pk == 0) continue;
          m *= pj * ipow(u[j], pj - 1) * pk * ipow(u[k], pk - 1);
        }
        for (int l = 0; l < dim_; ++l)
          if (l != j && l != k) m *= ipow(u[l], t.powers[l]);
        out[j * dim_ + k] += m;
        if (j != k) out[k * dim_ + j] += m;
      }
    }
  }
}

double PotentialSpec::value(const Vec& u) const {
  return value(std::span<const double>(u.data(), u.size()));
}

Vec PotentialSpec::gradient(const Vec& u) const {
  Vec g(dim_);
  gradient(std::span<const double>(u.data(), u.size()), std::span<double>(g.data(), dim_));
  return g;
}

Mat PotentialSpec::hessian(const Vec& u) const {
  Mat h(dim_, dim_);
  std::vector<double> buf(dim_ * dim_);
  hessian(std::span<const double>(u.data(), u.size()), buf);
  for (int j = 0; j < dim_; ++j)
    for (int k = 0; k < dim_; ++k) h(j, k) = buf[j * dim_ + k];
  return h;
}

PotentialSpec PotentialSpec::with_global_minimum(GlobalMinimum m) const {
  PotentialSpec copy = *this;
  copy.global_min_ = std::move(m);
  return copy;
}

PotentialSpec make_fisher(double nu) {
  if (!(nu > 0.0) || !std::isfinite(nu))
    throw InvalidArgument("Fisher parameter nu must be positive");
  std::vector<Monomial> terms = {
      {-0.5, {2}},
      {(1.0 - 1.0 / nu) / 3.0, {3}},
      {1.0 / (4.0 * nu), {4}},
  };
  PotentialSpec p(1, std::move(terms), PotentialFamily::fisher, {{"nu", nu}});
  // Local minima sit at u = 1 and u = -nu.
  const double v_right = p.value1(1.0);
  const double v_left = p.value1(-nu);
  GlobalMinimum m;
  m.point = Vec::Constant(1, v_right <= v_left ? 1.0 : -nu);
  m.value = std::min(v_right, v_left);
  return p.with_global_minimum(std::move(m));
}

PotentialSpec make_quintic_gl(double mu1) {
  std::vector<Monomial> terms = {{0.5 * mu1, {2}}, {-0.25, {4}}, {1.0 / 6.0, {6}}};
  PotentialSpec p(1, std::move(terms), PotentialFamily::quintic_ginzburg_landau,
                  {{"mu1", mu1}});
  GlobalMinimum m;
  m.point = Vec::Zero(1);
  m.value = 0.0;
  const double disc = 1.0 - 4.0 * mu1;
  if (disc >= 0.0) {
    const double u2 = 0.5 * (1.0 + std::sqrt(disc));
    const double u = std::sqrt(u2);
    if (p.value1(u) < m.value) {
      m.value = p.value1(u);
      m.point(0) = u;
    }
  }
  return p.with_global_minimum(std::move(m));
}

PotentialSpec make_quadratic(const std::vector<double>& mus) {
  const int d = static_cast<int>(mus.size());
  std::vector<Monomial> terms;
  for (int j = 0; j < d; ++j) {
    Monomial m{0.5 * mus[j], std::vector<int>(d, 0)};
    m.powers[j] = 2;
    terms.push_back(m);
  }
  PotentialSpec p(d, std::move(terms));
  return p.with_global_minimum(search_global_minimum(p, -3.0, 3.0, d == 1 ? 41 : 11));
}

PotentialSpec make_separable(const std::vector<PotentialSpec>& parts) {
  const int d = static_cast<int>(parts.size());
  std::vector<Monomial> terms;
  for (int j = 0; j < d; ++j) {
    if (parts[j].dim() != 1) throw InvalidArgument("separable parts must be scalar");
    for (const auto& t : parts[j].terms()) {
      Monomial m{t.coefficient, std::vector<int>(d, 0)};
      m.powers[j] = t.powers[0];
      terms.push_back(m);
    }
  }
  PotentialSpec p(d, std::move(terms));
  bool all_known = true;
  GlobalMinimum m;
  m.point = Vec::Zero(d);
  for (int j = 0; j < d; ++j) {
    const auto& gm = parts[j].global_minimum();
    if (!gm) {
      all_known = false;
      break;
    }
    m.value += gm->value;
    m.point(j) = gm->point(0);
    m.on_boundary = m.on_boundary || gm->on_boundary;
  }
  if (all_known) return p.with_global_minimum(std::move(m));
  return p.with_global_minimum(search_global_minimum(p, -3.0, 3.0, 11));
}

PotentialSpec make_polynomial(int dim, std::vector<Monomial> terms, double box_lo,
                              double box_hi) {
  PotentialSpec p(dim, std::move(terms));
  return p.with_global_minimum(
      search_global_minimum(p, box_lo, box_hi, dim == 1 ? 81 : (dim == 2 ? 21 : 7)));
}

namespace {

struct LocalMinResult {
  Vec point;
  double value;
  bool on_boundary;
  bool converged;
};

Vec project(const Vec& x, double lo, double hi) {
  return x.cwiseMax(lo).cwiseMin(hi);
}

// Box-projected damped Newton with a Levenberg shift on non-convex Hessians.
LocalMinResult local_minimize(const PotentialSpec& p, Vec x, double lo, double hi) {
  double fx = p.value(x);
  bool converged = false;
  for (int it = 0; it < 200; ++it) {
    const Vec g = p.gradient(x);
    Eigen::SelfAdjointEigenSolver<Mat> es(p.hessian(x));
    const double lmin = es.eigenvalues()(0);
    const double shift = lmin > 1e-8 ? 0.0 : -lmin + 1e-3 * (1.0 + g.norm());
    Vec step = -(es.eigenvectors() *
                 (es.eigenvalues().array() + shift).inverse().matrix().asDiagonal() *
                 es.eigenvectors().transpose() * g);
    // Components pushing outward at an active bound are dropped.
    for (int j = 0; j < x.size(); ++j)
      if ((x(j) <= lo && step(j) < 0) || (x(j) >= hi && step(j) > 0)) step(j) = 0.0;
    double t = 1.0;
    Vec trial = project(x + step, lo, hi);
    double ft = p.value(trial);
    while (ft > fx - 1e-4 * t * std::abs(g.dot(step)) && t > 1e-12) {
      t *= 0.5;
      trial = project(x + t * step, lo, hi);
      ft = p.value(trial);
    }
    if (!(ft <= fx)) break;
    const double moved = (trial - x).norm();
    x = trial;
    fx = ft;
    Vec gp = p.gradient(x);
    for (int j = 0; j < x.size(); ++j)
      if ((x(j) <= lo && gp(j) > 0) || (x(j) >= hi && gp(j) < 0)) gp(j) = 0.0;
    if (gp.norm() < 1e-12 || moved < 1e-15 * (1.0 + x.norm())) {
      converged = true;
      break;
    }
  }
  bool boundary = false;
  for (int j = 0; j < x.size(); ++j)
    if (x(j) <= lo + 1e-12 || x(j) >= hi - 1e-12) boundary = true;
  return {x, fx, boundary, converged};
}

template <class F>
void for_each_grid_start(int dim, double lo, double hi, int per_dim, F&& f) {
  std::vector<int> idx(dim, 0);
  Vec x(dim);
  while (true) {
    for (int j = 0; j < dim; ++j)
      x(j) = per_dim == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * idx[j] / (per_dim - 1);
    f(x);
    int j = 0;
    while (j < dim && ++idx[j] == per_dim) idx[j++] = 0;
    if (j == dim) break;
  }
}

}  // namespace

GlobalMinimum search_global_minimum(const PotentialSpec& p, double lo, double hi,
                                    int starts_per_dim) {
  if (!(hi > lo)) throw InvalidArgument("empty search box");
  GlobalMinimum best;
  best.value = std::numeric_limits<double>::infinity();
  for_each_grid_start(p.dim(), lo, hi, starts_per_dim, [&](const Vec& x0) {
    const auto r = local_minimize(p, x0, lo, hi);
    if (r.value < best.value) {
      best.value = r.value;
      best.point = r.point;
      best.on_boundary = r.on_boundary;
    }
  });
  return best;
}

std::vector<Vec> find_local_minima(const PotentialSpec& p, double lo, double hi,
                                   int starts_per_dim) {
  std::vector<Vec> minima;
  for_each_grid_start(p.dim(), lo, hi, starts_per_dim, [&](const Vec& x0) {
    const auto r = local_minimize(p, x0, lo, hi);
    if (r.on_boundary || !r.converged) return;
    Vec x = r.point;
    try {
      x = find_critical_point(p, x).location;
    } catch (const NumericalFailure&) {
      return;
    }
    if (curvatures(p, x).values(0) <= 0.0) return;
    for (const auto& m : minima)
      if ((m - x).norm() < 1e-6) return;
    minima.push_back(x);
  });
  std::sort(minima.begin(), minima.end(), [](const Vec& a, const Vec& b) {
    for (int j = 0; j < a.size(); ++j)
      if (a(j) != b(j)) return a(j) < b(j);
    return false;
  });
  return minima;
}

Spectrum curvatures(const PotentialSpec& p, const Vec& e) {
  Mat h = p.hessian(e);
  h = 0.5 * (h + h.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  return {es.eigenvalues(), es.eigenvectors()};
}

CriticalPoint find_critical_point(const PotentialSpec& p, const Vec& guess,
                                  const NewtonOptions& opts) {
  if (guess.size() != p.dim()) throw InvalidArgument("guess has the wrong dimension");
  Vec x = guess;
  Vec g = p.gradient(x);
  double gnorm = g.norm();
  int it = 0;
  for (; it < opts.max_iterations && gnorm >= opts.tolerance; ++it) {
    const Mat h = p.hessian(x);
    Eigen::FullPivLU<Mat> lu(h);
    const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    if (!lu.isInvertible() ||
        std::abs(lu.determinant()) < 1e-14 * std::pow(scale, p.dim()))
      throw NumericalFailure("singular Hessian during critical-point Newton iteration");
    const Vec step = lu.solve(-g);
    double t = 1.0;
    Vec trial = x + step;
    double tnorm = p.gradient(trial).norm();
    while (!(tnorm < gnorm) && t > 1e-10) {
      t *= 0.5;
      trial = x + t * step;
      tnorm = p.gradient(trial).norm();
    }
    if (!(tnorm < gnorm)) break;
    x = trial;
    g = p.gradient(x);
    gnorm = g.norm();
  }
  // A residual at the rounding floor of |grad V| counts as converged.
  double floor = 0.0;
  for (const auto& t : p.terms()) {
    double m = std::abs(t.coefficient);
    int deg = 0;
    for (int j = 0; j < p.dim(); ++j) {
      m *= ipow(std::abs(x(j)), t.powers[j]);
      deg += t.powers[j];
    }
    floor += deg * m;
  }
  floor = 64.0 * std::numeric_limits<double>::epsilon() * floor / std::max(1e-300, x.norm());
  if (gnorm >= std::max(opts.tolerance, floor))
    throw NumericalFailure("critical-point Newton iteration did not converge (|grad V| = " +
                           std::to_string(gnorm) + ")");
  CriticalPoint cp;
  cp.location = x;
  cp.residual = gnorm;
  cp.spectrum = curvatures(p, x);
  cp.c_lin = cp.mu1() < 0.0 ? 2.0 * std::sqrt(-cp.mu1()) : 0.0;
  cp.value = p.value(x);
  return cp;
}

double check_coercivity(const PotentialSpec& p, double radius, int samples) {
  if (!(radius > 0.0)) throw InvalidArgument("coercivity radius must be positive");
  const int d = p.dim();
  std::vector<Vec> dirs;
  int n_radii = 0;
  if (d == 1) {
    dirs = {Vec::Constant(1, 1.0), Vec::Constant(1, -1.0)};
    n_radii = std::max(2, samples / 2);
  } else {
    n_radii = 16;
    const int n_dirs = std::max(2, samples / n_radii);
    std::mt19937_64 rng(20240611);
    std::normal_distribution<double> normal;
    for (int k = 0; k < n_dirs; ++k) {
      Vec v(d);
      for (int j = 0; j < d; ++j) v(j) = normal(rng);
      dirs.push_back(v.normalized());
    }
  }
  double inf = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n_radii; ++k) {
    const double r = radius * std::pow(10.0, static_cast<double>(k) / (n_radii - 1));
    for (const auto& s : dirs) {
      const Vec u = r * s;
      inf = std::min(inf, u.dot(p.gradient(u)) / u.squaredNorm());
    }
  }
  return inf;
}

}  // namespace frontlab
