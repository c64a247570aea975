#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "hypersign/error.hpp"
#include "hypersign/rng.hpp"

namespace hypersign {

inline constexpr double kDefaultBallEps = 1e-5;
inline constexpr double kDefaultInitRadius = 1e-3;

// Smallest value distances/denominators are clamped to near the boundary,
// where 1 - ||u||^2 underflows and the exact formulas produce NaN.
inline constexpr double kGuard = 1e-15;

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double squared_norm(std::span<const double> v) { return dot(v, v); }

inline double norm(std::span<const double> v) { return std::sqrt(squared_norm(v)); }

inline double arcosh(double x) { return std::log(x + std::sqrt(x * x - 1.0)); }

namespace detail {

inline double gamma_of(std::span<const double> u, std::span<const double> v,
                       double& alpha, double& beta) {
  alpha = 1.0 - squared_norm(u);
  beta = 1.0 - squared_norm(v);
  if (alpha < kGuard) alpha = kGuard;
  if (beta < kGuard) beta = kGuard;
  double diff2 = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    double d = u[i] - v[i];
    diff2 += d * d;
  }
  double gamma = 1.0 + 2.0 * diff2 / (alpha * beta);
  return gamma < 1.0 ? 1.0 : gamma;
}

}  // namespace detail

// d(u,v) = arcosh(1 + 2||u-v||^2 / ((1-||u||^2)(1-||v||^2)))
inline double poincare_distance(std::span<const double> u, std::span<const double> v) {
  double alpha, beta;
  return arcosh(detail::gamma_of(u, v, alpha, beta));
}

// Euclidean gradient of poincare_distance w.r.t. both arguments, written
// into du/dv. The closed form is the derivative of the distance above;
// its correctness contract is agreement with central finite differences.
inline void poincare_distance_grad(std::span<const double> u, std::span<const double> v,
                                   std::span<double> du, std::span<double> dv) {
  double alpha, beta;
  double gamma = detail::gamma_of(u, v, alpha, beta);
  if (gamma == 1.0)
    throw Error("distance gradient is singular at coincident points");
  double root = std::sqrt(std::max(gamma * gamma - 1.0, kGuard));
  double uu = squared_norm(u), vv = squared_norm(v), uv = dot(u, v);

  double cu = 4.0 / (beta * root);
  double au = (vv - 2.0 * uv + 1.0) / (alpha * alpha);
  double cv = 4.0 / (alpha * root);
  double av = (uu - 2.0 * uv + 1.0) / (beta * beta);
  for (std::size_t i = 0; i < u.size(); ++i) {
    du[i] = cu * (au * u[i] - v[i] / alpha);
    dv[i] = cv * (av * v[i] - u[i] / beta);
  }
}

// Metric conversion: Riemannian gradient = ((1-||theta||^2)^2 / 4) * Euclidean.
inline void to_riemannian_in_place(std::span<const double> theta, std::span<double> grad) {
  double factor = 1.0 - squared_norm(theta);
  factor = factor * factor / 4.0;
  for (double& g : grad) g *= factor;
}

// Keeps points strictly inside the ball: anything at norm >= 1-eps is pulled
// back onto the sphere of radius 1-eps along its own ray.
inline void project_to_ball(std::span<double> theta, double eps) {
  double limit = 1.0 - eps;
  double n2 = squared_norm(theta);
  if (n2 < limit * limit) return;
  double n = std::sqrt(n2);
  if (n == 0.0) return;
  double scale = limit / n;
  for (double& x : theta) x *= scale;
}

// First-order retraction: theta + step, then projection.
inline void retract_simple(std::span<double> theta, std::span<const double> step, double eps) {
  for (std::size_t i = 0; i < theta.size(); ++i) theta[i] += step[i];
  project_to_ball(theta, eps);
}

namespace detail {

// Mobius addition on the unit ball.
inline void mobius_add(std::span<const double> x, std::span<const double> y,
                       std::span<double> out) {
  double xy = dot(x, y), xx = squared_norm(x), yy = squared_norm(y);
  double denom = 1.0 + 2.0 * xy + xx * yy;
  if (std::abs(denom) < kGuard) denom = denom < 0 ? -kGuard : kGuard;
  double cx = (1.0 + 2.0 * xy + yy) / denom;
  double cy = (1.0 - xx) / denom;
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = cx * x[i] + cy * y[i];
}

}  // namespace detail

// Exponential-map retraction: follows the geodesic from theta with initial
// velocity `step`. Agrees with retract_simple to second order in ||step||;
// from the origin it lands at Euclidean radius tanh(||step||).
inline void retract_exp(std::span<double> theta, std::span<const double> step, double eps) {
  double n = norm(step);
  if (n == 0.0) return;
  double lambda = 2.0 / std::max(1.0 - squared_norm(theta), kGuard);
  double scale = std::tanh(lambda * n / 2.0) / n;
  std::vector<double> w(step.size()), out(step.size());
  for (std::size_t i = 0; i < step.size(); ++i) w[i] = scale * step[i];
  detail::mobius_add(theta, w, out);
  for (std::size_t i = 0; i < theta.size(); ++i) theta[i] = out[i];
  project_to_ball(theta, eps);
}

// Allocating convenience wrappers.

inline std::vector<double> to_riemannian(std::span<const double> theta,
                                         std::span<const double> euclid_grad) {
  std::vector<double> g(euclid_grad.begin(), euclid_grad.end());
  to_riemannian_in_place(theta, g);
  return g;
}

inline std::vector<double> project(std::span<const double> theta, double eps) {
  std::vector<double> p(theta.begin(), theta.end());
  project_to_ball(p, eps);
  return p;
}

inline std::vector<double> retract_simple_at(std::span<const double> theta,
                                             std::span<const double> step, double eps) {
  std::vector<double> p(theta.begin(), theta.end());
  retract_simple(p, step, eps);
  return p;
}

inline std::vector<double> retract_exp_at(std::span<const double> theta,
                                          std::span<const double> step, double eps) {
  std::vector<double> p(theta.begin(), theta.end());
  retract_exp(p, step, eps);
  return p;
}

// Dense row-major matrix of ball points. Row count is fixed at
// construction; updates go through retract/project so rows stay inside
// the 1-eps shell.
class EmbeddingStore {
 public:
  EmbeddingStore(std::size_t rows, std::size_t dim, double eps = kDefaultBallEps)
      : rows_(rows), dim_(dim), eps_(eps), data_(rows * dim, 0.0) {
    if (dim == 0) throw Error("embedding dimension must be >= 1");
    if (eps <= 0 || eps >= 0.1) throw Error("ball eps must lie in (0, 0.1)");
  }

  std::size_t rows() const { return rows_; }
  std::size_t dim() const { return dim_; }
  double eps() const { return eps_; }

  std::span<double> row(std::size_t i) {
    check_row(i);
    return {data_.data() + i * dim_, dim_};
  }
  std::span<const double> row(std::size_t i) const {
    check_row(i);
    return {data_.data() + i * dim_, dim_};
  }

  double row_norm(std::size_t i) const { return norm(row(i)); }

  double max_row_norm() const {
    double m = 0;
    for (std::size_t i = 0; i < rows_; ++i) m = std::max(m, row_norm(i));
    return m;
  }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  friend bool operator==(const EmbeddingStore& a, const EmbeddingStore& b) {
    return a.rows_ == b.rows_ && a.dim_ == b.dim_ && a.data_ == b.data_;
  }

 private:
  void check_row(std::size_t i) const {
    if (i >= rows_)
      throw Error("embedding row " + std::to_string(i) + " out of range");
  }

  std::size_t rows_, dim_;
  double eps_;
  std::vector<double> data_;
};

// Coordinates uniform in [-r/sqrt(K), r/sqrt(K)], so every row starts with
// norm <= r, well inside the ball.
inline EmbeddingStore init_embeddings(std::size_t rows, std::size_t dim,
                                      double init_radius, std::uint64_t seed,
                                      double eps = kDefaultBallEps) {
  if (init_radius <= 0 || init_radius >= 1)
    throw Error("init radius must lie in (0, 1)");
  EmbeddingStore store(rows, dim, eps);
  RandomEngine rng(seed);
  double bound = init_radius / std::sqrt(static_cast<double>(dim));
  for (double& x : store.data()) x = rng.uniform(-bound, bound);
  return store;
}

}  // namespace hypersign
