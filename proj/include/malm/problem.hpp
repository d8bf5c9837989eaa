#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "malm/linalg.hpp"
#include "malm/rng.hpp"

namespace malm {

enum class Family { regression, quadratic };

inline std::string family_name(Family f) {
  return f == Family::regression ? "regression" : "quadratic";
}

struct KktPair {
  Vector x;
  Vector mu;
};

// A linearly constrained stochastic problem: minimize f(x) subject to Ax = b,
// with an unbiased stochastic gradient oracle. Two families:
//   regression  - finite-sum exponential squared loss
//                 f(x) = (1/N) sum_i (1 - exp(-(a_i^T x - y_i)^2))
//   quadratic   - f(x) = 0.5 x^T Q x + c^T x with additive Gaussian oracle
//                 noise of covariance (sigma^2/d) I and an analytic KKT pair.
struct ConstrainedProblem {
  Family family = Family::quadratic;
  Index d = 0;
  Index N = 0;  // sample count (regression only)
  Index m = 0;

  Matrix A;  // m x d
  Vector b;  // m
  Vector x_feas;  // b = A * x_feas by construction

  double L = 0.0;        // smoothness constant
  double f_lower = 0.0;  // lower bound on f
  double sigma = 0.0;    // oracle noise level (exact for quadratic, estimated for regression)
  std::uint64_t seed = 0;

  // regression data
  Matrix D;  // N x d
  Vector y;  // N
  Vector x_gen;  // sparse ground truth behind the labels
  double sparsity = 0.0;
  double label_noise_std = 0.0;

  // quadratic data
  Matrix Q;  // d x d, symmetric positive definite
  Vector c;  // d
  double condition = 0.0;
  std::optional<KktPair> kkt;
};

struct GradientSample {
  Vector value;
  std::uint64_t draws_consumed = 1;
};

// One fresh sample evaluated at two points (used by the recursive-momentum
// estimator, which differences the same sample at the new and old iterate).
struct GradientSamplePair {
  Vector at_first;
  Vector at_second;
  std::uint64_t draws_consumed = 2;
};

inline void require_dim(const ConstrainedProblem& p, const Vector& x, const char* op) {
  if (x.size() != p.d) throw std::invalid_argument(std::string(op) + ": dimension mismatch");
}

inline double objective(const ConstrainedProblem& p, const Vector& x) {
  require_dim(p, x, "objective");
  if (p.family == Family::quadratic) {
    return 0.5 * x.dot(p.Q * x) + p.c.dot(x);
  }
  const Vector r = p.D * x - p.y;
  double sum = 0.0;
  for (Index i = 0; i < r.size(); ++i) sum += 1.0 - std::exp(-r[i] * r[i]);
  return sum / static_cast<double>(p.N);
}

inline Vector full_gradient(const ConstrainedProblem& p, const Vector& x) {
  require_dim(p, x, "full_gradient");
  if (p.family == Family::quadratic) {
    return p.Q * x + p.c;
  }
  Vector r = p.D * x - p.y;
  for (Index i = 0; i < r.size(); ++i) r[i] = 2.0 * r[i] * std::exp(-r[i] * r[i]);
  return p.D.transpose() * r / static_cast<double>(p.N);
}

inline GradientSample stochastic_gradient(const ConstrainedProblem& p, const Vector& x,
                                          RngStream& rng) {
  require_dim(p, x, "stochastic_gradient");
  GradientSample g;
  g.draws_consumed = 1;
  if (p.family == Family::quadratic) {
    g.value = p.Q * x + p.c;
    if (p.sigma > 0.0) {
      const double scale = p.sigma / std::sqrt(static_cast<double>(p.d));
      for (Index j = 0; j < p.d; ++j) g.value[j] += scale * rng.normal();
    }
    return g;
  }
  const std::size_t i = rng.uniform_index(static_cast<std::size_t>(p.N));
  const auto row = p.D.row(static_cast<Index>(i));
  const double r = row.dot(x) - p.y[static_cast<Index>(i)];
  g.value = (2.0 * r * std::exp(-r * r)) * row.transpose();
  return g;
}

// Same sample, two evaluation points; consumes the same randomness as one
// stochastic_gradient call but counts as two oracle evaluations.
inline GradientSamplePair stochastic_gradient_pair(const ConstrainedProblem& p, const Vector& x1,
                                                   const Vector& x2, RngStream& rng) {
  require_dim(p, x1, "stochastic_gradient_pair");
  require_dim(p, x2, "stochastic_gradient_pair");
  GradientSamplePair g;
  g.draws_consumed = 2;
  if (p.family == Family::quadratic) {
    Vector z = Vector::Zero(p.d);
    if (p.sigma > 0.0) {
      const double scale = p.sigma / std::sqrt(static_cast<double>(p.d));
      for (Index j = 0; j < p.d; ++j) z[j] = scale * rng.normal();
    }
    g.at_first = p.Q * x1 + p.c + z;
    g.at_second = p.Q * x2 + p.c + z;
    return g;
  }
  const std::size_t i = rng.uniform_index(static_cast<std::size_t>(p.N));
  const auto row = p.D.row(static_cast<Index>(i));
  const double r1 = row.dot(x1) - p.y[static_cast<Index>(i)];
  const double r2 = row.dot(x2) - p.y[static_cast<Index>(i)];
  g.at_first = (2.0 * r1 * std::exp(-r1 * r1)) * row.transpose();
  g.at_second = (2.0 * r2 * std::exp(-r2 * r2)) * row.transpose();
  return g;
}

// Smoothness constant from the stored data:
//   regression: L = (2/N) sigma_max(D)^2   (|phi''| <= 2 for phi(t) = 1 - exp(-t^2))
//   quadratic:  L = sigma_max(Q)
inline double estimate_smoothness(const ConstrainedProblem& p) {
  if (p.family == Family::quadratic) return spectral_norm(p.Q);
  const double s = spectral_norm(p.D);
  return 2.0 / static_cast<double>(p.N) * s * s;
}

// Empirical oracle noise level for the regression family: the largest
// root-mean-square deviation of the single-sample gradient from the full
// gradient, over `points` standard-Gaussian evaluation points with `draws`
// samples each. Diagnostics only; never consumed by the parameter schedule.
inline double estimate_sigma(const ConstrainedProblem& p, RngStream& rng, int points = 20,
                             int draws = 10000) {
  if (p.family != Family::regression)
    throw std::invalid_argument("estimate_sigma: regression family only");
  Vector row_sq(p.N);
  for (Index i = 0; i < p.N; ++i) row_sq[i] = p.D.row(i).squaredNorm();
  double worst = 0.0;
  for (int pt = 0; pt < points; ++pt) {
    Vector x(p.d);
    for (Index j = 0; j < p.d; ++j) x[j] = rng.normal();
    const Vector grad = full_gradient(p, x);
    const double grad_sq = grad.squaredNorm();
    Vector w = p.D * x - p.y;
    Vector dot_grad = p.D * grad;
    for (Index i = 0; i < p.N; ++i) w[i] = 2.0 * w[i] * std::exp(-w[i] * w[i]);
    double acc = 0.0;
    for (int k = 0; k < draws; ++k) {
      const Index i = static_cast<Index>(rng.uniform_index(static_cast<std::size_t>(p.N)));
      // ||w_i a_i - grad||^2 expanded so each draw costs O(1)
      acc += w[i] * w[i] * row_sq[i] - 2.0 * w[i] * dot_grad[i] + grad_sq;
    }
    worst = std::max(worst, acc / static_cast<double>(draws));
  }
  return std::sqrt(worst);
}

inline ConstrainedProblem generate_regression(Index d, Index N, Index m, double sparsity,
                                              double label_noise_std, std::uint64_t seed) {
  if (m <= 0 || m >= d) throw std::invalid_argument("generate_regression: ill-posed constraint (need 0 < m < d)");
  if (N <= 0) throw std::invalid_argument("generate_regression: need N >= 1");
  if (!(sparsity > 0.0 && sparsity <= 1.0))
    throw std::invalid_argument("generate_regression: sparsity must be in (0, 1]");
  if (label_noise_std < 0.0)
    throw std::invalid_argument("generate_regression: negative label noise");

  ConstrainedProblem p;
  p.family = Family::regression;
  p.d = d;
  p.N = N;
  p.m = m;
  p.seed = seed;
  p.sparsity = sparsity;
  p.label_noise_std = label_noise_std;
  p.f_lower = 0.0;

  RngStream data_rng(seed, 0);
  p.D = Matrix(N, d);
  for (Index i = 0; i < N; ++i)
    for (Index j = 0; j < d; ++j) p.D(i, j) = data_rng.normal();

  const Index nnz = static_cast<Index>(std::ceil(sparsity * static_cast<double>(d)));
  std::vector<Index> idx(static_cast<std::size_t>(d));
  for (Index j = 0; j < d; ++j) idx[static_cast<std::size_t>(j)] = j;
  p.x_gen = Vector::Zero(d);
  for (Index k = 0; k < nnz; ++k) {
    const std::size_t pick = static_cast<std::size_t>(k) +
                             data_rng.uniform_index(static_cast<std::size_t>(d - k));
    std::swap(idx[static_cast<std::size_t>(k)], idx[pick]);
  }
  for (Index k = 0; k < nnz; ++k) p.x_gen[idx[static_cast<std::size_t>(k)]] = data_rng.normal();

  p.y = p.D * p.x_gen;
  for (Index i = 0; i < N; ++i) p.y[i] += label_noise_std * data_rng.normal();

  RngStream constraint_rng(seed, 1);
  p.A = Matrix(m, d);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < d; ++j) p.A(i, j) = constraint_rng.normal();
  p.x_feas = Vector(d);
  for (Index j = 0; j < d; ++j) p.x_feas[j] = constraint_rng.normal();
  p.b = p.A * p.x_feas;

  p.L = estimate_smoothness(p);
  RngStream sigma_rng(seed, 2);
  p.sigma = estimate_sigma(p, sigma_rng);
  return p;
}

// Solves the stationarity/feasibility system [Q A^T; A 0] (x, mu) = (-c, b).
inline KktPair solve_kkt(const Matrix& Q, const Matrix& A, const Vector& c, const Vector& b) {
  const Index d = Q.rows();
  const Index m = A.rows();
  Matrix S = Matrix::Zero(d + m, d + m);
  S.topLeftCorner(d, d) = Q;
  S.topRightCorner(d, m) = A.transpose();
  S.bottomLeftCorner(m, d) = A;
  Vector rhs(d + m);
  rhs.head(d) = -c;
  rhs.tail(m) = b;
  Eigen::PartialPivLU<Matrix> lu(S);
  const Vector sol = lu.solve(rhs);
  if (!sol.allFinite() || (S * sol - rhs).norm() > 1e-8 * (1.0 + rhs.norm()))
    throw std::runtime_error("solve_kkt: singular or ill-conditioned KKT system");
  KktPair k;
  k.x = sol.head(d);
  k.mu = sol.tail(m);
  return k;
}

inline ConstrainedProblem generate_quadratic(Index d, Index m, double condition, double sigma,
                                             std::uint64_t seed) {
  if (m <= 0 || m >= d) throw std::invalid_argument("generate_quadratic: need 0 < m < d");
  if (condition < 1.0) throw std::invalid_argument("generate_quadratic: condition must be >= 1");
  if (sigma < 0.0) throw std::invalid_argument("generate_quadratic: negative sigma");

  ConstrainedProblem p;
  p.family = Family::quadratic;
  p.d = d;
  p.N = 0;
  p.m = m;
  p.seed = seed;
  p.sigma = sigma;
  p.condition = condition;

  RngStream data_rng(seed, 0);
  Matrix G(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) G(i, j) = data_rng.normal();
  const Matrix Qo = Eigen::HouseholderQR<Matrix>(G).householderQ();
  Vector eigs(d);
  for (Index j = 0; j < d; ++j) {
    const double t = d == 1 ? 0.0 : static_cast<double>(j) / static_cast<double>(d - 1);
    eigs[j] = 1.0 + t * (condition - 1.0);
  }
  p.Q = Qo * eigs.asDiagonal() * Qo.transpose();
  p.Q = 0.5 * (p.Q + p.Q.transpose()).eval();
  p.c = Vector(d);
  for (Index j = 0; j < d; ++j) p.c[j] = data_rng.normal();

  RngStream constraint_rng(seed, 1);
  p.A = Matrix(m, d);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < d; ++j) p.A(i, j) = constraint_rng.normal();
  p.x_feas = Vector(d);
  for (Index j = 0; j < d; ++j) p.x_feas[j] = constraint_rng.normal();
  p.b = p.A * p.x_feas;

  p.L = estimate_smoothness(p);
  p.f_lower = -0.5 * p.c.dot(p.Q.llt().solve(p.c));
  p.kkt = solve_kkt(p.Q, p.A, p.c, p.b);
  return p;
}

}  // namespace malm
