#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "malm/rng.hpp"

namespace malm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Cached spectral quantities of a constraint matrix A for a fixed beta/eta
// ratio: the operator norm of A, the smallest nonzero eigenvalue of A^T A,
// and the norm of B = I - (beta/eta) A^T A.
struct SpectralInfo {
  double op_norm_A = 0.0;
  double lambda_min_nonzero = 0.0;
  double b_norm = 0.0;
  double beta_over_eta = 0.0;
};

inline void require_nonempty_finite(const Matrix& A, const char* op) {
  if (A.rows() == 0 || A.cols() == 0)
    throw std::invalid_argument(std::string(op) + ": empty matrix");
  if (!A.allFinite())
    throw std::runtime_error(std::string(op) + ": non-finite entry");
}

// Largest singular value of A. Power iteration on A^T A (applied as two
// matvecs, A^T A never formed), stopping when the relative Rayleigh-quotient
// change drops below 1e-12 or after 10,000 iterations.
inline double spectral_norm(const Matrix& A) {
  require_nonempty_finite(A, "spectral_norm");
  RngStream rng(0x5eedu, 0);
  Vector v(A.cols());
  for (Index i = 0; i < v.size(); ++i) v[i] = rng.normal();
  const double vn = v.norm();
  if (vn == 0.0) v[0] = 1.0; else v /= vn;

  double rayleigh = 0.0;
  for (int it = 0; it < 10000; ++it) {
    Vector w = A * v;
    const double lam = w.squaredNorm();  // v^T (A^T A) v for unit v
    Vector z = A.transpose() * w;
    const double zn = z.norm();
    if (zn == 0.0) return 0.0;
    v = z / zn;
    if (it > 0 && std::abs(lam - rayleigh) <= 1e-12 * std::max(lam, 1e-300)) {
      rayleigh = lam;
      break;
    }
    rayleigh = lam;
  }
  return std::sqrt(std::max(rayleigh, 0.0));
}

inline Eigen::VectorXd gram_eigenvalues(const Matrix& A) {
  const Matrix G = A * A.transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> es(G);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("gram_eigenvalues: eigensolver failed");
  return es.eigenvalues();  // ascending
}

// Smallest nonzero eigenvalue of A^T A, computed from the (smaller) matrix
// A A^T, which shares the nonzero spectrum. Eigenvalues at or below
// zero_tol * lambda_max are treated as numerical zeros.
inline double smallest_nonzero_eigenvalue(const Matrix& A, double zero_tol = 1e-10) {
  require_nonempty_finite(A, "smallest_nonzero_eigenvalue");
  const Eigen::VectorXd ev = gram_eigenvalues(A);
  const double lam_max = ev[ev.size() - 1];
  const double cutoff = zero_tol * std::max(lam_max, 0.0);
  for (Index i = 0; i < ev.size(); ++i) {
    if (ev[i] > cutoff && ev[i] > 0.0) return ev[i];
  }
  throw std::runtime_error("smallest_nonzero_eigenvalue: matrix is numerically zero");
}

// v - (beta/eta) A^T (A v), i.e. B v with B = I - (beta/eta) A^T A,
// evaluated without forming A^T A.
inline Vector apply_B(const Vector& v, const Matrix& A, double beta, double eta) {
  if (eta <= 0.0) throw std::invalid_argument("apply_B: eta must be positive");
  if (v.size() != A.cols()) throw std::invalid_argument("apply_B: dimension mismatch");
  return v - (beta / eta) * (A.transpose() * (A * v));
}

// ||B|| = max |1 - (beta/eta) lambda| over the eigenvalues lambda of A^T A.
// The eigenvalues come from A A^T; eigenvalue 0 is appended whenever
// cols(A) exceeds rank(A).
inline double b_matrix_norm(const Matrix& A, double beta, double eta, double zero_tol = 1e-10) {
  require_nonempty_finite(A, "b_matrix_norm");
  if (eta <= 0.0) throw std::invalid_argument("b_matrix_norm: eta must be positive");
  const double ratio = beta / eta;
  const Eigen::VectorXd ev = gram_eigenvalues(A);
  const double lam_max = ev[ev.size() - 1];
  const double cutoff = zero_tol * std::max(lam_max, 0.0);

  std::vector<double> lambdas;
  Index rank = 0;
  for (Index i = 0; i < ev.size(); ++i) {
    if (ev[i] > cutoff && ev[i] > 0.0) {
      lambdas.push_back(ev[i]);
      ++rank;
    }
  }
  if (A.cols() > rank) lambdas.push_back(0.0);

  double result = 0.0;
  for (double lam : lambdas) result = std::max(result, std::abs(1.0 - ratio * lam));
  return result;
}

inline SpectralInfo spectral_info(const Matrix& A, double beta_over_eta, double zero_tol = 1e-10) {
  require_nonempty_finite(A, "spectral_info");
  SpectralInfo s;
  s.beta_over_eta = beta_over_eta;
  const Eigen::VectorXd ev = gram_eigenvalues(A);
  const double lam_max = std::max(ev[ev.size() - 1], 0.0);
  s.op_norm_A = std::sqrt(lam_max);
  const double cutoff = zero_tol * lam_max;
  Index rank = 0;
  double lam_min_nz = 0.0;
  double bn = 0.0;
  for (Index i = 0; i < ev.size(); ++i) {
    if (ev[i] > cutoff && ev[i] > 0.0) {
      if (rank == 0) lam_min_nz = ev[i];
      lam_min_nz = std::min(lam_min_nz, ev[i]);
      bn = std::max(bn, std::abs(1.0 - beta_over_eta * ev[i]));
      ++rank;
    }
  }
  if (rank == 0) throw std::runtime_error("spectral_info: matrix is numerically zero");
  if (A.cols() > rank) bn = std::max(bn, 1.0);
  s.lambda_min_nonzero = lam_min_nz;
  s.b_norm = bn;
  return s;
}

}  // namespace malm
