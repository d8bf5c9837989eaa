#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "malm/linalg.hpp"
#include "malm/metrics.hpp"
#include "malm/problem.hpp"
#include "malm/schedule.hpp"
#include "malm/solver.hpp"

namespace malm {

// Outcome of one numeric check. Deterministic checks have n_samples = 0 and
// stderr_est = 0; Monte-Carlo checks report the standard error used in the
// pass rule lhs <= rhs + max(abs_tol, z * stderr), abs_tol = 1e-9 (1 + |rhs|).
struct InequalityReport {
  std::string check;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  std::uint64_t n_samples = 0;
  double stderr_est = 0.0;
  bool passed = false;
};

inline InequalityReport make_report(std::string name, double lhs, double rhs,
                                    std::uint64_t n_samples = 0, double stderr_est = 0.0,
                                    double z = 4.0) {
  InequalityReport r;
  r.check = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.slack = rhs - lhs;
  r.n_samples = n_samples;
  r.stderr_est = stderr_est;
  const double abs_tol = 1e-9 * (1.0 + std::abs(rhs));
  r.passed = lhs <= rhs + std::max(abs_tol, z * stderr_est);
  return r;
}

// Margin in units of the pass rule; the suite keeps the worst state per check.
inline double report_margin(const InequalityReport& r, double z = 4.0) {
  const double abs_tol = 1e-9 * (1.0 + std::abs(r.rhs));
  return r.slack + std::max(abs_tol, z * r.stderr_est);
}

// --- exact-identity checks -------------------------------------------------

// The dual update satisfies A^T mu^{r+1} = -m^r - eta B (x^{r+1} - x^r)
// exactly; reports the residual norm relative to 1 + ||m^r||.
inline InequalityReport check_dual_identity(const ConstrainedProblem& p, const MalmParams& params,
                                            const SolverState& before, const SolverState& after) {
  const Vector lhs_vec = p.A.transpose() * after.mu;
  const Vector rhs_vec =
      -before.m - params.eta * apply_B(after.x - before.x, p.A, params.beta, params.eta);
  const double resid = (lhs_vec - rhs_vec).norm() / (1.0 + before.m.norm());
  return make_report("dual-identity", resid, 1e-10);
}

// Augmented Lagrangian of the problem at (x, mu).
inline double aug_lagrangian(const ConstrainedProblem& p, const Vector& x, const Vector& mu,
                             double beta) {
  const Vector r = p.A * x - p.b;
  return objective(p, x) + mu.dot(r) + 0.5 * beta * r.squaredNorm();
}

// The proximal model phi(v) = L_beta(v, mu_r) + (eta/2)||v - x_r||^2 is
// (eta - L)-strongly convex when eta > L. Samples `trials` random pairs and
// reports the worst violation of the strong-convexity lower bound.
inline InequalityReport check_strong_convexity(const ConstrainedProblem& p,
                                               const MalmParams& params, const Vector& x_r,
                                               const Vector& mu_r, std::uint64_t trials,
                                               RngStream& rng) {
  if (p.family != Family::quadratic)
    throw std::invalid_argument("check_strong_convexity: quadratic family only");
  if (!(params.eta > p.L))
    throw std::invalid_argument("check_strong_convexity: requires eta > L");
  const double gamma = params.eta - p.L;
  auto phi = [&](const Vector& v) {
    return aug_lagrangian(p, v, mu_r, params.beta) + 0.5 * params.eta * (v - x_r).squaredNorm();
  };
  auto grad_phi = [&](const Vector& v) {
    return (full_gradient(p, v) + p.A.transpose() * (mu_r + params.beta * (p.A * v - p.b)) +
            params.eta * (v - x_r))
        .eval();
  };
  double worst = -1e300;
  for (std::uint64_t t = 0; t < trials; ++t) {
    Vector x(p.d), z(p.d);
    for (Index j = 0; j < p.d; ++j) x[j] = x_r[j] + rng.normal();
    for (Index j = 0; j < p.d; ++j) z[j] = x_r[j] + rng.normal();
    const Vector dxz = x - z;
    const double lower = phi(z) + grad_phi(z).dot(dxz) + 0.5 * gamma * dxz.squaredNorm();
    worst = std::max(worst, lower - phi(x));
  }
  return make_report("strong-convexity", worst, 0.0);
}

// <grad f(x^{r+1}) - m^r, x^{r+1} - x^r> is bounded by
// (alpha/2)||grad f(x^r) - m^r||^2 + (1/(2 alpha) + L)||x^{r+1} - x^r||^2.
inline InequalityReport check_gradient_cross_term(const ConstrainedProblem& p, double L,
                                                  double alpha, const SolverState& before,
                                                  const SolverState& after) {
  if (!(alpha > 0.0)) throw std::invalid_argument("check_gradient_cross_term: alpha must be positive");
  const Vector dx = after.x - before.x;
  const double lhs = (full_gradient(p, after.x) - before.m).dot(dx);
  const double rhs = 0.5 * alpha * (full_gradient(p, before.x) - before.m).squaredNorm() +
                     (0.5 / alpha + L) * dx.squaredNorm();
  return make_report("gradient-cross-term", lhs, rhs);
}

// Every recorded multiplier stays in the range of A (least-squares projection
// residual relative to 1 + ||mu||, against the documented 1e-8 bound).
inline InequalityReport check_range_invariant(const Matrix& A, const std::vector<Vector>& mus) {
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(A);
  double worst = 0.0;
  for (const Vector& mu : mus) {
    const Vector z = cod.solve(mu);
    const double resid = (A * z - mu).norm() / (1.0 + mu.norm());
    worst = std::max(worst, resid);
  }
  return make_report("range-invariant", worst, 1e-8);
}

// --- Monte-Carlo expectation checks (quadratic family: L and sigma exact) ---

// E||m^{r+1} - grad f(x^{r+1})||^2 <= (1-alpha)||m^r - grad f(x^r)||^2
//   + (L^2/alpha)||x^r - x^{r+1}||^2 + alpha^2 sigma^2,
// with x^{r+1} deterministic given the state, so the bound is deterministic.
inline InequalityReport mc_check_momentum_error(const ConstrainedProblem& p,
                                                const SolverState& state,
                                                const MalmParams& params,
                                                std::uint64_t n_resamples, RngStream& rng,
                                                double z = 4.0) {
  if (p.family != Family::quadratic)
    throw std::invalid_argument("mc_check_momentum_error: quadratic family only");
  if (n_resamples < 1000)
    throw std::invalid_argument("mc_check_momentum_error: underpowered (need n_resamples >= 1000)");

  SolverState next = state;
  primal_dual_update(next, params, p, {});
  const Vector grad_next = full_gradient(p, next.x);
  const double rhs = (1.0 - params.alpha) * (state.m - full_gradient(p, state.x)).squaredNorm() +
                     p.L * p.L / params.alpha * (state.x - next.x).squaredNorm() +
                     params.alpha * params.alpha * p.sigma * p.sigma;

  double sum = 0.0, sum_sq = 0.0;
  for (std::uint64_t i = 0; i < n_resamples; ++i) {
    const Vector g = stochastic_gradient(p, next.x, rng).value;
    const double v =
        ((1.0 - params.alpha) * state.m + params.alpha * g - grad_next).squaredNorm();
    sum += v;
    sum_sq += v * v;
  }
  const double n = static_cast<double>(n_resamples);
  const double mean = sum / n;
  const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
  return make_report("momentum-error", mean, rhs, n_resamples, std::sqrt(var / n), z);
}

// E||m^r - m^{r-1}||^2 <= (2 alpha^2/(1-alpha)^2)(E||grad f(x^r) - m^r||^2 + sigma^2),
// resampling the r-th oracle draw from the frozen (x^r, m^{r-1}).
inline InequalityReport mc_check_momentum_increment(const ConstrainedProblem& p, const Vector& x_r,
                                                    const Vector& m_prev, std::uint64_t r,
                                                    const MalmParams& params,
                                                    std::uint64_t n_resamples, RngStream& rng,
                                                    double z = 4.0) {
  if (p.family != Family::quadratic)
    throw std::invalid_argument("mc_check_momentum_increment: quadratic family only");
  if (r == 0) throw std::invalid_argument("mc_check_momentum_increment: requires r >= 1");
  if (n_resamples < 1000)
    throw std::invalid_argument(
        "mc_check_momentum_increment: underpowered (need n_resamples >= 1000)");

  const Vector grad_r = full_gradient(p, x_r);
  const double coef = 2.0 * params.alpha * params.alpha /
                      ((1.0 - params.alpha) * (1.0 - params.alpha));
  double sum_lhs = 0.0, sum_rhs = 0.0, sum_slack = 0.0, sum_slack_sq = 0.0;
  for (std::uint64_t i = 0; i < n_resamples; ++i) {
    const Vector g = stochastic_gradient(p, x_r, rng).value;
    const Vector m_r = (1.0 - params.alpha) * m_prev + params.alpha * g;
    const double lhs_i = (m_r - m_prev).squaredNorm();
    const double rhs_i = coef * ((grad_r - m_r).squaredNorm() + p.sigma * p.sigma);
    const double slack_i = rhs_i - lhs_i;
    sum_lhs += lhs_i;
    sum_rhs += rhs_i;
    sum_slack += slack_i;
    sum_slack_sq += slack_i * slack_i;
  }
  const double n = static_cast<double>(n_resamples);
  const double mean_slack = sum_slack / n;
  const double var = std::max(0.0, (sum_slack_sq - n * mean_slack * mean_slack) / (n - 1.0));
  return make_report("momentum-increment", sum_lhs / n, sum_rhs / n, n_resamples,
                     std::sqrt(var / n), z);
}

// One-step expected change of the potential L_beta(x, mu) + q||grad f(x) - m||^2
// against the descent bound assembled from the current state:
//   -C1 ||dx^+||^2 + C2 ||x^{r-1} - x^r||^2 + (alpha/2 + C3)||e||^2 + C3 sigma^2
//   + q [(1-alpha)||e||^2 + (L^2/alpha)||dx^+||^2 + alpha^2 sigma^2] - q ||e||^2
// where C1 = (eta - L)/2 - L - 1/(2 alpha) - 3 eta^2 ||B||^2/(beta lam),
//       C2 = 3 eta^2 ||B||^2/(beta lam), C3 = 6 alpha^2/(beta lam (1-alpha)^2),
//       e = grad f(x^r) - m^r, lam the smallest nonzero eigenvalue of A^T A.
// sigma = 0 makes both sides deterministic.
inline InequalityReport mc_check_potential_descent(const ConstrainedProblem& p,
                                                   const SolverState& state,
                                                   const MalmParams& params, double q,
                                                   std::uint64_t n_resamples, RngStream& rng,
                                                   double z = 4.0) {
  if (p.family != Family::quadratic)
    throw std::invalid_argument("mc_check_potential_descent: quadratic family only");
  if (!(q > 0.0)) throw std::invalid_argument("mc_check_potential_descent: q must be positive");

  const SpectralInfo spec = spectral_info(p.A, params.beta / params.eta);
  const double lam = spec.lambda_min_nonzero;
  const double b2 = spec.b_norm * spec.b_norm;
  const double a = params.alpha;
  const double eta = params.eta;
  const double beta = params.beta;
  const double c2 = 3.0 * eta * eta * b2 / (beta * lam);
  const double c1 = 0.5 * (eta - p.L) - p.L - 0.5 / a - c2;
  const double c3 = 6.0 * a * a / (beta * lam * (1.0 - a) * (1.0 - a));

  const Vector e = full_gradient(p, state.x) - state.m;
  const double pot0 = aug_lagrangian(p, state.x, state.mu, beta) + q * e.squaredNorm();

  SolverState next = state;
  primal_dual_update(next, params, p, {});
  const double dx_sq = (next.x - state.x).squaredNorm();
  const double dx_prev_sq = (state.x_prev - state.x).squaredNorm();
  const double sig_sq = p.sigma * p.sigma;
  const double lem2 = (1.0 - a) * e.squaredNorm() + p.L * p.L / a * dx_sq + a * a * sig_sq;
  const double bound = -c1 * dx_sq + c2 * dx_prev_sq + (0.5 * a + c3) * e.squaredNorm() +
                       c3 * sig_sq + q * lem2 - q * e.squaredNorm();

  const double base_next = aug_lagrangian(p, next.x, next.mu, beta);
  const Vector grad_next = full_gradient(p, next.x);

  if (p.sigma == 0.0) {
    const Vector m_next = (1.0 - a) * state.m + a * grad_next;
    const double change = base_next + q * (m_next - grad_next).squaredNorm() - pot0;
    return make_report("potential-descent", change, bound);
  }

  if (n_resamples < 1000)
    throw std::invalid_argument(
        "mc_check_potential_descent: underpowered (need n_resamples >= 1000)");
  double sum = 0.0, sum_sq = 0.0;
  for (std::uint64_t i = 0; i < n_resamples; ++i) {
    const Vector g = stochastic_gradient(p, next.x, rng).value;
    const Vector m_next = (1.0 - a) * state.m + a * g;
    const double v = base_next + q * (m_next - grad_next).squaredNorm() - pot0;
    sum += v;
    sum_sq += v * v;
  }
  const double n = static_cast<double>(n_resamples);
  const double mean = sum / n;
  const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
  return make_report("potential-descent", mean, bound, n_resamples, std::sqrt(var / n), z);
}

// --- suite -------------------------------------------------------------------

struct VerifyOptions {
  std::uint64_t n_resamples = 10000;
  double z = 4.0;
  std::uint64_t seed = 1;
  std::vector<std::string> checks;  // empty: run everything
  Perturbation perturb;
};

inline const std::vector<std::string>& verify_check_names() {
  static const std::vector<std::string> names = {
      "dual-identity",    "strong-convexity",  "momentum-error", "momentum-increment",
      "gradient-cross-term", "potential-descent", "range-invariant"};
  return names;
}

namespace detail {

struct Snapshot {
  SolverState before;  // state at r (m_prev = momentum entering step r+1)
  SolverState after;   // state at r + 1
  Vector m_prev;       // momentum at r - 1 (for the increment check)
};

struct Trajectory {
  std::vector<Snapshot> transitions;   // consecutive steps
  std::vector<Snapshot> spaced;        // widely spaced states for MC checks
  std::vector<Vector> mus;
};

inline Trajectory collect_trajectory(const ConstrainedProblem& p, const MalmParams& params,
                                     std::uint64_t steps, std::uint64_t spacing, RngStream& rng,
                                     const Perturbation& perturb, bool storm_tail = false) {
  Trajectory out;
  SolverState s = malm_init(p, Vector::Zero(p.d), rng);
  Vector m_prev = s.m;
  out.mus.push_back(s.mu);
  for (std::uint64_t r = 0; r < steps; ++r) {
    const SolverState before = s;
    const bool storm = storm_tail && r >= steps - steps / 4;
    if (storm)
      storm_alm_step(s, params, p, rng, perturb);
    else
      malm_step(s, params, p, rng, perturb);
    Snapshot snap{before, s, m_prev};
    out.transitions.push_back(snap);
    if ((r + 1) % spacing == 0) out.spaced.push_back(snap);
    out.mus.push_back(s.mu);
    m_prev = before.m;
  }
  return out;
}

inline bool check_enabled(const VerifyOptions& opt, const std::string& name) {
  if (opt.checks.empty()) return true;
  return std::find(opt.checks.begin(), opt.checks.end(), name) != opt.checks.end();
}

inline void keep_worst(const InequalityReport& candidate, bool& seen, InequalityReport& worst,
                       double z) {
  if (!seen || report_margin(candidate, z) < report_margin(worst, z)) {
    worst = candidate;
    seen = true;
  }
}

}  // namespace detail

// Runs the numeric checks on internally generated quadratic instances:
//   - a generic noisy instance (m < d) for the identity, convexity,
//     cross-term and momentum checks,
//   - an orthogonal-constraint instance whose schedule satisfies every
//     validity condition, for the potential-descent check,
//   - a rank-deficient-constraint instance for the range invariant.
// Returns one report per enabled check, worst state first where a check
// aggregates several states.
inline std::vector<InequalityReport> run_verify_suite(const VerifyOptions& opt) {
  for (const std::string& name : opt.checks)
    if (std::find(verify_check_names().begin(), verify_check_names().end(), name) ==
        verify_check_names().end())
      throw std::invalid_argument("run_verify_suite: unknown check " + name);

  std::vector<InequalityReport> reports;

  // generic instance
  const ConstrainedProblem gen = generate_quadratic(20, 5, 10.0, 0.5, opt.seed);
  const ScheduleConstants gen_constants{0.5, 40.0, 0.5, 0.1, 10000};
  const auto [gen_params, gen_validity] =
      schedule(gen_constants, gen.L, spectral_info(gen.A, gen_constants.c_beta / gen_constants.c_eta));
  (void)gen_validity;
  RngStream traj_rng(opt.seed, 10);
  const detail::Trajectory traj =
      detail::collect_trajectory(gen, gen_params, 200, 10, traj_rng, opt.perturb, true);

  if (detail::check_enabled(opt, "dual-identity")) {
    InequalityReport worst;
    bool seen = false;
    for (const detail::Snapshot& t : traj.transitions) {
      const InequalityReport r = check_dual_identity(gen, gen_params, t.before, t.after);
      detail::keep_worst(r, seen, worst, opt.z);
    }
    reports.push_back(worst);
  }

  if (detail::check_enabled(opt, "strong-convexity")) {
    const detail::Snapshot& at = traj.spaced.at(1);
    RngStream rng(opt.seed, 11);
    reports.push_back(check_strong_convexity(gen, gen_params, at.before.x, at.before.mu,
                                             opt.n_resamples, rng));
  }

  if (detail::check_enabled(opt, "momentum-error")) {
    RngStream rng(opt.seed, 12);
    InequalityReport worst;
    bool seen = false;
    for (const detail::Snapshot& t : traj.spaced) {
      const InequalityReport r =
          mc_check_momentum_error(gen, t.before, gen_params, opt.n_resamples, rng, opt.z);
      detail::keep_worst(r, seen, worst, opt.z);
    }
    reports.push_back(worst);
  }

  if (detail::check_enabled(opt, "momentum-increment")) {
    RngStream rng(opt.seed, 13);
    InequalityReport worst;
    bool seen = false;
    for (const detail::Snapshot& t : traj.spaced) {
      if (t.before.r == 0) continue;
      const InequalityReport r = mc_check_momentum_increment(
          gen, t.before.x, t.m_prev, t.before.r, gen_params, opt.n_resamples, rng, opt.z);
      detail::keep_worst(r, seen, worst, opt.z);
    }
    reports.push_back(worst);
  }

  if (detail::check_enabled(opt, "gradient-cross-term")) {
    InequalityReport worst;
    bool seen = false;
    for (const detail::Snapshot& t : traj.transitions) {
      const InequalityReport r =
          check_gradient_cross_term(gen, gen.L, gen_params.alpha, t.before, t.after);
      detail::keep_worst(r, seen, worst, opt.z);
    }
    reports.push_back(worst);
  }

  if (detail::check_enabled(opt, "potential-descent")) {
    // orthogonal constraints make ||B|| vanish at beta = eta, which is the
    // regime where every schedule validity condition can hold at once
    RngStream make_rng(opt.seed, 30);
    const Index d = 20;
    ConstrainedProblem orth;
    orth.family = Family::quadratic;
    orth.d = d;
    orth.m = d;
    orth.sigma = 0.5;
    orth.condition = 2.0;
    orth.seed = opt.seed;
    {
      Matrix G(d, d);
      for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j) G(i, j) = make_rng.normal();
      const Matrix Qo = Eigen::HouseholderQR<Matrix>(G).householderQ();
      Vector eigs(d);
      for (Index j = 0; j < d; ++j)
        eigs[j] = 1.0 + (orth.condition - 1.0) * static_cast<double>(j) / static_cast<double>(d - 1);
      orth.Q = Qo * eigs.asDiagonal() * Qo.transpose();
      orth.Q = 0.5 * (orth.Q + orth.Q.transpose()).eval();
      orth.c = Vector(d);
      for (Index j = 0; j < d; ++j) orth.c[j] = make_rng.normal();
      Matrix H(d, d);
      for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j) H(i, j) = make_rng.normal();
      orth.A = Eigen::HouseholderQR<Matrix>(H).householderQ();
      orth.x_feas = Vector(d);
      for (Index j = 0; j < d; ++j) orth.x_feas[j] = make_rng.normal();
      orth.b = orth.A * orth.x_feas;
      orth.L = estimate_smoothness(orth);
      orth.f_lower = -0.5 * orth.c.dot(orth.Q.llt().solve(orth.c));
      orth.kkt = solve_kkt(orth.Q, orth.A, orth.c, orth.b);
    }
    const ScheduleConstants orth_constants{0.5, 16.0, 16.0, 0.1, 10000};
    const auto [orth_params, orth_validity] = schedule(
        orth_constants, orth.L, spectral_info(orth.A, orth_constants.c_beta / orth_constants.c_eta));
    if (!orth_validity.eta_condition_ok || !orth_validity.beta_condition_ok ||
        !orth_validity.cx_positive)
      throw std::logic_error("run_verify_suite: descent instance schedule must satisfy all validity conditions");

    RngStream orth_traj_rng(opt.seed, 31);
    const detail::Trajectory orth_traj =
        detail::collect_trajectory(orth, orth_params, 400, 40, orth_traj_rng, opt.perturb);
    RngStream rng(opt.seed, 32);
    InequalityReport worst;
    bool seen = false;
    for (const detail::Snapshot& t : orth_traj.spaced) {
      const InequalityReport r = mc_check_potential_descent(
          orth, t.before, orth_params, orth_validity.q, opt.n_resamples, rng, opt.z);
      detail::keep_worst(r, seen, worst, opt.z);
    }
    reports.push_back(worst);
  }

  if (detail::check_enabled(opt, "range-invariant")) {
    // rank-deficient constraints exercise the nontrivial case
    RngStream make_rng(opt.seed, 20);
    const Index d = 15, m = 6, rank = 3;
    ConstrainedProblem low;
    low.family = Family::quadratic;
    low.d = d;
    low.m = m;
    low.sigma = 0.3;
    low.condition = 1.0;
    low.seed = opt.seed;
    low.Q = Matrix::Identity(d, d);
    low.c = Vector(d);
    for (Index j = 0; j < d; ++j) low.c[j] = make_rng.normal();
    Matrix U(m, rank), W(rank, d);
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < rank; ++j) U(i, j) = make_rng.normal();
    for (Index i = 0; i < rank; ++i)
      for (Index j = 0; j < d; ++j) W(i, j) = make_rng.normal();
    low.A = U * W;
    low.A /= spectral_norm(low.A);  // unit operator norm keeps the stepsizes stable at any seed
    low.x_feas = Vector(d);
    for (Index j = 0; j < d; ++j) low.x_feas[j] = make_rng.normal();
    low.b = low.A * low.x_feas;
    low.L = 1.0;
    low.f_lower = -0.5 * low.c.squaredNorm();

    const ScheduleConstants low_constants{0.5, 12.0, 0.1, 0.1, 1000};
    const auto [low_params, low_validity] = schedule(
        low_constants, low.L, spectral_info(low.A, low_constants.c_beta / low_constants.c_eta));
    (void)low_validity;
    RngStream low_rng(opt.seed, 21);
    const detail::Trajectory low_traj =
        detail::collect_trajectory(low, low_params, 100, 25, low_rng, opt.perturb);

    const InequalityReport on_gen = check_range_invariant(gen.A, traj.mus);
    const InequalityReport on_low = check_range_invariant(low.A, low_traj.mus);
    reports.push_back(report_margin(on_low, opt.z) < report_margin(on_gen, opt.z) ? on_low
                                                                                  : on_gen);
  }

  return reports;
}

inline constexpr const char* kVerifyCsvHeader = "check,lhs,rhs,slack,n_samples,stderr,passed";

inline std::string reports_to_csv(const std::vector<InequalityReport>& reports) {
  std::string out = kVerifyCsvHeader;
  out += '\n';
  for (const InequalityReport& r : reports) {
    out += r.check;
    out += ',';
    out += format_full(r.lhs);
    out += ',';
    out += format_full(r.rhs);
    out += ',';
    out += format_full(r.slack);
    out += ',';
    out += std::to_string(r.n_samples);
    out += ',';
    out += format_full(r.stderr_est);
    out += ',';
    out += r.passed ? '1' : '0';
    out += '\n';
  }
  return out;
}

inline void write_reports_csv(const std::string& path, const std::vector<InequalityReport>& reports) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("write_reports_csv: cannot open " + path);
  f << reports_to_csv(reports);
  if (!f) throw std::runtime_error("write_reports_csv: write failed for " + path);
}

}  // namespace malm
