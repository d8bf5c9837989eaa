#pragma once

#include <chrono>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "malm/metrics.hpp"
#include "malm/problem.hpp"
#include "malm/schedule.hpp"

namespace malm {

// Iterate bundle: primal x^r, dual mu^r, momentum estimator m^r, previous
// primal x^{r-1}, step counter r and cumulative oracle evaluations.
struct SolverState {
  Vector x;
  Vector mu;
  Vector m;
  Vector x_prev;
  std::uint64_t r = 0;
  std::uint64_t grad_evals = 0;
};

class DivergenceError : public std::runtime_error {
public:
  DivergenceError(std::uint64_t iter, const std::string& what)
      : std::runtime_error(what), iter_(iter) {}
  std::uint64_t iter() const { return iter_; }

private:
  std::uint64_t iter_;
};

// Fault injection for the verification suite: adds `magnitude` to every dual
// coordinate right after the dual update, breaking the update's algebra.
struct Perturbation {
  enum class Target { none, dual_update };
  Target target = Target::none;
  double magnitude = 0.0;
};

inline constexpr double kDivergenceLimit = 1e12;

inline void check_finite(const SolverState& s) {
  const bool bad = !s.x.allFinite() || !s.mu.allFinite() || !s.m.allFinite() ||
                   s.x.norm() > kDivergenceLimit || s.mu.norm() > kDivergenceLimit;
  if (bad)
    throw DivergenceError(s.r, "iterate diverged at step " + std::to_string(s.r));
}

inline SolverState malm_init(const ConstrainedProblem& p, const Vector& x0, RngStream& rng) {
  require_dim(p, x0, "malm_init");
  SolverState s;
  s.x = x0;
  s.x_prev = x0;
  s.mu = Vector::Zero(p.m);
  s.m = stochastic_gradient(p, x0, rng).value;
  s.r = 0;
  s.grad_evals = 1;
  return s;
}

inline void primal_dual_update(SolverState& s, const MalmParams& params,
                               const ConstrainedProblem& p, const Perturbation& perturb) {
  const Vector x_next =
      s.x - (s.m + p.A.transpose() * s.mu + params.beta * (p.A.transpose() * (p.A * s.x - p.b))) /
                params.eta;
  Vector mu_next = s.mu + params.beta * (p.A * x_next - p.b);
  if (perturb.target == Perturbation::Target::dual_update)
    mu_next.array() += perturb.magnitude;
  s.x_prev = s.x;
  s.x = x_next;
  s.mu = mu_next;
}

// One iteration: primal descent on the linearized proximal model, dual
// ascent, then a momentum refresh from one fresh stochastic gradient at the
// new iterate. The primal step uses the pre-update momentum.
inline void malm_step(SolverState& s, const MalmParams& params, const ConstrainedProblem& p,
                      RngStream& rng, const Perturbation& perturb = {}) {
  primal_dual_update(s, params, p, perturb);
  const GradientSample g = stochastic_gradient(p, s.x, rng);
  s.m = (1.0 - params.alpha) * s.m + params.alpha * g.value;
  s.r += 1;
  s.grad_evals += g.draws_consumed;
  check_finite(s);
}

// Same primal/dual updates as malm_step; the momentum is the recursive
// estimator m^+ = g(x^+; xi) + (1 - alpha)(m - g(x; xi)) with one fresh
// sample evaluated at both points (two oracle evaluations).
inline void storm_alm_step(SolverState& s, const MalmParams& params, const ConstrainedProblem& p,
                           RngStream& rng, const Perturbation& perturb = {}) {
  const Vector x_old = s.x;
  primal_dual_update(s, params, p, perturb);
  const GradientSamplePair g = stochastic_gradient_pair(p, s.x, x_old, rng);
  s.m = g.at_first + (1.0 - params.alpha) * (s.m - g.at_second);
  s.r += 1;
  s.grad_evals += g.draws_consumed;
  check_finite(s);
}

// Stochastic primal-dual baseline: gradient step on the plain Lagrangian at
// the current iterate, then dual ascent. No momentum, no penalty term.
inline void spd_step(SolverState& s, double tau, double rho, const ConstrainedProblem& p,
                     RngStream& rng) {
  if (tau < 0.0 || rho <= 0.0) throw std::invalid_argument("spd_step: need tau >= 0 and rho > 0");
  const GradientSample g = stochastic_gradient(p, s.x, rng);
  const Vector x_next = s.x - tau * (g.value + p.A.transpose() * s.mu);
  s.mu += rho * (p.A * x_next - p.b);
  s.x_prev = s.x;
  s.x = x_next;
  s.m = g.value;
  s.r += 1;
  s.grad_evals += g.draws_consumed;
  check_finite(s);
}

struct RunOptions {
  std::uint64_t record_every = 10;
  bool wall_timing = true;                           // false: elapsed_ns recorded as 0
  std::uint64_t stream_id = 0;                       // trajectory RNG stream within the seed
  std::vector<ReservoirSelector>* reservoirs = nullptr;
  Perturbation perturb;
};

namespace detail {

template <typename StepFn>
Trace run_loop(const ConstrainedProblem& p, SolverTag tag, std::uint64_t K, const Vector& x0,
               std::uint64_t seed, const RunOptions& opt, RngStream& rng, StepFn step) {
  if (K == 0) throw std::invalid_argument("run: K must be at least 1");
  if (opt.record_every == 0) throw std::invalid_argument("run: record_every must be positive");

  Trace trace;
  trace.tag = tag;
  trace.seed = seed;

  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&]() -> std::uint64_t {
    if (!opt.wall_timing) return 0;
    return static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::nanoseconds>(
                                          std::chrono::steady_clock::now() - t0)
                                          .count());
  };

  SolverState s = malm_init(p, x0, rng);
  double best = 0.0;
  auto record = [&]() {
    IterationRecord rec;
    rec.iter = s.r;
    rec.grad_evals = s.grad_evals;
    rec.elapsed_ns = elapsed();
    const auto [stat, feas] = kkt_residuals(p, s.x, s.mu);
    rec.stationarity = stat;
    rec.feasibility = feas;
    rec.objective = objective(p, s.x);
    trace.records.push_back(rec);
    if (trace.records.size() == 1 || stat + feas < best) {
      best = stat + feas;
      trace.best_x = s.x;
      trace.best_mu = s.mu;
      trace.best_iter = s.r;
    }
  };

  record();  // r = 0
  for (std::uint64_t r = 0; r < K; ++r) {
    try {
      step(s);
    } catch (const DivergenceError& e) {
      trace.diverged = true;
      trace.diverged_at = e.iter();
      break;
    }
    if (opt.reservoirs)
      for (ReservoirSelector& sel : *opt.reservoirs) sel.offer(r, s.x, s.mu);
    if (s.r % opt.record_every == 0 || s.r == K) record();
  }
  trace.final_x = s.x;
  trace.final_mu = s.mu;
  return trace;
}

}  // namespace detail

inline Trace malm_run(const ConstrainedProblem& p, const ScheduleConstants& constants,
                      const Vector& x0, std::uint64_t seed, const RunOptions& opt = {}) {
  const SpectralInfo spec = spectral_info(p.A, constants.c_beta / constants.c_eta);
  const auto [params, validity] = schedule(constants, p.L, spec);
  (void)validity;
  RngStream rng(seed, opt.stream_id);
  Trace t = detail::run_loop(p, SolverTag::malm, constants.K, x0, seed, opt, rng,
                             [&](SolverState& s) { malm_step(s, params, p, rng, opt.perturb); });
  t.constants = constants;
  return t;
}

inline Trace malm_run(const ConstrainedProblem& p, const ScheduleConstants& constants,
                      const Vector& x0, std::uint64_t seed, std::uint64_t record_every) {
  RunOptions opt;
  opt.record_every = record_every;
  return malm_run(p, constants, x0, seed, opt);
}

inline Trace storm_alm_run(const ConstrainedProblem& p, const ScheduleConstants& constants,
                           const Vector& x0, std::uint64_t seed, const RunOptions& opt = {}) {
  const SpectralInfo spec = spectral_info(p.A, constants.c_beta / constants.c_eta);
  const auto [params, validity] = schedule(constants, p.L, spec);
  (void)validity;
  RngStream rng(seed, opt.stream_id);
  Trace t = detail::run_loop(p, SolverTag::storm_alm, constants.K, x0, seed, opt, rng,
                             [&](SolverState& s) { storm_alm_step(s, params, p, rng, opt.perturb); });
  t.constants = constants;
  return t;
}

inline Trace spd_run(const ConstrainedProblem& p, double tau, double rho, std::uint64_t K,
                     const Vector& x0, std::uint64_t seed, const RunOptions& opt = {}) {
  RngStream rng(seed, opt.stream_id);
  Trace t = detail::run_loop(p, SolverTag::spd, K, x0, seed, opt, rng,
                             [&](SolverState& s) { spd_step(s, tau, rho, p, rng); });
  t.tau = tau;
  t.rho = rho;
  return t;
}

}  // namespace malm
