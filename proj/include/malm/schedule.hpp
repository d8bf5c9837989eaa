#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "malm/linalg.hpp"

namespace malm {

// Realized per-run stepsizes: momentum weight alpha in (0,1), proximal
// stepsize eta > 0, penalty/dual stepsize beta > 0.
struct MalmParams {
  double alpha = 0.0;
  double eta = 0.0;
  double beta = 0.0;
};

// Horizon-dependent schedule
//   alpha = c_alpha K^{-1/2}, eta = c_eta K^{1/2},
//   beta  = c_beta  K^{1/2},  theta = c_theta K^{-1/2}.
struct ScheduleConstants {
  double c_alpha = 0.7;
  double c_eta = 6.0;
  double c_beta = 0.02;
  double c_theta = 0.1;
  std::uint64_t K = 1000;
};

// Derived validity quantities for a schedule on a concrete problem. The
// condition flags are sufficient conditions from the convergence analysis;
// parameters are returned regardless of the flags, which then serve as a
// warning. eta_condition_ok && beta_condition_ok implies C_x > 0.
struct ScheduleValidity {
  double M = 0.0;
  double C_x = 0.0;
  double theta = 0.0;
  double p = 0.0;
  double q = 0.0;
  bool eta_condition_ok = false;
  bool beta_condition_ok = false;
  bool cx_positive = false;
};

inline void validate(const ScheduleConstants& c) {
  if (!(c.c_alpha > 0.0 && c.c_alpha < 1.0))
    throw std::invalid_argument("schedule: c_alpha must be in (0, 1)");
  if (!(c.c_eta > 0.0)) throw std::invalid_argument("schedule: c_eta must be positive");
  if (!(c.c_beta > 0.0)) throw std::invalid_argument("schedule: c_beta must be positive");
  if (!(c.c_theta > 0.0)) throw std::invalid_argument("schedule: c_theta must be positive");
  if (c.K == 0) throw std::invalid_argument("schedule: K must be at least 1");
}

inline std::pair<MalmParams, ScheduleValidity> schedule(const ScheduleConstants& c, double L,
                                                        const SpectralInfo& spectral) {
  validate(c);
  const double expected_ratio = c.c_beta / c.c_eta;
  if (std::abs(spectral.beta_over_eta - expected_ratio) >
      1e-12 * std::max(1.0, std::abs(expected_ratio)))
    throw std::invalid_argument("schedule: spectral info computed for a different beta/eta ratio");

  const double sqrtK = std::sqrt(static_cast<double>(c.K));
  MalmParams params;
  params.alpha = c.c_alpha / sqrtK;
  params.eta = c.c_eta * sqrtK;
  params.beta = c.c_beta * sqrtK;

  const double lam = spectral.lambda_min_nonzero;
  const double b2 = spectral.b_norm * spectral.b_norm;
  const double one_minus_ca = 1.0 - c.c_alpha;

  ScheduleValidity v;
  v.theta = c.c_theta / sqrtK;
  v.M = c.c_eta / 2.0 - 1.0 / c.c_alpha - c.c_theta / (c.c_alpha * c.c_alpha) - 1.5 * L;
  v.C_x = v.M - 6.0 * c.c_eta * c.c_eta * b2 / (c.c_beta * lam) -
          6.0 / (c.c_beta * lam * one_minus_ca * one_minus_ca);
  v.eta_condition_ok =
      c.c_eta > 3.0 * L + 2.0 / c.c_alpha + 2.0 * c.c_theta / (c.c_alpha * c.c_alpha);
  v.beta_condition_ok =
      v.M > 0.0 &&
      c.c_beta > 6.0 / (lam * v.M) * (c.c_eta * c.c_eta * b2 + 1.0 / (one_minus_ca * one_minus_ca));
  v.cx_positive = v.C_x > 0.0;

  const double a = params.alpha;
  const double one_minus_a = 1.0 - a;
  v.p = a / 2.0 + 6.0 * a * a / (params.beta * lam * one_minus_a * one_minus_a);
  v.q = (v.p + v.theta) / a;
  return {params, v};
}

}  // namespace malm
