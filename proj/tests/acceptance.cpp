// End-to-end acceptance checks for the solver library and the CLI.
// Prints one PASS/FAIL line per check and exits nonzero if any fail.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <utility>
#include <vector>

#include "malm/malm.hpp"

namespace fs = std::filesystem;

namespace {

std::string g_cli;
const fs::path g_tmp = "acceptance_tmp";

int run_cli(const std::string& args, const std::string& log_name) {
  const std::string log = (g_tmp / log_name).string();
  const std::string cmd = "\"" + g_cli + "\" " + args + " > " + log + " 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream buf;
  buf << f.rdbuf();
  return buf.str();
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

using Result = std::pair<bool, std::string>;

// ---------------------------------------------------------------------------

Result dual_identity_along_trajectories() {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const malm::ConstrainedProblem p = malm::generate_quadratic(20, 5, 10.0, 0.5, seed);
    const malm::ScheduleConstants constants{0.5, 12.0, 0.1, 0.1, 1000};
    const malm::SpectralInfo spec =
        malm::spectral_info(p.A, constants.c_beta / constants.c_eta);
    const auto [params, validity] = malm::schedule(constants, p.L, spec);
    (void)validity;
    malm::RngStream rng(seed, 0);
    malm::SolverState s = malm::malm_init(p, malm::Vector::Zero(p.d), rng);
    for (std::uint64_t r = 0; r < constants.K; ++r) {
      const malm::SolverState before = s;
      malm::malm_step(s, params, p, rng);
      const malm::InequalityReport rep = malm::check_dual_identity(p, params, before, s);
      if (!rep.passed)
        return {false, "seed " + std::to_string(seed) + " step " + std::to_string(r) +
                           ": residual " + fmt(rep.lhs) + " > " + fmt(rep.rhs)};
    }
  }
  return {true, "10 problems x 1000 steps"};
}

Result noiseless_run_reaches_optimum() {
  const malm::ConstrainedProblem p = malm::generate_quadratic(20, 5, 2.0, 0.0, 1);
  const malm::ScheduleConstants constants{0.5, 12.0, 0.1, 0.1, 100000};
  const malm::SpectralInfo spec = malm::spectral_info(p.A, constants.c_beta / constants.c_eta);
  const auto [params, validity] = malm::schedule(constants, p.L, spec);
  (void)params;
  if (!validity.eta_condition_ok) return {false, "schedule fails the eta condition"};
  const malm::Trace t =
      malm::malm_run(p, constants, malm::Vector::Zero(p.d), 1, constants.K);
  if (t.diverged) return {false, "diverged"};
  const malm::IterationRecord& last = t.records.back();
  const double resid = last.stationarity + last.feasibility;
  const double dist = (t.final_x - p.kkt->x).norm();
  const bool ok = resid < 1e-6 && dist < 1e-5;
  return {ok, "KKT residual " + fmt(resid) + ", distance to optimum " + fmt(dist)};
}

Result longer_budget_shrinks_selected_residual() {
  const std::uint64_t budgets[2] = {1000, 16000};
  double mean[2] = {0.0, 0.0};
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const malm::ConstrainedProblem p =
        malm::generate_regression(200, 1000, 20, 0.05, 0.1, seed);
    for (int b = 0; b < 2; ++b) {
      const malm::ScheduleConstants constants{0.7, 6.0, 0.02, 0.1, budgets[b]};
      std::vector<malm::ReservoirSelector> reservoirs;
      for (std::uint64_t j = 0; j < 10; ++j)
        reservoirs.emplace_back(malm::RngStream(seed, 1000 + j));
      malm::RunOptions opt;
      opt.record_every = budgets[b];
      opt.wall_timing = false;
      opt.reservoirs = &reservoirs;
      const malm::Trace t = malm::malm_run(p, constants, malm::Vector::Zero(p.d), seed, opt);
      if (t.diverged) return {false, "diverged at seed " + std::to_string(seed)};
      for (const malm::ReservoirSelector& res : reservoirs) {
        const malm::SelectedOutput sel = res.selection();
        const auto [stat, feas] = malm::kkt_residuals(p, sel.x, sel.mu);
        mean[b] += (stat + feas) / (10.0 * 10.0);
      }
    }
  }
  const double ratio = mean[1] / mean[0];
  const bool ok = ratio >= 0.25 && ratio <= 1.0;
  return {ok, "mean selected residual " + fmt(mean[0]) + " -> " + fmt(mean[1]) + ", ratio " +
                  fmt(ratio)};
}

Result gradient_budgets_are_exact() {
  const malm::ConstrainedProblem p = malm::generate_quadratic(20, 5, 10.0, 0.5, 2);
  const std::uint64_t K = 500;
  const malm::ScheduleConstants constants{0.5, 12.0, 0.1, 0.1, K};
  const malm::SpectralInfo spec = malm::spectral_info(p.A, constants.c_beta / constants.c_eta);
  const auto [params, validity] = malm::schedule(constants, p.L, spec);
  (void)validity;
  const malm::Vector x0 = malm::Vector::Zero(p.d);

  malm::RunOptions opt;
  opt.record_every = K;
  const malm::Trace tm = malm::malm_run(p, constants, x0, 3, opt);
  const malm::Trace ts = malm::storm_alm_run(p, constants, x0, 3, opt);
  const malm::Trace tp = malm::spd_run(p, 1.0 / params.eta, params.beta, K, x0, 3, opt);

  const std::uint64_t gm = tm.records.back().grad_evals;
  const std::uint64_t gs = ts.records.back().grad_evals;
  const std::uint64_t gp = tp.records.back().grad_evals;
  const bool ok = gm == K + 1 && gs == 2 * K + 1 && gp == K + 1;
  return {ok, "evals " + std::to_string(gm) + "/" + std::to_string(gs) + "/" +
                  std::to_string(gp) + " for K=" + std::to_string(K)};
}

Result verify_suite_clean_and_faulted() {
  const fs::path clean_dir = g_tmp / "verify_clean";
  const fs::path fault_dir = g_tmp / "verify_fault";
  fs::create_directories(clean_dir);
  fs::create_directories(fault_dir);
  const int rc_clean = run_cli("verify --out-dir " + clean_dir.string(), "verify_clean.log");
  const int rc_fault = run_cli("verify --perturb dual-update 1e-3 --out-dir " +
                                   fault_dir.string(),
                               "verify_fault.log");
  const bool ok = rc_clean == 0 && rc_fault == 3;
  return {ok, "clean exit " + std::to_string(rc_clean) + ", faulted exit " +
                  std::to_string(rc_fault)};
}

Result stochastic_gradients_are_unbiased() {
  const malm::ConstrainedProblem quad = malm::generate_quadratic(20, 5, 10.0, 0.5, 3);
  const malm::ConstrainedProblem regr = malm::generate_regression(50, 200, 10, 0.1, 0.1, 4);
  const std::size_t n = 100000;
  for (const malm::ConstrainedProblem* p : {&quad, &regr}) {
    for (int j = 0; j < 5; ++j) {
      malm::RngStream point_rng(500 + static_cast<std::uint64_t>(j), 0);
      malm::Vector x(p->d);
      for (malm::Index i = 0; i < p->d; ++i) x[i] = point_rng.normal();
      const malm::Vector exact = malm::full_gradient(*p, x);
      malm::RngStream rng(600 + static_cast<std::uint64_t>(j), p->d);
      malm::Vector sum = malm::Vector::Zero(p->d);
      malm::Vector sumsq = malm::Vector::Zero(p->d);
      for (std::size_t k = 0; k < n; ++k) {
        const malm::Vector g = malm::stochastic_gradient(*p, x, rng).value;
        sum += g;
        sumsq += g.cwiseProduct(g);
      }
      const malm::Vector mean = sum / static_cast<double>(n);
      for (malm::Index i = 0; i < p->d; ++i) {
        const double var =
            std::max(0.0, sumsq[i] / static_cast<double>(n) - mean[i] * mean[i]);
        const double se = std::sqrt(var / static_cast<double>(n));
        const double tol = std::max(4.0 * se, 1e-12);
        if (std::abs(mean[i] - exact[i]) > tol)
          return {false, malm::family_name(p->family) + " point " + std::to_string(j) +
                             " coordinate " + std::to_string(i) + ": |bias| " +
                             fmt(std::abs(mean[i] - exact[i])) + " > " + fmt(tol)};
      }
    }
  }
  return {true, "5 points per family, 100000 draws, 4 standard errors"};
}

Result momentum_beats_recursive_baseline() {
  // same setting and schedule constants as the rate-slope check, with K chosen
  // so both solvers consume a 20000-evaluation oracle budget
  const malm::ScheduleConstants cm{0.7, 6.0, 0.02, 0.1, 19999};
  const malm::ScheduleConstants cs{0.7, 6.0, 0.02, 0.1, 9999};
  std::vector<double> stat_malm, stat_storm;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const malm::ConstrainedProblem p =
        malm::generate_regression(200, 1000, 20, 0.05, 0.1, seed);
    const malm::Vector x0 = malm::Vector::Zero(p.d);
    malm::RunOptions opt_m, opt_s;
    opt_m.record_every = cm.K;
    opt_s.record_every = cs.K;
    const malm::Trace tm = malm::malm_run(p, cm, x0, seed, opt_m);
    const malm::Trace ts = malm::storm_alm_run(p, cs, x0, seed, opt_s);
    if (tm.diverged || ts.diverged) return {false, "diverged at seed " + std::to_string(seed)};
    stat_malm.push_back(tm.records.back().stationarity);
    stat_storm.push_back(ts.records.back().stationarity);
  }
  const double mm = median_of(stat_malm);
  const double ms = median_of(stat_storm);
  return {mm <= ms, "median stationarity " + fmt(mm) + " vs " + fmt(ms)};
}

Result cli_runs_are_bit_reproducible() {
  const fs::path gen_dir = g_tmp / "repro";
  const fs::path dir_a = g_tmp / "repro_a";
  const fs::path dir_b = g_tmp / "repro_b";
  fs::create_directories(gen_dir);
  fs::create_directories(dir_a);
  fs::create_directories(dir_b);
  if (run_cli("gen --family quadratic --d 20 --m 5 --condition 2 --sigma 0 --seed 1 --out-dir " +
                  gen_dir.string(),
              "repro_gen.log") != 0)
    return {false, "gen failed"};
  const std::string problem = (gen_dir / "quadratic_d20_m5_seed1.malmpb").string();
  const std::string run_args =
      "run --problem " + problem +
      " --solver malm --c-alpha 0.5 --c-eta 12 --c-beta 0.1 --c-theta 0.1"
      " --K 100000 --record-every 10 --timing zero --out-dir ";
  if (run_cli(run_args + dir_a.string(), "repro_a.log") != 0) return {false, "first run failed"};
  if (run_cli(run_args + dir_b.string(), "repro_b.log") != 0) return {false, "second run failed"};
  const std::string a = slurp(dir_a / "trace_malm.csv");
  const std::string b = slurp(dir_b / "trace_malm.csv");
  if (a.empty() || a != b) return {false, "trace files differ"};
  return {true, std::to_string(a.size()) + " bytes identical across runs"};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: %s <path-to-cli-binary>\n", argv[0]);
    return 2;
  }
  g_cli = argv[1];
  fs::remove_all(g_tmp);
  fs::create_directories(g_tmp);

  struct Criterion {
    const char* name;
    Result (*fn)();
    double time_limit;  // seconds; 0 = unlimited
  };
  const Criterion criteria[] = {
      {"dual identity holds along noisy trajectories", dual_identity_along_trajectories, 5.0},
      {"noiseless run reaches the constrained optimum", noiseless_run_reaches_optimum, 30.0},
      {"longer budgets shrink the selected KKT residual",
       longer_budget_shrinks_selected_residual, 600.0},
      {"gradient-evaluation budgets are exact", gradient_budgets_are_exact, 0.0},
      {"verify suite passes clean and catches a seeded fault", verify_suite_clean_and_faulted,
       120.0},
      {"stochastic gradients are unbiased", stochastic_gradients_are_unbiased, 0.0},
      {"momentum beats the recursive baseline at equal budget",
       momentum_beats_recursive_baseline, 0.0},
      {"CLI trace output is bit-reproducible", cli_runs_are_bit_reproducible, 0.0},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = false;
    std::string detail;
    try {
      std::tie(ok, detail) = c.fn();
    } catch (const std::exception& e) {
      ok = false;
      detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (ok && c.time_limit > 0.0 && secs > c.time_limit) {
      ok = false;
      detail += " [exceeded " + fmt(c.time_limit) + "s budget]";
    }
    failures += ok ? 0 : 1;
    std::printf("%s  %-55s (%6.2fs)  %s\n", ok ? "PASS" : "FAIL", c.name, secs, detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
