// Command-line driver: problem generation, solver runs, benchmarks,
// verification suite, and SVG plots.
//
// Exit codes: 0 success, 1 usage error, 2 divergence, 3 verification failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "malm/malm.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitDivergence = 2;
constexpr int kExitVerifyFailure = 3;

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

malm::ConstrainedProblem make_problem(const malm::RunConfig& cfg) {
  if (!cfg.problem_file.empty())
    return malm::load_problem(cfg.problem_file);
  const malm::Family family = malm::family_from_string(cfg.family);
  if (family == malm::Family::regression)
    return malm::generate_regression(static_cast<malm::Index>(cfg.d),
                                     static_cast<malm::Index>(cfg.N),
                                     static_cast<malm::Index>(cfg.m), cfg.sparsity,
                                     cfg.label_noise_std, cfg.problem_seed);
  return malm::generate_quadratic(static_cast<malm::Index>(cfg.d),
                                  static_cast<malm::Index>(cfg.m), cfg.condition, cfg.sigma,
                                  cfg.problem_seed);
}

malm::ScheduleConstants constants_from(const malm::RunConfig& cfg) {
  malm::ScheduleConstants c;
  c.c_alpha = cfg.c_alpha;
  c.c_eta = cfg.c_eta;
  c.c_beta = cfg.c_beta;
  c.c_theta = cfg.c_theta;
  c.K = cfg.K;
  return c;
}

struct StepSizes {
  double tau;
  double rho;
};

StepSizes spd_step_sizes(const malm::RunConfig& cfg, const malm::MalmParams& params) {
  StepSizes s;
  s.tau = cfg.tau > 0.0 ? cfg.tau : 1.0 / params.eta;
  s.rho = cfg.rho > 0.0 ? cfg.rho : params.beta;
  return s;
}

void print_schedule_warnings(const malm::ScheduleValidity& v) {
  if (!v.eta_condition_ok)
    std::cerr << "warning: eta condition violated (c_eta too small for this smoothness)\n";
  if (!v.beta_condition_ok)
    std::cerr << "warning: beta condition violated (penalty growth constant too small)\n";
  if (!v.cx_positive) std::cerr << "warning: residual-rate constant C_x is not positive\n";
}

int cmd_gen(const malm::RunConfig& cfg) {
  malm::validate_config(cfg);
  malm::ConstrainedProblem p;
  const malm::Family family = malm::family_from_string(cfg.family);
  if (family == malm::Family::regression)
    p = malm::generate_regression(static_cast<malm::Index>(cfg.d),
                                  static_cast<malm::Index>(cfg.N),
                                  static_cast<malm::Index>(cfg.m), cfg.sparsity,
                                  cfg.label_noise_std, cfg.problem_seed);
  else
    p = malm::generate_quadratic(static_cast<malm::Index>(cfg.d),
                                 static_cast<malm::Index>(cfg.m), cfg.condition, cfg.sigma,
                                 cfg.problem_seed);

  std::string file = cfg.problem_file;
  if (file.empty()) {
    file = join_path(cfg.out_dir, cfg.family + "_d" + std::to_string(cfg.d) + "_m" +
                                      std::to_string(cfg.m) + "_seed" +
                                      std::to_string(cfg.problem_seed) + ".malmpb");
  }
  malm::save_problem(file, p);

  const malm::SpectralInfo spec = malm::spectral_info(p.A, cfg.c_beta / cfg.c_eta);
  std::cout << "family=" << malm::family_name(p.family) << " d=" << p.d << " N=" << p.N
            << " m=" << p.m << "\n";
  std::cout << "L=" << malm::format_full(p.L) << " sigma=" << malm::format_full(p.sigma)
            << " lambda_min_nonzero=" << malm::format_full(spec.lambda_min_nonzero)
            << " op_norm_A=" << malm::format_full(spec.op_norm_A) << "\n";
  std::cout << "wrote " << file << "\n";
  return kExitOk;
}

void print_trace_summary(const malm::ConstrainedProblem& p, const malm::Trace& trace,
                         const malm::RunConfig& cfg) {
  const malm::IterationRecord& last = trace.records.back();
  std::cout << "final: iter=" << last.iter << " grad_evals=" << last.grad_evals
            << " stationarity=" << malm::format_full(last.stationarity)
            << " feasibility=" << malm::format_full(last.feasibility)
            << " objective=" << malm::format_full(last.objective)
            << " elapsed_ns=" << last.elapsed_ns << "\n";
  if (cfg.output_mode != "best") return;
  const malm::SelectedOutput sel = malm::select_output(trace, malm::SelectMode::best_combined);
  const auto [stat, feas] = malm::kkt_residuals(p, sel.x, sel.mu);
  std::cout << "selected(best): iter=" << sel.index
            << " stationarity=" << malm::format_full(stat)
            << " feasibility=" << malm::format_full(feas) << "\n";
}

int cmd_run(const malm::RunConfig& cfg) {
  malm::validate_config(cfg);
  const malm::ConstrainedProblem p = make_problem(cfg);
  const malm::SolverTag tag = malm::solver_tag_from_string(cfg.solver);
  const malm::ScheduleConstants constants = constants_from(cfg);
  const malm::SpectralInfo spec = malm::spectral_info(p.A, constants.c_beta / constants.c_eta);
  const auto [params, validity] = malm::schedule(constants, p.L, spec);

  if (tag != malm::SolverTag::spd) {
    print_schedule_warnings(validity);
    if (!validity.eta_condition_ok && !cfg.force)
      throw std::invalid_argument(
          "schedule fails the eta condition for this problem; pass --force to run anyway");
  }

  malm::RunOptions opt;
  opt.record_every = cfg.record_every;
  opt.wall_timing = cfg.timing == "wall";
  opt.stream_id = 0;
  const bool uniform = cfg.output_mode == "uniform_random";
  std::vector<malm::ReservoirSelector> reservoirs;
  if (uniform) reservoirs.emplace_back(malm::RngStream(cfg.run_seed, 1000));
  if (!reservoirs.empty()) opt.reservoirs = &reservoirs;

  const malm::Vector x0 = malm::Vector::Zero(p.d);
  malm::Trace trace;
  if (tag == malm::SolverTag::malm) {
    trace = malm::malm_run(p, constants, x0, cfg.run_seed, opt);
  } else if (tag == malm::SolverTag::storm_alm) {
    trace = malm::storm_alm_run(p, constants, x0, cfg.run_seed, opt);
  } else {
    const StepSizes s = spd_step_sizes(cfg, params);
    trace = malm::spd_run(p, s.tau, s.rho, cfg.K, x0, cfg.run_seed, opt);
  }

  const std::string out = join_path(cfg.out_dir, "trace_" + malm::solver_name(tag) + ".csv");
  malm::write_trace_csv(out, trace);
  std::cout << "wrote " << out << "\n";

  if (trace.diverged) {
    std::cerr << "divergence at iteration " << trace.diverged_at << "; partial trace retained\n";
    return kExitDivergence;
  }

  print_trace_summary(p, trace, cfg);
  if (uniform) {
    const malm::SelectedOutput sel = reservoirs.front().selection();
    const auto [stat, feas] = malm::kkt_residuals(p, sel.x, sel.mu);
    std::cout << "selected(uniform_random): iter=" << sel.index + 1
              << " stationarity=" << malm::format_full(stat)
              << " feasibility=" << malm::format_full(feas) << "\n";
  }
  return kExitOk;
}

void write_curve_csv(const std::string& path, const std::string& axis,
                     const malm::AveragedCurve& curve) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << axis << ",stationarity,feasibility\n";
  for (std::size_t i = 0; i < curve.abscissa.size(); ++i)
    f << malm::format_full(curve.abscissa[i]) << ',' << malm::format_full(curve.stationarity[i])
      << ',' << malm::format_full(curve.feasibility[i]) << '\n';
  if (!f) throw std::runtime_error("write failed for " + path);
}

double median_of(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

int cmd_bench(const malm::RunConfig& cfg) {
  malm::validate_config(cfg);
  const malm::ConstrainedProblem p = make_problem(cfg);
  const malm::ScheduleConstants constants = constants_from(cfg);
  const malm::SpectralInfo spec = malm::spectral_info(p.A, constants.c_beta / constants.c_eta);
  const auto [params, validity] = malm::schedule(constants, p.L, spec);
  print_schedule_warnings(validity);
  const StepSizes sizes = spd_step_sizes(cfg, params);
  const malm::Vector x0 = malm::Vector::Zero(p.d);

  const malm::SolverTag tags[] = {malm::SolverTag::malm, malm::SolverTag::storm_alm,
                                  malm::SolverTag::spd};
  std::cout << "solver      trials  diverged  median_stat            median_feas\n";
  for (const malm::SolverTag tag : tags) {
    std::vector<malm::Trace> traces;
    std::size_t diverged = 0;
    for (std::uint64_t trial = 0; trial < cfg.trials; ++trial) {
      malm::RunOptions opt;
      opt.record_every = cfg.record_every;
      opt.wall_timing = cfg.timing == "wall";
      opt.stream_id = trial;
      malm::Trace t;
      if (tag == malm::SolverTag::malm)
        t = malm::malm_run(p, constants, x0, cfg.run_seed, opt);
      else if (tag == malm::SolverTag::storm_alm)
        t = malm::storm_alm_run(p, constants, x0, cfg.run_seed, opt);
      else
        t = malm::spd_run(p, sizes.tau, sizes.rho, cfg.K, x0, cfg.run_seed, opt);
      if (t.diverged) {
        ++diverged;
      } else {
        // oracle budget contract: one draw per step, plus one per step for
        // the recursive-momentum baseline, plus the initial estimate
        const std::uint64_t expected =
            tag == malm::SolverTag::storm_alm ? 2 * cfg.K + 1 : cfg.K + 1;
        if (t.records.back().grad_evals != expected)
          throw std::logic_error("gradient-evaluation budget mismatch for " +
                                 malm::solver_name(tag));
      }
      traces.push_back(std::move(t));
    }

    std::vector<malm::Trace> ok;
    for (const malm::Trace& t : traces)
      if (!t.diverged) ok.push_back(t);

    const std::string name = malm::solver_name(tag);
    if (!ok.empty()) {
      write_curve_csv(join_path(cfg.out_dir, "avg_" + name + "_iter.csv"), "iter",
                      malm::average_traces(ok, malm::AverageGrid::by_iter));
      write_curve_csv(join_path(cfg.out_dir, "avg_" + name + "_evals.csv"), "grad_evals",
                      malm::average_traces(ok, malm::AverageGrid::by_grad_evals));
      write_curve_csv(join_path(cfg.out_dir, "avg_" + name + "_time.csv"), "elapsed_ns",
                      malm::time_axis_curve(ok));
    }

    std::vector<double> stats, feases;
    for (const malm::Trace& t : ok) {
      stats.push_back(t.records.back().stationarity);
      feases.push_back(t.records.back().feasibility);
    }
    char row[160];
    std::snprintf(row, sizeof(row), "%-11s %-7zu %-9zu %-23.17g %-23.17g", name.c_str(),
                  traces.size(), diverged, median_of(stats), median_of(feases));
    std::cout << row << "\n";
  }
  return kExitOk;
}

int cmd_verify(const malm::RunConfig& cfg, const malm::VerifyOptions& vopt) {
  const std::vector<malm::InequalityReport> reports = malm::run_verify_suite(vopt);
  const std::string out = join_path(cfg.out_dir, "verify.csv");
  malm::write_reports_csv(out, reports);
  bool all_passed = true;
  std::cout << "check                 lhs           rhs           slack         passed\n";
  for (const malm::InequalityReport& r : reports) {
    char row[200];
    std::snprintf(row, sizeof(row), "%-21s %-13.6g %-13.6g %-13.6g %s", r.check.c_str(), r.lhs,
                  r.rhs, r.slack, r.passed ? "yes" : "NO");
    std::cout << row << "\n";
    all_passed = all_passed && r.passed;
  }
  std::cout << "wrote " << out << "\n";
  return all_passed ? kExitOk : kExitVerifyFailure;
}

struct PlotArgs {
  std::vector<std::string> csvs;
  std::string axis = "iter";
  std::string metric = "stationarity";
  std::string out = "plot.svg";
  std::string title;
};

int cmd_plot(const PlotArgs& args) {
  std::vector<malm::PlotSeries> series;
  for (const std::string& path : args.csvs) {
    malm::PlotSeries s;
    s.label = std::filesystem::path(path).stem().string();

    std::ifstream probe(path, std::ios::binary);
    if (!probe) throw std::runtime_error("cannot open " + path);
    std::string header;
    std::getline(probe, header);
    if (!header.empty() && header.back() == '\r') header.pop_back();
    probe.close();

    if (header == malm::kTraceCsvHeader) {
      const std::vector<malm::IterationRecord> recs = malm::read_trace_csv(path);
      for (const malm::IterationRecord& r : recs) {
        double x = 0.0;
        if (args.axis == "iter") x = static_cast<double>(r.iter);
        else if (args.axis == "grad_evals") x = static_cast<double>(r.grad_evals);
        else if (args.axis == "time") x = static_cast<double>(r.elapsed_ns) * 1e-9;
        else throw std::invalid_argument("unknown axis '" + args.axis + "'");
        s.x.push_back(x);
        s.y.push_back(args.metric == "feasibility" ? r.feasibility : r.stationarity);
      }
    } else {
      // averaged-curve schema: <axis>,stationarity,feasibility
      std::ifstream f(path, std::ios::binary);
      std::string line;
      std::getline(f, line);
      std::size_t row = 1;
      while (std::getline(f, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string a, st, fe;
        if (!std::getline(ls, a, ',') || !std::getline(ls, st, ',') || !std::getline(ls, fe, ','))
          throw std::runtime_error(path + ": row " + std::to_string(row) + ": expected 3 columns");
        try {
          s.x.push_back(std::stod(a));
          s.y.push_back(args.metric == "feasibility" ? std::stod(fe) : std::stod(st));
        } catch (const std::exception&) {
          throw std::runtime_error(path + ": row " + std::to_string(row) + ": malformed value");
        }
      }
    }
    if (args.metric != "stationarity" && args.metric != "feasibility")
      throw std::invalid_argument("unknown metric '" + args.metric + "'");
    series.push_back(std::move(s));
  }

  malm::PlotOptions opt;
  opt.title = args.title;
  opt.x_label = args.axis == "time" ? "seconds" : args.axis;
  opt.y_label = args.metric;
  malm::write_svg(args.out, malm::render_line_plot(series, opt));
  std::cout << "wrote " << args.out << "\n";
  return kExitOk;
}

std::optional<std::string> preparse_config_path(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--config" && i + 1 < argc) return std::string(argv[i + 1]);
    if (a.rfind("--config=", 0) == 0) return a.substr(9);
  }
  return std::nullopt;
}

void add_common_flags(CLI::App* sub, malm::RunConfig& cfg, std::string& config_path) {
  sub->add_option("--config", config_path, "config file (parsed before flags)");
  sub->add_option("--family", cfg.family, "problem family: regression|quadratic");
  sub->add_option("--d", cfg.d, "primal dimension");
  sub->add_option("--N", cfg.N, "sample count (regression)");
  sub->add_option("--m", cfg.m, "constraint count");
  sub->add_option("--sparsity", cfg.sparsity, "generator sparsity (regression)");
  sub->add_option("--label-noise-std", cfg.label_noise_std, "label noise (regression)");
  sub->add_option("--sigma", cfg.sigma, "gradient noise level (quadratic)");
  sub->add_option("--condition", cfg.condition, "Hessian condition number (quadratic)");
  sub->add_option("--seed", cfg.problem_seed, "problem generation seed");
  sub->add_option("--problem", cfg.problem_file, "problem file path");
  sub->add_option("--solver", cfg.solver, "solver: malm|storm_alm|spd");
  sub->add_option("--c-alpha", cfg.c_alpha, "momentum constant");
  sub->add_option("--c-eta", cfg.c_eta, "proximal stepsize constant");
  sub->add_option("--c-beta", cfg.c_beta, "penalty constant");
  sub->add_option("--c-theta", cfg.c_theta, "dual-rate constant");
  sub->add_option("--tau", cfg.tau, "primal stepsize override (spd)");
  sub->add_option("--rho", cfg.rho, "dual stepsize override (spd)");
  sub->add_option("--K", cfg.K, "iteration count");
  sub->add_option("--trials", cfg.trials, "bench trial count");
  sub->add_option("--run-seed", cfg.run_seed, "trajectory seed");
  sub->add_option("--record-every", cfg.record_every, "record cadence");
  sub->add_option("--output-mode", cfg.output_mode, "last|best|uniform_random");
  sub->add_option("--out-dir", cfg.out_dir, "output directory");
  sub->add_option("--timing", cfg.timing, "wall|zero (zero makes traces bit-reproducible)");
  sub->add_flag("--force", cfg.force, "run despite schedule validity warnings");
}

}  // namespace

int main(int argc, char** argv) {
  malm::RunConfig cfg;

  // precedence: builtin defaults < MALM_SEED < config file < flags
  if (const char* env = std::getenv("MALM_SEED")) {
    try {
      const std::uint64_t seed = malm::detail::parse_u64("MALM_SEED", env);
      cfg.problem_seed = seed;
      cfg.run_seed = seed;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitUsage;
    }
  }
  if (const std::optional<std::string> path = preparse_config_path(argc, argv)) {
    try {
      malm::load_config_into(cfg, *path);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitUsage;
    }
  }

  CLI::App app{"linearly constrained stochastic optimization benchmark"};
  app.require_subcommand(1);
  std::string config_path;

  CLI::App* gen = app.add_subcommand("gen", "generate a problem file");
  add_common_flags(gen, cfg, config_path);

  CLI::App* run = app.add_subcommand("run", "run one solver trial");
  add_common_flags(run, cfg, config_path);

  CLI::App* bench = app.add_subcommand("bench", "run all solvers over multiple trials");
  add_common_flags(bench, cfg, config_path);

  CLI::App* verify = app.add_subcommand("verify", "run the numeric verification suite");
  add_common_flags(verify, cfg, config_path);
  std::uint64_t n_resamples = 10000;
  double z = 4.0;
  std::vector<std::string> checks;
  std::vector<std::string> perturb;
  verify->add_option("--n-resamples", n_resamples, "Monte-Carlo resamples per check");
  verify->add_option("--z", z, "standard-error multiplier in the pass rule");
  verify->add_option("--checks", checks, "subset of checks to run")->delimiter(',');
  verify->add_option("--perturb", perturb, "fault injection: <target> <magnitude>")
      ->expected(2);

  CLI::App* plot = app.add_subcommand("plot", "render trace CSVs as an SVG line plot");
  PlotArgs plot_args;
  plot->add_option("csvs", plot_args.csvs, "input CSV files")->required();
  plot->add_option("--axis", plot_args.axis, "iter|grad_evals|time");
  plot->add_option("--metric", plot_args.metric, "stationarity|feasibility");
  plot->add_option("--out", plot_args.out, "output SVG path");
  plot->add_option("--title", plot_args.title, "plot title");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (app.got_subcommand(gen)) return cmd_gen(cfg);
    if (app.got_subcommand(run)) return cmd_run(cfg);
    if (app.got_subcommand(bench)) return cmd_bench(cfg);
    if (app.got_subcommand(verify)) {
      malm::validate_config(cfg);
      malm::VerifyOptions vopt;
      vopt.n_resamples = n_resamples;
      vopt.z = z;
      vopt.seed = cfg.problem_seed;
      vopt.checks = checks;
      if (!perturb.empty()) {
        if (perturb[0] != "dual-update")
          throw std::invalid_argument("unknown perturbation target '" + perturb[0] + "'");
        vopt.perturb.target = malm::Perturbation::Target::dual_update;
        std::size_t pos = 0;
        vopt.perturb.magnitude = std::stod(perturb[1], &pos);
        if (pos != perturb[1].size())
          throw std::invalid_argument("perturbation magnitude must be a number");
      }
      return cmd_verify(cfg, vopt);
    }
    if (app.got_subcommand(plot)) return cmd_plot(plot_args);
  } catch (const malm::DivergenceError& e) {
    std::cerr << "divergence: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
