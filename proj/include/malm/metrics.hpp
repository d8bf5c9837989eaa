#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "malm/problem.hpp"
#include "malm/rng.hpp"
#include "malm/schedule.hpp"

namespace malm {

enum class SolverTag { malm, storm_alm, spd };

inline std::string solver_name(SolverTag t) {
  switch (t) {
    case SolverTag::malm: return "malm";
    case SolverTag::storm_alm: return "storm_alm";
    case SolverTag::spd: return "spd";
  }
  return "unknown";
}

// (||grad f(x) + A^T mu||, ||A x - b||) with the exact full gradient.
inline std::pair<double, double> kkt_residuals(const ConstrainedProblem& p, const Vector& x,
                                               const Vector& mu) {
  require_dim(p, x, "kkt_residuals");
  if (mu.size() != p.m) throw std::invalid_argument("kkt_residuals: multiplier dimension mismatch");
  const double stat = (full_gradient(p, x) + p.A.transpose() * mu).norm();
  const double feas = (p.A * x - p.b).norm();
  return {stat, feas};
}

struct IterationRecord {
  std::uint64_t iter = 0;
  std::uint64_t grad_evals = 0;
  std::uint64_t elapsed_ns = 0;
  double stationarity = 0.0;
  double feasibility = 0.0;
  double objective = 0.0;
};

struct Trace {
  SolverTag tag = SolverTag::malm;
  std::uint64_t seed = 0;
  ScheduleConstants constants;   // malm / storm_alm runs
  double tau = 0.0, rho = 0.0;   // spd runs
  std::vector<IterationRecord> records;
  Vector final_x, final_mu;
  Vector best_x, best_mu;        // recorded iterate minimizing stationarity + feasibility
  std::uint64_t best_iter = 0;
  bool diverged = false;
  std::uint64_t diverged_at = 0;
};

struct SelectedOutput {
  Vector x;
  Vector mu;
  std::uint64_t index = 0;  // the R of the kept (x^{R+1}, mu^{R+1})
};

// Keeps (x^{R+1}, mu^{R+1}) with R uniform over the offered steps using
// reservoir sampling, so a uniformly selected iterate is available without
// storing the trajectory. offer(r, ...) is called once per completed step r.
class ReservoirSelector {
public:
  explicit ReservoirSelector(RngStream rng) : rng_(rng) {}

  void offer(std::uint64_t r, const Vector& x_next, const Vector& mu_next) {
    ++count_;
    if (rng_.uniform_index(static_cast<std::size_t>(count_)) == 0) {
      kept_.x = x_next;
      kept_.mu = mu_next;
      kept_.index = r;
    }
  }

  bool empty() const { return count_ == 0; }

  const SelectedOutput& selection() const {
    if (count_ == 0) throw std::runtime_error("ReservoirSelector: no iterates offered");
    return kept_;
  }

private:
  RngStream rng_;
  std::uint64_t count_ = 0;
  SelectedOutput kept_;
};

enum class SelectMode { uniform_random, best_combined, last };

// best_combined / last selection from a finished trace. Uniform selection is
// performed during the run via ReservoirSelector (or post hoc from a stored
// history with the overload below).
inline SelectedOutput select_output(const Trace& t, SelectMode mode) {
  if (t.records.empty()) throw std::invalid_argument("select_output: empty trace");
  SelectedOutput out;
  if (mode == SelectMode::last) {
    out.x = t.final_x;
    out.mu = t.final_mu;
    out.index = t.records.back().iter;
    return out;
  }
  if (mode == SelectMode::best_combined) {
    out.x = t.best_x;
    out.mu = t.best_mu;
    out.index = t.best_iter;
    return out;
  }
  throw std::invalid_argument("select_output: uniform mode needs a history or a reservoir");
}

// Post-hoc uniform draw over a stored full history of (x^{r+1}, mu^{r+1})
// pairs, replaying the reservoir process so it matches an in-run selector
// seeded identically.
inline SelectedOutput select_output(const std::vector<std::pair<Vector, Vector>>& history,
                                    RngStream rng) {
  if (history.empty()) throw std::invalid_argument("select_output: empty history");
  ReservoirSelector sel(rng);
  for (std::size_t r = 0; r < history.size(); ++r)
    sel.offer(static_cast<std::uint64_t>(r), history[r].first, history[r].second);
  return sel.selection();
}

struct AveragedCurve {
  std::vector<double> abscissa;
  std::vector<double> stationarity;
  std::vector<double> feasibility;
};

enum class AverageGrid { by_iter, by_grad_evals };

inline double last_value_at(const std::vector<double>& xs, const std::vector<double>& ys,
                            double x) {
  // xs ascending; value of the step function that jumps at each xs[i]
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  if (it == xs.begin()) return ys.front();
  return ys[static_cast<std::size_t>(it - xs.begin()) - 1];
}

// Pointwise arithmetic mean of stationarity/feasibility over trials.
// by_iter requires identical record grids; by_grad_evals aligns on the
// gradient-evaluation axis with last-value interpolation.
inline AveragedCurve average_traces(const std::vector<Trace>& traces, AverageGrid grid) {
  if (traces.empty()) throw std::invalid_argument("average_traces: empty trace list");
  for (const Trace& t : traces)
    if (t.tag != traces.front().tag)
      throw std::invalid_argument("average_traces: mixed solver tags");

  AveragedCurve curve;
  const double inv_n = 1.0 / static_cast<double>(traces.size());

  if (grid == AverageGrid::by_iter) {
    const std::size_t n_rec = traces.front().records.size();
    for (const Trace& t : traces) {
      if (t.records.size() != n_rec)
        throw std::invalid_argument("average_traces: mismatched record grids");
      for (std::size_t k = 0; k < n_rec; ++k)
        if (t.records[k].iter != traces.front().records[k].iter)
          throw std::invalid_argument("average_traces: mismatched record grids");
    }
    curve.abscissa.resize(n_rec);
    curve.stationarity.assign(n_rec, 0.0);
    curve.feasibility.assign(n_rec, 0.0);
    for (std::size_t k = 0; k < n_rec; ++k)
      curve.abscissa[k] = static_cast<double>(traces.front().records[k].iter);
    for (const Trace& t : traces) {
      for (std::size_t k = 0; k < n_rec; ++k) {
        curve.stationarity[k] += t.records[k].stationarity * inv_n;
        curve.feasibility[k] += t.records[k].feasibility * inv_n;
      }
    }
    return curve;
  }

  // by_grad_evals: union of abscissas, clipped to the range every trace covers
  std::vector<double> axis;
  double lo = 0.0;
  for (const Trace& t : traces) {
    if (t.records.empty()) throw std::invalid_argument("average_traces: empty trace");
    lo = std::max(lo, static_cast<double>(t.records.front().grad_evals));
    for (const IterationRecord& r : t.records) axis.push_back(static_cast<double>(r.grad_evals));
  }
  std::sort(axis.begin(), axis.end());
  axis.erase(std::unique(axis.begin(), axis.end()), axis.end());
  axis.erase(std::remove_if(axis.begin(), axis.end(), [lo](double v) { return v < lo; }),
             axis.end());

  curve.abscissa = axis;
  curve.stationarity.assign(axis.size(), 0.0);
  curve.feasibility.assign(axis.size(), 0.0);
  for (const Trace& t : traces) {
    std::vector<double> xs, st, fe;
    xs.reserve(t.records.size());
    for (const IterationRecord& r : t.records) {
      xs.push_back(static_cast<double>(r.grad_evals));
      st.push_back(r.stationarity);
      fe.push_back(r.feasibility);
    }
    for (std::size_t k = 0; k < axis.size(); ++k) {
      curve.stationarity[k] += last_value_at(xs, st, axis[k]) * inv_n;
      curve.feasibility[k] += last_value_at(xs, fe, axis[k]) * inv_n;
    }
  }
  return curve;
}

// Mean stationarity/feasibility over trials against the per-record median
// elapsed time, damping scheduler noise on the wall-clock axis.
inline AveragedCurve time_axis_curve(const std::vector<Trace>& traces) {
  if (traces.empty()) throw std::invalid_argument("time_axis_curve: empty trace list");
  const std::size_t n_rec = traces.front().records.size();
  for (const Trace& t : traces)
    if (t.records.size() != n_rec)
      throw std::invalid_argument("time_axis_curve: mismatched record grids");
  AveragedCurve curve;
  curve.abscissa.resize(n_rec);
  curve.stationarity.assign(n_rec, 0.0);
  curve.feasibility.assign(n_rec, 0.0);
  const double inv_n = 1.0 / static_cast<double>(traces.size());
  std::vector<double> ts(traces.size());
  for (std::size_t k = 0; k < n_rec; ++k) {
    for (std::size_t t = 0; t < traces.size(); ++t) {
      ts[t] = static_cast<double>(traces[t].records[k].elapsed_ns);
      curve.stationarity[k] += traces[t].records[k].stationarity * inv_n;
      curve.feasibility[k] += traces[t].records[k].feasibility * inv_n;
    }
    std::sort(ts.begin(), ts.end());
    const std::size_t n = ts.size();
    curve.abscissa[k] = n % 2 == 1 ? ts[n / 2] : 0.5 * (ts[n / 2 - 1] + ts[n / 2]);
  }
  return curve;
}

inline constexpr const char* kTraceCsvHeader = "iter,grad_evals,elapsed_ns,stationarity,feasibility,objective";

inline std::string format_full(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string trace_to_csv(const Trace& t) {
  std::string out = kTraceCsvHeader;
  out += '\n';
  for (const IterationRecord& r : t.records) {
    out += std::to_string(r.iter);
    out += ',';
    out += std::to_string(r.grad_evals);
    out += ',';
    out += std::to_string(r.elapsed_ns);
    out += ',';
    out += format_full(r.stationarity);
    out += ',';
    out += format_full(r.feasibility);
    out += ',';
    out += format_full(r.objective);
    out += '\n';
  }
  return out;
}

inline void write_trace_csv(const std::string& path, const Trace& t) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("write_trace_csv: cannot open " + path);
  f << trace_to_csv(t);
  if (!f) throw std::runtime_error("write_trace_csv: write failed for " + path);
}

inline std::vector<IterationRecord> read_trace_csv(std::istream& in, const std::string& name) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(name + ": empty trace CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTraceCsvHeader)
    throw std::runtime_error(name + ": unexpected trace CSV header: " + line);
  std::vector<IterationRecord> records;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string field;
    IterationRecord r;
    auto next = [&](const char* what) {
      if (!std::getline(ls, field, ','))
        throw std::runtime_error(name + ": row " + std::to_string(row) + ": missing " + what);
      return field;
    };
    try {
      r.iter = std::stoull(next("iter"));
      r.grad_evals = std::stoull(next("grad_evals"));
      r.elapsed_ns = std::stoull(next("elapsed_ns"));
      r.stationarity = std::stod(next("stationarity"));
      r.feasibility = std::stod(next("feasibility"));
      r.objective = std::stod(next("objective"));
    } catch (const std::exception&) {
      throw std::runtime_error(name + ": row " + std::to_string(row) + ": malformed value");
    }
    records.push_back(r);
  }
  return records;
}

inline std::vector<IterationRecord> read_trace_csv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("read_trace_csv: cannot open " + path);
  return read_trace_csv(f, path);
}

}  // namespace malm
