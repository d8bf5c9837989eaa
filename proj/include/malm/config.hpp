#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "malm/metrics.hpp"

namespace malm {

// Experiment description shared by every subcommand. Serializes to a
// line-oriented `key = value` file with [problem], [solver] and [run]
// sections; command-line flags override file values.
struct RunConfig {
  // [problem]
  std::string family = "regression";
  std::uint64_t d = 200;
  std::uint64_t N = 1000;
  std::uint64_t m = 20;
  double sparsity = 0.05;
  double label_noise_std = 0.1;
  double sigma = 0.5;
  double condition = 10.0;
  std::uint64_t problem_seed = 7;
  std::string problem_file;

  // [solver]
  std::string solver = "malm";
  double c_alpha = 0.7;
  double c_eta = 6.0;
  double c_beta = 0.02;
  double c_theta = 0.1;
  double tau = 0.0;  // 0: use 1/eta
  double rho = 0.0;  // 0: use beta

  // [run]
  std::uint64_t K = 1000;
  std::uint64_t trials = 20;
  std::uint64_t run_seed = 1;
  std::uint64_t record_every = 10;
  std::string output_mode = "last";
  std::string out_dir = ".";
  std::string timing = "wall";
  bool force = false;

  bool operator==(const RunConfig&) const = default;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  std::uint64_t v = 0;
  try {
    if (!value.empty() && value[0] == '-') throw std::invalid_argument("negative");
    v = std::stoull(value, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("config: key '" + key + "' expects a nonnegative integer, got '" +
                                value + "'");
  }
  if (pos != value.size())
    throw std::invalid_argument("config: key '" + key + "' expects a nonnegative integer, got '" +
                                value + "'");
  return v;
}

inline double parse_f64(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("config: key '" + key + "' expects a number, got '" + value + "'");
  }
  if (pos != value.size())
    throw std::invalid_argument("config: key '" + key + "' expects a number, got '" + value + "'");
  return v;
}

inline bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw std::invalid_argument("config: key '" + key + "' expects true/false, got '" + value + "'");
}

}  // namespace detail

inline SolverTag solver_tag_from_string(const std::string& s) {
  if (s == "malm") return SolverTag::malm;
  if (s == "storm_alm") return SolverTag::storm_alm;
  if (s == "spd") return SolverTag::spd;
  throw std::invalid_argument("unknown solver '" + s + "' (expected malm|storm_alm|spd)");
}

inline Family family_from_string(const std::string& s) {
  if (s == "regression") return Family::regression;
  if (s == "quadratic") return Family::quadratic;
  throw std::invalid_argument("unknown family '" + s + "' (expected regression|quadratic)");
}

inline SelectMode select_mode_from_string(const std::string& s) {
  if (s == "last") return SelectMode::last;
  if (s == "best") return SelectMode::best_combined;
  if (s == "uniform_random") return SelectMode::uniform_random;
  throw std::invalid_argument("unknown output_mode '" + s +
                              "' (expected last|best|uniform_random)");
}

// Throws invalid_argument describing the first violated constraint.
inline void validate_config(const RunConfig& c) {
  family_from_string(c.family);
  solver_tag_from_string(c.solver);
  select_mode_from_string(c.output_mode);
  if (c.timing != "wall" && c.timing != "zero")
    throw std::invalid_argument("timing must be wall or zero, got '" + c.timing + "'");
  if (c.d == 0 || c.N == 0 || c.m == 0) throw std::invalid_argument("d, N, m must be positive");
  if (!(c.sparsity > 0.0 && c.sparsity <= 1.0))
    throw std::invalid_argument("sparsity must lie in (0, 1]");
  if (!(c.label_noise_std >= 0.0)) throw std::invalid_argument("label_noise_std must be >= 0");
  if (!(c.sigma >= 0.0)) throw std::invalid_argument("sigma must be >= 0");
  if (!(c.condition >= 1.0)) throw std::invalid_argument("condition must be >= 1");
  if (!(c.c_alpha > 0.0 && c.c_alpha < 1.0))
    throw std::invalid_argument("c_alpha must lie in (0, 1)");
  if (!(c.c_eta > 0.0) || !(c.c_beta > 0.0) || !(c.c_theta > 0.0))
    throw std::invalid_argument("c_eta, c_beta, c_theta must be positive");
  if (!(c.tau >= 0.0) || !(c.rho >= 0.0)) throw std::invalid_argument("tau, rho must be >= 0");
  if (c.K == 0) throw std::invalid_argument("K must be positive");
  if (c.trials == 0) throw std::invalid_argument("trials must be >= 1");
  if (c.record_every == 0) throw std::invalid_argument("record_every must be positive");
}

// Applies one `key = value` assignment; `section` must be problem|solver|run.
inline void apply_config_key(RunConfig& c, const std::string& section, const std::string& key,
                             const std::string& value) {
  using detail::parse_bool;
  using detail::parse_f64;
  using detail::parse_u64;
  if (section == "problem") {
    if (key == "family") c.family = value;
    else if (key == "d") c.d = parse_u64(key, value);
    else if (key == "N") c.N = parse_u64(key, value);
    else if (key == "m") c.m = parse_u64(key, value);
    else if (key == "sparsity") c.sparsity = parse_f64(key, value);
    else if (key == "label_noise_std") c.label_noise_std = parse_f64(key, value);
    else if (key == "sigma") c.sigma = parse_f64(key, value);
    else if (key == "condition") c.condition = parse_f64(key, value);
    else if (key == "problem_seed") c.problem_seed = parse_u64(key, value);
    else if (key == "problem_file") c.problem_file = value;
    else throw std::invalid_argument("config: unknown key '" + key + "' in [problem]");
  } else if (section == "solver") {
    if (key == "solver") c.solver = value;
    else if (key == "c_alpha") c.c_alpha = parse_f64(key, value);
    else if (key == "c_eta") c.c_eta = parse_f64(key, value);
    else if (key == "c_beta") c.c_beta = parse_f64(key, value);
    else if (key == "c_theta") c.c_theta = parse_f64(key, value);
    else if (key == "tau") c.tau = parse_f64(key, value);
    else if (key == "rho") c.rho = parse_f64(key, value);
    else throw std::invalid_argument("config: unknown key '" + key + "' in [solver]");
  } else if (section == "run") {
    if (key == "K") c.K = parse_u64(key, value);
    else if (key == "trials") c.trials = parse_u64(key, value);
    else if (key == "run_seed") c.run_seed = parse_u64(key, value);
    else if (key == "record_every") c.record_every = parse_u64(key, value);
    else if (key == "output_mode") c.output_mode = value;
    else if (key == "out_dir") c.out_dir = value;
    else if (key == "timing") c.timing = value;
    else if (key == "force") c.force = parse_bool(key, value);
    else throw std::invalid_argument("config: unknown key '" + key + "' in [run]");
  } else {
    throw std::invalid_argument("config: unknown section [" + section + "]");
  }
}

// Applies the text form on top of `c`. Lines: blank, `# comment`,
// `[section]`, `key = value`. Keys absent from the text keep their values.
inline void parse_config_into(RunConfig& c, const std::string& text) {
  std::istringstream in(text);
  std::string line, section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw std::invalid_argument("config: malformed section header at line " +
                                    std::to_string(lineno));
      section = detail::trim(t.substr(1, t.size() - 2));
      if (section != "problem" && section != "solver" && section != "run")
        throw std::invalid_argument("config: unknown section [" + section + "] at line " +
                                    std::to_string(lineno));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: expected 'key = value' at line " +
                                  std::to_string(lineno));
    const std::string key = detail::trim(t.substr(0, eq));
    const std::string value = detail::trim(t.substr(eq + 1));
    if (key.empty())
      throw std::invalid_argument("config: empty key at line " + std::to_string(lineno));
    if (section.empty())
      throw std::invalid_argument("config: key '" + key + "' before any section at line " +
                                  std::to_string(lineno));
    apply_config_key(c, section, key, value);
  }
}

inline RunConfig parse_config(const std::string& text) {
  RunConfig c;
  parse_config_into(c, text);
  return c;
}

inline void load_config_into(RunConfig& c, const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("config: cannot open " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  parse_config_into(c, buf.str());
}

inline RunConfig load_config(const std::string& path) {
  RunConfig c;
  load_config_into(c, path);
  return c;
}

inline std::string serialize_config(const RunConfig& c) {
  std::ostringstream out;
  out << "[problem]\n";
  out << "family = " << c.family << "\n";
  out << "d = " << c.d << "\n";
  out << "N = " << c.N << "\n";
  out << "m = " << c.m << "\n";
  out << "sparsity = " << format_full(c.sparsity) << "\n";
  out << "label_noise_std = " << format_full(c.label_noise_std) << "\n";
  out << "sigma = " << format_full(c.sigma) << "\n";
  out << "condition = " << format_full(c.condition) << "\n";
  out << "problem_seed = " << c.problem_seed << "\n";
  out << "problem_file = " << c.problem_file << "\n";
  out << "\n[solver]\n";
  out << "solver = " << c.solver << "\n";
  out << "c_alpha = " << format_full(c.c_alpha) << "\n";
  out << "c_eta = " << format_full(c.c_eta) << "\n";
  out << "c_beta = " << format_full(c.c_beta) << "\n";
  out << "c_theta = " << format_full(c.c_theta) << "\n";
  out << "tau = " << format_full(c.tau) << "\n";
  out << "rho = " << format_full(c.rho) << "\n";
  out << "\n[run]\n";
  out << "K = " << c.K << "\n";
  out << "trials = " << c.trials << "\n";
  out << "run_seed = " << c.run_seed << "\n";
  out << "record_every = " << c.record_every << "\n";
  out << "output_mode = " << c.output_mode << "\n";
  out << "out_dir = " << c.out_dir << "\n";
  out << "timing = " << c.timing << "\n";
  out << "force = " << (c.force ? "true" : "false") << "\n";
  return out.str();
}

inline void save_config(const std::string& path, const RunConfig& c) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("config: cannot open " + path + " for writing");
  f << serialize_config(c);
  if (!f) throw std::runtime_error("config: write failed for " + path);
}

}  // namespace malm
