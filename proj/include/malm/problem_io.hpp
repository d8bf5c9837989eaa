#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

#include "malm/problem.hpp"

namespace malm {

// Flat binary problem container. Layout (little-endian):
//   magic "MALMPB1\0", u32 version, u32 family,
//   u64 d, N, m, seed,
//   f64 L, f_lower, sigma, sparsity, label_noise_std, condition,
//   u8 has_kkt,
//   A (m*d), b (m), x_feas (d)            -- always present
//   regression: D (N*d), y (N), x_gen (d)
//   quadratic:  Q (d*d), c (d), [x* (d), mu* (m) when has_kkt]
// All matrices are stored row-major as f64.
inline constexpr char kProblemMagic[8] = {'M', 'A', 'L', 'M', 'P', 'B', '1', '\0'};
inline constexpr std::uint32_t kProblemVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "problem container assumes a little-endian host");

namespace detail {

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in, const std::string& name) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error(name + ": truncated problem file");
  return v;
}

inline void put_matrix(std::ostream& out, const Matrix& M) {
  for (Index i = 0; i < M.rows(); ++i)
    for (Index j = 0; j < M.cols(); ++j) put<double>(out, M(i, j));
}

inline Matrix get_matrix(std::istream& in, Index rows, Index cols, const std::string& name) {
  Matrix M(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) M(i, j) = get<double>(in, name);
  return M;
}

inline void put_vector(std::ostream& out, const Vector& v) {
  for (Index i = 0; i < v.size(); ++i) put<double>(out, v[i]);
}

inline Vector get_vector(std::istream& in, Index n, const std::string& name) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = get<double>(in, name);
  return v;
}

}  // namespace detail

inline void save_problem(std::ostream& out, const ConstrainedProblem& p) {
  out.write(kProblemMagic, sizeof(kProblemMagic));
  detail::put<std::uint32_t>(out, kProblemVersion);
  detail::put<std::uint32_t>(out, p.family == Family::regression ? 0u : 1u);
  detail::put<std::uint64_t>(out, static_cast<std::uint64_t>(p.d));
  detail::put<std::uint64_t>(out, static_cast<std::uint64_t>(p.N));
  detail::put<std::uint64_t>(out, static_cast<std::uint64_t>(p.m));
  detail::put<std::uint64_t>(out, p.seed);
  detail::put<double>(out, p.L);
  detail::put<double>(out, p.f_lower);
  detail::put<double>(out, p.sigma);
  detail::put<double>(out, p.sparsity);
  detail::put<double>(out, p.label_noise_std);
  detail::put<double>(out, p.condition);
  detail::put<std::uint8_t>(out, p.kkt.has_value() ? 1 : 0);
  detail::put_matrix(out, p.A);
  detail::put_vector(out, p.b);
  detail::put_vector(out, p.x_feas);
  if (p.family == Family::regression) {
    detail::put_matrix(out, p.D);
    detail::put_vector(out, p.y);
    detail::put_vector(out, p.x_gen);
  } else {
    detail::put_matrix(out, p.Q);
    detail::put_vector(out, p.c);
    if (p.kkt) {
      detail::put_vector(out, p.kkt->x);
      detail::put_vector(out, p.kkt->mu);
    }
  }
  if (!out) throw std::runtime_error("save_problem: write failed");
}

inline void save_problem(const std::string& path, const ConstrainedProblem& p) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("save_problem: cannot open " + path);
  save_problem(f, p);
}

inline ConstrainedProblem load_problem(std::istream& in, const std::string& name) {
  char magic[sizeof(kProblemMagic)];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kProblemMagic, sizeof(magic)) != 0)
    throw std::runtime_error(name + ": not a MALMPB1 problem file");
  const auto version = detail::get<std::uint32_t>(in, name);
  if (version != kProblemVersion)
    throw std::runtime_error(name + ": unsupported problem file version " +
                             std::to_string(version));
  ConstrainedProblem p;
  const auto family = detail::get<std::uint32_t>(in, name);
  if (family > 1) throw std::runtime_error(name + ": unknown problem family tag");
  p.family = family == 0 ? Family::regression : Family::quadratic;
  p.d = static_cast<Index>(detail::get<std::uint64_t>(in, name));
  p.N = static_cast<Index>(detail::get<std::uint64_t>(in, name));
  p.m = static_cast<Index>(detail::get<std::uint64_t>(in, name));
  p.seed = detail::get<std::uint64_t>(in, name);
  p.L = detail::get<double>(in, name);
  p.f_lower = detail::get<double>(in, name);
  p.sigma = detail::get<double>(in, name);
  p.sparsity = detail::get<double>(in, name);
  p.label_noise_std = detail::get<double>(in, name);
  p.condition = detail::get<double>(in, name);
  const auto has_kkt = detail::get<std::uint8_t>(in, name);
  if (p.d <= 0 || p.m <= 0) throw std::runtime_error(name + ": invalid dimensions");
  p.A = detail::get_matrix(in, p.m, p.d, name);
  p.b = detail::get_vector(in, p.m, name);
  p.x_feas = detail::get_vector(in, p.d, name);
  if (p.family == Family::regression) {
    if (p.N <= 0) throw std::runtime_error(name + ": invalid sample count");
    p.D = detail::get_matrix(in, p.N, p.d, name);
    p.y = detail::get_vector(in, p.N, name);
    p.x_gen = detail::get_vector(in, p.d, name);
  } else {
    p.Q = detail::get_matrix(in, p.d, p.d, name);
    p.c = detail::get_vector(in, p.d, name);
    if (has_kkt) {
      KktPair k;
      k.x = detail::get_vector(in, p.d, name);
      k.mu = detail::get_vector(in, p.m, name);
      p.kkt = std::move(k);
    }
  }
  return p;
}

inline ConstrainedProblem load_problem(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("load_problem: cannot open " + path);
  return load_problem(f, path);
}

}  // namespace malm
