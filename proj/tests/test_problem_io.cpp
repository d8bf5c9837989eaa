#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "malm/problem.hpp"
#include "malm/problem_io.hpp"

using malm::ConstrainedProblem;

namespace {

void require_identical(const ConstrainedProblem& a, const ConstrainedProblem& b) {
  REQUIRE(a.family == b.family);
  REQUIRE(a.d == b.d);
  REQUIRE(a.N == b.N);
  REQUIRE(a.m == b.m);
  REQUIRE(a.seed == b.seed);
  REQUIRE(a.sparsity == b.sparsity);
  REQUIRE(a.label_noise_std == b.label_noise_std);
  REQUIRE(a.sigma == b.sigma);
  REQUIRE(a.L == b.L);
  REQUIRE(a.f_lower == b.f_lower);
  REQUIRE(a.D == b.D);
  REQUIRE(a.y == b.y);
  REQUIRE(a.x_gen == b.x_gen);
  REQUIRE(a.Q == b.Q);
  REQUIRE(a.c == b.c);
  REQUIRE(a.A == b.A);
  REQUIRE(a.b == b.b);
  REQUIRE(a.x_feas == b.x_feas);
  REQUIRE(a.kkt.has_value() == b.kkt.has_value());
  if (a.kkt) {
    REQUIRE(a.kkt->x == b.kkt->x);
    REQUIRE(a.kkt->mu == b.kkt->mu);
  }
}

std::string serialized(const ConstrainedProblem& p) {
  std::ostringstream out(std::ios::binary);
  malm::save_problem(out, p);
  return out.str();
}

}  // namespace

TEST_CASE("stream round-trip is bitwise exact for both families") {
  const ConstrainedProblem reg = malm::generate_regression(17, 33, 4, 0.2, 0.1, 41);
  const ConstrainedProblem quad = malm::generate_quadratic(12, 3, 7.0, 0.4, 42);
  for (const ConstrainedProblem* p : {&reg, &quad}) {
    const std::string bytes = serialized(*p);
    std::istringstream in(bytes, std::ios::binary);
    const ConstrainedProblem back = malm::load_problem(in, "mem");
    require_identical(*p, back);
    // serialization itself is a pure function of the problem
    REQUIRE(serialized(back) == bytes);
  }
}

TEST_CASE("file round-trip preserves every field") {
  const ConstrainedProblem p = malm::generate_quadratic(9, 2, 3.0, 0.25, 43);
  const std::string path = "io_roundtrip_test.malmpb";
  malm::save_problem(path, p);
  const ConstrainedProblem back = malm::load_problem(path);
  require_identical(p, back);
  std::remove(path.c_str());
}

TEST_CASE("rejects foreign and damaged inputs") {
  {
    std::istringstream in(std::string("not a problem file at all"), std::ios::binary);
    REQUIRE_THROWS_AS(malm::load_problem(in, "mem"), std::runtime_error);
  }
  {
    std::istringstream in(std::string(), std::ios::binary);
    REQUIRE_THROWS_AS(malm::load_problem(in, "mem"), std::runtime_error);
  }
  const ConstrainedProblem p = malm::generate_regression(8, 10, 2, 0.3, 0.1, 44);
  const std::string bytes = serialized(p);
  {
    // truncate in the middle of the payload
    std::istringstream in(bytes.substr(0, bytes.size() / 2), std::ios::binary);
    REQUIRE_THROWS_AS(malm::load_problem(in, "mem"), std::runtime_error);
  }
  {
    // flip one magic byte
    std::string bad = bytes;
    bad[0] = 'X';
    std::istringstream in(bad, std::ios::binary);
    REQUIRE_THROWS_AS(malm::load_problem(in, "mem"), std::runtime_error);
  }
  REQUIRE_THROWS_AS(malm::load_problem("no_such_file.malmpb"), std::runtime_error);
}
