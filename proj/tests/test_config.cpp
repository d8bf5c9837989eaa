#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>

#include "malm/config.hpp"

using malm::RunConfig;

TEST_CASE("defaults serialize and parse back unchanged") {
  const RunConfig base;
  REQUIRE(malm::parse_config(malm::serialize_config(base)) == base);
}

TEST_CASE("a fully customized config survives the round-trip") {
  RunConfig c;
  c.family = "quadratic";
  c.d = 37;
  c.N = 123;
  c.m = 9;
  c.sparsity = 0.25;
  c.label_noise_std = 0.05;
  c.sigma = 1.0 / 3.0;  // full precision must survive
  c.condition = 42.5;
  c.problem_seed = 999;
  c.problem_file = "some/problem.malmpb";
  c.solver = "storm_alm";
  c.c_alpha = 0.123456789012345;
  c.c_eta = 17.0;
  c.c_beta = 0.004;
  c.c_theta = 0.2;
  c.tau = 0.001;
  c.rho = 2.5;
  c.K = 54321;
  c.trials = 3;
  c.run_seed = 17;
  c.record_every = 100;
  c.output_mode = "best";
  c.out_dir = "out/somewhere";
  c.timing = "zero";
  c.force = true;
  REQUIRE(malm::parse_config(malm::serialize_config(c)) == c);
}

TEST_CASE("parser tolerates comments, blank lines, spacing, CRLF") {
  const std::string text =
      "# top comment\r\n"
      "\r\n"
      "[problem]\r\n"
      "  family = quadratic   \r\n"
      "\td =\t50\r\n"
      "# mid comment\n"
      "[run]\n"
      "K=77\n"
      "\n"
      "[solver]\n"
      "c_eta = 9.5\n";
  const RunConfig c = malm::parse_config(text);
  REQUIRE(c.family == "quadratic");
  REQUIRE(c.d == 50);
  REQUIRE(c.K == 77);
  REQUIRE(c.c_eta == 9.5);
  REQUIRE(c.N == RunConfig{}.N);  // untouched keys keep their defaults
}

TEST_CASE("overlay parsing only replaces the keys present") {
  RunConfig c;
  c.d = 11;
  c.K = 222;
  malm::parse_config_into(c, "[run]\nK = 333\n");
  REQUIRE(c.K == 333);
  REQUIRE(c.d == 11);
}

TEST_CASE("parse errors carry line numbers and key context") {
  auto expect_error = [](const std::string& text, const std::string& needle) {
    try {
      malm::parse_config(text);
      FAIL("expected invalid_argument for: " << text);
    } catch (const std::invalid_argument& e) {
      INFO(e.what());
      REQUIRE(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  expect_error("[problem]\nbogus = 1\n", "bogus");
  expect_error("[nosuch]\nd = 1\n", "nosuch");
  expect_error("d = 1\n", "section");            // key before any section header
  expect_error("[problem]\nd = -4\n", "d");      // negative count
  expect_error("[problem]\nd = 4x\n", "d");      // trailing garbage
  expect_error("[problem]\nsigma = abc\n", "sigma");
  expect_error("[run]\nforce = maybe\n", "force");
  expect_error("[problem]\njust a line\n", "line 2");
  expect_error("[problem\nd = 1\n", "line 1");   // unterminated header
}

TEST_CASE("boolean spellings") {
  REQUIRE(malm::parse_config("[run]\nforce = true\n").force);
  REQUIRE(malm::parse_config("[run]\nforce = 1\n").force);
  REQUIRE_FALSE(malm::parse_config("[run]\nforce = false\n").force);
  REQUIRE_FALSE(malm::parse_config("[run]\nforce = 0\n").force);
}

TEST_CASE("file round-trip and missing-file error") {
  RunConfig c;
  c.family = "quadratic";
  c.K = 4242;
  const std::string path = "config_roundtrip_test.ini";
  malm::save_config(path, c);
  REQUIRE(malm::load_config(path) == c);
  RunConfig overlay;
  malm::load_config_into(overlay, path);
  REQUIRE(overlay == c);
  std::remove(path.c_str());
  REQUIRE_THROWS_AS(malm::load_config("definitely_missing.ini"), std::runtime_error);
}

TEST_CASE("validation rejects each out-of-range field") {
  auto expect_invalid = [](void (*mutate)(RunConfig&)) {
    RunConfig c;
    mutate(c);
    REQUIRE_THROWS_AS(malm::validate_config(c), std::invalid_argument);
  };
  REQUIRE_NOTHROW(malm::validate_config(RunConfig{}));
  expect_invalid([](RunConfig& c) { c.family = "polynomial"; });
  expect_invalid([](RunConfig& c) { c.solver = "adam"; });
  expect_invalid([](RunConfig& c) { c.output_mode = "median"; });
  expect_invalid([](RunConfig& c) { c.timing = "cpu"; });
  expect_invalid([](RunConfig& c) { c.d = 0; });
  expect_invalid([](RunConfig& c) { c.N = 0; });
  expect_invalid([](RunConfig& c) { c.m = 0; });
  expect_invalid([](RunConfig& c) { c.sparsity = 0.0; });
  expect_invalid([](RunConfig& c) { c.sparsity = 1.5; });
  expect_invalid([](RunConfig& c) { c.label_noise_std = -1.0; });
  expect_invalid([](RunConfig& c) { c.sigma = -0.5; });
  expect_invalid([](RunConfig& c) { c.condition = 0.5; });
  expect_invalid([](RunConfig& c) { c.c_alpha = 0.0; });
  expect_invalid([](RunConfig& c) { c.c_alpha = 1.0; });
  expect_invalid([](RunConfig& c) { c.c_eta = 0.0; });
  expect_invalid([](RunConfig& c) { c.c_beta = -0.1; });
  expect_invalid([](RunConfig& c) { c.c_theta = 0.0; });
  expect_invalid([](RunConfig& c) { c.tau = -1.0; });
  expect_invalid([](RunConfig& c) { c.rho = -1.0; });
  expect_invalid([](RunConfig& c) { c.K = 0; });
  expect_invalid([](RunConfig& c) { c.trials = 0; });
  expect_invalid([](RunConfig& c) { c.record_every = 0; });
  // uniform selection is a valid mode and zero tau/rho mean "derive from schedule"
  RunConfig ok;
  ok.output_mode = "uniform_random";
  ok.tau = 0.0;
  ok.rho = 0.0;
  REQUIRE_NOTHROW(malm::validate_config(ok));
}

TEST_CASE("enum helpers translate and reject") {
  REQUIRE(malm::solver_tag_from_string("malm") == malm::SolverTag::malm);
  REQUIRE(malm::solver_tag_from_string("storm_alm") == malm::SolverTag::storm_alm);
  REQUIRE(malm::solver_tag_from_string("spd") == malm::SolverTag::spd);
  REQUIRE_THROWS_AS(malm::solver_tag_from_string("sgd"), std::invalid_argument);
  REQUIRE(malm::family_from_string("regression") == malm::Family::regression);
  REQUIRE(malm::family_from_string("quadratic") == malm::Family::quadratic);
  REQUIRE_THROWS_AS(malm::family_from_string("cubic"), std::invalid_argument);
  REQUIRE(malm::select_mode_from_string("last") == malm::SelectMode::last);
  REQUIRE(malm::select_mode_from_string("best") == malm::SelectMode::best_combined);
  REQUIRE(malm::select_mode_from_string("uniform_random") == malm::SelectMode::uniform_random);
  REQUIRE_THROWS_AS(malm::select_mode_from_string("worst"), std::invalid_argument);
}
