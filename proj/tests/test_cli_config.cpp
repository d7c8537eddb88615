#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "brw/config.hpp"
#include "brw/verify.hpp"

using namespace brw;

TEST_CASE("config file with comments and overrides") {
  std::istringstream in(
      "# a run\n"
      "dim = 3\n"
      "n = 64   # generation\n"
      "n_grid = 128, 256,512\n"
      "offspring = geometric:0.5\n"
      "seed = 18446744073709551615\n"
      "clamp = none\n"
      "x = 1,0,2\n");
  RunConfig cfg;
  cfg.load(in);
  CHECK(cfg.dim == 3);
  CHECK(cfg.n == 64);
  CHECK(cfg.n_grid == std::vector<int>{128, 256, 512});
  CHECK(*cfg.seed == 18446744073709551615ULL);
  CHECK_FALSE(cfg.clamp_c.has_value());
  CHECK_FALSE(cfg.clamp_radius_for(10).has_value());
  cfg.validate(true);
  cfg.set("clamp", "6");
  CHECK(cfg.clamp_radius_for(100).has_value());
  cfg.set("n", "32");
  CHECK(cfg.n == 32);
}

TEST_CASE("validation errors") {
  RunConfig cfg;
  cfg.n = 10;
  CHECK_THROWS_AS(cfg.validate(true), ConfigError);  // no seed
  cfg.validate(false);
  cfg.seed = 1;
  cfg.n_grid = {256, 128};
  CHECK_THROWS_AS(cfg.validate(true), ConfigError);
  cfg.n_grid = {};
  cfg.dim = 4;
  CHECK_THROWS(cfg.validate(true));
  cfg.dim = 2;
  cfg.target = {1, 2, 3};
  CHECK_THROWS_AS(cfg.validate(true), ConfigError);
  cfg.target = {1, 2};
  cfg.offspring = "poisson:1";
  CHECK_THROWS(cfg.validate(true));
}

TEST_CASE("malformed input") {
  RunConfig cfg;
  CHECK_THROWS_AS(cfg.set("colour", "red"), ConfigError);
  CHECK_THROWS_AS(cfg.set("n", "12x"), ConfigError);
  CHECK_THROWS_AS(cfg.set("conditioned", "maybe"), ConfigError);
  std::istringstream bad("n 12\n");
  CHECK_THROWS_AS(cfg.load(bad), ConfigError);
}

TEST_CASE("header lists every key") {
  RunConfig cfg;
  cfg.seed = 5;
  const std::string h = cfg.header();
  for (const char* key : {"dim", "n", "n_grid", "offspring", "reps", "seed", "conditioned",
                          "clamp", "output", "budget", "x", "ell", "theta"}) {
    CHECK(h.find(std::string("# ") + key + "=") != std::string::npos);
  }
  CHECK(h.find("# seed=5\n") != std::string::npos);
}

TEST_CASE("suites") {
  CHECK(suite_criteria("all").size() == static_cast<std::size_t>(kCriterionCount));
  CHECK(suite_criteria("fundamental") == std::vector<int>{1, 2, 3});
  CHECK(suite_criteria("conditioned") == std::vector<int>{10});
  CHECK(suite_criteria("7") == std::vector<int>{7});
  CHECK(suite_criteria("2,11") == std::vector<int>{2, 11});
  CHECK_THROWS(suite_criteria("15"));
  CHECK_THROWS(suite_criteria("bogus"));
  for (int id = 1; id <= kCriterionCount; ++id) CHECK(std::string(criterion_name(id)).size() > 0);
}
