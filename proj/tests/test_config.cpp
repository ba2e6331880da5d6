#include <doctest.h>

#include <algorithm>

#include "gevlab/config.hpp"

using namespace gevlab;

namespace {

bool has_error(const ParseOutcome& p, int line, const std::string& fragment) {
  return std::any_of(p.errors.begin(), p.errors.end(), [&](const ConfigError& e) {
    return (line < 0 || e.line == line) && e.message.find(fragment) != std::string::npos;
  });
}

}  // namespace

TEST_CASE("valid multiplier configuration") {
  const ParseOutcome p = parse_config("experiment=multiplier-check\ntheta=2.0\ns=1.0\nt=1/1\nalpha_max=200");
  REQUIRE(p.errors.empty());
  REQUIRE(p.config);
  const ExperimentConfig& c = *p.config;
  CHECK(c.experiment == "multiplier-check");
  CHECK(c.real("theta") == 2.0);
  CHECK(c.rational("t") == 1);
  CHECK(c.integer("alpha_max") == 200);
  CHECK(c.real("A") == 1.0);  // default filled in
  CHECK(c.integer("precision_bits") == 256);
}

TEST_CASE("missing list is named") {
  const ParseOutcome p = parse_config("experiment=growth-sweep\nsigma=0.5\n");
  CHECK_FALSE(p.config);
  CHECK(has_error(p, -1, "sigma_k_list"));
}

TEST_CASE("decimal t is a type error") {
  const ParseOutcome p = parse_config("experiment=multiplier-check\ntheta=2\ns=1\nt=0.5\nalpha_max=10\n");
  CHECK_FALSE(p.config);
  CHECK(has_error(p, 4, "rational required, got real"));
}

TEST_CASE("all errors are reported with line numbers") {
  const std::string text =
      "# header comment\n"
      "experiment=growth-sweep\n"
      "sigma=abc\n"
      "sigma_k_list=20,40,x\n"
      "typo_key=3\n"
      "sigma=0.5\n"
      "no equals sign\n";
  const ParseOutcome p = parse_config(text);
  CHECK_FALSE(p.config);
  CHECK(p.errors.size() >= 5);
  CHECK(has_error(p, 3, "type mismatch for 'sigma'"));
  CHECK(has_error(p, 4, "sigma_k_list"));
  CHECK(has_error(p, 5, "unknown key 'typo_key'"));
  CHECK(has_error(p, 6, "duplicate key 'sigma'"));
  CHECK(has_error(p, 7, "expected key=value"));
}

TEST_CASE("unknown or missing experiment") {
  CHECK(has_error(parse_config("experiment=warp-drive\n"), 1, "unknown experiment"));
  CHECK(has_error(parse_config("theta=2\n"), 0, "missing key 'experiment'"));
  const auto& names = experiment_names();
  CHECK(names.size() == 6);
  for (const char* n :
       {"free-decay", "growth-sweep", "conjugate-check", "multiplier-check", "psido-selftest", "energy-initial"})
    CHECK(std::find(names.begin(), names.end(), n) != names.end());
}

TEST_CASE("global keys, comments and canonical text") {
  const std::string text =
      "experiment = energy-initial   # trailing comment\n"
      "sigma_k_list = 20, 40, 80\n"
      "seed = 7\n"
      "output_dir = somewhere\n";
  const ParseOutcome p = parse_config(text);
  REQUIRE(p.config);
  CHECK(p.config->seed == 7);
  CHECK(p.config->output_dir == "somewhere");
  CHECK(p.config->list("sigma_k_list") == std::vector<double>{20, 40, 80});
  const std::string canon = canonical_text(*p.config);
  CHECK(canon.find("seed=7\n") != std::string::npos);
  CHECK(canon.find("somewhere") == std::string::npos);
  CHECK(canon.find("sigma_k_list=20,40,80\n") != std::string::npos);
  // Reordering and whitespace do not change the canonical form.
  const ParseOutcome q = parse_config("seed=7\nsigma_k_list=20,40,80\nexperiment=energy-initial\n");
  REQUIRE(q.config);
  CHECK(canonical_text(*q.config) == canon);
  CHECK(has_error(parse_config("experiment=energy-initial\nseed=-3\n"), 2, "seed"));
}
