#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "gevlab/config.hpp"
#include "gevlab/error.hpp"
#include "gevlab/experiments.hpp"
#include "gevlab/manifest.hpp"

namespace {

enum Exit { kPass = 0, kAssertion = 1, kConfig = 2, kRuntime = 3 };

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gelfand-Shilov ill-posedness lab: batch experiment runner"};
  std::string config_path, output_dir;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  app.add_option("config", config_path, "experiment config (key=value lines)")->required();
  auto* out_opt = app.add_option("--output-dir", output_dir, "output directory (overrides the config)");
  auto* seed_opt = app.add_option("--seed", seed, "random seed (overrides the config)");
  app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kPass : kConfig;
  }

  std::ifstream in(config_path);
  if (!in) {
    std::cerr << "lab: cannot read " << config_path << '\n';
    return kConfig;
  }
  std::stringstream text;
  text << in.rdbuf();
  gevlab::ParseOutcome parsed = gevlab::parse_config(text.str());
  if (!parsed.config) {
    for (const auto& e : parsed.errors)
      std::cerr << config_path << (e.line > 0 ? ":" + std::to_string(e.line) : std::string()) << ": " << e.message
                << '\n';
    return kConfig;
  }
  gevlab::ExperimentConfig cfg = std::move(*parsed.config);
  if (*out_opt) cfg.output_dir = output_dir;
  if (*seed_opt) cfg.seed = seed;

  gevlab::RunManifest m;
  m.experiment = cfg.experiment;
  m.config_text = cfg.source_text;
  m.effective_config = gevlab::canonical_text(cfg);
  m.config_hash = gevlab::sha256_hex(m.effective_config);
  m.seed = cfg.seed;
  m.threads = threads;
  m.started = gevlab::utc_timestamp(std::chrono::system_clock::now());

  std::unique_ptr<gevlab::OutputSet> out;
  try {
    out = std::make_unique<gevlab::OutputSet>(cfg.output_dir, m.config_hash);
  } catch (const std::exception& e) {
    std::cerr << "lab: output directory: " << e.what() << '\n';
    return kConfig;
  }

  try {
    m.assertions = gevlab::run_experiment(cfg, *out, {threads});
    bool all = !m.assertions.empty();
    for (const auto& a : m.assertions) all = all && a.passed;
    m.exit_code = all ? kPass : kAssertion;
  } catch (const gevlab::InvalidArgument& e) {
    m.exit_code = kConfig;
    m.error = cfg.experiment + ": " + e.what();
  } catch (const std::exception& e) {
    m.exit_code = kRuntime;
    m.error = cfg.experiment + ": " + e.what();
  }

  for (const auto& a : m.assertions)
    std::cout << (a.passed ? "PASS " : "FAIL ") << a.name << (a.detail.empty() ? "" : " (" + a.detail + ")") << '\n';
  if (!m.error.empty()) std::cerr << "lab: " << m.error << '\n';

  m.finished = gevlab::utc_timestamp(std::chrono::system_clock::now());
  try {
    m.collect_files(*out);
    if (m.exit_code >= kConfig)
      for (auto& f : m.files) f.partial = true;
    std::ofstream mf(out->directory() / "manifest.json");
    mf << m.to_json();
  } catch (const std::exception& e) {
    std::cerr << "lab: manifest: " << e.what() << '\n';
    return kRuntime;
  }
  return m.exit_code;
}
