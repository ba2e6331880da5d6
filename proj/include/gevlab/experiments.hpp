#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "gevlab/config.hpp"

namespace gevlab {

struct Assertion {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Writes experiment outputs into one directory and remembers what was written.
class OutputSet {
 public:
  OutputSet(std::filesystem::path dir, std::string config_hash);

  const std::filesystem::path& directory() const { return dir_; }
  const std::string& config_hash() const { return hash_; }
  const std::vector<std::string>& files() const { return files_; }

  void write_text(const std::string& name, const std::string& body);
  /// Whitespace-separated columns under a comment header naming the columns
  /// and carrying the config hash.
  void write_plot(const std::string& name, const std::vector<std::string>& columns,
                  const std::vector<std::vector<double>>& rows);

 private:
  std::filesystem::path dir_;
  std::string hash_;
  std::vector<std::string> files_;
};

struct RunOptions {
  unsigned threads = 1;
};

/// Dispatches on cfg.experiment, writes outputs, returns the embedded assertions.
std::vector<Assertion> run_experiment(const ExperimentConfig& cfg, OutputSet& out, const RunOptions& opts = {});

}  // namespace gevlab
