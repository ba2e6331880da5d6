#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "gevlab/experiments.hpp"

namespace gevlab {

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

/// ISO 8601 UTC with millisecond resolution.
std::string utc_timestamp(std::chrono::system_clock::time_point t);

const char* artifact_version();

struct ManifestFile {
  std::string path;  // relative to the output directory
  std::string sha256;
  bool partial = false;
};

struct RunManifest {
  std::string experiment;
  std::string config_text;  // verbatim input
  std::string effective_config;
  std::string config_hash;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string started;
  std::string finished;
  std::vector<ManifestFile> files;
  std::vector<Assertion> assertions;
  int exit_code = 0;
  std::string error;  // empty on success

  /// Checksums every listed output; flags them partial when the run failed.
  void collect_files(const OutputSet& out);
  std::string to_json() const;
};

}  // namespace gevlab
