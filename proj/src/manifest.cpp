#include "gevlab/manifest.hpp"

#include <openssl/evp.h>

#include <ctime>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <memory>
#include <sstream>

#include "gevlab/error.hpp"

#ifndef GEVLAB_VERSION
#define GEVLAB_VERSION "0.0.0"
#endif

namespace gevlab {
namespace {

struct Digest {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx{EVP_MD_CTX_new(), &EVP_MD_CTX_free};

  Digest() {
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw Error("sha256 init failed");
  }
  void update(const void* data, size_t n) {
    if (EVP_DigestUpdate(ctx.get(), data, n) != 1) throw Error("sha256 update failed");
  }
  std::string hex() {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx.get(), md, &len) != 1) throw Error("sha256 final failed");
    std::ostringstream os;
    for (unsigned i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return os.str();
  }
};

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  Digest d;
  d.update(bytes.data(), bytes.size());
  return d.hex();
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  Digest d;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    d.update(buf, static_cast<size_t>(in.gcount()));
  }
  return d.hex();
}

std::string utc_timestamp(std::chrono::system_clock::time_point t) {
  const auto secs = std::chrono::time_point_cast<std::chrono::seconds>(t);
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(t - secs).count();
  const std::time_t tt = std::chrono::system_clock::to_time_t(secs);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%S") << '.' << std::setw(3) << std::setfill('0') << ms << 'Z';
  return os.str();
}

const char* artifact_version() { return GEVLAB_VERSION; }

void RunManifest::collect_files(const OutputSet& out) {
  files.clear();
  for (const auto& name : out.files()) {
    ManifestFile f;
    f.path = name;
    f.sha256 = sha256_file(out.directory() / name);
    f.partial = exit_code == 3;
    files.push_back(std::move(f));
  }
}

std::string RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["artifact"] = "gevlab";
  j["version"] = artifact_version();
  j["experiment"] = experiment;
  j["config"] = {{"text", config_text}, {"effective", effective_config}, {"sha256", config_hash}};
  j["seed"] = seed;
  j["threads"] = threads;
  j["started"] = started;
  j["finished"] = finished;
  j["exit_code"] = exit_code;
  j["status"] = exit_code == 0 ? "pass" : exit_code == 1 ? "assertion-failure" : exit_code == 2 ? "config-error"
                                                                                               : "runtime-error";
  if (!error.empty()) j["error"] = error;
  auto& a = j["assertions"] = nlohmann::ordered_json::array();
  for (const auto& x : assertions) a.push_back({{"name", x.name}, {"passed", x.passed}, {"detail", x.detail}});
  auto& f = j["outputs"] = nlohmann::ordered_json::array();
  for (const auto& x : files) f.push_back({{"path", x.path}, {"sha256", x.sha256}, {"partial", x.partial}});
  return j.dump(2) + "\n";
}

}  // namespace gevlab
