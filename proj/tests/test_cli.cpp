#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "gevlab/manifest.hpp"

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("gevlab_cli_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p.parent_path());
  return p;
}

int run_lab(const std::string& config, const fs::path& out, const std::string& extra = "") {
  const std::string cmd = std::string(LAB_EXECUTABLE) + " '" + config + "' --output-dir '" + out.string() + "' " +
                          extra + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write_config(const std::string& name, const std::string& text) {
  const fs::path p = scratch(name);
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST_CASE("identical config and seed give byte-identical outputs") {
  for (const char* cfg : {"multiplier.cfg", "psido.cfg"}) {
    const fs::path a = scratch(std::string(cfg) + ".a"), b = scratch(std::string(cfg) + ".b");
    const std::string path = std::string(CONFIG_DIR) + "/" + cfg;
    REQUIRE(run_lab(path, a, "--seed 3") == 0);
    REQUIRE(run_lab(path, b, "--seed 3") == 0);
    int compared = 0;
    for (const auto& e : fs::directory_iterator(a)) {
      const auto name = e.path().filename();
      if (name == "manifest.json") continue;
      CHECK(slurp(e.path()) == slurp(b / name));
      ++compared;
    }
    CHECK(compared >= 2);
  }
}

TEST_CASE("manifest lists every output with its checksum") {
  const fs::path out = scratch("manifest");
  REQUIRE(run_lab(std::string(CONFIG_DIR) + "/conjugate.cfg", out) == 0);
  const auto j = nlohmann::json::parse(slurp(out / "manifest.json"));
  CHECK(j["exit_code"] == 0);
  CHECK(j["experiment"] == "conjugate-check");
  CHECK(!j["version"].get<std::string>().empty());
  CHECK(!j["started"].get<std::string>().empty());
  CHECK(!j["finished"].get<std::string>().empty());
  CHECK(j["config"]["sha256"] == gevlab::sha256_hex(j["config"]["effective"].get<std::string>()));
  size_t listed = 0;
  for (const auto& f : j["outputs"]) {
    CHECK(f["sha256"] == gevlab::sha256_file(out / f["path"].get<std::string>()));
    CHECK(f["partial"] == false);
    ++listed;
  }
  size_t on_disk = 0;
  for (const auto& e : fs::directory_iterator(out))
    if (e.path().filename() != "manifest.json") ++on_disk;
  CHECK(listed == on_disk);
  CHECK(!j["assertions"].empty());
  for (const auto& a : j["assertions"]) CHECK(a["passed"] == true);
}

TEST_CASE("plot files carry a column header and the config hash") {
  const fs::path out = scratch("plot");
  REQUIRE(run_lab(std::string(CONFIG_DIR) + "/multiplier.cfg", out) == 0);
  const std::string dat = slurp(out / "even_sums.dat");
  CHECK(dat.rfind("# columns:", 0) == 0);
  const auto j = nlohmann::json::parse(slurp(out / "manifest.json"));
  CHECK(dat.find("# config_hash: " + j["config"]["sha256"].get<std::string>()) != std::string::npos);
}

TEST_CASE("exit codes") {
  const fs::path out = scratch("codes");
  CHECK(run_lab(write_config("bad.cfg", "experiment=multiplier-check\nt=0.5\n").string(), out) == 2);
  CHECK(run_lab((scratch("missing") / "nothing.cfg").string(), out) == 2);
  const fs::path strict = write_config(
      "strict.cfg", "experiment=growth-sweep\nsigma=0\nsigma_k_list=10,20,40\ntolerance=1e-9\n");
  const fs::path strict_out = scratch("strict_out");
  CHECK(run_lab(strict.string(), strict_out) == 1);
  const auto j = nlohmann::json::parse(slurp(strict_out / "manifest.json"));
  CHECK(j["status"] == "assertion-failure");
  const fs::path invalid = write_config("invalid.cfg", "experiment=multiplier-check\ntheta=2\ns=3\nt=1\nalpha_max=5\n");
  CHECK(run_lab(invalid.string(), scratch("invalid_out")) == 2);
}
