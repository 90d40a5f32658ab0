#include <catch_amalgamated.hpp>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

std::string binary() {
  const char* b = std::getenv("RESNLS_BIN");
  return b ? b : "resnls";
}

int run(const std::string& args) {
  const std::string cmd = binary() + " " + args + " > /dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("resnls_cli_" + name);
  fs::remove_all(p);
  return p;
}

const std::string kSmall = " --potential free -s grid.L=20 -s grid.nx=512 -s grid.nk=128 -s grid.kmax=4";

}  // namespace

TEST_CASE("scatter on the free potential passes and writes T = 1") {
  const fs::path out = scratch("free");
  REQUIRE(run("scatter" + kSmall + " --out " + out.string()) == 0);
  std::ifstream in(out / "scatter_coefficients.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line.rfind("k,T_re,T_im", 0) == 0);
  int rows = 0;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string k, re, im;
    std::getline(ss, k, ',');
    std::getline(ss, re, ',');
    std::getline(ss, im, ',');
    CHECK(std::abs(std::stod(re) - 1) < 1e-10);
    CHECK(std::abs(std::stod(im)) < 1e-10);
    ++rows;
  }
  CHECK(rows == 128);
  const auto result = nlohmann::json::parse(slurp(out / "result.json"));
  CHECK(result.is_object());
}

TEST_CASE("manifest records the resolved configuration") {
  const fs::path out = scratch("manifest");
  REQUIRE(run("scatter" + kSmall + " --out " + out.string()) == 0);
  const auto m = nlohmann::json::parse(slurp(out / "manifest.json"));
  CHECK(m["command"] == "scatter");
  CHECK(m["config"]["grid.nx"] == 512);
  CHECK(m["config"]["potential"] == "free");
  CHECK(m["config"]["eps"] == 0.05);
  CHECK(m["config"]["seed"] == 7);
  CHECK(m.contains("version"));
  CHECK(m["files"].size() >= 2);
}

TEST_CASE("outputs are byte-identical across runs") {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  const std::string args = "dft-check --potential pt -s grid.L=30 -s grid.nx=768 -s grid.nk=512 -s grid.kmax=12 --out ";
  REQUIRE(run(args + a.string()) == 0);
  REQUIRE(run(args + b.string()) == 0);
  int compared = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    if (e.path().extension() != ".csv") continue;
    CHECK(slurp(e.path()) == slurp(b / e.path().filename()));
    ++compared;
  }
  CHECK(compared > 0);
}

TEST_CASE("configuration errors exit with status 2") {
  CHECK(run("scatter -s no.such.key=1") == 2);
  CHECK(run("scatter -s grid.nx=abc") == 2);
  CHECK(run("scatter --sign 3") == 2);
  CHECK(run("") == 2);
  CHECK(run("frobnicate") == 2);
  const fs::path cfg = fs::temp_directory_path() / "resnls_cli_bad.cfg";
  std::ofstream(cfg) << "grid.L = 20\nthis line has no equals sign\n";
  CHECK(run("scatter -c " + cfg.string()) == 2);
  CHECK(run("scatter -c /nonexistent/resnls.cfg") == 2);
}

TEST_CASE("a config file is read and command-line settings override it") {
  const fs::path cfg = fs::temp_directory_path() / "resnls_cli_ok.cfg";
  std::ofstream(cfg) << "# small free run\ngrid.L = 20\ngrid.nx = 256\ngrid.nk = 128\ngrid.kmax = 4\npotential = free\n";
  const fs::path out = scratch("cfg");
  REQUIRE(run("scatter -c " + cfg.string() + " -s grid.nx=512 --out " + out.string()) == 0);
  const auto m = nlohmann::json::parse(slurp(out / "manifest.json"));
  CHECK(m["config"]["grid.nx"] == 512);
  CHECK(m["config"]["grid.L"] == 20.0);
}

TEST_CASE("a violated invariant exits with status 1") {
  const fs::path out = scratch("fail");
  CHECK(run("nsd-check -s nsd.n=64 -s nsd.refine=0 --out " + out.string()) == 1);
  const auto r = nlohmann::json::parse(slurp(out / "result.json"));
  CHECK(r.dump().find("nsd-check") != std::string::npos);
}
