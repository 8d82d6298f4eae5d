#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "doctest.h"

#include "bklab/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("bklab_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

struct Result {
  int code;
  std::string out, err;
};

Result run_cli(const TempDir& dir, const std::string& command, const std::string& config,
               std::vector<std::string> extra = {}) {
  const auto cfg = dir.path / "config.json";
  std::ofstream(cfg) << config;
  std::vector<std::string> args{"bklab", command, "--config", cfg.string(), "--out", dir.path.string()};
  args.insert(args.end(), extra.begin(), extra.end());
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = bklab::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("exponent command") {
  TempDir dir;
  const auto r = run_cli(dir, "exponent", R"({"rows":[{"regime":"MDS","r":1,"p":3},{"regime":"Arbitrary","r":0.5,"p":1.5}]})");
  CHECK(r.code == 0);
  CHECK(r.out.find("MDS,1,3,4\n") != std::string::npos);
  CHECK(r.out.find("Arbitrary,0.5,1.5,2\n") != std::string::npos);
  const auto csv = slurp(dir.path / "exponent.csv");
  CHECK(csv.rfind("# ", 0) == 0);
  CHECK(csv.find("config_hash=") != std::string::npos);
  CHECK(csv.find("regime,r,p,q\n") != std::string::npos);
}

TEST_CASE("spec command") {
  TempDir dir;
  const auto r = run_cli(dir, "spec",
                         R"({"process":{"kind":"counterexample_independent","horizon":1024},"r":1,"p":1,"f":{"type":"log_tower","m":1,"eps":0}})");
  CHECK(r.code == 0);
  CHECK(r.out.find("k0=1") != std::string::npos);
  CHECK(fs::exists(dir.path / "spec.csv"));
  CHECK(fs::exists(dir.path / "spec.json"));
}

TEST_CASE("exit codes") {
  TempDir dir;
  auto r = run_cli(dir, "exponent", R"({"regime":"Arbitrary","r":1,"p":2})");
  CHECK(r.code == 2);
  CHECK(r.err.rfind("error:unsupported:", 0) == 0);

  r = run_cli(dir, "exponent", R"({"regime":"MDS","r":1})");
  CHECK(r.code == 2);
  CHECK(r.err.rfind("error:validation:", 0) == 0);

  r = run_cli(dir, "exponent", "not json");
  CHECK(r.code == 2);

  r = run_cli(dir, "simulate", R"({"process":{"kind":"iid_discrete","horizon":8,"atoms":[-1,1],"probs":[0.5,0.5]},"n_grid":[4],"t":1,"trials":10})");
  CHECK(r.code == 2);  // no seed

  r = run_cli(dir, "oracle", R"({"process":{"kind":"iid_discrete","horizon":8,"atoms":[-1,1],"probs":[0.5,0.5]},"n_grid":[16],"t":1})");
  CHECK(r.code == 4);
  CHECK(r.err.rfind("error:horizon:", 0) == 0);

  r = run_cli(dir, "envelope", R"({"construction":"regularize","horizon":10,"sequence":{"type":"geometric","ratio":0.999}})");
  CHECK(r.code == 3);
}

TEST_CASE("simulate output is reproducible across thread counts") {
  TempDir a, b;
  const std::string cfg =
      R"({"process":{"kind":"iid_discrete","horizon":256,"atoms":[-1,1],"probs":[0.5,0.5]},"n_grid":[16,64,256],"r":1.5,"p":1.5,"eps":1,"trials":2000,"seed":4})";
  const auto ra = run_cli(a, "simulate", cfg, {"--threads", "1"});
  const auto rb = run_cli(b, "simulate", cfg, {"--threads", "3"});
  REQUIRE(ra.code == 0);
  REQUIRE(rb.code == 0);
  CHECK(slurp(a.path / "simulate.csv") == slurp(b.path / "simulate.csv"));
  const auto rc = run_cli(b, "simulate", cfg, {"--seed", "5"});
  CHECK(slurp(a.path / "simulate.csv") != slurp(b.path / "simulate.csv"));
  CHECK(rc.code == 0);
}
