#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cli.hpp"

using frostdecay::run_cli;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "frostdecay");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "frostdecay_cli_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::string write_file(const std::string& name, const std::string& body) {
  const auto p = scratch(name);
  std::ofstream(p) << body;
  return p.string();
}

const char* kPointMass = "MEAS n=2 rmin=0.25\n0 0 1\n";

}  // namespace

TEST_CASE("help exits 0 on every subcommand") {
  CHECK(run({"--help"}).code == 0);
  for (const char* sub : {"gen", "frostman", "reweight", "verify", "symbol", "witness", "pipeline"}) {
    const Run r = run({sub, "--help"});
    CHECK_MESSAGE(r.code == 0, sub);
    CHECK(r.out.find(sub) != std::string::npos);
  }
}

TEST_CASE("usage errors exit 2") {
  CHECK(run({}).code == 2);
  CHECK(run({"nosuch"}).code == 2);
  CHECK(run({"gen", "--level", "x"}).code == 2);
  CHECK(run({"gen", "--set", "unknown"}).code == 2);
  CHECK(run({"verify", "--in", scratch("missing.txt").string()}).code == 2);
  CHECK(run({"verify", "--in", write_file("bad.txt", "MEAS n=2 rmin=0.1\n0 0 -1\n")}).code == 2);
}

TEST_CASE("point mass at the origin fails the origin growth check") {
  const Run r = run({"verify", "--in", write_file("point.txt", kPointMass)});
  CHECK(r.code == 1);
  CHECK(r.out.find("kind=bp1") != std::string::npos);
  CHECK(r.out.find("radius=0") != std::string::npos);
  CHECK(r.out.find("finite=false") != std::string::npos);
}

TEST_CASE("off-origin atom passes the origin growth check") {
  const Run r = run({"verify", "--in", write_file("off.txt", "MEAS n=2 rmin=0.25\n1 0 1\n")});
  CHECK(r.code == 0);
  CHECK(r.out.find("sup=1\n") != std::string::npos);
}

TEST_CASE("gen writes deterministic cube sets") {
  const Run a = run({"gen", "--set", "four-corner", "--ratio", "0.25", "--level", "2"});
  const Run b = run({"gen", "--set", "four-corner", "--ratio", "0.25", "--level", "2"});
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  const Run c = run({"--seed", "5", "gen", "--set", "random", "--level", "3"});
  const Run d = run({"--seed", "5", "gen", "--set", "random", "--level", "3"});
  const Run e = run({"--seed", "6", "gen", "--set", "random", "--level", "3"});
  CHECK(c.out == d.out);
  CHECK(c.out != e.out);
}

TEST_CASE("gen, frostman, reweight and verify chain through files") {
  const auto cubes = scratch("chain_cubes.txt").string();
  const auto nu = scratch("chain_nu.txt").string();
  const auto mu = scratch("chain_mu.txt").string();
  REQUIRE(run({"gen", "--set", "four-corner", "--ratio", "0.35", "--level", "3", "--out", cubes}).code == 0);
  const Run fm = run({"frostman", "--in", cubes, "--s", "1.2", "--normalize", "--out", nu});
  REQUIRE(fm.code == 0);
  CHECK(fm.out.find("growth_constant=") != std::string::npos);
  REQUIRE(run({"reweight", "--in", nu, "--alpha", "0.2", "--out", mu}).code == 0);
  const Run v = run({"verify", "--in", mu, "--alpha", "0.2", "--s", "1.2", "--cubes", cubes});
  CHECK(v.code == 0);
  CHECK(v.out.find("kind=cond1") != std::string::npos);
  CHECK(v.out.find("kind=cond2") != std::string::npos);
  CHECK(v.out.find("kind=bp2") != std::string::npos);
  CHECK(v.out.find("pass=true\n") != std::string::npos);
}

TEST_CASE("symbol classification") {
  const Run g = run({"symbol", "--op", "gradient", "--n", "2"});
  CHECK(g.code == 0);
  CHECK(g.out.find("elliptic=true") != std::string::npos);
  CHECK(g.out.find("canceling=true") != std::string::npos);
  const Run l = run({"symbol", "--op", "laplacian", "--n", "2"});
  CHECK(l.out.find("elliptic=true") != std::string::npos);
  CHECK(l.out.find("canceling=false") != std::string::npos);
  const Run p = run({"symbol", "--op", "partial1", "--n", "2"});
  CHECK(p.out.find("elliptic=false") != std::string::npos);
  const Run d = run({"symbol", "--op", "gradient", "--n", "2", "--adjoint"});
  CHECK(d.out.find("dimE > dimF") != std::string::npos);
  CHECK(run({"symbol", "--op", "curl", "--n", "2"}).code == 2);
}

TEST_CASE("witness reports field and weak residual") {
  const auto in = write_file("witness.txt", "MEAS n=2 rmin=0.01\n0 0 1\n");
  const Run f = run({"witness", "--in", in, "--points", "5"});
  CHECK(f.code == 0);
  CHECK(f.out.find("points=25") != std::string::npos);
  CHECK(f.out.find("skipped=1") != std::string::npos);
  const Run w = run({"witness", "--in", in, "--bump-center", "0.1,0.05", "--bump-radius", "0.8",
                     "--cells", "128"});
  CHECK(w.code == 0);
  CHECK(w.out.find("kind=weak_residual") != std::string::npos);
}

TEST_CASE("pipeline refuses an exponent mismatch") {
  const Run r = run({"pipeline", "--s", "1.5", "--alpha", "0.2", "--n", "2", "--m", "1", "--level", "3"});
  CHECK(r.code == 2);
  CHECK(r.err.find("error") != std::string::npos);
}

TEST_CASE("pipeline is deterministic and reports every stage") {
  const std::vector<std::string> args{"pipeline", "--set", "four-corner", "--ratio", "0.35",
                                      "--alpha", "0.2", "--n", "2", "--m", "1", "--level", "4"};
  const Run a = run(args);
  const Run b = run(args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  for (const char* stage : {"[stage 1: generate]", "[stage 2: frostman]", "[stage 3: reweight]", "[stage 4: certify]", "[stage 5: witness]"}) {
    CHECK_MESSAGE(a.out.find(stage) != std::string::npos, stage);
  }
  const Run t = run({"--threads", "1", "pipeline", "--set", "four-corner", "--ratio", "0.35",
                     "--alpha", "0.2", "--n", "2", "--m", "1", "--level", "4"});
  CHECK(t.out == a.out);
}

TEST_CASE("environment and config file supply options") {
  const auto cfg = write_file("cfg.ini", "seed=6\n[gen]\nset=random\nlevel=3\n");
  const Run c = run({"--config", cfg, "gen"});
  const Run d = run({"--seed", "6", "gen", "--set", "random", "--level", "3"});
  REQUIRE(c.code == 0);
  CHECK(c.out == d.out);

  ::setenv("FROSTDECAY_GEN_RATIO", "0.25", 1);
  const Run e = run({"gen", "--level", "2"});
  ::unsetenv("FROSTDECAY_GEN_RATIO");
  const Run f = run({"gen", "--ratio", "0.25", "--level", "2"});
  CHECK(e.out == f.out);
  const Run g = run({"gen", "--ratio", "0.3", "--level", "2"});
  CHECK(e.out != g.out);
}
