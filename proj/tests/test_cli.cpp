#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "fraclab/config.hpp"
#include "fraclab/io.hpp"
#include "fraclab/scenario.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace fraclab;

namespace {

const char* kLinear = R"([equation]
kind = nlfs
d = 1
sigma = 3/2
nu = 3
mu = 1

[grid]
n = 64
box_length = 20

[initial]
profile = gaussian
amplitude = 1
width = 1.5

[method]
name = split-step
dt = 1e-2
t_final = 0.5
linear_mode = true

[output]
snapshot_stride = 10
norms = lebesgue:2, sobolev:1:2
)";

const char* kCubic = R"([equation]
kind = nlfs
d = 1
sigma = 2
nu = 3
mu = 1

[grid]
n = 128
box_length = 40

[initial]
profile = gaussian
amplitude = 0.5
width = 2

[method]
name = split-step
dt = 4e-3
t_final = 0.2

[output]
snapshot_stride = 25
)";

struct Scratch {
  fs::path root;
  explicit Scratch(const std::string& name) {
    root = fs::temp_directory_path() / ("fraclab_cli_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(root);
    fs::create_directories(root);
  }
  ~Scratch() { fs::remove_all(root); }
  std::string write(const std::string& rel, const std::string& text) const {
    const fs::path p = root / rel;
    fs::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary) << text;
    return p.string();
  }
  std::string path(const std::string& rel) const { return (root / rel).string(); }
};

struct Outcome {
  int code;
  std::string out;
};

Outcome cli(const std::string& args, const std::string& env = "") {
  const char* bin = std::getenv("FRACLAB_BIN");
  REQUIRE(bin != nullptr);
  const fs::path log = fs::temp_directory_path() / ("fraclab_cli_log_" + std::to_string(::getpid()));
  const std::string cmd = env + (env.empty() ? "" : " ") + "'" + bin + "' " + args + " > '" + log.string() + "' 2>&1";
  const int status = std::system(cmd.c_str());
  Outcome o{WIFEXITED(status) ? WEXITSTATUS(status) : -1, read_file(log.string())};
  fs::remove(log);
  return o;
}

std::string quoted(const std::string& p) { return "'" + p + "'"; }

}  // namespace

TEST_CASE("version and usage") {
  CHECK(cli("--version").out.find(kToolVersion) != std::string::npos);
  CHECK(cli("").code == kExitConfig);
  CHECK(cli("frobnicate").code == kExitConfig);
}

TEST_CASE("exponents subcommand") {
  const Outcome ok = cli("exponents --d 1 --sigma 2 --nu 3 --format json --theorem lwp-subcrit-nls-high-sigma --gamma 1/4");
  CHECK(ok.code == kExitOk);
  const json j = json::parse(ok.out);
  CHECK(j.contains("entries"));
  CHECK(cli("exponents --d 1 --sigma 2 --nu 3 --theorem lwp-subcrit-nls-high-sigma --gamma 1").code == kExitCheckFailed);
  CHECK(cli("exponents --d 1 --sigma 1 --nu 3").code == kExitConfig);
  CHECK(cli("exponents --d 1 --sigma 2 --nu 3 --theorem no-such-theorem").code == kExitConfig);
  CHECK(cli("exponents --d 1 --sigma 2 --nu 3 --float --format table --theorem lwp-subcrit-nls-high-sigma --gamma 0.25").code == kExitOk);
}

TEST_CASE("linear run, manifest and determinism") {
  Scratch s("linear");
  const std::string cfg = s.write("linear.ini", kLinear);
  const std::string out = s.path("run");
  const Outcome r = cli("run --config " + quoted(cfg) + " --out " + quoted(out));
  REQUIRE(r.code == kExitOk);

  const json m = json::parse(read_file(out + "/manifest.json"));
  CHECK(m["status"] == "completed");
  CHECK(m["tool"]["version"] == kToolVersion);
  CHECK(m["config"]["method"]["picard_max_iters"].is_number());
  CHECK(check_manifest(out).empty());

  // Mass is constant under the free flow.
  std::istringstream csv(read_file(out + "/diagnostics.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line.rfind("step,t,mass,energy", 0) == 0);
  double first = -1.0, worst = 0.0;
  while (std::getline(csv, line)) {
    std::stringstream ls(line);
    std::string cell;
    std::getline(ls, cell, ',');
    std::getline(ls, cell, ',');
    std::getline(ls, cell, ',');
    const double mass = std::stod(cell);
    if (first < 0.0) first = mass;
    worst = std::max(worst, std::abs(mass - first) / first);
  }
  CHECK(worst < 1e-12);

  const std::string diag = read_file(out + "/diagnostics.csv"), norms = read_file(out + "/norms.csv");
  REQUIRE(cli("run --config " + quoted(cfg) + " --out " + quoted(out)).code == kExitOk);
  CHECK(read_file(out + "/diagnostics.csv") == diag);
  CHECK(read_file(out + "/norms.csv") == norms);
  CHECK(check_manifest(out).empty());

  // A stray file breaks completeness, and the next run refuses the directory.
  s.write("run/stray.txt", "x");
  CHECK_FALSE(check_manifest(out).empty());
  CHECK(cli("run --config " + quoted(cfg) + " --out " + quoted(out)).code == kExitConfig);
  fs::remove(s.path("run/stray.txt"));

  // norms subcommand on the written trajectory.
  const Outcome n = cli("norms --trajectory " + quoted(out) + " --space lebesgue --q 2");
  CHECK(n.code == kExitOk);
  CHECK(n.out.rfind("t,value", 0) == 0);
  const Outcome one = cli("norms --snapshot " + quoted(out + "/snapshots/snap_000000.fdsp") + " --space sobolev --gamma 1");
  CHECK(one.code == kExitOk);
  CHECK(std::stod(one.out) > 0.0);

  // report renders the manifest.
  const Outcome rep = cli("report --input " + quoted(out + "/manifest.json"));
  CHECK(rep.code == kExitOk);
  CHECK(rep.out.find("|") != std::string::npos);
}

TEST_CASE("config errors name the key") {
  Scratch s("errors");
  const std::string bad = s.write("bad.ini", std::string(kLinear) + "\n[method]\ndt = 1e-3\n");
  const Outcome dup = cli("run --config " + quoted(bad));
  CHECK(dup.code == kExitConfig);
  CHECK(dup.out.find("dt") != std::string::npos);

  std::string text = kLinear;
  text.replace(text.find("mu = 1"), 6, "bogus = 1");
  const Outcome unk = cli("run --config " + quoted(s.write("unknown.ini", text)));
  CHECK(unk.code == kExitConfig);
  CHECK(unk.out.find("equation.bogus") != std::string::npos);
  CHECK(unk.out.find("line 6") != std::string::npos);

  std::string dt = kLinear;
  dt.replace(dt.find("dt = 1e-2"), 9, "dt = -1");
  const Outcome neg = cli("run --config " + quoted(s.write("dt.ini", dt)));
  CHECK(neg.code == kExitConfig);
  CHECK(neg.out.find("method.dt") != std::string::npos);

  const Outcome miss = cli("run --config " + quoted(s.path("missing.ini")));
  CHECK(miss.code == kExitConfig);

  const Outcome noeq = cli("run --config " + quoted(s.write("noeq.ini", "[equation\nkind = nlfs\n")));
  CHECK(noeq.code == kExitConfig);
  CHECK(noeq.out.find(":1:") != std::string::npos);
}

TEST_CASE("environment overrides") {
  Scratch s("env");
  const std::string cfg = s.write("linear.ini", kLinear);
  const std::string out = s.path("run");
  const Outcome bad = cli("run --config " + quoted(cfg) + " --out " + quoted(out), "FRACLAB_METHOD_DT=abc");
  CHECK(bad.code == kExitConfig);
  CHECK(bad.out.find("FRACLAB_METHOD_DT") != std::string::npos);

  REQUIRE(cli("run --config " + quoted(cfg) + " --out " + quoted(out), "FRACLAB_METHOD_T_FINAL=0.2").code == kExitOk);
  const json m = json::parse(read_file(out + "/manifest.json"));
  CHECK(m["config"]["method"]["t_final"].get<double>() == doctest::Approx(0.2));
  CHECK(m["env_overrides"].dump().find("FRACLAB_METHOD_T_FINAL") != std::string::npos);
}

TEST_CASE("verify subcommand") {
  Scratch s("verify");
  const std::string cfg = s.write("linear.ini", kLinear);
  const Outcome v = cli("verify --suite scattering --config " + quoted(cfg) + " --out " + quoted(s.root.string()));
  CHECK(v.code == kExitOk);
  const json j = json::parse(read_file(s.path("verify_scattering.json")));
  CHECK(j.contains("checks"));
  CHECK(read_file(s.path("verify_scattering.csv")).rfind("series,x,y", 0) == 0);
  CHECK(cli("report --input " + quoted(s.path("verify_scattering.json"))).code == kExitOk);
  CHECK(cli("verify --suite nonsense --config " + quoted(cfg)).code == kExitConfig);
}

TEST_CASE("sweeps") {
  Scratch s("sweep");
  s.write("cubic.ini", kCubic);

  SUBCASE("single point matches a run") {
    const std::string sw = s.write("one.ini", "[sweep]\nbase = cubic.ini\ndir = one\n\n[axes]\n");
    REQUIRE(cli("sweep --spec " + quoted(sw)).code == kExitOk);
    REQUIRE(cli("run --config " + quoted(s.path("cubic.ini")) + " --out " + quoted(s.path("direct"))).code == kExitOk);
    CHECK(read_file(s.path("one/points/base/diagnostics.csv")) == read_file(s.path("direct/diagnostics.csv")));
    CHECK(check_manifest(s.path("one/points/base")).empty());
  }
  SUBCASE("cap") {
    const std::string sw = s.write("big.ini", "[sweep]\nbase = cubic.ini\ncap = 4\n\n[axes]\nequation.sigma = 1.5, 2, 3\nmethod.dt = 4e-3, 2e-3\n");
    const Outcome o = cli("sweep --spec " + quoted(sw));
    CHECK(o.code == kExitConfig);
    CHECK(o.out.find("6 points") != std::string::npos);
  }
  SUBCASE("dt halving exposes second order") {
    const std::string sw = s.write("dt.ini", "[sweep]\nbase = cubic.ini\ndir = dt\ndt_halvings = 3\nworkers = 3\n\n[axes]\n");
    REQUIRE(cli("sweep --spec " + quoted(sw)).code == kExitOk);
    const json idx = json::parse(read_file(s.path("dt/index.json")));
    CHECK(idx["count"] == 3);
    REQUIRE(idx["convergence"].size() == 1);
    const double ratio = idx["convergence"][0]["solution_ratios"][0].get<double>();
    CHECK(ratio >= 3.0);
    CHECK(ratio <= 5.0);
    CHECK(cli("report --input " + quoted(s.path("dt/index.json"))).code == kExitOk);
  }
}
