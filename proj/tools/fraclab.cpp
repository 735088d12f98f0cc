#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include "fraclab/exponents.hpp"
#include "fraclab/io.hpp"
#include "fraclab/lp_norms.hpp"
#include "fraclab/scenario.hpp"
#include "fraclab/spectral.hpp"

using namespace fraclab;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

template <class S>
ExponentReport audit_one(int d, const S& sigma, const S& nu, int mu, EquationKind kind, const std::optional<S>& gamma,
                         TheoremId id) {
  EquationParams<S> p;
  p.d = d;
  p.sigma = sigma;
  p.nu = nu;
  p.mu = mu;
  p.kind = kind;
  return audit_theorem(p, gamma, id);
}

struct ExponentArgs {
  int d = 1;
  std::string sigma = "2", nu = "3", kind = "nlfs", theorem = "all", format = "both";
  std::optional<std::string> gamma;
  int mu = 1;
  bool use_float = false;
};

int cmd_exponents(const ExponentArgs& a) {
  const EquationKind kind = a.kind == "nlfw" ? EquationKind::NLFW : EquationKind::NLFS;
  std::vector<TheoremId> ids;
  if (a.theorem == "all") {
    for (TheoremId id : all_theorems())
      if (a.gamma || !theorem_needs_gamma(id)) ids.push_back(id);
  } else {
    ids.push_back(parse_theorem_id(a.theorem));
  }
  bool pass = true;
  json all = json::array();
  std::string tables;
  for (TheoremId id : ids) {
    ExponentReport r;
    if (a.use_float) {
      std::optional<double> g;
      if (a.gamma) g = Rational::parse(*a.gamma).to_double();
      r = audit_one<double>(a.d, Rational::parse(a.sigma).to_double(), Rational::parse(a.nu).to_double(), a.mu, kind,
                            g, id);
    } else {
      std::optional<Rational> g;
      if (a.gamma) g = Rational::parse(*a.gamma);
      r = audit_one<Rational>(a.d, Rational::parse(a.sigma), Rational::parse(a.nu), a.mu, kind, g, id);
    }
    pass = pass && r.pass;
    all.push_back(json::parse(report_to_json(r)));
    tables += report_to_table(r) + "\n";
  }
  if (a.format != "table") std::cout << (all.size() == 1 ? all[0] : all).dump(2) << "\n";
  if (a.format != "json") std::cout << tables;
  return pass ? kExitOk : kExitCheckFailed;
}

struct NormArgs {
  std::string snapshot, trajectory, space = "sobolev", policy = "strict", cutoff = "standard";
  std::string gamma = "0", q = "2";
  std::optional<std::string> p;
  int component = 0;
};

NormSpec norm_spec(const NormArgs& a) {
  NormSpec s;
  s.space = parse_space(a.space);
  s.gamma = parse_exponent(a.gamma);
  s.q = parse_exponent(a.q);
  if (a.policy == "project-mean")
    s.policy = ZeroModePolicy::ProjectOutMean;
  else if (a.policy != "strict")
    throw ConfigError("unknown policy '" + a.policy + "' (strict, project-mean)", "policy");
  if (a.cutoff == "alternate")
    s.cutoff = CutoffKind::Alternate;
  else if (a.cutoff != "standard")
    throw ConfigError("unknown cutoff '" + a.cutoff + "' (standard, alternate)", "cutoff");
  return s;
}

Field snapshot_component(const std::string& path, int component) {
  const SnapshotData s = read_snapshot(path);
  if (component < 0 || component >= static_cast<int>(s.components.size()))
    throw ConfigError("snapshot '" + path + "' has " + std::to_string(s.components.size()) + " component(s)",
                      "component");
  return Field(s.grid, s.components[component]);
}

int cmd_norms(const NormArgs& a) {
  const NormSpec spec = norm_spec(a);
  if (!a.snapshot.empty() == !a.trajectory.empty())
    throw ConfigError("give exactly one of --snapshot or --trajectory", "snapshot");
  if (!a.snapshot.empty()) {
    std::cout << format_real(spatial_norm(snapshot_component(a.snapshot, a.component), spec)) << "\n";
    return kExitOk;
  }
  const fs::path dir(a.trajectory);
  std::istringstream idx(read_file((dir / "snapshots.csv").string()));
  std::string line;
  std::getline(idx, line);
  Trajectory traj;
  std::cout << "t,value\n";
  while (std::getline(idx, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cells.push_back(c);
    if (cells.size() != 4) throw ConfigError("malformed snapshots.csv row: " + line, "trajectory");
    const double t = std::stod(cells[2]);
    Field u = snapshot_component((dir / cells[3]).string(), a.component);
    std::cout << format_real(t) << "," << format_real(spatial_norm(u, spec)) << "\n";
    traj.snapshots.push_back({t, std::move(u), std::nullopt});
  }
  if (a.p) std::cerr << "spacetime L^" << *a.p << " norm: " << format_real(spacetime_norm(traj, parse_exponent(*a.p), spec))
                     << "\n";
  return kExitOk;
}

int cmd_run(const std::string& config, const std::optional<std::string>& out) {
  const ScenarioResult r = run_scenario_file(config, out);
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << "status: " << r.manifest.value("status", std::string("?")) << "\n";
  std::cout << "manifest: " << (fs::path(r.manifest["config"]["output"]["dir"].get<std::string>()) / "manifest.json").string()
            << "\n";
  if (r.manifest.contains("message")) std::cerr << r.manifest["message"].get<std::string>() << "\n";
  return r.exit_code;
}

int cmd_verify(const std::string& suite, const std::string& config, const std::optional<std::string>& out) {
  const VerifyResult r = verify_suite(suite, IniDocument::load(config));
  const std::string verdict = r.verdict.dump(2) + "\n";
  if (out) {
    atomic_write((fs::path(*out) / ("verify_" + suite + ".json")).string(), verdict);
    atomic_write((fs::path(*out) / ("verify_" + suite + ".csv")).string(), r.detail_csv);
  }
  std::cout << verdict;
  return r.pass ? kExitOk : kExitCheckFailed;
}

int cmd_sweep(const std::string& spec, const std::optional<std::string>& out, std::optional<int> workers) {
  const SweepResult r = run_sweep(spec, out, workers);
  std::cout << render_report(r.index);
  return r.exit_code;
}

int cmd_report(const std::string& input, const std::optional<std::string>& out) {
  json doc;
  try {
    doc = json::parse(read_file(input));
  } catch (const json::exception& e) {
    throw ConfigError("'" + input + "' is not JSON: " + e.what(), "input");
  }
  const std::string md = render_report(doc);
  if (out)
    atomic_write(*out, md);
  else
    std::cout << md;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral laboratory for fractional Schrodinger and wave equations"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);

  ExponentArgs ea;
  auto* ex = app.add_subcommand("exponents", "Critical exponents, pairs and the hypothesis audit");
  ex->add_option("--d", ea.d, "Spatial dimension")->required();
  ex->add_option("--sigma", ea.sigma, "Dispersion order (decimal or a/b)")->required();
  ex->add_option("--nu", ea.nu, "Nonlinearity power (decimal or a/b)")->required();
  ex->add_option("--mu", ea.mu, "+1 defocusing, -1 focusing")->check(CLI::IsMember({-1, 1}));
  ex->add_option("--kind", ea.kind, "nlfs or nlfw")->check(CLI::IsMember({"nlfs", "nlfw"}));
  ex->add_option("--gamma", ea.gamma, "Regularity for theorems that need one");
  ex->add_option("--theorem", ea.theorem, "Theorem id or 'all'");
  ex->add_flag("--float", ea.use_float, "Double arithmetic instead of exact rationals");
  ex->add_option("--format", ea.format, "json, table or both")->check(CLI::IsMember({"json", "table", "both"}));

  NormArgs na;
  auto* no = app.add_subcommand("norms", "Norms of a snapshot or of every snapshot of a run");
  no->add_option("--snapshot", na.snapshot, "Snapshot file");
  no->add_option("--trajectory", na.trajectory, "Run directory with snapshots.csv");
  no->add_option("--space", na.space, "lebesgue, sobolev, sobolev-hom, besov, besov-hom");
  no->add_option("--gamma", na.gamma, "Regularity");
  no->add_option("--q", na.q, "Spatial exponent (number or inf)");
  no->add_option("--p", na.p, "Time exponent for the space-time norm (trajectory mode)");
  no->add_option("--component", na.component, "0 position, 1 velocity");
  no->add_option("--policy", na.policy, "strict or project-mean");
  no->add_option("--cutoff", na.cutoff, "standard or alternate");

  std::string config, suite, spec, input;
  std::optional<std::string> out;
  std::optional<int> workers;
  auto* run = app.add_subcommand("run", "Integrate one scenario");
  run->add_option("--config", config, "Scenario file")->required();
  run->add_option("--out", out, "Output directory (overrides [output] dir)");

  auto* ver = app.add_subcommand("verify", "Run a verification suite");
  ver->add_option("--suite", suite, "Suite name")->required()->check(CLI::IsMember(verify_suites()));
  ver->add_option("--config", config, "Scenario file")->required();
  ver->add_option("--out", out, "Directory for the verdict JSON and detail CSV");

  auto* swp = app.add_subcommand("sweep", "Run a parameter sweep");
  swp->add_option("--spec", spec, "Sweep file")->required();
  swp->add_option("--out", out, "Sweep directory (overrides [sweep] dir)");
  swp->add_option("--workers", workers, "Concurrent points");

  auto* rep = app.add_subcommand("report", "Render a verdict, sweep index or manifest as markdown");
  rep->add_option("--input", input, "JSON document")->required();
  rep->add_option("--out", out, "Markdown output file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*ex) return cmd_exponents(ea);
    if (*no) return cmd_norms(na);
    if (*run) return cmd_run(config, out);
    if (*ver) return cmd_verify(suite, config, out);
    if (*swp) return cmd_sweep(spec, out, workers);
    if (*rep) return cmd_report(input, out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const HypothesisError& e) {
    std::cerr << "hypothesis error: " << e.what() << "\n";
    return kExitCheckFailed;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}
