#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fraclab/config.hpp"

namespace fraclab {

inline constexpr const char* kToolName = "fraclab";
inline constexpr const char* kToolVersion = "0.1.0";

/// Exit codes shared by every subcommand.
enum ExitCode : int { kExitOk = 0, kExitCheckFailed = 1, kExitConfig = 2, kExitRuntime = 3 };

/// SHA-1 of "blob <size>\0" + bytes, as git computes object ids.
std::string git_blob_hash(const std::string& bytes);

/// Format a double so that it round-trips and prints identically everywhere.
std::string format_real(double x);

/// Files written under one run directory, each committed atomically.
class ArtifactSet {
 public:
  explicit ArtifactSet(std::string root);
  /// Empties a directory previously written by this tool. Refuses a
  /// directory holding files no manifest accounts for.
  void prepare() const;
  void write(const std::string& relative, const std::string& bytes);
  const std::string& root() const { return root_; }
  nlohmann::json listing() const;
  /// Writes manifest.json; `manifest` gains the artifact listing.
  void finish(nlohmann::json manifest);

 private:
  std::string root_;
  std::vector<std::pair<std::string, std::size_t>> files_;
  std::vector<std::string> hashes_;
};

/// Problems found comparing a run directory with its manifest; empty when consistent.
std::vector<std::string> check_manifest(const std::string& run_dir);

struct ScenarioResult {
  nlohmann::json manifest;
  int exit_code = kExitOk;
  std::vector<std::string> warnings;
};

/// Resolved config with every default expanded.
nlohmann::json resolved_config(const ScenarioConfig& sc);

/// Integrates, writes manifest, diagnostics CSV, norms CSV and snapshots.
/// ConfigError propagates; integrator aborts are reported through the status.
ScenarioResult run_scenario(const IniDocument& doc, const std::optional<std::string>& out_dir = std::nullopt);
ScenarioResult run_scenario_file(const std::string& path, const std::optional<std::string>& out_dir = std::nullopt);

struct VerifyResult {
  nlohmann::json verdict;
  std::string detail_csv;
  bool pass = false;
};

/// Suites: conservation, scaling, dispersive, inequalities, scattering.
VerifyResult verify_suite(const std::string& suite, const IniDocument& doc);
const std::vector<std::string>& verify_suites();

struct SweepResult {
  nlohmann::json index;
  int exit_code = kExitOk;
};

/// Runs every point of a sweep file. Throws ConfigError when the product of
/// axis sizes exceeds the cap.
SweepResult run_sweep(const std::string& sweep_path, const std::optional<std::string>& out_dir = std::nullopt,
                      std::optional<int> workers = std::nullopt);

/// Markdown table for a verify verdict, a sweep index or a run manifest.
std::string render_report(const nlohmann::json& doc);

}  // namespace fraclab
