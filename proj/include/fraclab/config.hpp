#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fraclab/evolution.hpp"
#include "fraclab/lp_norms.hpp"

namespace fraclab {

/// Malformed or inconsistent configuration. line/column are 1-based; 0 when
/// the problem is not tied to one position (e.g. a missing key).
struct ConfigError : std::runtime_error {
  ConfigError(const std::string& msg, std::string key_, int line_ = 0, int column_ = 0);
  std::string key;
  int line;
  int column;
};

struct IniEntry {
  std::string value;
  int line = 0;
  int column = 0;        // column of the value
  std::string origin;    // "file" or the environment variable name
  int key_column = 0;
};

/// Sections of `key = value` pairs. '#' and ';' start comments.
class IniDocument {
 public:
  static IniDocument parse(const std::string& text, const std::string& source = "<config>");
  static IniDocument load(const std::string& path);

  bool has(const std::string& section, const std::string& key) const;
  const IniEntry* find(const std::string& section, const std::string& key) const;
  void set(const std::string& section, const std::string& key, IniEntry e);

  /// PREFIX_SECTION_KEY (upper case) replaces or adds section.key.
  std::vector<std::string> apply_env_overrides(const std::string& prefix = "FRACLAB_");

  const std::map<std::string, std::map<std::string, IniEntry>>& sections() const { return sections_; }
  const std::string& source() const { return source_; }

  /// Canonical text: sections and keys sorted, one `key = value` per line.
  std::string canonical() const;

  // Typed access. Errors name section.key and its position.
  std::string get_string(const std::string& s, const std::string& k) const;
  std::string get_string(const std::string& s, const std::string& k, const std::string& def) const;
  double get_double(const std::string& s, const std::string& k) const;
  double get_double(const std::string& s, const std::string& k, double def) const;
  long get_int(const std::string& s, const std::string& k) const;
  long get_int(const std::string& s, const std::string& k, long def) const;
  bool get_bool(const std::string& s, const std::string& k, bool def) const;
  std::vector<std::string> get_list(const std::string& s, const std::string& k) const;

  /// Throws ConfigError at the first key of `section` not in `allowed`.
  void require_known(const std::string& section, const std::vector<std::string>& allowed) const;
  void require_sections(const std::vector<std::string>& allowed) const;

  [[noreturn]] void fail(const std::string& s, const std::string& k, const std::string& why) const;
  /// As fail(), positioned at the key rather than its value.
  [[noreturn]] void fail_key(const std::string& s, const std::string& k, const std::string& why) const;

 private:
  std::string source_;
  std::map<std::string, std::map<std::string, IniEntry>> sections_;
};

/// Where and what a run writes.
struct OutputSpec {
  std::string dir = "run";
  bool snapshots = true;
  std::vector<NormSpec> norms;
  std::vector<std::string> norm_labels;
};

/// Hypothesis audit requested by the config, if any.
struct AuditSpec {
  std::optional<std::string> theorem;
  std::optional<std::string> gamma;
};

struct ScenarioConfig {
  RunConfig run;
  OutputSpec output;
  AuditSpec audit;
  /// Raw strings of the equation parameters for exact auditing.
  std::string sigma_text, nu_text;
};

ScenarioConfig scenario_from_ini(const IniDocument& doc);

/// "sobolev:0.5:2" -> NormSpec. Fields: space[:gamma[:q]].
NormSpec parse_norm_spec(const std::string& text);

}  // namespace fraclab
