#include "fraclab/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <sstream>

#include "fraclab/io.hpp"
#include "fraclab/rational.hpp"

extern char** environ;

namespace fraclab {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string upper(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

bool valid_name(const std::string& s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  });
}

std::string where(const IniEntry& e) {
  if (e.line > 0) return " at line " + std::to_string(e.line) + ", column " + std::to_string(e.column);
  if (!e.origin.empty() && e.origin != "file") return " (from " + e.origin + ")";
  return "";
}

// Accepts decimal, exponent and a/b rational literals.
bool parse_real(const std::string& text, double& out) {
  if (text.find('/') != std::string::npos) {
    try {
      out = Rational::parse(text).to_double();
      return true;
    } catch (const std::exception&) {
      return false;
    }
  }
  char* end = nullptr;
  out = std::strtod(text.c_str(), &end);
  return !text.empty() && end == text.c_str() + text.size();
}

}  // namespace

ConfigError::ConfigError(const std::string& msg, std::string key_, int line_, int column_)
    : std::runtime_error(msg), key(std::move(key_)), line(line_), column(column_) {}

IniDocument IniDocument::parse(const std::string& text, const std::string& source) {
  IniDocument doc;
  doc.source_ = source;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    std::string body = raw;
    for (std::size_t i = 0; i < body.size(); ++i)
      if (body[i] == '#' || body[i] == ';') {
        body.resize(i);
        break;
      }
    const std::size_t first = body.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    const int col = static_cast<int>(first) + 1;
    if (body[first] == '[') {
      const std::size_t close = body.find(']', first);
      if (close == std::string::npos)
        throw ConfigError(source + ":" + std::to_string(line) + ":" + std::to_string(col) +
                              ": unterminated section header",
                          "", line, col);
      if (!trim(body.substr(close + 1)).empty())
        throw ConfigError(source + ":" + std::to_string(line) + ":" + std::to_string(close + 2) +
                              ": text after section header",
                          "", line, static_cast<int>(close) + 2);
      section = lower(trim(body.substr(first + 1, close - first - 1)));
      if (!valid_name(section))
        throw ConfigError(source + ":" + std::to_string(line) + ":" + std::to_string(col + 1) +
                              ": invalid section name",
                          section, line, col + 1);
      doc.sections_[section];
      continue;
    }
    const std::size_t eq = body.find('=', first);
    if (eq == std::string::npos)
      throw ConfigError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": expected 'key = value'",
                        trim(body), line, col);
    const std::string key = lower(trim(body.substr(first, eq - first)));
    if (!valid_name(key))
      throw ConfigError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": invalid key '" + key +
                            "'",
                        key, line, col);
    if (section.empty())
      throw ConfigError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": key '" + key +
                            "' outside any section",
                        key, line, col);
    std::size_t vstart = body.find_first_not_of(" \t", eq + 1);
    const int vcol = static_cast<int>(vstart == std::string::npos ? eq + 1 : vstart) + 1;
    const std::string value = vstart == std::string::npos ? "" : trim(body.substr(vstart));
    auto& sec = doc.sections_[section];
    if (sec.count(key))
      throw ConfigError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": duplicate key '" +
                            section + "." + key + "'",
                        section + "." + key, line, col);
    sec[key] = IniEntry{value, line, vcol, "file", col};
  }
  return doc;
}

IniDocument IniDocument::load(const std::string& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::exception& e) {
    throw ConfigError("cannot read config '" + path + "': " + e.what(), "");
  }
  return parse(text, path);
}

bool IniDocument::has(const std::string& s, const std::string& k) const { return find(s, k) != nullptr; }

const IniEntry* IniDocument::find(const std::string& s, const std::string& k) const {
  auto it = sections_.find(s);
  if (it == sections_.end()) return nullptr;
  auto jt = it->second.find(k);
  return jt == it->second.end() ? nullptr : &jt->second;
}

void IniDocument::set(const std::string& s, const std::string& k, IniEntry e) { sections_[s][k] = std::move(e); }

std::vector<std::string> IniDocument::apply_env_overrides(const std::string& prefix) {
  std::vector<std::string> applied;
  std::vector<std::pair<std::string, std::string>> vars;
  for (char** env = environ; env && *env; ++env) {
    const std::string kv(*env);
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos || kv.compare(0, prefix.size(), prefix) != 0) continue;
    vars.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
  }
  std::sort(vars.begin(), vars.end());
  for (const auto& [name, value] : vars) {
    const std::string rest = name.substr(prefix.size());
    // Longest known section prefix wins so that keys may contain '_'.
    std::string section;
    for (const auto& [s, _] : sections_) {
      const std::string tag = upper(s) + "_";
      if (rest.compare(0, tag.size(), tag) == 0 && s.size() > section.size()) section = s;
    }
    if (section.empty()) {
      for (const char* s : {"equation", "grid", "initial", "method", "output", "verify", "sweep"}) {
        const std::string tag = upper(s) + "_";
        if (rest.compare(0, tag.size(), tag) == 0) section = s;
      }
    }
    if (section.empty()) continue;
    const std::string key = lower(rest.substr(section.size() + 1));
    if (key.empty()) continue;
    sections_[section][key] = IniEntry{trim(value), 0, 0, name, 0};
    applied.push_back(name);
  }
  return applied;
}

std::string IniDocument::canonical() const {
  std::string out;
  for (const auto& [s, keys] : sections_) {
    out += "[" + s + "]\n";
    for (const auto& [k, e] : keys) out += k + " = " + e.value + "\n";
  }
  return out;
}

void IniDocument::fail(const std::string& s, const std::string& k, const std::string& why) const {
  const IniEntry* e = find(s, k);
  const std::string key = s + "." + k;
  if (e) throw ConfigError(source_ + ": " + key + where(*e) + ": " + why, key, e->line, e->column);
  throw ConfigError(source_ + ": " + key + ": " + why, key);
}

void IniDocument::fail_key(const std::string& s, const std::string& k, const std::string& why) const {
  const IniEntry* e = find(s, k);
  if (!e || e->line == 0) fail(s, k, why);
  const std::string key = s + "." + k;
  throw ConfigError(source_ + ": " + key + " at line " + std::to_string(e->line) + ", column " +
                        std::to_string(e->key_column) + ": " + why,
                    key, e->line, e->key_column);
}

std::string IniDocument::get_string(const std::string& s, const std::string& k) const {
  const IniEntry* e = find(s, k);
  if (!e) fail(s, k, "required key missing");
  return e->value;
}

std::string IniDocument::get_string(const std::string& s, const std::string& k, const std::string& def) const {
  const IniEntry* e = find(s, k);
  return e ? e->value : def;
}

double IniDocument::get_double(const std::string& s, const std::string& k) const {
  double v = 0.0;
  if (!parse_real(get_string(s, k), v)) fail(s, k, "expected a number, got '" + get_string(s, k) + "'");
  return v;
}

double IniDocument::get_double(const std::string& s, const std::string& k, double def) const {
  return has(s, k) ? get_double(s, k) : def;
}

long IniDocument::get_int(const std::string& s, const std::string& k) const {
  const std::string v = get_string(s, k);
  char* end = nullptr;
  const long r = std::strtol(v.c_str(), &end, 10);
  if (v.empty() || end != v.c_str() + v.size()) fail(s, k, "expected an integer, got '" + v + "'");
  return r;
}

long IniDocument::get_int(const std::string& s, const std::string& k, long def) const {
  return has(s, k) ? get_int(s, k) : def;
}

bool IniDocument::get_bool(const std::string& s, const std::string& k, bool def) const {
  if (!has(s, k)) return def;
  const std::string v = lower(get_string(s, k));
  if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
  if (v == "false" || v == "no" || v == "off" || v == "0") return false;
  fail(s, k, "expected a boolean, got '" + v + "'");
}

std::vector<std::string> IniDocument::get_list(const std::string& s, const std::string& k) const {
  std::vector<std::string> out;
  if (!has(s, k)) return out;
  std::stringstream in(get_string(s, k));
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void IniDocument::require_known(const std::string& section, const std::vector<std::string>& allowed) const {
  auto it = sections_.find(section);
  if (it == sections_.end()) return;
  for (const auto& [k, e] : it->second)
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) fail_key(section, k, "unknown key");
}

void IniDocument::require_sections(const std::vector<std::string>& allowed) const {
  for (const auto& [s, keys] : sections_) {
    if (std::find(allowed.begin(), allowed.end(), s) != allowed.end()) continue;
    int line = 0;
    for (const auto& [k, e] : keys)
      if (e.line > 0 && (line == 0 || e.line < line)) line = e.line;
    throw ConfigError(source_ + ": unknown section [" + s + "]", s, line, 0);
  }
}

NormSpec parse_norm_spec(const std::string& text) {
  std::vector<std::string> f;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ':')) f.push_back(trim(item));
  if (f.empty() || f[0].empty()) throw DomainError("empty norm spec");
  NormSpec n;
  n.space = parse_space(f[0]);
  std::size_t i = 1;
  if (n.space == SpaceKind::Lebesgue) {
    if (f.size() > 1) n.q = parse_exponent(f[i++]);
  } else {
    if (f.size() > 1) n.gamma = parse_exponent(f[i++]);
    if (f.size() > 2) n.q = parse_exponent(f[i++]);
  }
  for (; i < f.size(); ++i) {
    if (f[i] == "project-mean")
      n.policy = ZeroModePolicy::ProjectOutMean;
    else if (f[i] == "alternate")
      n.cutoff = CutoffKind::Alternate;
    else
      throw DomainError("unknown norm modifier '" + f[i] + "' in '" + text + "'");
  }
  if (!(n.q >= 1.0)) throw DomainError("norm exponent q must be >= 1 in '" + text + "'");
  return n;
}

namespace {

std::array<double, 3> triple(const IniDocument& doc, const std::string& s, const std::string& k, int d) {
  std::array<double, 3> out{0.0, 0.0, 0.0};
  const auto items = doc.get_list(s, k);
  if (static_cast<int>(items.size()) != d) doc.fail(s, k, "expected " + std::to_string(d) + " comma-separated values");
  for (int i = 0; i < d; ++i)
    if (!parse_real(items[i], out[i])) doc.fail(s, k, "expected a number, got '" + items[i] + "'");
  return out;
}

InitialProfile profile_from(const IniDocument& doc, const std::string& prefix, int d, bool required) {
  const std::string s = "initial";
  const std::string kind_key = prefix.empty() ? "profile" : prefix + "profile";
  if (!required && !doc.has(s, kind_key)) return profile::Zero{};
  const std::string kind = lower(doc.get_string(s, kind_key));
  auto key = [&](const std::string& k) { return prefix + k; };
  if (kind == "gaussian") {
    profile::Gaussian g;
    g.amplitude = doc.get_double(s, key("amplitude"), 1.0);
    g.width = doc.get_double(s, key("width"), 1.0);
    if (!(g.width > 0.0)) doc.fail(s, key("width"), "width must be positive");
    if (doc.has(s, key("center"))) g.center = triple(doc, s, key("center"), d);
    if (doc.has(s, key("phase_velocity"))) g.velocity = triple(doc, s, key("phase_velocity"), d);
    return g;
  }
  if (kind == "plane-wave") {
    profile::PlaneWave w;
    w.amplitude = Complex(doc.get_double(s, key("amplitude"), 1.0), doc.get_double(s, key("amplitude_imag"), 0.0));
    if (doc.has(s, key("mode"))) {
      const auto m = triple(doc, s, key("mode"), d);
      for (int i = 0; i < d; ++i) {
        if (m[i] != static_cast<int>(m[i])) doc.fail(s, key("mode"), "mode entries must be integers");
        w.mode[i] = static_cast<int>(m[i]);
      }
    }
    return w;
  }
  if (kind == "bump") {
    profile::Bump b;
    b.amplitude = doc.get_double(s, key("amplitude"), 1.0);
    b.width = doc.get_double(s, key("width"), 1.0);
    if (!(b.width > 0.0)) doc.fail(s, key("width"), "width must be positive");
    if (doc.has(s, key("center"))) b.center = triple(doc, s, key("center"), d);
    return b;
  }
  if (kind == "file") {
    profile::File f;
    f.path = doc.get_string(s, key("path"));
    f.component = static_cast<int>(doc.get_int(s, key("component"), 0));
    return f;
  }
  if (kind == "zero") return profile::Zero{};
  doc.fail(s, kind_key, "unknown profile '" + kind + "' (gaussian, plane-wave, bump, file, zero)");
}

const std::vector<std::string> kInitialKeys = {
    "profile",          "amplitude",          "amplitude_imag",   "width",           "center",
    "phase_velocity",   "mode",               "path",             "component",       "velocity_profile",
    "velocity_amplitude", "velocity_amplitude_imag", "velocity_width", "velocity_center", "velocity_phase_velocity",
    "velocity_mode",    "velocity_path",      "velocity_component"};

}  // namespace

ScenarioConfig scenario_from_ini(const IniDocument& doc) {
  doc.require_sections({"equation", "grid", "initial", "method", "output", "verify"});
  doc.require_known("equation", {"kind", "d", "sigma", "nu", "mu", "theorem", "gamma"});
  doc.require_known("grid", {"n", "box_length"});
  doc.require_known("initial", kInitialKeys);
  doc.require_known("method", {"name", "dt", "t_final", "picard_max_iters", "picard_tolerance", "picard_nodes_per_step",
                               "epsilon", "monitor_gamma", "ceiling_factor", "linear_mode", "dealias",
                               "high_band_alarm", "strict_deterministic"});
  doc.require_known("output", {"dir", "snapshot_stride", "snapshots", "norms"});
  doc.require_known("verify", {"lambda", "times", "probe_n", "probe_box_length", "samples", "seed", "sizes", "dt_halving"});

  ScenarioConfig sc;
  RunConfig& c = sc.run;
  const std::string kind = lower(doc.get_string("equation", "kind", "nlfs"));
  if (kind == "nlfs")
    c.params.kind = EquationKind::NLFS;
  else if (kind == "nlfw")
    c.params.kind = EquationKind::NLFW;
  else
    doc.fail("equation", "kind", "expected nlfs or nlfw");
  c.params.d = static_cast<int>(doc.get_int("equation", "d"));
  sc.sigma_text = doc.get_string("equation", "sigma");
  sc.nu_text = doc.get_string("equation", "nu");
  c.params.sigma = doc.get_double("equation", "sigma");
  c.params.nu = doc.get_double("equation", "nu");
  c.params.mu = static_cast<int>(doc.get_int("equation", "mu", 1));
  try {
    c.params.validate();
  } catch (const DomainError& e) {
    doc.fail("equation", "sigma", e.what());
  }
  if (doc.has("equation", "theorem")) sc.audit.theorem = doc.get_string("equation", "theorem");
  if (doc.has("equation", "gamma")) sc.audit.gamma = doc.get_string("equation", "gamma");

  c.grid.d = c.params.d;
  c.grid.n = static_cast<int>(doc.get_int("grid", "n", 256));
  c.grid.box_length = doc.get_double("grid", "box_length", 40.0);

  c.initial = profile_from(doc, "", c.params.d, true);
  c.initial_velocity = profile_from(doc, "velocity_", c.params.d, false);
  if (c.params.kind == EquationKind::NLFS && doc.has("initial", "velocity_profile"))
    doc.fail("initial", "velocity_profile", "initial velocity only applies to nlfw");

  const std::string def_method = c.params.kind == EquationKind::NLFW ? "wave-trig" : "split-step";
  try {
    c.method = parse_method(doc.get_string("method", "name", def_method));
  } catch (const std::exception& e) {
    doc.fail("method", "name", e.what());
  }
  c.dt = doc.get_double("method", "dt", 1e-3);
  c.t_final = doc.get_double("method", "t_final");
  c.picard.max_iters = static_cast<int>(doc.get_int("method", "picard_max_iters", c.picard.max_iters));
  c.picard.tolerance = doc.get_double("method", "picard_tolerance", c.picard.tolerance);
  c.picard.nodes_per_step = static_cast<int>(doc.get_int("method", "picard_nodes_per_step", 1));
  c.epsilon = doc.get_double("method", "epsilon", 0.0);
  if (doc.has("method", "monitor_gamma")) c.monitor_gamma = doc.get_double("method", "monitor_gamma");
  c.ceiling_factor = doc.get_double("method", "ceiling_factor", c.ceiling_factor);
  c.linear_mode = doc.get_bool("method", "linear_mode", false);
  c.high_band_alarm = doc.get_double("method", "high_band_alarm", c.high_band_alarm);
  const std::string dealias = lower(doc.get_string("method", "dealias", "auto"));
  if (dealias == "on")
    c.dealias = true;
  else if (dealias == "off")
    c.dealias = false;
  else if (dealias != "auto")
    doc.fail("method", "dealias", "expected auto, on or off");
  if (!doc.get_bool("method", "strict_deterministic", true))
    doc.fail("method", "strict_deterministic", "only the strict sequential mode is implemented");

  sc.output.dir = doc.get_string("output", "dir", "run");
  c.snapshot_stride = static_cast<int>(doc.get_int("output", "snapshot_stride", 1));
  sc.output.snapshots = doc.get_bool("output", "snapshots", true);
  for (const auto& item : doc.get_list("output", "norms")) {
    try {
      sc.output.norms.push_back(parse_norm_spec(item));
    } catch (const std::exception& e) {
      doc.fail("output", "norms", e.what());
    }
    std::string label = item;
    label.erase(std::remove_if(label.begin(), label.end(), [](char ch) { return std::isspace(
                                                                           static_cast<unsigned char>(ch)); }),
                label.end());
    sc.output.norm_labels.push_back(label);
  }

  try {
    PeriodicGrid::make(c.grid.d, c.grid.n, c.grid.box_length);
  } catch (const std::exception& e) {
    doc.fail("grid", std::string(e.what()).find("box") != std::string::npos ? "box_length" : "n", e.what());
  }
  try {
    c.validate();
  } catch (const std::exception& e) {
    const std::string msg = e.what();
    if (msg.find("stride") != std::string::npos) doc.fail("output", "snapshot_stride", msg);
    if (msg.find("picard") != std::string::npos || msg.find("ceiling") != std::string::npos ||
        msg.find("split-step") != std::string::npos || msg.find("wave-trig") != std::string::npos)
      doc.fail("method", msg.find("ceiling") != std::string::npos ? "ceiling_factor"
                         : msg.find("picard") != std::string::npos ? "picard_tolerance"
                                                                   : "name",
               msg);
    doc.fail("method", msg.rfind("dt", 0) == 0 ? "dt" : "t_final", msg);
  }
  return sc;
}

}  // namespace fraclab
