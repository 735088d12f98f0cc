#include "fraclab/exponents.hpp"

#include <array>
#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace fraclab {

namespace {

struct TheoremName {
  TheoremId id;
  std::string_view label;
  bool needs_gamma;
};

constexpr std::array<TheoremName, 11> kTheorems{{
    {TheoremId::LwpSubcritNlsLowSigma, "lwp-subcrit-nls-low-sigma", true},
    {TheoremId::LwpSubcritNlsHighSigma, "lwp-subcrit-nls-high-sigma", true},
    {TheoremId::GlobalEnergy, "global-energy", false},
    {TheoremId::CritNlsLowSigma, "crit-nls-low-sigma", false},
    {TheoremId::CritNlsHighSigma, "crit-nls-high-sigma", false},
    {TheoremId::LwpSubcritNlfw, "lwp-subcrit-nlfw", true},
    {TheoremId::HSigmaSubcritNlfw, "hsigma-subcrit-nlfw", false},
    {TheoremId::CritNlfw, "crit-nlfw", false},
    {TheoremId::HSigmaCritNlfw, "hsigma-crit-nlfw", false},
    {TheoremId::GlobalDefocusingNlfw, "global-defocusing-nlfw", false},
    {TheoremId::WaveAdmissibilitySystem, "wave-admissibility-system", false},
}};

const TheoremName& lookup(TheoremId id) {
  for (const auto& t : kTheorems)
    if (t.id == id) return t;
  throw DomainError("unknown theorem id");
}

nlohmann::json number_or_inf(double x) {
  if (std::isinf(x)) return "inf";
  return x;
}

}  // namespace

std::string_view theorem_label(TheoremId id) { return lookup(id).label; }

bool theorem_needs_gamma(TheoremId id) { return lookup(id).needs_gamma; }

TheoremId parse_theorem_id(std::string_view label) {
  for (const auto& t : kTheorems)
    if (t.label == label) return t.id;
  std::string known;
  for (const auto& t : kTheorems) known += (known.empty() ? "" : ", ") + std::string(t.label);
  throw DomainError("unknown theorem id '" + std::string(label) + "' (known: " + known + ")");
}

const std::vector<TheoremId>& all_theorems() {
  static const std::vector<TheoremId> ids = [] {
    std::vector<TheoremId> v;
    for (const auto& t : kTheorems) v.push_back(t.id);
    return v;
  }();
  return ids;
}

std::string report_to_json(const ExponentReport& r, int indent) {
  using nlohmann::json;
  json j;
  j["theorem"] = r.theorem;
  j["arithmetic"] = r.exact ? "rational" : "float";
  j["params"] = {{"d", r.d}, {"sigma", r.sigma}, {"nu", r.nu}, {"mu", r.mu}};
  if (r.gamma) j["params"]["gamma"] = *r.gamma;
  j["gamma_s"] = {{"value", r.gamma_s}, {"exact", r.gamma_s_exact}};
  j["gamma_w"] = {{"value", r.gamma_w}, {"exact", r.gamma_w_exact}};
  j["pass"] = r.pass;
  j["entries"] = json::array();
  for (const auto& e : r.entries) {
    json je;
    je["theorem"] = e.theorem;
    if (!e.variant.empty()) je["variant"] = e.variant;
    je["pass"] = e.pass;
    je["notes"] = e.notes;
    je["conditions"] = json::array();
    for (const auto& c : e.conditions) {
      je["conditions"].push_back({{"id", c.id},
                                  {"description", c.description},
                                  {"relation", c.relation},
                                  {"lhs", c.lhs},
                                  {"rhs", c.rhs},
                                  {"lhs_exact", c.lhs_exact},
                                  {"rhs_exact", c.rhs_exact},
                                  {"pass", c.pass}});
    }
    j["entries"].push_back(je);
  }
  j["pairs"] = json::array();
  for (const auto& p : r.pairs) {
    j["pairs"].push_back({{"name", p.name},
                          {"p", number_or_inf(p.p)},
                          {"q", number_or_inf(p.q)},
                          {"p_exact", p.p_exact},
                          {"q_exact", p.q_exact},
                          {"admissible", p.admissible},
                          {"gamma_pq", p.gamma_pq},
                          {"gamma_pq_exact", p.gamma_pq_exact}});
  }
  if (r.nu_bounds) {
    const auto& b = *r.nu_bounds;
    json jb;
    jb["empty"] = b.empty;
    jb["lower"] = b.lower ? json(*b.lower) : json("-inf");
    jb["upper"] = b.upper ? json(*b.upper) : json("inf");
    jb["lower_exact"] = b.lower_exact;
    jb["upper_exact"] = b.upper_exact;
    jb["lower_open"] = b.lower_open;
    jb["upper_open"] = b.upper_open;
    jb["constraints"] = b.constraints;
    j["nu_bounds"] = jb;
  }
  return j.dump(indent);
}

std::string report_to_table(const ExponentReport& r) {
  std::ostringstream os;
  os << "theorem  " << r.theorem << "  (" << (r.exact ? "rational" : "float") << " arithmetic)\n";
  os << "params   d=" << r.d << " sigma=" << r.sigma << " nu=" << r.nu << " mu=" << r.mu;
  if (r.gamma) os << " gamma=" << *r.gamma;
  os << "\n";
  os << "gamma_s  " << r.gamma_s_exact << "\n";
  os << "gamma_w  " << r.gamma_w_exact << "\n";

  std::size_t wid = 2, wdesc = 11, wl = 3, wr = 3;
  for (const auto& e : r.entries)
    for (const auto& c : e.conditions) {
      wid = std::max(wid, c.id.size());
      wdesc = std::max(wdesc, c.description.size());
      wl = std::max(wl, c.lhs_exact.size());
      wr = std::max(wr, c.rhs_exact.size());
    }
  for (const auto& e : r.entries) {
    os << "\n[" << e.theorem << (e.variant.empty() ? "" : " / " + e.variant) << "]  "
       << (e.pass ? "PASS" : "FAIL") << "\n";
    os << std::left << "  " << std::setw(static_cast<int>(wid)) << "id" << "  " << std::setw(static_cast<int>(wdesc))
       << "description" << "  " << std::setw(static_cast<int>(wl)) << "lhs" << "  rel  "
       << std::setw(static_cast<int>(wr)) << "rhs" << "  result\n";
    for (const auto& c : e.conditions) {
      os << "  " << std::setw(static_cast<int>(wid)) << c.id << "  " << std::setw(static_cast<int>(wdesc))
         << c.description << "  " << std::setw(static_cast<int>(wl)) << c.lhs_exact << "  " << std::setw(3)
         << c.relation << "  " << std::setw(static_cast<int>(wr)) << c.rhs_exact << "  " << (c.pass ? "pass" : "FAIL")
         << "\n";
    }
    for (const auto& n : e.notes) os << "  note: " << n << "\n";
  }
  if (!r.pairs.empty()) {
    os << "\npairs\n";
    for (const auto& p : r.pairs)
      os << "  " << std::setw(28) << p.name << "  p=" << std::setw(12) << p.p_exact << " q=" << std::setw(12)
         << p.q_exact << " admissible=" << (p.admissible ? "yes" : "no") << " gamma_pq=" << p.gamma_pq_exact << "\n";
  }
  if (r.nu_bounds) {
    const auto& b = *r.nu_bounds;
    os << "\nnu window  ";
    if (b.empty) {
      os << "empty\n";
    } else {
      os << (b.lower ? (b.lower_open ? "(" : "[") + b.lower_exact : std::string("(-inf")) << ", "
         << (b.upper ? b.upper_exact + (b.upper_open ? ")" : "]") : std::string("inf)")) << "\n";
    }
  }
  os << "\noverall  " << (r.pass ? "PASS" : "FAIL") << "\n";
  return os.str();
}

}  // namespace fraclab
