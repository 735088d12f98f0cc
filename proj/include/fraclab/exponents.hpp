#pragma once

// Exponent algebra for the fractional Schrodinger and wave equations:
// critical regularities, Strichartz admissibility, the theorem-specific
// exponent pairs, and a hypothesis auditor.
//
// Everything is templated on the scalar. Instantiate with fraclab::Rational
// for exact arithmetic or with double (comparisons then carry 1e-12 slack).

#include <algorithm>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fraclab/errors.hpp"
#include "fraclab/rational.hpp"
#include "fraclab/scalar.hpp"

namespace fraclab {

enum class EquationKind { NLFS, NLFW };

template <class S>
struct EquationParams {
  int d = 1;
  S sigma = S(2);
  S nu = S(3);
  int mu = 1;  ///< +1 defocusing, -1 focusing
  EquationKind kind = EquationKind::NLFS;

  void validate() const {
    if (d < 1) throw DomainError("dimension must be >= 1");
    if (!(sigma > S(0))) throw DomainError("sigma must be positive");
    if (sigma == S(1)) throw DomainError("sigma = 1 is excluded");
    if (!(nu > S(1))) throw DomainError("nu must exceed 1");
    if (mu != 1 && mu != -1) throw DomainError("mu must be +1 or -1");
  }
};

/// Lebesgue exponent in [1, inf], stored by its reciprocal so that inf is
/// the ordinary value 0.
template <class S>
class Exponent {
 public:
  static Exponent finite(const S& value) {
    if (!(value > S(0))) throw DomainError("Lebesgue exponent must be positive");
    return Exponent(S(1) / value);
  }
  static Exponent infinity() { return Exponent(S(0)); }
  static Exponent from_inverse(const S& inv) {
    if (inv < S(0)) throw DomainError("negative reciprocal exponent");
    return Exponent(inv);
  }

  const S& inverse() const { return inv_; }
  bool is_infinite() const { return inv_ == S(0); }
  S value() const {
    if (is_infinite()) throw DomainError("infinite exponent has no finite value");
    return S(1) / inv_;
  }
  double to_double() const;
  std::string str() const { return is_infinite() ? "inf" : ScalarOps<S>::str(value()); }

  /// Hoelder conjugate: 1/p + 1/p' = 1.
  Exponent conjugate() const { return from_inverse(S(1) - inv_); }

 private:
  explicit Exponent(S inv) : inv_(std::move(inv)) {}
  S inv_;
};

template <class S>
double Exponent<S>::to_double() const {
  return is_infinite() ? std::numeric_limits<double>::infinity() : ScalarOps<S>::to_double(value());
}

template <class S>
struct ExponentPair {
  Exponent<S> p;
  Exponent<S> q;

  ExponentPair(Exponent<S> p_, Exponent<S> q_) : p(std::move(p_)), q(std::move(q_)) {
    if (p.inverse() > S(1) || q.inverse() > S(1)) throw DomainError("pair exponents must be >= 1");
  }
  static ExponentPair from_values(const S& p, const S& q) {
    return {Exponent<S>::finite(p), Exponent<S>::finite(q)};
  }
};

// ---------------------------------------------------------------------------
// Critical exponents and gamma_{p,q}

template <class S>
S gamma_s(const EquationParams<S>& params) {
  params.validate();
  return S(params.d) / S(2) - params.sigma / (params.nu - S(1));
}

template <class S>
S gamma_w(const EquationParams<S>& params) {
  params.validate();
  return S(params.d) / S(2) - S(2) * params.sigma / (params.nu - S(1));
}

/// The power making (NLFW) critical in the energy space: 1 + 4 sigma / (d - 2 sigma).
template <class S>
S sigma_critical_wave_power(int d, const S& sigma) {
  const S denom = S(d) - S(2) * sigma;
  if (denom == S(0)) throw DomainError("d = 2 sigma: sigma-critical wave power is infinite");
  return S(1) + S(4) * sigma / denom;
}

template <class S>
S gamma_pq(int d, const S& sigma, const ExponentPair<S>& pair) {
  return S(d) / S(2) - S(d) * pair.q.inverse() - sigma * pair.p.inverse();
}

template <class S>
bool is_admissible(int d, const ExponentPair<S>& pair) {
  const S half = S(1) / S(2);
  const S& pinv = pair.p.inverse();
  const S& qinv = pair.q.inverse();
  if (!approx_le(pinv, half) || !approx_le(qinv, half)) return false;
  if (d == 2 && approx_eq(pinv, half) && approx_eq(qinv, S(0))) return false;
  return approx_le(S(2) * pinv + S(d) * qinv, S(d) / S(2));
}

/// sigma* = (d + 2 sigma) / (d - 2 sigma).
template <class S>
S sigma_star(int d, const S& sigma) {
  const S denom = S(d) - S(2) * sigma;
  if (denom == S(0)) throw DomainError("sigma* undefined for d = 2 sigma");
  return (S(d) + S(2) * sigma) / denom;
}

/// Positive ceiling: the smallest positive integer >= x.
template <class S>
std::int64_t positive_ceil(const S& x) {
  return std::max<std::int64_t>(1, ScalarOps<S>::ceil(x));
}

// ---------------------------------------------------------------------------
// Condition bookkeeping

struct ConditionResult {
  std::string id;
  std::string description;
  std::string relation;  ///< one of "<", "<=", ">", ">=", "==", "!="
  double lhs = 0.0;
  double rhs = 0.0;
  std::string lhs_exact;
  std::string rhs_exact;
  bool pass = false;
};

template <class S>
class ConditionLedger {
 public:
  bool gt(std::string id, std::string desc, const S& lhs, const S& rhs) {
    return add(std::move(id), std::move(desc), ">", lhs, rhs, approx_lt(rhs, lhs));
  }
  bool ge(std::string id, std::string desc, const S& lhs, const S& rhs) {
    return add(std::move(id), std::move(desc), ">=", lhs, rhs, approx_le(rhs, lhs));
  }
  bool lt(std::string id, std::string desc, const S& lhs, const S& rhs) {
    return add(std::move(id), std::move(desc), "<", lhs, rhs, approx_lt(lhs, rhs));
  }
  bool le(std::string id, std::string desc, const S& lhs, const S& rhs) {
    return add(std::move(id), std::move(desc), "<=", lhs, rhs, approx_le(lhs, rhs));
  }
  bool eq(std::string id, std::string desc, const S& lhs, const S& rhs) {
    return add(std::move(id), std::move(desc), "==", lhs, rhs, approx_eq(lhs, rhs));
  }
  bool ne(std::string id, std::string desc, const S& lhs, const S& rhs) {
    return add(std::move(id), std::move(desc), "!=", lhs, rhs, !approx_eq(lhs, rhs));
  }
  /// Records a condition whose outcome is decided by the caller (waivers, disjunctions).
  bool decided(std::string id, std::string desc, std::string relation, const S& lhs, const S& rhs, bool pass) {
    return add(std::move(id), std::move(desc), std::move(relation), lhs, rhs, pass);
  }

  bool all_pass() const {
    return std::all_of(results_.begin(), results_.end(), [](const auto& c) { return c.pass; });
  }
  std::string failures() const {
    std::string out;
    for (const auto& c : results_) {
      if (c.pass) continue;
      if (!out.empty()) out += "; ";
      out += c.id + ": " + c.description + " (" + c.lhs_exact + " " + c.relation + " " + c.rhs_exact + " fails)";
    }
    return out;
  }
  const std::vector<ConditionResult>& results() const { return results_; }
  std::vector<ConditionResult> take() { return std::move(results_); }

 private:
  bool add(std::string id, std::string desc, std::string rel, const S& lhs, const S& rhs, bool pass) {
    results_.push_back({std::move(id), std::move(desc), std::move(rel), ScalarOps<S>::to_double(lhs),
                        ScalarOps<S>::to_double(rhs), ScalarOps<S>::str(lhs), ScalarOps<S>::str(rhs), pass});
    return pass;
  }
  std::vector<ConditionResult> results_;
};

namespace detail {

template <class S>
void require(const ConditionLedger<S>& ledger, std::string_view what) {
  if (!ledger.all_pass()) throw HypothesisError(std::string(what) + ": " + ledger.failures());
}

/// Parameter windows for the energy-space subcritical wave theory with sigma < 2,
/// selected by dimension and sigma branch.
template <class S>
void wave_subcritical_low_sigma_ranges(const EquationParams<S>& prm, ConditionLedger<S>& ledger) {
  const int d = prm.d;
  const S D(d);
  const S& s = prm.sigma;
  const S& nu = prm.nu;
  ledger.lt("sigma-below-2", "sigma < 2", s, S(2));
  ledger.ne("sigma-not-1", "sigma != 1", s, S(1));
  const S two_thirds = S(2) / S(3);

  // Branch A: small sigma, upper nu bound from admissibility.
  const S a_sigma_hi = d <= 4 ? D / (D + S(2)) : two_thirds;
  // Branch C (d >= 5): upper nu bound from p >= 2.
  // Branch B: upper nu bound from time integrability.
  const S b_sigma_lo = d <= 4 ? D / (D + S(2)) : (d <= 11 ? D / S(6) : S(2));
  const S b_sigma_hi = d <= 4 ? D / S(2) : S(2);

  if (D - S(2) * s <= S(0)) {
    ledger.lt("sigma-below-half-dim", "sigma < d/2", s, D / S(2));
    return;
  }
  const S nu_lo = D / (D - S(2) * s);
  if (approx_lt(s, a_sigma_hi)) {
    ledger.lt("sigma-branch-upper", "small-sigma branch: sigma below its window end", s, a_sigma_hi);
    ledger.gt("nu-window-lower", "nu > d/(d-2 sigma)", nu, nu_lo);
    ledger.le("nu-window-upper", "nu <= (2d - d sigma)/(2d - (d+4) sigma)", nu,
              (S(2) * D - D * s) / (S(2) * D - (D + S(4)) * s));
  } else if (d >= 5 && approx_lt(s, b_sigma_lo)) {
    ledger.ge("sigma-branch-lower", "middle branch: sigma >= 2/3", s, two_thirds);
    ledger.lt("sigma-branch-upper", d <= 11 ? "middle branch: sigma < d/6" : "middle branch: sigma < 2", s,
              b_sigma_lo);
    ledger.gt("nu-window-lower", "nu > d/(d-2 sigma)", nu, nu_lo);
    const S denom = D - S(3) * s;
    ledger.decided("nu-window-upper", "nu <= d/(d - 3 sigma)", "<=", nu, denom > S(0) ? D / denom : S(0),
                   denom > S(0) && approx_le(nu, D / denom));
  } else {
    ledger.ge("sigma-branch-lower", "large branch: sigma at or above its window start", s, b_sigma_lo);
    ledger.lt("sigma-branch-upper", "large branch: sigma below its window end", s, b_sigma_hi);
    ledger.gt("nu-window-lower", "nu > d/(d-2 sigma)", nu, nu_lo);
    ledger.lt("nu-window-upper", "nu < (d+2 sigma)/(d-2 sigma)", nu, (D + S(2) * s) / (D - S(2) * s));
  }
}

template <class S>
void wave_subcritical_high_sigma_ranges(const EquationParams<S>& prm, ConditionLedger<S>& ledger) {
  const S D(prm.d);
  const S& s = prm.sigma;
  ledger.ge("sigma-at-least-2", "sigma >= 2", s, S(2));
  if (!ledger.lt("sigma-below-half-dim", "sigma < d/2", s, D / S(2))) return;
  const S star = sigma_star(prm.d, s);
  ledger.ge("nu-window-lower", "nu >= d sigma*/(d + sigma)", prm.nu, D * star / (D + s));
  ledger.lt("nu-window-upper", "nu < sigma*", prm.nu, star);
}

template <class S>
void wave_critical_item1_ranges(const EquationParams<S>& prm, ConditionLedger<S>& ledger) {
  const S D(prm.d);
  const S& s = prm.sigma;
  ledger.ge("sigma-window-lower", "sigma >= d/(d+1)", s, D / (D + S(1)));
  ledger.lt("sigma-window-upper", "sigma < d", s, D);
  ledger.ne("sigma-not-1", "sigma != 1", s, S(1));
  if (s < D) ledger.ge("nu-lower", "nu >= 1 + 4 sigma/(d - sigma)", prm.nu, S(1) + S(4) * s / (D - s));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Theorem-specific pairs

/// Unchecked subcritical Schrodinger pair formula; valid wherever d != 2 gamma.
template <class S>
ExponentPair<S> subcritical_pair_formula(const EquationParams<S>& prm, const S& gamma) {
  const S D(prm.d);
  const S pinv = (prm.nu - S(1)) * (D - S(2) * gamma) / (S(2) * prm.sigma * (prm.nu + S(1)));
  const S qinv = (D + (prm.nu - S(1)) * gamma) / (D * (prm.nu + S(1)));
  return {Exponent<S>::from_inverse(pinv), Exponent<S>::from_inverse(qinv)};
}

/// (p, q) carried by the subcritical local theory for sigma >= 2:
/// p = 2 sigma (nu+1) / ((nu-1)(d - 2 gamma)), q = d (nu+1) / (d + (nu-1) gamma).
template <class S>
ExponentPair<S> subcritical_pair_nls(const EquationParams<S>& prm, const S& gamma) {
  prm.validate();
  const S D(prm.d);
  if (approx_le(D / S(2), gamma)) throw DomainError("gamma must be < d/2");
  ConditionLedger<S> ledger;
  ledger.ge("sigma-at-least-2", "sigma >= 2", prm.sigma, S(2));
  ledger.ge("gamma-nonnegative", "gamma >= 0", gamma, S(0));
  ledger.gt("gamma-above-critical", "gamma > gamma_s", gamma, gamma_s(prm));
  detail::require(ledger, "subcritical_pair_nls");
  return subcritical_pair_formula(prm, gamma);
}

/// (p, q) = (nu + 1, 2d(nu+1) / (d(nu+1) - 2 sigma)) of the critical theory for sigma >= 2.
template <class S>
ExponentPair<S> critical_pair_nls(const EquationParams<S>& prm) {
  prm.validate();
  ConditionLedger<S> ledger;
  ledger.ge("sigma-at-least-2", "sigma >= 2", prm.sigma, S(2));
  ledger.ge("gamma-s-nonnegative", "gamma_s >= 0", gamma_s(prm), S(0));
  detail::require(ledger, "critical_pair_nls");
  const S D(prm.d);
  const S pinv = S(1) / (prm.nu + S(1));
  const S qinv = (D * (prm.nu + S(1)) - S(2) * prm.sigma) / (S(2) * D * (prm.nu + S(1)));
  return {Exponent<S>::from_inverse(pinv), Exponent<S>::from_inverse(qinv)};
}

/// Unchecked energy-space wave pair formulas (no range check). Returns the
/// sigma < 2 formula (2 sigma nu / ((d-2 sigma) nu - d), 2 nu) or, for sigma >= 2,
/// (2 sigma*, 2 d sigma* / (d + sigma)).
template <class S>
ExponentPair<S> wave_pair_subcritical_formula(const EquationParams<S>& prm) {
  const S D(prm.d);
  const S& s = prm.sigma;
  if (s < S(2)) {
    const S denom = (D - S(2) * s) * prm.nu - D;
    if (!(denom > S(0))) throw DomainError("(d - 2 sigma) nu <= d: p would be nonpositive");
    return {Exponent<S>::from_inverse(denom / (S(2) * s * prm.nu)), Exponent<S>::from_inverse(S(1) / (S(2) * prm.nu))};
  }
  if (!(s < D / S(2))) throw DomainError("sigma >= d/2: sigma* undefined or negative");
  const S star = sigma_star(prm.d, s);
  return {Exponent<S>::from_inverse(S(1) / (S(2) * star)),
          Exponent<S>::from_inverse((D + s) / (S(2) * D * star))};
}

/// Energy-space subcritical wave pair with the parameter windows enforced.
/// The result is admissible with gamma_{p,q} = sigma.
template <class S>
ExponentPair<S> wave_pair_subcritical(const EquationParams<S>& prm) {
  prm.validate();
  const S D(prm.d);
  if (!((D - S(2) * prm.sigma) * prm.nu > D)) throw DomainError("(d - 2 sigma) nu <= d: p would be nonpositive");
  ConditionLedger<S> ledger;
  if (prm.sigma < S(2))
    detail::wave_subcritical_low_sigma_ranges(prm, ledger);
  else
    detail::wave_subcritical_high_sigma_ranges(prm, ledger);
  detail::require(ledger, "wave_pair_subcritical");
  return wave_pair_subcritical_formula(prm);
}

template <class S>
struct CriticalWaveExponents {
  Exponent<S> p;  ///< L^p_t L^p_x exponent, gamma_{p,p} = gamma_w
  Exponent<S> a;  ///< L^a_t exponent of the derivative norm, gamma_{a,a} = sigma/2
};

template <class S>
CriticalWaveExponents<S> wave_pair_critical(const EquationParams<S>& prm) {
  prm.validate();
  ConditionLedger<S> ledger;
  detail::wave_critical_item1_ranges(prm, ledger);
  detail::require(ledger, "wave_pair_critical");
  const S D(prm.d);
  const S& s = prm.sigma;
  return {Exponent<S>::finite((D + s) * (prm.nu - S(1)) / (S(2) * s)),
          Exponent<S>::finite(S(2) * (D + s) / (D - s))};
}

/// Pair used by the critical Schrodinger theory for sigma < 2. For d = 2 the
/// theory allows any p in (2, nu - 1); the midpoint (nu + 1)/2 is returned.
template <class S>
ExponentPair<S> critical_pair_nls_low_sigma(const EquationParams<S>& prm) {
  const S D(prm.d);
  if (prm.d == 1) return {Exponent<S>::finite(S(4)), Exponent<S>::infinity()};
  if (prm.d == 2) {
    const S p = (prm.nu + S(1)) / S(2);
    if (!(p > S(2))) throw DomainError("no p in (2, nu - 1) for nu <= 3");
    return {Exponent<S>::finite(p), Exponent<S>::finite(S(2) * p / (p - S(2)))};
  }
  return {Exponent<S>::finite(S(2)), Exponent<S>::finite(S(2) * D / (D - S(2)))};
}

// ---------------------------------------------------------------------------
// Linear inequality systems in nu

/// Interval of nu values; a missing bound is infinite.
template <class S>
struct NuInterval {
  std::optional<S> lower;
  bool lower_open = true;
  std::optional<S> upper;
  bool upper_open = true;
  bool empty = false;

  bool contains(const S& nu) const {
    if (empty) return false;
    if (lower && (lower_open ? !approx_lt(*lower, nu) : !approx_le(*lower, nu))) return false;
    if (upper && (upper_open ? !approx_lt(nu, *upper) : !approx_le(nu, *upper))) return false;
    return true;
  }
};

enum class Relation { Less, LessEq, Greater, GreaterEq };

/// coefficient * nu  (relation)  rhs
template <class S>
struct LinearConstraint {
  S coefficient;
  Relation relation;
  S rhs;
  std::string description;
};

template <class S>
NuInterval<S> solve_linear_system(const std::vector<LinearConstraint<S>>& system) {
  NuInterval<S> out;
  auto tighten_lower = [&](const S& v, bool open) {
    if (!out.lower || v > *out.lower || (v == *out.lower && open)) {
      out.lower = v;
      out.lower_open = open;
    }
  };
  auto tighten_upper = [&](const S& v, bool open) {
    if (!out.upper || v < *out.upper || (v == *out.upper && open)) {
      out.upper = v;
      out.upper_open = open;
    }
  };
  for (const auto& c : system) {
    const bool strict = c.relation == Relation::Less || c.relation == Relation::Greater;
    bool upper = c.relation == Relation::Less || c.relation == Relation::LessEq;
    if (c.coefficient == S(0)) {
      const bool ok = c.relation == Relation::Less      ? S(0) < c.rhs
                      : c.relation == Relation::LessEq  ? S(0) <= c.rhs
                      : c.relation == Relation::Greater ? S(0) > c.rhs
                                                        : S(0) >= c.rhs;
      if (!ok) out.empty = true;
      continue;
    }
    const S bound = c.rhs / c.coefficient;
    if (c.coefficient < S(0)) upper = !upper;
    if (upper)
      tighten_upper(bound, strict);
    else
      tighten_lower(bound, strict);
  }
  if (out.lower && out.upper) {
    if (*out.lower > *out.upper || (*out.lower == *out.upper && (out.lower_open || out.upper_open)))
      out.empty = true;
  }
  return out;
}

/// The inequality system in nu that makes the energy-space wave pair
/// (2 sigma nu / ((d-2 sigma) nu - d), 2 nu) admissible with the needed
/// time integrability, for sigma in (0,2) minus {1}.
template <class S>
std::vector<LinearConstraint<S>> wave_admissibility_system(int d, const S& sigma) {
  const S D(d);
  const S& s = sigma;
  std::vector<LinearConstraint<S>> sys;
  sys.push_back({S(1), Relation::Greater, S(1), "nu > 1"});
  sys.push_back({D - S(2) * s, Relation::Greater, D, "(d - 2 sigma) nu > d  [p positive]"});
  sys.push_back({D - S(2) * s, Relation::Less, D + S(2) * s, "(d - 2 sigma) nu < d + 2 sigma  [1 - nu/p > 0]"});
  if (d == 1) {
    sys.push_back({S(2) - S(5) * s, Relation::LessEq, S(2) - s, "(2 - 5 sigma) nu <= 2 - sigma  [admissible, p >= 4]"});
  } else {
    sys.push_back({D - S(3) * s, Relation::LessEq, D, "(d - 3 sigma) nu <= d  [p >= 2]"});
    sys.push_back({S(2) * D - S(4) * s - D * s, Relation::LessEq, S(2) * D - D * s,
                   "(2d - 4 sigma - d sigma) nu <= 2d - d sigma  [admissible]"});
  }
  return sys;
}

// ---------------------------------------------------------------------------
// Theorem auditor

enum class TheoremId {
  LwpSubcritNlsLowSigma,
  LwpSubcritNlsHighSigma,
  GlobalEnergy,
  CritNlsLowSigma,
  CritNlsHighSigma,
  LwpSubcritNlfw,
  HSigmaSubcritNlfw,
  CritNlfw,
  HSigmaCritNlfw,
  GlobalDefocusingNlfw,
  WaveAdmissibilitySystem,
};

std::string_view theorem_label(TheoremId id);
/// Throws DomainError for an unknown label.
TheoremId parse_theorem_id(std::string_view label);
const std::vector<TheoremId>& all_theorems();
/// Whether the theorem's hypotheses involve a user-chosen regularity gamma.
bool theorem_needs_gamma(TheoremId id);

struct TheoremEntry {
  std::string theorem;
  std::string variant;
  std::vector<ConditionResult> conditions;
  std::vector<std::string> notes;
  bool pass = false;
};

struct PairRecord {
  std::string name;
  double p = 0.0;
  double q = 0.0;
  std::string p_exact;
  std::string q_exact;
  bool admissible = false;
  double gamma_pq = 0.0;
  std::string gamma_pq_exact;
};

struct IntervalRecord {
  std::optional<double> lower;
  bool lower_open = true;
  std::optional<double> upper;
  bool upper_open = true;
  std::string lower_exact;
  std::string upper_exact;
  bool empty = false;
  std::vector<std::string> constraints;
};

struct ExponentReport {
  std::string theorem;
  bool exact = false;
  int d = 0;
  std::string sigma;
  std::string nu;
  int mu = 1;
  std::optional<std::string> gamma;
  double gamma_s = 0.0;
  double gamma_w = 0.0;
  std::string gamma_s_exact;
  std::string gamma_w_exact;
  std::vector<TheoremEntry> entries;
  std::vector<PairRecord> pairs;
  std::optional<IntervalRecord> nu_bounds;
  bool pass = false;
};

namespace detail {

template <class S>
PairRecord make_pair_record(std::string name, int d, const S& sigma, const ExponentPair<S>& pair) {
  const S g = gamma_pq(d, sigma, pair);
  return {std::move(name), pair.p.to_double(), pair.q.to_double(), pair.p.str(), pair.q.str(),
          is_admissible(d, pair), ScalarOps<S>::to_double(g), ScalarOps<S>::str(g)};
}

template <class S>
void smoothness(ConditionLedger<S>& ledger, TheoremEntry& entry, const EquationParams<S>& prm, std::string id,
                const std::string& what, const S& regularity, const S& offset, const S& bound) {
  // positive_ceil(regularity) - offset <= bound, waived for odd integer nu.
  const S lhs = S(positive_ceil(regularity)) - offset;
  if (ScalarOps<S>::is_odd_integer(prm.nu)) {
    ledger.decided(std::move(id), what + " (waived: nu is an odd integer)", "<=", lhs, bound, true);
    entry.notes.push_back("smoothness condition waived because nu is an odd integer");
  } else {
    ledger.le(std::move(id), what, lhs, bound);
  }
}

template <class S>
void gamma_window(ConditionLedger<S>& ledger, int d, const S& gamma) {
  ledger.ge("gamma-nonnegative", "gamma >= 0", gamma, S(0));
  ledger.lt("gamma-below-half-dim", "gamma < d/2", gamma, S(d) / S(2));
}

template <class S>
void strichartz_lower(ConditionLedger<S>& ledger, const EquationParams<S>& prm, const S& gamma) {
  const S D(prm.d);
  const S cap = prm.d == 1 ? S(4) : S(2);
  const S m = std::max(prm.nu - S(1), cap);
  ledger.gt("gamma-strichartz-lower",
            prm.d == 1 ? "gamma > 1/2 - sigma/max(nu-1, 4)" : "gamma > d/2 - sigma/max(nu-1, 2)", gamma,
            D / S(2) - prm.sigma / m);
}

template <class S>
TheoremEntry finish(std::string theorem, std::string variant, ConditionLedger<S>& ledger, TheoremEntry entry) {
  entry.theorem = std::move(theorem);
  entry.variant = std::move(variant);
  entry.pass = ledger.all_pass();
  entry.conditions = ledger.take();
  return entry;
}

template <class S>
IntervalRecord to_record(const NuInterval<S>& iv, const std::vector<LinearConstraint<S>>& sys) {
  IntervalRecord r;
  if (iv.lower) {
    r.lower = ScalarOps<S>::to_double(*iv.lower);
    r.lower_exact = ScalarOps<S>::str(*iv.lower);
  }
  if (iv.upper) {
    r.upper = ScalarOps<S>::to_double(*iv.upper);
    r.upper_exact = ScalarOps<S>::str(*iv.upper);
  }
  r.lower_open = iv.lower_open;
  r.upper_open = iv.upper_open;
  r.empty = iv.empty;
  for (const auto& c : sys) r.constraints.push_back(c.description);
  return r;
}

template <class S>
bool evaluate_constraint(const LinearConstraint<S>& c, const S& nu, ConditionLedger<S>& ledger, const std::string& id) {
  const S lhs = c.coefficient * nu;
  switch (c.relation) {
    case Relation::Less: return ledger.lt(id, c.description, lhs, c.rhs);
    case Relation::LessEq: return ledger.le(id, c.description, lhs, c.rhs);
    case Relation::Greater: return ledger.gt(id, c.description, lhs, c.rhs);
    case Relation::GreaterEq: return ledger.ge(id, c.description, lhs, c.rhs);
  }
  return false;
}

}  // namespace detail

/// Evaluates every hypothesis of one theorem at the given parameters.
/// `gamma` is required for the theorems where theorem_needs_gamma() is true
/// and ignored otherwise.
template <class S>
ExponentReport audit_theorem(const EquationParams<S>& prm, const std::optional<S>& gamma, TheoremId id) {
  prm.validate();
  if (theorem_needs_gamma(id) && !gamma)
    throw DomainError(std::string(theorem_label(id)) + " requires a regularity gamma");

  using Ops = ScalarOps<S>;
  ExponentReport rep;
  rep.theorem = std::string(theorem_label(id));
  rep.exact = Ops::exact;
  rep.d = prm.d;
  rep.sigma = Ops::str(prm.sigma);
  rep.nu = Ops::str(prm.nu);
  rep.mu = prm.mu;
  if (gamma && theorem_needs_gamma(id)) rep.gamma = Ops::str(*gamma);
  const S gs = gamma_s(prm);
  const S gw = gamma_w(prm);
  rep.gamma_s = Ops::to_double(gs);
  rep.gamma_w = Ops::to_double(gw);
  rep.gamma_s_exact = Ops::str(gs);
  rep.gamma_w_exact = Ops::str(gw);

  const int d = prm.d;
  const S D(d);
  const S& s = prm.sigma;
  const S& nu = prm.nu;
  const std::string label(theorem_label(id));
  bool any_entry = false;

  auto push = [&](TheoremEntry e) { rep.entries.push_back(std::move(e)); };

  switch (id) {
    case TheoremId::LwpSubcritNlsLowSigma:
    case TheoremId::LwpSubcritNlfw: {
      ConditionLedger<S> L;
      TheoremEntry e;
      if (id == TheoremId::LwpSubcritNlsLowSigma) L.lt("sigma-below-2", "sigma < 2", s, S(2));
      L.ne("sigma-not-1", "sigma != 1", s, S(1));
      detail::gamma_window(L, d, *gamma);
      detail::strichartz_lower(L, prm, *gamma);
      detail::smoothness(L, e, prm, "smoothness-ceil-gamma", "ceil(gamma) <= nu", *gamma, S(0), nu);
      if (id == TheoremId::LwpSubcritNlfw)
        e.notes.push_back("gap to gamma_w = " + Ops::str(gw) + " is expected for this theory");
      push(detail::finish(label, "", L, std::move(e)));
      break;
    }
    case TheoremId::LwpSubcritNlsHighSigma: {
      ConditionLedger<S> L;
      TheoremEntry e;
      L.ge("sigma-at-least-2", "sigma >= 2", s, S(2));
      detail::gamma_window(L, d, *gamma);
      L.gt("gamma-above-critical", "gamma > gamma_s", *gamma, gs);
      detail::smoothness(L, e, prm, "smoothness-ceil-gamma", "ceil(gamma) <= nu", *gamma, S(0), nu);
      if (approx_lt(*gamma, D / S(2))) {
        const auto pair = subcritical_pair_formula(prm, *gamma);
        rep.pairs.push_back(detail::make_pair_record("subcritical-strichartz-pair", d, s, pair));
        L.decided("pair-admissible", "(p, q) admissible", "==", S(is_admissible(d, pair) ? 1 : 0), S(1),
                  is_admissible(d, pair));
        L.eq("pair-gap", "gamma_{p,q} = 0", gamma_pq(d, s, pair), S(0));
      }
      push(detail::finish(label, "", L, std::move(e)));
      break;
    }
    case TheoremId::GlobalEnergy: {
      ConditionLedger<S> L;
      TheoremEntry e;
      switch (d) {
        case 1:
          L.gt("sigma-window-lower", "sigma > 2/3", s, S(2) / S(3));
          L.lt("sigma-window-upper", "sigma < 1", s, S(1));
          break;
        case 2:
          L.gt("sigma-window-lower", "sigma > 1", s, S(1));
          L.lt("sigma-window-upper", "sigma < 2", s, S(2));
          break;
        case 3:
          L.gt("sigma-window-lower", "sigma > 3/2", s, S(3) / S(2));
          L.lt("sigma-window-upper", "sigma < 3", s, S(3));
          break;
        default:
          L.ge("sigma-window-lower", "sigma >= 2", s, S(2));
          L.lt("sigma-window-upper", "sigma < d", s, D);
      }
      L.gt("energy-subcritical", "sigma/2 > gamma_s", s / S(2), gs);
      detail::smoothness(L, e, prm, "smoothness-ceil-half-sigma", "ceil(sigma/2) <= nu", s / S(2), S(0), nu);
      const S mass_critical = S(1) + S(2) * s / D;
      if (prm.mu == 1) {
        L.decided("global-mechanism", "defocusing (mu = 1)", "==", S(prm.mu), S(1), true);
      } else {
        L.lt("global-mechanism", "focusing: nu < 1 + 2 sigma/d (mass subcritical)", nu, mass_critical);
        if (approx_eq(nu, mass_critical))
          e.notes.push_back("focusing mass-critical: global existence only for small L2 data");
        e.notes.push_back("focusing: global existence still holds for small H^{sigma/2} data");
      }
      push(detail::finish(label, "", L, std::move(e)));
      break;
    }
    case TheoremId::CritNlsLowSigma: {
      ConditionLedger<S> L;
      TheoremEntry e;
      L.lt("sigma-below-2", "sigma < 2", s, S(2));
      L.ne("sigma-not-1", "sigma != 1", s, S(1));
      L.gt("nu-power-lower", d == 1 ? "nu > 5" : "nu > 3", nu, d == 1 ? S(5) : S(3));
      L.ge("gamma-s-nonnegative", "gamma_s >= 0", gs, S(0));
      detail::smoothness(L, e, prm, "smoothness-ceil-gamma-s", "ceil(gamma_s) <= nu", gs, S(0), nu);
      if (d != 2 || nu > S(3))
        rep.pairs.push_back(detail::make_pair_record("critical-strichartz-pair", d, s, critical_pair_nls_low_sigma(prm)));
      e.notes.push_back("small Hdot^{gamma_s} data gives global existence and scattering");
      push(detail::finish(label, "", L, std::move(e)));
      break;
    }
    case TheoremId::CritNlsHighSigma: {
      ConditionLedger<S> L;
      TheoremEntry e;
      L.ge("sigma-at-least-2", "sigma >= 2", s, S(2));
      L.ge("gamma-s-nonnegative", "gamma_s >= 0", gs, S(0));
      detail::smoothness(L, e, prm, "smoothness-ceil-gamma-s", "ceil(gamma_s) <= nu", gs, S(0), nu);
      const S qden = D * (nu + S(1)) - S(2) * s;
      if (qden > S(0)) {
        const ExponentPair<S> pair{Exponent<S>::finite(nu + S(1)), Exponent<S>::from_inverse(qden / (S(2) * D * (nu + S(1))))};
        rep.pairs.push_back(detail::make_pair_record("critical-strichartz-pair", d, s, pair));
        L.decided("pair-admissible", "(nu + 1, q) admissible", "==", S(is_admissible(d, pair) ? 1 : 0), S(1),
                  is_admissible(d, pair));
      }
      e.notes.push_back("small Hdot^{gamma_s} data gives global existence and scattering");
      push(detail::finish(label, "", L, std::move(e)));
      break;
    }
    case TheoremId::HSigmaSubcritNlfw:
    case TheoremId::GlobalDefocusingNlfw: {
      ConditionLedger<S> L;
      TheoremEntry e;
      const bool low = s < S(2);
      if (low)
        detail::wave_subcritical_low_sigma_ranges(prm, L);
      else
        detail::wave_subcritical_high_sigma_ranges(prm, L);
      if (id == TheoremId::GlobalDefocusingNlfw)
        L.decided("defocusing", "mu = 1", "==", S(prm.mu), S(1), prm.mu == 1);
      try {
        const auto pair = wave_pair_subcritical_formula(prm);
        rep.pairs.push_back(detail::make_pair_record("energy-strichartz-pair", d, s, pair));
        L.eq("pair-gap", "gamma_{p,q} = sigma", gamma_pq(d, s, pair), s);
      } catch (const DomainError& err) {
        L.decided("pair-defined", err.what(), ">", (D - S(2) * s) * nu, D, false);
      }
      push(detail::finish(label, low ? "sigma-below-2" : "sigma-at-least-2", L, std::move(e)));
      break;
    }
    case TheoremId::CritNlfw: {
      {
        ConditionLedger<S> L;
        TheoremEntry e;
        detail::wave_critical_item1_ranges(prm, L);
        detail::smoothness(L, e, prm, "smoothness-ceil-gamma-w", "ceil(gamma_w) - sigma/2 <= nu - 1", gw, s / S(2),
                           nu - S(1));
        if (s < D && s > S(0)) {
          const auto p = Exponent<S>::finite((D + s) * (nu - S(1)) / (S(2) * s));
          const auto a = Exponent<S>::finite(S(2) * (D + s) / (D - s));
          rep.pairs.push_back(detail::make_pair_record("critical-wave-pp", d, s, ExponentPair<S>{p, p}));
          rep.pairs.push_back(detail::make_pair_record("critical-wave-aa", d, s, ExponentPair<S>{a, a}));
        }
        push(detail::finish(label, "strichartz-and-derivative", L, std::move(e)));
      }
      {
        ConditionLedger<S> L;
        TheoremEntry e;
        const S split = (D * D + S(4) * D) / (S(3) * D + S(4));
        const S nu_lo = S(1) + S(4) * s * (D + S(2)) / (D * (D + s));
        L.ne("sigma-not-1", "sigma != 1", s, S(1));
        if (approx_le(split, s)) {
          L.ge("sigma-window-lower", "sigma >= (d^2 + 4d)/(3d + 4)", s, split);
          L.ge("nu-lower", "nu >= 1 + 4 sigma (d+2)/(d (d + sigma))", nu, nu_lo);
        } else {
          L.ge("sigma-window-lower", "sigma >= d/(d+1)", s, D / (D + S(1)));
          L.lt("sigma-window-upper", "sigma < (d^2 + 4d)/(3d + 4)", s, split);
          L.ge("nu-lower", "nu >= 1 + 4 sigma (d+2)/(d (d + sigma))", nu, nu_lo);
          const S den = D * D - S(3) * D * s + S(4) * D - S(4) * s;
          L.decided("nu-upper", "nu <= 1 + 4 sigma (d+2)/(d^2 - 3 d sigma + 4d - 4 sigma)", "<=", nu,
                    den > S(0) ? S(1) + S(4) * s * (D + S(2)) / den : S(0),
                    den > S(0) && approx_le(nu, S(1) + S(4) * s * (D + S(2)) / den));
        }
        push(detail::finish(label, "strichartz-only", L, std::move(e)));
      }
      any_entry = true;
      break;
    }
    case TheoremId::HSigmaCritNlfw: {
      ConditionLedger<S> L;
      TheoremEntry e;
      const S lo = d <= 4 ? D / (D + S(2)) : D / S(6);
      L.ge("sigma-window-lower", d <= 4 ? "sigma >= d/(d+2)" : "sigma >= d/6", s, lo);
      L.lt("sigma-window-upper", "sigma < d/2", s, D / S(2));
      L.ne("sigma-not-1", "sigma != 1", s, S(1));
      if (D - S(2) * s > S(0)) {
        L.eq("nu-sigma-critical", "nu = 1 + 4 sigma/(d - 2 sigma)", nu, sigma_critical_wave_power(d, s));
        const ExponentPair<S> pair{Exponent<S>::finite(nu), Exponent<S>::finite(S(2) * nu)};
        rep.pairs.push_back(detail::make_pair_record("sigma-critical-wave-pair", d, s, pair));
      }
      push(detail::finish(label, "", L, std::move(e)));
      break;
    }
    case TheoremId::WaveAdmissibilitySystem: {
      ConditionLedger<S> L;
      TheoremEntry e;
      L.lt("sigma-below-2", "sigma < 2", s, S(2));
      L.ne("sigma-not-1", "sigma != 1", s, S(1));
      const auto sys = wave_admissibility_system(d, s);
      for (std::size_t i = 0; i < sys.size(); ++i)
        detail::evaluate_constraint(sys[i], nu, L, "system-" + std::to_string(i + 1));
      const auto iv = solve_linear_system(sys);
      rep.nu_bounds = detail::to_record(iv, sys);
      push(detail::finish(label, "", L, std::move(e)));
      break;
    }
  }

  if (any_entry) {
    rep.pass = std::any_of(rep.entries.begin(), rep.entries.end(), [](const auto& e) { return e.pass; });
  } else {
    rep.pass = std::all_of(rep.entries.begin(), rep.entries.end(), [](const auto& e) { return e.pass; });
  }
  return rep;
}

/// Solved nu-window of the energy-space wave system for (d, sigma).
template <class S>
NuInterval<S> wave_admissibility_bounds(int d, const S& sigma) {
  return solve_linear_system(wave_admissibility_system(d, sigma));
}

std::string report_to_json(const ExponentReport& report, int indent = 2);
std::string report_to_table(const ExponentReport& report);

}  // namespace fraclab
