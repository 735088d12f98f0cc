#include <doctest.h>

#include <random>

#include "fraclab/exponents.hpp"

using namespace fraclab;
using Q = Rational;

namespace {

EquationParams<Q> nls(int d, Q sigma, Q nu, int mu = 1) {
  EquationParams<Q> p;
  p.d = d;
  p.sigma = sigma;
  p.nu = nu;
  p.mu = mu;
  return p;
}

EquationParams<Q> nlfw(int d, Q sigma, Q nu, int mu = 1) {
  EquationParams<Q> p = nls(d, sigma, nu, mu);
  p.kind = EquationKind::NLFW;
  return p;
}

ExponentPair<Q> pair(Q p, Q q) { return ExponentPair<Q>::from_values(p, q); }
ExponentPair<Q> pair_inf_q(Q p) { return {Exponent<Q>::finite(p), Exponent<Q>::infinity()}; }

const ConditionResult* condition(const ExponentReport& r, const std::string& id) {
  for (const auto& e : r.entries)
    for (const auto& c : e.conditions)
      if (c.id == id) return &c;
  return nullptr;
}

Q random_rational(std::mt19937_64& rng, int num_max, int den_max) {
  std::uniform_int_distribution<int> num(0, num_max), den(1, den_max);
  return Q(num(rng), den(rng));
}

}  // namespace

TEST_CASE("rational literals") {
  CHECK(Q::parse("3/2") == Q(3, 2));
  CHECK(Q::parse("0.375") == Q(3, 8));
  CHECK(Q::parse("-2.5e-1") == Q(-1, 4));
  CHECK_THROWS_AS(Q::parse("abc"), std::invalid_argument);
  CHECK(Q(6, -4) == Q(-3, 2));
}

TEST_CASE("params invariants") {
  CHECK_THROWS_AS(nls(1, Q(1), Q(3)).validate(), DomainError);
  CHECK_THROWS_AS(nls(1, Q(2), Q(1)).validate(), DomainError);
  CHECK_THROWS_AS(nls(0, Q(2), Q(3)).validate(), DomainError);
  CHECK_THROWS_AS(nls(1, Q(-1), Q(3)).validate(), DomainError);
  CHECK_THROWS_AS(nls(1, Q(2), Q(3), 0).validate(), DomainError);
}

TEST_CASE("gamma_s examples") {
  CHECK(gamma_s(nls(3, Q(2), Q(3))) == Q(1, 2));
  CHECK(gamma_s(nls(1, Q(1, 2), Q(5))) == Q(3, 8));
  for (int d = 1; d <= 5; ++d) {
    const Q sigma(3, 2);
    CHECK(gamma_s(nls(d, sigma, Q(1) + Q(2) * sigma / Q(d))) == Q(0));
  }
}

TEST_CASE("gamma_w examples") {
  CHECK(gamma_w(nlfw(3, Q(2), Q(5))) == Q(1, 2));
  for (int d = 1; d <= 5; ++d) {
    const Q sigma(1, 3);
    CHECK(gamma_w(nlfw(d, sigma, Q(1) + Q(4) * sigma / Q(d))) == Q(0));
  }
  CHECK_THROWS_AS(sigma_critical_wave_power(4, Q(2)), DomainError);
  CHECK(sigma_critical_wave_power(3, Q(1, 2)) == Q(2));
}

TEST_CASE("gamma_pq examples") {
  CHECK(gamma_pq(2, Q(2), ExponentPair<Q>{Exponent<Q>::infinity(), Exponent<Q>::finite(Q(2))}) == Q(0));
  CHECK(gamma_pq(3, Q(2), pair(Q(2), Q(6))) == Q(0));
  CHECK(gamma_pq(1, Q(1, 2), pair_inf_q(Q(4))) == Q(3, 8));
}

TEST_CASE("admissibility examples") {
  CHECK(is_admissible(3, pair(Q(2), Q(6))));
  CHECK_FALSE(is_admissible(2, pair_inf_q(Q(2))));
  CHECK_FALSE(is_admissible(1, pair(Q(4), Q(4))));
  CHECK(is_admissible(1, pair_inf_q(Q(4))));
  CHECK_FALSE(is_admissible(3, pair(Q(3, 2), Q(6))));
}

TEST_CASE("infinite exponent is first class") {
  const auto inf = Exponent<Q>::infinity();
  CHECK(inf.is_infinite());
  CHECK(inf.inverse() == Q(0));
  CHECK(inf.str() == "inf");
  CHECK(inf.conjugate().value() == Q(1));
  CHECK_THROWS_AS(inf.value(), DomainError);
  CHECK_THROWS_AS(Exponent<Q>::finite(Q(0)), DomainError);
}

TEST_CASE("subcritical pair examples") {
  const auto pr = subcritical_pair_nls(nls(3, Q(2), Q(3)), Q(1));
  CHECK(pr.p.value() == Q(8));
  CHECK(pr.q.value() == Q(12, 5));
  CHECK(gamma_pq(3, Q(2), pr) == Q(0));
  CHECK(is_admissible(3, pr));
  CHECK_THROWS_AS(subcritical_pair_nls(nls(3, Q(2), Q(3)), Q(3, 2)), DomainError);
  CHECK_THROWS_AS(subcritical_pair_nls(nls(3, Q(2), Q(3)), Q(1, 4)), HypothesisError);
  CHECK_THROWS_AS(subcritical_pair_nls(nls(3, Q(3, 2), Q(3)), Q(1)), HypothesisError);
}

TEST_CASE("critical pair examples") {
  const auto pr = critical_pair_nls(nls(4, Q(2), Q(3)));
  CHECK(pr.p.value() == Q(4));
  CHECK(pr.q.value() == Q(16, 6));
  CHECK(gamma_pq(4, Q(2), pr) == Q(0));
  CHECK(is_admissible(4, pr));
  CHECK_THROWS_AS(critical_pair_nls(nls(1, Q(2), Q(2))), HypothesisError);
}

TEST_CASE("energy wave pair examples") {
  const auto pr = wave_pair_subcritical_formula(nlfw(3, Q(1, 2), Q(2)));
  CHECK(pr.p.value() == Q(2));
  CHECK(pr.q.value() == Q(4));
  CHECK(gamma_pq(3, Q(1, 2), pr) == Q(1, 2));

  const auto hi = wave_pair_subcritical(nlfw(5, Q(2), Q(8)));
  CHECK(hi.p.value() == Q(18));
  CHECK(hi.q.value() == Q(90, 7));
  CHECK(gamma_pq(5, Q(2), hi) == Q(2));
  CHECK(is_admissible(5, hi));

  CHECK_THROWS_AS(wave_pair_subcritical(nlfw(1, Q(1, 2), Q(3, 2))), DomainError);
}

TEST_CASE("critical wave exponents examples") {
  const auto c = wave_pair_critical(nlfw(3, Q(2), Q(9)));
  CHECK(c.p.value() == Q(10));
  CHECK(c.a.value() == Q(10));
  const auto pp = ExponentPair<Q>{c.p, c.p};
  const auto aa = ExponentPair<Q>{c.a, c.a};
  CHECK(gamma_pq(3, Q(2), pp) == gamma_w(nlfw(3, Q(2), Q(9))));
  CHECK(gamma_pq(3, Q(2), aa) == Q(1));

  const Q sigma(3, 2);
  const int d = 2;
  const auto m = wave_pair_critical(nlfw(d, sigma, Q(1) + Q(4) * sigma / (Q(d) - sigma)));
  CHECK(m.p.value() == m.a.value());
  CHECK(m.a.value() == Q(2) * (Q(d) + sigma) / (Q(d) - sigma));

  CHECK_THROWS_AS(wave_pair_critical(nlfw(1, Q(2, 5), Q(3))), HypothesisError);
}

TEST_CASE("audit examples") {
  const auto r = audit_theorem(nls(2, Q(3, 2), Q(3)), std::optional<Q>(Q(4, 5)), TheoremId::LwpSubcritNlsLowSigma);
  const auto* c = condition(r, "gamma-strichartz-lower");
  REQUIRE(c);
  CHECK(c->pass);
  CHECK(c->rhs_exact == "1/4");
  CHECK(r.pass);

  const auto f = audit_theorem(nls(1, Q(2), Q(2)), std::optional<Q>(), TheoremId::CritNlsHighSigma);
  const auto* g = condition(f, "gamma-s-nonnegative");
  REQUIRE(g);
  CHECK_FALSE(g->pass);
  CHECK(g->lhs_exact == "-3/2");
  CHECK(g->rhs_exact == "0");
  CHECK_FALSE(f.pass);

  const auto w = audit_theorem(nlfw(1, Q(3, 10), Q(3)), std::optional<Q>(), TheoremId::WaveAdmissibilitySystem);
  REQUIRE(w.nu_bounds);
  CHECK(w.nu_bounds->lower_exact == "5/2");
  CHECK(w.nu_bounds->lower_open);
  CHECK(w.nu_bounds->upper_exact == "17/5");
  CHECK_FALSE(w.nu_bounds->upper_open);

  CHECK_THROWS_AS(parse_theorem_id("no-such-theorem"), DomainError);
  CHECK_THROWS_AS(audit_theorem(nls(1, Q(2), Q(3)), std::optional<Q>(), TheoremId::LwpSubcritNlsHighSigma),
                  DomainError);
}

TEST_CASE("every condition records both sides") {
  for (TheoremId id : all_theorems()) {
    const auto r = audit_theorem(nls(3, Q(3, 2), Q(7, 2)), std::optional<Q>(Q(1, 2)), id);
    for (const auto& e : r.entries)
      for (const auto& c : e.conditions) {
        CHECK_FALSE(c.lhs_exact.empty());
        CHECK_FALSE(c.rhs_exact.empty());
        CHECK_FALSE(c.relation.empty());
      }
  }
}

TEST_CASE("ceil convention is positive") {
  CHECK(positive_ceil(Q(0)) == 1);
  CHECK(positive_ceil(Q(-3, 2)) == 1);
  CHECK(positive_ceil(Q(3, 2)) == 2);
  CHECK(positive_ceil(Q(2)) == 2);
}

TEST_CASE("property: subcritical pairs are admissible with zero gap, and meet the critical pair in the limit") {
  std::mt19937_64 rng(11);
  int checked = 0;
  while (checked < 1000) {
    const int d = 1 + static_cast<int>(rng() % 5);
    const Q sigma = Q(2) + random_rational(rng, 12, 6);
    const Q nu = Q(1) + Q(1, 4) + random_rational(rng, 16, 4);
    const auto prm = nls(d, sigma, nu);
    const Q gs = gamma_s(prm);
    const Q lo = gs > Q(0) ? gs : Q(0);
    const Q hi = Q(d) / Q(2);
    if (!(lo < hi)) continue;
    std::uniform_int_distribution<int> t(1, 15);
    const Q gamma = lo + (hi - lo) * Q(t(rng), 16);
    const auto pr = subcritical_pair_nls(prm, gamma);
    CHECK(is_admissible(d, pr));
    CHECK(gamma_pq(d, sigma, pr) == Q(0));
    if (gs >= Q(0)) {
      CHECK(subcritical_pair_formula(prm, gs).p.value() == critical_pair_nls(prm).p.value());
      CHECK(gamma_pq(d, sigma, critical_pair_nls(prm)) == Q(0));
    }
    ++checked;
  }
}

TEST_CASE("property: float mode agrees with exact mode within 1e-12") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 300; ++i) {
    const int d = 1 + static_cast<int>(rng() % 4);
    const Q sigma = Q(2) + random_rational(rng, 9, 7);
    const Q nu = Q(2) + random_rational(rng, 9, 7);
    const auto prm = nls(d, sigma, nu);
    if (gamma_s(prm) < Q(0)) continue;
    EquationParams<double> pd;
    pd.d = d;
    pd.sigma = sigma.to_double();
    pd.nu = nu.to_double();
    const auto pf = critical_pair_nls(pd);
    CHECK(std::abs(gamma_pq(d, pd.sigma, pf)) < 1e-12);
    CHECK(std::abs(pf.p.to_double() - critical_pair_nls(prm).p.to_double()) < 1e-12);
  }
}

TEST_CASE("property: wave pairs carry gap sigma, critical wave gap identity") {
  std::mt19937_64 rng(3);
  int sub = 0, crit = 0;
  for (int i = 0; i < 20000 && (sub < 300 || crit < 300); ++i) {
    const int d = 1 + static_cast<int>(rng() % 6);
    const Q sigma = random_rational(rng, 20, 8);
    const Q nu = Q(1) + random_rational(rng, 40, 8);
    if (sigma == Q(0) || sigma == Q(1) || nu == Q(1)) continue;
    const auto prm = nlfw(d, sigma, nu);
    try {
      const auto pr = wave_pair_subcritical(prm);
      CHECK(is_admissible(d, pr));
      CHECK(gamma_pq(d, sigma, pr) == sigma);
      ++sub;
    } catch (const HypothesisError&) {
    } catch (const DomainError&) {
    }
    try {
      const auto c = wave_pair_critical(prm);
      const ExponentPair<Q> pp{c.p, c.p}, aa{c.a, c.a}, ad{c.a.conjugate(), c.a.conjugate()};
      CHECK(is_admissible(d, pp));
      CHECK(is_admissible(d, aa));
      CHECK(gamma_pq(d, sigma, pp) == gamma_w(prm));
      CHECK(gamma_pq(d, sigma, aa) == sigma / Q(2));
      CHECK(gamma_pq(d, sigma, ad) + Q(2) * sigma == gamma_pq(d, sigma, aa));
      ++crit;
    } catch (const HypothesisError&) {
    } catch (const DomainError&) {
    }
  }
  CHECK(sub >= 300);
  CHECK(crit >= 300);
}

TEST_CASE("property: the Strichartz lower bound is monotone in gamma") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 200; ++i) {
    const int d = 1 + static_cast<int>(rng() % 4);
    const Q sigma = Q(1, 4) + random_rational(rng, 6, 4);
    if (sigma == Q(1) || !(sigma < Q(2))) continue;
    const Q nu = Q(2) + random_rational(rng, 12, 4);
    bool passed = false;
    for (int k = 0; k <= 20; ++k) {
      const Q gamma = Q(d) * Q(k, 40);
      const auto r = audit_theorem(nls(d, sigma, nu), std::optional<Q>(gamma), TheoremId::LwpSubcritNlsLowSigma);
      const bool now = condition(r, "gamma-strichartz-lower")->pass;
      if (passed) CHECK(now);
      passed = passed || now;
    }
  }
}

TEST_CASE("property: low sigma admissible pairs have positive gap except (inf, 2)") {
  for (int d = 1; d <= 4; ++d)
    for (const Q sigma : {Q(1, 3), Q(1, 2), Q(3, 2), Q(19, 10)}) {
      for (int a = 0; a <= 25; ++a)
        for (int b = 0; b <= 25; ++b) {
          const Q pinv = Q(a, 50), qinv = Q(b, 50);
          const ExponentPair<Q> pr{Exponent<Q>::from_inverse(pinv), Exponent<Q>::from_inverse(qinv)};
          if (!is_admissible(d, pr)) continue;
          if (pinv == Q(0) && qinv == Q(1, 2))
            CHECK(gamma_pq(d, sigma, pr) == Q(0));
          else
            CHECK(gamma_pq(d, sigma, pr) > Q(0));
        }
    }
}

TEST_CASE("reports serialize") {
  const auto r = audit_theorem(nls(2, Q(3, 2), Q(3)), std::optional<Q>(Q(4, 5)), TheoremId::LwpSubcritNlsLowSigma);
  const std::string j = report_to_json(r);
  CHECK(j.find("\"gamma-strichartz-lower\"") != std::string::npos);
  CHECK(report_to_table(r).find("lwp-subcrit-nls-low-sigma") != std::string::npos);
}
