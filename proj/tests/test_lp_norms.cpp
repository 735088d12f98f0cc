#include <doctest.h>

#include <cmath>
#include <random>

#include "fraclab/errors.hpp"
#include "fraclab/evolution.hpp"
#include "fraclab/lp_norms.hpp"
#include "support.hpp"

using namespace fraclab;
using testing::band_limited;
using testing::kPi;
using testing::plane_wave;
using testing::rel_diff;

namespace {

Field band_sum(const Field& u, bool homogeneous) {
  const PeriodicGrid& g = u.grid();
  Eigen::ArrayXcd acc = Eigen::ArrayXcd::Zero(g.size());
  BandRange r = homogeneous ? homogeneous_range(g) : inhomogeneous_range(g);
  if (!homogeneous) acc += lp_project(u, DyadicBand::low_block()).field.values();
  for (int k = r.k_min; k <= r.k_max; ++k) acc += lp_project(u, DyadicBand::dyadic(k)).field.values();
  return Field(g, acc);
}

}  // namespace

TEST_CASE("partition of unity on the lattice") {
  for (int d = 1; d <= 3; ++d) {
    const PeriodicGrid g = make_grid(d, d == 3 ? 16 : 64, 9.0);
    for (CutoffKind kind : {CutoffKind::Standard, CutoffKind::Alternate}) {
      const Eigen::ArrayXd inh = partition_sum(g, false, kind);
      CHECK((inh - 1.0).abs().maxCoeff() < 1e-12);
      Eigen::ArrayXd hom = partition_sum(g, true, kind);
      hom(0) = 1.0;
      CHECK((hom - 1.0).abs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("band overlap") {
  // Any |xi| > 1 meets at most two band supports.
  for (double r = 1.01; r < 1000.0; r *= 1.13) {
    int hits = 0;
    for (int k = -5; k <= 12; ++k)
      if (cutoff_band(r / std::ldexp(1.0, k)) > 0.0) ++hits;
    CHECK(hits <= 2);
    CHECK(hits >= 1);
  }
}

TEST_CASE("projection support") {
  const PeriodicGrid g = make_grid(1, 64, 2.0 * kPi);
  const int k[1] = {8};
  const Field e = plane_wave(g, k);
  const Projection p = lp_project(e, DyadicBand::dyadic(3));
  CHECK(rel_diff(p.field, e) < 1e-14);
  CHECK(lp_project(e, DyadicBand::dyadic(5)).field.values().abs().maxCoeff() < 1e-14);
  CHECK(lp_project(e, DyadicBand::dyadic(1)).field.values().abs().maxCoeff() < 1e-14);
  const Projection high = lp_project(e, DyadicBand::dyadic(12));
  CHECK(high.empty);
  CHECK(high.field.values().abs().maxCoeff() == 0.0);

  std::mt19937_64 rng(11);
  const Field u = band_limited(g, rng, 33);
  for (int b = 1; b <= 6; ++b) {
    const DyadicBand band = DyadicBand::dyadic(b);
    const Eigen::ArrayXcd c = forward_transform(lp_project(u, band).field);
    for (Eigen::Index i = 0; i < g.size(); ++i) {
      const double r = g.wavenumber_magnitude()(i);
      if (r < band.support_lo() || r > band.support_hi()) CHECK(std::abs(c(i)) < 1e-14);
    }
  }
  for (int b = 0; b <= 6; ++b)
    CHECK(lp_project(Field::zeros(g), DyadicBand::dyadic(b)).field.values().abs().maxCoeff() == 0.0);
}

TEST_CASE("resummation of the projections") {
  std::mt19937_64 rng(12);
  for (int d = 1; d <= 3; ++d) {
    const PeriodicGrid g = make_grid(d, d == 3 ? 16 : 64, 11.0);
    for (int trial = 0; trial < 5; ++trial) {
      const Field u = band_limited(g, rng, g.points_per_axis() / 2 + 1);
      CHECK(rel_diff(band_sum(u, false), u) < 1e-10);
      const Field m = band_limited(g, rng, g.points_per_axis() / 2 + 1, true);
      CHECK(rel_diff(band_sum(m, true), m) < 1e-10);
    }
  }
}

TEST_CASE("almost orthogonality") {
  std::mt19937_64 rng(13);
  const PeriodicGrid g = make_grid(2, 32, 6.0);
  for (int trial = 0; trial < 20; ++trial) {
    const OrthogonalityCheck c = almost_orthogonality(band_limited(g, rng, 17, true));
    CHECK_FALSE(c.under_resolved);
    CHECK(c.leakage < 1e-8);
    CHECK(c.ratio >= 0.5);
    CHECK(c.ratio <= 1.0 + 1e-12);
  }
}

TEST_CASE("Lebesgue norms") {
  const PeriodicGrid g2 = make_grid(2, 16, 3.0);
  CHECK(lebesgue_norm(Field::constant(g2, Complex(0.0, -2.0)), 2.0) == doctest::Approx(2.0 * 3.0).epsilon(1e-14));
  const int k[2] = {1, 5};
  const Field e = plane_wave(g2, k);
  for (double q : {1.0, 1.5, 2.0, 4.0, 7.0})
    CHECK(lebesgue_norm(e, q) == doctest::Approx(std::pow(9.0, 1.0 / q)).epsilon(1e-13));
  CHECK(lebesgue_norm(e, kInf) == doctest::Approx(1.0).epsilon(1e-14));

  // ||e^{-x^2}||_2 = (pi/2)^{1/4} once the box is wide enough.
  const PeriodicGrid g = make_grid(1, 512, 40.0);
  const Field gauss = Field::sample(g, [](const double* x) { return Complex(std::exp(-(x[0] - 20.0) * (x[0] - 20.0)), 0.0); });
  CHECK(std::abs(lebesgue_norm(gauss, 2.0) - std::pow(kPi / 2.0, 0.25)) < 1e-8);
}

TEST_CASE("Sobolev norms") {
  std::mt19937_64 rng(14);
  const PeriodicGrid g = make_grid(1, 64, 2.0 * kPi);
  const Field u = band_limited(g, rng, 20);
  for (double q : {1.0, 2.0, 4.0, kInf}) CHECK(sobolev_norm(u, 0.0, q, false) == lebesgue_norm(u, q));

  const int k[1] = {6};
  const Field e = plane_wave(g, k);
  for (double gamma : {-0.5, 0.5, 1.0, 2.5})
    CHECK(sobolev_norm(e, gamma, 2.0, true) == doctest::Approx(std::pow(6.0, gamma) * std::sqrt(2.0 * kPi)).epsilon(1e-12));

  CHECK_THROWS_AS(sobolev_norm(Field::constant(g, 1.0), -0.5, 2.0, true), ZeroModeError);
  CHECK(sobolev_norm(Field::constant(g, 1.0), -0.5, 2.0, true, ZeroModePolicy::ProjectOutMean) < 1e-14);
}

TEST_CASE("interpolation inequality") {
  std::mt19937_64 rng(15);
  std::uniform_real_distribution<double> ug(0.3, 3.0), ue(0.0, 1.0);
  const PeriodicGrid g = make_grid(1, 128, 10.0);
  for (int trial = 0; trial < 100; ++trial) {
    const Field u = band_limited(g, rng, 1 + trial % 60);
    const double gamma = ug(rng), eps = ue(rng) * gamma;
    const double lhs = sobolev_norm(u, gamma - eps, 2.0, false);
    const double rhs = std::pow(sobolev_norm(u, gamma, 2.0, false), 1.0 - eps / gamma) *
                       std::pow(lebesgue_norm(u, 2.0), eps / gamma);
    CHECK(lhs <= rhs * (1.0 + 1e-12));
  }
}

TEST_CASE("Besov norms") {
  std::mt19937_64 rng(16);
  const PeriodicGrid g = make_grid(1, 256, 2.0 * kPi);
  for (int trial = 0; trial < 20; ++trial) {
    const Field u = band_limited(g, rng, 100, true);
    const double ratio = besov_norm(u, 0.0, 2.0, true) / lebesgue_norm(u, 2.0);
    CHECK(ratio >= 1.0 / std::sqrt(2.0) - 1e-12);
    CHECK(ratio <= 1.0 + 1e-12);
  }
  // |xi| = N exactly: only the band N sees the wave.
  const int k[1] = {16};
  const Field e = plane_wave(g, k);
  for (double gamma : {0.0, 0.5, 1.5})
    CHECK(besov_norm(e, gamma, 2.0, true) == doctest::Approx(std::pow(16.0, gamma) * std::sqrt(2.0 * kPi)).epsilon(1e-10));
  CHECK(besov_norm(Field::zeros(g), 1.0, 2.0, false) == 0.0);
  CHECK(besov_norm(Field::zeros(g), 1.0, 2.0, true) == 0.0);
  CHECK_THROWS_AS(besov_norm(Field::constant(g, 1.0), 0.0, 2.0, true), ZeroModeError);
  // Positive order annihilates the mean, so no policy is needed.
  CHECK(besov_norm(Field::constant(g, 1.0), 1.0, 2.0, true) == 0.0);
}

TEST_CASE("Besov against Sobolev for q = 2") {
  std::mt19937_64 rng(17);
  const PeriodicGrid g = make_grid(1, 256, 2.0 * kPi);
  std::uniform_int_distribution<int> start(2, 20);
  for (int trial = 0; trial < 50; ++trial) {
    // Modes in [m, 4m): at most three dyadic bands.
    const int m = start(rng);
    std::normal_distribution<double> z;
    Eigen::ArrayXcd c = Eigen::ArrayXcd::Zero(g.size());
    for (Eigen::Index i = 0; i < g.size(); ++i) {
      const int kk = std::abs(g.mode(0)(i));
      if (kk >= m && kk < 4 * m) c(i) = {z(rng), z(rng)};
    }
    const Field u = inverse_transform(g, c);
    for (double gamma : {-1.0, 0.0, 0.7, 2.0}) {
      const double ratio = besov_norm(u, gamma, 2.0, true) / sobolev_norm(u, gamma, 2.0, true);
      CHECK(ratio >= 1.0 / std::sqrt(2.0));
      CHECK(ratio <= std::sqrt(2.0));
    }
  }
}

TEST_CASE("norm equivalences") {
  std::mt19937_64 rng(18);
  const PeriodicGrid g = make_grid(2, 32, 8.0);
  for (int trial = 0; trial < 30; ++trial) {
    const Field u = band_limited(g, rng, 3 + trial % 14);
    for (double gamma : {0.5, 1.0, 2.0}) {
      const double lhs = sobolev_norm(u, gamma, 2.0, false);
      const double rhs = lebesgue_norm(u, 2.0) + sobolev_norm(u, gamma, 2.0, true, ZeroModePolicy::ProjectOutMean);
      CHECK(lhs / rhs >= 1.0 / 3.0);
      CHECK(lhs / rhs <= 3.0);
      // The two cutoff families give comparable Besov norms.
      const double b1 = besov_norm(u, gamma, 2.0, false), b2 = besov_norm(u, gamma, 2.0, false, ZeroModePolicy::Strict,
                                                                          CutoffKind::Alternate);
      CHECK(b1 / b2 >= 0.5);
      CHECK(b1 / b2 <= 2.0);
    }
  }
}

TEST_CASE("Besov monotone in gamma for high frequencies") {
  std::mt19937_64 rng(19);
  const PeriodicGrid g = make_grid(1, 128, 2.0 * kPi);
  std::normal_distribution<double> z;
  Eigen::ArrayXcd c = Eigen::ArrayXcd::Zero(g.size());
  for (Eigen::Index i = 0; i < g.size(); ++i)
    if (std::abs(g.mode(0)(i)) >= 3 && std::abs(g.mode(0)(i)) < 60) c(i) = {z(rng), z(rng)};
  const Field u = inverse_transform(g, c);
  for (bool hom : {false, true}) {
    double prev = 0.0;
    for (double gamma = -1.0; gamma <= 3.0; gamma += 0.25) {
      const double b = besov_norm(u, gamma, 3.0, hom);
      CHECK(b >= prev);
      prev = b;
    }
  }
}

TEST_CASE("time norms") {
  const std::vector<double> t{0.0, 0.5, 1.0, 2.0};
  const std::vector<double> v(4, 3.0);
  CHECK(time_norm(t, v, 1.0) == doctest::Approx(6.0));
  CHECK(time_norm(t, v, 2.0) == doctest::Approx(3.0 * std::sqrt(2.0)));
  CHECK(time_norm(t, v, kInf) == 3.0);

  const PeriodicGrid g = make_grid(1, 64, 10.0);
  std::mt19937_64 rng(20);
  const Field phi = band_limited(g, rng, 20);
  Trajectory traj;
  for (int j = 0; j <= 20; ++j) traj.snapshots.push_back({0.1 * j, schrodinger_propagate(phi, 0.1 * j, 1.5), std::nullopt});
  const NormSpec l2{};
  CHECK(spacetime_norm(traj, kInf, l2) == doctest::Approx(lebesgue_norm(phi, 2.0)).epsilon(1e-12));
  CHECK(spacetime_norm(traj, 4.0, l2) == doctest::Approx(std::pow(2.0, 0.25) * lebesgue_norm(phi, 2.0)).epsilon(1e-12));

  CHECK_THROWS(spacetime_norm(Trajectory{}, 2.0, l2));
}

TEST_CASE("space-time norm of a cubic run under time refinement") {
  auto run = [](double dt) {
    RunConfig cfg;
    cfg.params.d = 1;
    cfg.params.sigma = 2.0;
    cfg.params.nu = 3.0;
    cfg.params.mu = 1;
    cfg.grid = {1, 256, 40.0};
    cfg.initial = profile::Gaussian{1.0, 2.0};
    cfg.dt = dt;
    cfg.t_final = 1.0;
    cfg.snapshot_stride = static_cast<int>(std::lround(0.05 / dt));
    return integrate(cfg).trajectory;
  };
  NormSpec sup;
  sup.q = kInf;
  const double coarse = spacetime_norm(run(1e-2), 2.0, sup);
  const double fine = spacetime_norm(run(2.5e-3), 2.0, sup);
  CHECK(std::abs(coarse - fine) / fine < 0.01);
}

TEST_CASE("norm spec parsing") {
  CHECK(parse_space("besov-hom") == SpaceKind::BesovHom);
  CHECK(space_name(SpaceKind::SobolevInhom) == "sobolev");
  CHECK(parse_exponent("inf") == kInf);
  CHECK(parse_exponent("2.5") == 2.5);
  CHECK_THROWS(parse_space("hardy"));
  CHECK_THROWS(parse_exponent("2x"));
  CHECK_THROWS_AS(lebesgue_norm(Field::zeros(make_grid(1, 8, 1.0)), 0.5), DomainError);
}
