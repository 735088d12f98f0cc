#include <doctest.h>

#include <cmath>
#include <random>

#include "fraclab/conserved.hpp"
#include "fraclab/errors.hpp"
#include "fraclab/evolution.hpp"
#include "fraclab/lp_norms.hpp"
#include "support.hpp"

using namespace fraclab;
using testing::band_limited;
using testing::kPi;
using testing::l2;
using testing::plane_wave;
using testing::rel_diff;

namespace {

EquationParams<double> eq(int d, double sigma, double nu, int mu, EquationKind kind = EquationKind::NLFS) {
  EquationParams<double> p;
  p.d = d;
  p.sigma = sigma;
  p.nu = nu;
  p.mu = mu;
  p.kind = kind;
  return p;
}

RunConfig cubic(double dt, double t_final, int n = 256) {
  RunConfig cfg;
  cfg.params = eq(1, 2.0, 3.0, 1);
  cfg.grid = {1, n, 40.0};
  cfg.initial = profile::Gaussian{0.5, 2.0};
  cfg.dt = dt;
  cfg.t_final = t_final;
  cfg.snapshot_stride = static_cast<int>(std::lround(t_final / dt));
  return cfg;
}

RunConfig wave(double dt, double t_final) {
  RunConfig cfg;
  cfg.params = eq(1, 0.5, 3.0, 1, EquationKind::NLFW);
  cfg.grid = {1, 256, 40.0};
  cfg.initial = profile::Gaussian{1.0, 1.0};
  cfg.method = Method::WaveTrig;
  cfg.dt = dt;
  cfg.t_final = t_final;
  cfg.snapshot_stride = static_cast<int>(std::lround(t_final / dt));
  return cfg;
}

// Classical RK4 for v'' = -v^3.
double rk4_cubic_oscillator(double v0, double t, int steps) {
  const double h = t / steps;
  double x = v0, y = 0.0;
  auto f = [](double a) { return -a * a * a; };
  for (int i = 0; i < steps; ++i) {
    const double k1x = y, k1y = f(x);
    const double k2x = y + 0.5 * h * k1y, k2y = f(x + 0.5 * h * k1x);
    const double k3x = y + 0.5 * h * k2y, k3y = f(x + 0.5 * h * k2x);
    const double k4x = y + h * k3y, k4y = f(x + h * k3x);
    x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
  }
  return x;
}

const Field& final_field(const Trajectory& t) { return t.snapshots.back().u; }

}  // namespace

TEST_CASE("config validation") {
  RunConfig cfg = cubic(1e-3, 1.0);
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.steps() == 1000);
  RunConfig bad = cfg;
  bad.dt = 0.0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = cfg;
  bad.t_final = 1e-4;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = cfg;
  bad.t_final = 1.00037;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = cfg;
  bad.picard.tolerance = 0.0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = cfg;
  bad.method = Method::WaveTrig;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  CHECK(parse_method(method_name(Method::PicardDuhamel)) == Method::PicardDuhamel);
}

TEST_CASE("nonlinear phase step") {
  std::mt19937_64 rng(21);
  const PeriodicGrid g = make_grid(1, 64, 10.0);
  const Field raw = band_limited(g, rng, 20);
  const Field u = (1.0 / raw.values().abs().maxCoeff()) * raw;
  for (double nu : {3.0, 2.5, 5.0}) {
    const EquationParams<double> p = eq(1, 2.0, nu, 1);
    const Field v = nonlinear_phase_step(u, 0.3, p);
    CHECK((v.values().abs() - u.values().abs()).abs().maxCoeff() < 1e-15);
    const Field two = nonlinear_phase_step(nonlinear_phase_step(u, 0.1, p), 0.25, p);
    CHECK(rel_diff(two, nonlinear_phase_step(u, 0.35, p)) < 1e-14);
  }
  const Complex c(0.6, -0.8);
  const Field out = nonlinear_phase_step(Field::constant(g, c), 0.2, eq(1, 2.0, 3.0, -1));
  CHECK((out.values() - c * std::polar(1.0, -0.2)).abs().maxCoeff() < 1e-15);
}

TEST_CASE("linear mode reproduces the propagators") {
  RunConfig cfg = cubic(1e-2, 1.0);
  cfg.linear_mode = true;
  const Trajectory t = integrate(cfg).trajectory;
  const Field phi = make_initial(make_grid(1, 256, 40.0), cfg.initial);
  CHECK(rel_diff(final_field(t), schrodinger_propagate(phi, 1.0, 2.0)) < 1e-12);

  cfg.method = Method::PicardDuhamel;
  cfg.t_final = 0.2;
  cfg.snapshot_stride = 20;
  const PicardResult pr = integrate(cfg);
  CHECK(rel_diff(final_field(pr.trajectory), schrodinger_propagate(phi, 0.2, 2.0)) < 1e-12);

  RunConfig w = wave(1e-2, 1.0);
  w.linear_mode = true;
  const Trajectory tw = integrate(w).trajectory;
  const Field v0 = make_initial(make_grid(1, 256, 40.0), w.initial);
  const WaveState ref = wave_propagate(WaveState(v0, Field::zeros(v0.grid())), 1.0, 0.5);
  CHECK(rel_diff(final_field(tw), ref.position()) < 1e-12);
  CHECK(rel_diff(*tw.snapshots.back().velocity, ref.velocity()) < 1e-12);

  w.method = Method::PicardDuhamel;
  w.t_final = 0.2;
  w.snapshot_stride = 20;
  const PicardResult pw = integrate(w);
  CHECK(pw.report.iterations <= 2);
  CHECK(rel_diff(final_field(pw.trajectory), wave_propagate(WaveState(v0, Field::zeros(v0.grid())), 0.2, 0.5).position()) <
        1e-12);
}

TEST_CASE("trajectory layout") {
  RunConfig cfg = cubic(1e-2, 1.0);
  cfg.snapshot_stride = 10;
  const Trajectory t = integrate(cfg).trajectory;
  CHECK(t.status == RunStatus::Completed);
  REQUIRE(t.snapshots.size() == 11);
  CHECK(t.snapshots.front().t == 0.0);
  CHECK(rel_diff(t.snapshots.front().u, make_initial(make_grid(1, 256, 40.0), cfg.initial)) == 0.0);
  for (std::size_t i = 1; i < t.snapshots.size(); ++i) CHECK(t.snapshots[i].t > t.snapshots[i - 1].t);
  CHECK(t.snapshots.back().t == doctest::Approx(1.0));
  CHECK(t.records.size() == 101);
}

TEST_CASE("plane waves are exact solutions") {
  const PeriodicGrid g = make_grid(1, 32, 2.0 * kPi);
  const int k[1] = {3};
  const Complex a(0.7, 0.2);
  for (int mu : {1, -1}) {
    RunConfig cfg;
    cfg.params = eq(1, 1.5, 3.0, mu);
    cfg.grid = {1, 32, 2.0 * kPi};
    cfg.initial = profile::PlaneWave{a, {3, 0, 0}};
    cfg.t_final = 1.0;
    const double omega = std::pow(3.0, 1.5) - mu * std::norm(a);
    const Field exact = std::polar(1.0, -omega) * (a * plane_wave(g, k));
    for (double dt : {0.02, 0.01}) {
      cfg.dt = dt;
      cfg.snapshot_stride = static_cast<int>(std::lround(1.0 / dt));
      CHECK(rel_diff(final_field(integrate(cfg).trajectory), exact) < 1e-12);
    }
  }
}

TEST_CASE("mass conservation and energy order") {
  const Trajectory t = integrate(cubic(1e-3, 1.0)).trajectory;
  const EquationParams<double> p = eq(1, 2.0, 3.0, 1);
  const double m0 = mass(t.snapshots.front().u);
  CHECK(std::abs(mass(final_field(t)) - m0) / m0 < 1e-10);

  double drift[3];
  int i = 0;
  for (double dt : {0.04, 0.02, 0.01}) {
    const Trajectory r = integrate(cubic(dt, 1.0)).trajectory;
    const double e0 = conserved_set(r.snapshots.front().u, p).energy;
    drift[i++] = std::abs(conserved_set(final_field(r), p).energy - e0) / std::abs(e0);
  }
  for (int j = 0; j < 2; ++j) {
    const double ratio = drift[j] / drift[j + 1];
    CHECK(ratio >= 3.0);
    CHECK(ratio <= 5.0);
  }
}

TEST_CASE("energy of a Gaussian against quadrature") {
  // u = A exp(-x^2 / w^2), sigma = 2: E = 1/2 int |u'|^2 - mu/4 int |u|^4 with mu = -1.
  const double A = 0.5, w = 2.0, L = 40.0;
  const EquationParams<double> p = eq(1, 2.0, 3.0, -1);
  const PeriodicGrid g = make_grid(1, 512, L);
  const Field u = make_initial(g, profile::Gaussian{A, w});
  const ConservedSet cs = conserved_set(u, p);

  const int m = 200000;
  const double h = L / m;
  double kin = 0.0, quartic = 0.0, l2sq = 0.0;
  for (int j = 0; j < m; ++j) {
    const double x = -L / 2 + j * h;
    const double f = A * std::exp(-x * x / (w * w));
    const double df = -2.0 * x / (w * w) * f;
    kin += df * df * h;
    quartic += f * f * f * f * h;
    l2sq += f * f * h;
  }
  CHECK(std::abs(cs.kinetic - 0.5 * kin) < 1e-8);
  CHECK(std::abs(cs.potential - 0.25 * quartic) < 1e-8);
  CHECK(std::abs(cs.energy - (0.5 * kin + 0.25 * quartic)) < 1e-8);
  CHECK(std::abs(cs.mass - l2sq) < 1e-8);
}

TEST_CASE("time reversal") {
  std::mt19937_64 rng(22);
  const PeriodicGrid g = make_grid(1, 128, 20.0);
  const Field u = 0.5 * band_limited(g, rng, 20);
  const EquationParams<double> p = eq(1, 1.5, 3.0, 1);
  Field f = u;
  for (int i = 0; i < 20; ++i) f = strang_step(f, 0.01, p);
  for (int i = 0; i < 20; ++i) f = strang_step(f, -0.01, p);
  CHECK(rel_diff(f, u) < 1e-11);

  const EquationParams<double> pw = eq(1, 0.5, 3.0, 1, EquationKind::NLFW);
  WaveState s(u, 0.3 * band_limited(g, rng, 20));
  const WaveState s0 = s;
  for (int i = 0; i < 20; ++i) s = wave_trig_step(s, 0.01, pw);
  for (int i = 0; i < 20; ++i) s = wave_trig_step(s, -0.01, pw);
  CHECK(rel_diff(s.position(), s0.position()) < 1e-11);
  CHECK(rel_diff(s.velocity(), s0.velocity()) < 1e-11);
}

TEST_CASE("grid refinement") {
  const Field coarse = final_field(integrate(cubic(1e-2, 1.0, 256)).trajectory);
  const Field fine = final_field(integrate(cubic(1e-2, 1.0, 512)).trajectory);
  double diff = 0.0, ref = 0.0;
  for (Eigen::Index i = 0; i < coarse.size(); ++i) {
    diff = std::max(diff, std::abs(coarse.values()(i) - fine.values()(2 * i)));
    ref = std::max(ref, std::abs(fine.values()(2 * i)));
  }
  CHECK(diff / ref < 1e-6);
}

TEST_CASE("constant wave data follows the cubic oscillator") {
  RunConfig cfg = wave(1e-3, 2.0);
  cfg.grid = {1, 16, 10.0};
  const double v0 = 1.2;
  cfg.initial = profile::PlaneWave{Complex(v0, 0.0), {0, 0, 0}};
  cfg.snapshot_stride = 100;
  const Trajectory t = integrate(cfg).trajectory;
  for (const Snapshot& s : t.snapshots) {
    const double ref = rk4_cubic_oscillator(v0, s.t, 4000);
    CHECK((s.u.values() - ref).abs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("wave energy drift") {
  RunConfig cfg = wave(5e-4, 1.0);
  const Trajectory t = integrate(cfg).trajectory;
  const EquationParams<double> p = cfg.params;
  const double e0 = conserved_set(WaveState(t.snapshots.front().u, *t.snapshots.front().velocity), p).energy;
  const double e1 = conserved_set(WaveState(t.snapshots.back().u, *t.snapshots.back().velocity), p).energy;
  CHECK(std::abs(e1 - e0) / std::abs(e0) < 1e-6);
}

TEST_CASE("Picard iteration") {
  SUBCASE("zero data") {
    RunConfig cfg = cubic(1e-2, 0.2);
    cfg.method = Method::PicardDuhamel;
    cfg.initial = profile::Zero{};
    const PicardResult r = integrate(cfg);
    CHECK(final_field(r.trajectory).values().abs().maxCoeff() == 0.0);
    CHECK(r.report.iterations <= 1);

    RunConfig w = wave(1e-2, 0.2);
    w.method = Method::PicardDuhamel;
    w.initial = profile::Zero{};
    CHECK(final_field(integrate(w).trajectory).values().abs().maxCoeff() == 0.0);
  }
  SUBCASE("agrees with split-step") {
    RunConfig cfg = cubic(1e-3, 0.2);
    const Field strang = final_field(integrate(cfg).trajectory);
    cfg.method = Method::PicardDuhamel;
    const PicardResult r = integrate(cfg);
    CHECK(r.report.converged);
    const double diff = l2(final_field(r.trajectory) - strang) / l2(strang);
    CHECK(diff < 1e-4);
    REQUIRE(r.report.ratios.size() >= 2);
    CHECK(r.report.ratios.back() < 1.0);
    for (std::size_t i = 1; i < r.report.differences.size(); ++i)
      CHECK(r.report.differences[i] < r.report.differences[i - 1]);
  }
  SUBCASE("wave agrees with the trigonometric scheme") {
    RunConfig w = wave(1e-3, 0.2);
    w.initial = profile::Gaussian{0.3, 1.0};
    const Field trig = final_field(integrate(w).trajectory);
    w.method = Method::PicardDuhamel;
    const PicardResult r = integrate(w);
    CHECK(r.report.converged);
    CHECK(l2(final_field(r.trajectory) - trig) / l2(trig) < 1e-4);
  }
  SUBCASE("contraction factor scales like amplitude^(nu-1)") {
    auto factor = [](double amp) {
      RunConfig cfg = cubic(1e-3, 0.2);
      cfg.initial = profile::Gaussian{amp, 2.0};
      cfg.method = Method::PicardDuhamel;
      return integrate(cfg).report.contraction_factor;
    };
    const double ratio = factor(0.5) / factor(0.25);
    CHECK(ratio >= 2.0);
    CHECK(ratio <= 8.0);
  }
}

TEST_CASE("blowup monitors") {
  SUBCASE("ceiling") {
    RunConfig cfg;
    cfg.params = eq(1, 2.0, 7.0, -1);
    cfg.grid = {1, 256, 20.0};
    cfg.initial = profile::Gaussian{3.0, 0.7};
    cfg.dt = 1e-4;
    cfg.t_final = 1.0;
    cfg.snapshot_stride = 100;
    cfg.ceiling_factor = 3.0;
    const Trajectory t = integrate(cfg).trajectory;
    CHECK(t.status != RunStatus::Completed);
    CHECK(t.status_time < 1.0);
    CHECK_FALSE(t.snapshots.empty());
    CHECK(status_name(t.status).size() > 0);
  }
}
