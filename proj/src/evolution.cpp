#include "fraclab/evolution.hpp"

#include <cmath>
#include <numbers>

#include "fraclab/errors.hpp"
#include "fraclab/spectral.hpp"

namespace fraclab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr Complex kI{0.0, 1.0};

std::array<double, 3> center_or_mid(const PeriodicGrid& g, const std::optional<std::array<double, 3>>& c) {
  if (c) return *c;
  const double m = 0.5 * g.box_length();
  return {m, m, m};
}

// Distance to `c` along each axis, taken on the torus.
double torus_r2(const double* x, const std::array<double, 3>& c, int d, double L) {
  double r2 = 0.0;
  for (int a = 0; a < d; ++a) {
    double dx = x[a] - c[a];
    dx -= L * std::round(dx / L);
    r2 += dx * dx;
  }
  return r2;
}

Eigen::ArrayXd frequencies(const PeriodicGrid& g, double sigma) {
  const Eigen::ArrayXd& k = g.wavenumber_magnitude();
  Eigen::ArrayXd w(g.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) w[i] = k[i] == 0.0 ? 0.0 : std::pow(k[i], sigma);
  return w;
}

// F(u) = |u|^{nu-1} u
Eigen::ArrayXcd power_nonlinearity(const Eigen::ArrayXcd& u, double nu) {
  return abs_power(u, nu - 1.0).cast<Complex>() * u;
}

void half_phase(Eigen::ArrayXcd& u, double tau, const EquationParams<double>& p) {
  const Eigen::ArrayXd a = abs_power(u, p.nu - 1.0);
  for (Eigen::Index i = 0; i < u.size(); ++i) u[i] *= std::polar(1.0, p.mu * a[i] * tau);
}

// All per-step diagnostics from one coefficient array.
struct Monitor {
  const PeriodicGrid& g;
  const EquationParams<double>& p;
  Eigen::ArrayXd kinetic_w;  // |xi|^sigma (Schrodinger) or |xi|^{2 sigma} (wave)
  Eigen::ArrayXd hgamma_w;   // (1+|xi|^2)^gamma
  Eigen::ArrayXd high;       // complement of the two-thirds mask

  bool linear;  // nonlinearity off: the potential term drops out of the energy

  Monitor(const PeriodicGrid& grid, const EquationParams<double>& params, double gamma, bool wave, bool lin)
      : g(grid), p(params), linear(lin), kinetic_w(grid.size()), hgamma_w(grid.size()), high(1.0 - grid.dealias_mask()) {
    const Eigen::ArrayXd& k = grid.wavenumber_magnitude();
    const double s = wave ? 2.0 * params.sigma : params.sigma;
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
      kinetic_w[i] = k[i] == 0.0 ? 0.0 : std::pow(k[i], s);
      hgamma_w[i] = std::pow(1.0 + k[i] * k[i], gamma);
    }
  }

  double potential(const Eigen::ArrayXcd& u) const {
    if (linear) return 0.0;
    return p.mu / (p.nu + 1.0) * g.cell_volume() * abs_power(u, p.nu + 1.0).sum();
  }

  StepRecord schrodinger(long step, double t, const Eigen::ArrayXcd& u, const Eigen::ArrayXcd& c) const {
    StepRecord r;
    r.step = step;
    r.t = t;
    r.mass = g.cell_volume() * u.abs2().sum();
    const Eigen::ArrayXd c2 = c.abs2();
    r.energy = 0.5 * g.volume() * (kinetic_w * c2).sum() - potential(u);
    r.hgamma = std::sqrt(g.volume() * (hgamma_w * c2).sum());
    const double tot = c2.sum();
    r.high_band_fraction = tot > 0.0 ? (high * c2).sum() / tot : 0.0;
    return r;
  }

  StepRecord wave(long step, double t, const Eigen::ArrayXcd& a, const Eigen::ArrayXcd& ca,
                  const Eigen::ArrayXcd& b) const {
    StepRecord r;
    r.step = step;
    r.t = t;
    r.mass = g.cell_volume() * a.abs2().sum();
    const Eigen::ArrayXd c2 = ca.abs2();
    r.energy = 0.5 * g.cell_volume() * b.abs2().sum() + 0.5 * g.volume() * (kinetic_w * c2).sum() + potential(a);
    r.hgamma = std::sqrt(g.volume() * (hgamma_w * c2).sum());
    const double tot = c2.sum();
    r.high_band_fraction = tot > 0.0 ? (high * c2).sum() / tot : 0.0;
    return r;
  }
};

// Shared run bookkeeping: snapshots, alarms, ceiling and non-finite status.
struct Recorder {
  const RunConfig& cfg;
  Trajectory traj;
  double h0 = 0.0;
  bool focusing;
  bool check_alias;

  explicit Recorder(const RunConfig& c)
      : cfg(c), focusing(c.params.mu == -1 && !c.linear_mode), check_alias(!c.linear_mode && !c.dealias_active()) {}

  // Returns false when the run must stop.
  bool push(StepRecord r) {
    if (traj.records.empty()) h0 = r.hgamma;
    traj.max_high_band_fraction = std::max(traj.max_high_band_fraction, r.high_band_fraction);
    if (check_alias && r.high_band_fraction > cfg.high_band_alarm) traj.aliasing_alarm = true;
    const double t = r.t;
    const double hg = r.hgamma;
    traj.records.push_back(r);
    if (focusing && h0 > 0.0 && hg > cfg.ceiling_factor * h0) {
      traj.status = RunStatus::CeilingExceeded;
      traj.status_time = t;
      traj.message = "H^gamma norm passed " + std::to_string(cfg.ceiling_factor) + " times its initial value";
      return false;
    }
    return true;
  }

  void non_finite(double t) {
    traj.status = RunStatus::NonFinite;
    traj.status_time = t;
    traj.message = "non-finite samples appeared; blowup suspected";
  }

  bool want_snapshot(long step, long total) const { return step % cfg.snapshot_stride == 0 || step == total; }
};

Eigen::ArrayXcd linear_symbol(const PeriodicGrid& g, const Eigen::ArrayXd& w, double dt, bool dealias) {
  Eigen::ArrayXcd s(g.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) s[i] = std::polar(1.0, -dt * w[i]);
  if (dealias) s *= g.dealias_mask().cast<Complex>();
  return s;
}

// Linear wave step in coefficient space.
void wave_linear(Eigen::ArrayXcd& ca, Eigen::ArrayXcd& cb, const Eigen::ArrayXd& w, double dt,
                 const Eigen::ArrayXd* mask) {
  for (Eigen::Index i = 0; i < ca.size(); ++i) {
    const Complex a = ca[i], b = cb[i];
    if (w[i] == 0.0) {
      ca[i] = a + dt * b;
      cb[i] = b;
    } else {
      const double c = std::cos(dt * w[i]), s = std::sin(dt * w[i]);
      ca[i] = c * a + (s / w[i]) * b;
      cb[i] = -w[i] * s * a + c * b;
    }
    if (mask && (*mask)[i] == 0.0) ca[i] = cb[i] = 0.0;
  }
}

}  // namespace

// --- configuration ---------------------------------------------------------

std::string method_name(Method m) {
  switch (m) {
    case Method::SplitStepStrang: return "split-step";
    case Method::PicardDuhamel: return "picard";
    case Method::WaveTrig: return "wave-trig";
  }
  return "?";
}

Method parse_method(const std::string& s) {
  if (s == "split-step" || s == "strang") return Method::SplitStepStrang;
  if (s == "picard" || s == "picard-duhamel") return Method::PicardDuhamel;
  if (s == "wave-trig" || s == "trig") return Method::WaveTrig;
  throw DomainError("unknown method '" + s + "' (split-step, picard, wave-trig)");
}

void RunConfig::validate() const {
  params.validate();
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("dt must be positive");
  if (!(t_final >= dt)) throw DomainError("t_final must be at least dt");
  if (!(picard.tolerance > 0.0)) throw DomainError("picard tolerance must be positive");
  if (picard.max_iters < 1) throw DomainError("picard max_iters must be at least 1");
  if (picard.nodes_per_step < 1) throw DomainError("picard nodes_per_step must be at least 1");
  if (snapshot_stride < 1) throw DomainError("snapshot stride must be at least 1");
  if (!(ceiling_factor > 1.0)) throw DomainError("ceiling factor must exceed 1");
  if (grid.d != params.d) throw DomainError("grid dimension differs from equation dimension");
  if (method == Method::SplitStepStrang && params.kind != EquationKind::NLFS)
    throw DomainError("split-step integrates the Schrodinger equation; use wave-trig for the wave equation");
  if (method == Method::WaveTrig && params.kind != EquationKind::NLFW)
    throw DomainError("wave-trig integrates the wave equation");
  steps();
}

long RunConfig::steps() const {
  const double r = t_final / dt;
  const long s = std::lround(r);
  if (std::abs(r - static_cast<double>(s)) > 1e-9 * std::max(1.0, r))
    throw DomainError("t_final must be an integer multiple of dt");
  return s;
}

bool RunConfig::dealias_active() const {
  if (linear_mode) return false;
  return dealias.value_or(ScalarOps<double>::is_odd_integer(params.nu));
}

Field make_initial(const PeriodicGrid& g, const InitialProfile& prof) {
  const int d = g.dim();
  const double L = g.box_length();
  return std::visit(
      overloaded{
          [&](const profile::Gaussian& p) {
            if (!(p.width > 0.0)) throw DomainError("gaussian width must be positive");
            const auto c = center_or_mid(g, p.center);
            return Field::sample(g, [&](const double* x) {
              double phase = 0.0;
              for (int a = 0; a < d; ++a) phase += p.velocity[a] * x[a];
              return p.amplitude * std::exp(-torus_r2(x, c, d, L) / (p.width * p.width)) * std::polar(1.0, phase);
            });
          },
          [&](const profile::PlaneWave& p) {
            std::array<double, 3> xi{};
            for (int a = 0; a < d; ++a) xi[a] = 2.0 * std::numbers::pi * p.mode[a] / L;
            return Field::sample(g, [&](const double* x) {
              double phase = 0.0;
              for (int a = 0; a < d; ++a) phase += xi[a] * x[a];
              return p.amplitude * std::polar(1.0, phase);
            });
          },
          [&](const profile::Bump& p) {
            if (!(p.width > 0.0)) throw DomainError("bump width must be positive");
            const auto c = center_or_mid(g, p.center);
            return Field::sample(g, [&](const double* x) {
              return Complex(p.amplitude / std::cosh(std::sqrt(torus_r2(x, c, d, L)) / p.width));
            });
          },
          [&](const profile::File& p) {
            const SnapshotData s = read_snapshot(p.path);
            if (s.grid != g) throw DomainError("initial-data snapshot grid differs from the run grid");
            if (p.component < 0 || p.component >= static_cast<int>(s.components.size()))
              throw DomainError("snapshot has no component " + std::to_string(p.component));
            return Field(g, s.components[p.component]);
          },
          [&](const profile::Zero&) { return Field::zeros(g); },
          [&](const profile::Samples& p) { return Field(g, p.values); },
      },
      prof);
}

// --- steppers --------------------------------------------------------------

Field nonlinear_phase_step(const Field& u, double dt, const EquationParams<double>& params) {
  if (!(params.nu > 1.0)) throw DomainError("nu must exceed 1");
  Eigen::ArrayXcd v = u.values();
  half_phase(v, dt, params);
  return u.with_values(std::move(v));
}

Field strang_step(const Field& u, double dt, const EquationParams<double>& p, bool dealias, bool linear) {
  const PeriodicGrid& g = u.grid();
  Eigen::ArrayXcd v = u.values();
  if (!linear) half_phase(v, 0.5 * dt, p);
  Eigen::ArrayXcd c = forward_transform(g, v) * linear_symbol(g, frequencies(g, p.sigma), dt, dealias && !linear);
  v = inverse_transform_raw(g, c);
  if (!linear) half_phase(v, 0.5 * dt, p);
  return u.with_values(std::move(v));
}

WaveState wave_trig_step(const WaveState& s, double dt, const EquationParams<double>& p, bool dealias, bool linear) {
  const PeriodicGrid& g = s.grid();
  Eigen::ArrayXcd a = s.position().values();
  Eigen::ArrayXcd b = s.velocity().values();
  if (!linear) b -= (0.5 * dt * p.mu) * power_nonlinearity(a, p.nu);
  Eigen::ArrayXcd ca = forward_transform(g, a), cb = forward_transform(g, b);
  const Eigen::ArrayXd mask = g.dealias_mask();
  wave_linear(ca, cb, frequencies(g, p.sigma), dt, dealias && !linear ? &mask : nullptr);
  a = inverse_transform_raw(g, ca);
  b = inverse_transform_raw(g, cb);
  if (!linear) b -= (0.5 * dt * p.mu) * power_nonlinearity(a, p.nu);
  return WaveState(Field(g, std::move(a)), Field(g, std::move(b)));
}

// --- integrators -----------------------------------------------------------

Trajectory integrate_nlfs(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.params.kind != EquationKind::NLFS) throw DomainError("integrate_nlfs needs a Schrodinger configuration");
  const PeriodicGrid g = PeriodicGrid::make(cfg.grid.d, cfg.grid.n, cfg.grid.box_length);
  const auto& p = cfg.params;
  const bool linear = cfg.linear_mode;
  const Monitor mon(g, p, cfg.gamma_monitor(), false, cfg.linear_mode);
  const Eigen::ArrayXcd lin = linear_symbol(g, frequencies(g, p.sigma), cfg.dt, cfg.dealias_active());
  const long total = cfg.steps();

  Recorder rec(cfg);
  Eigen::ArrayXcd u = make_initial(g, cfg.initial).values();
  Eigen::ArrayXcd c = forward_transform(g, u);
  rec.traj.snapshots.push_back({0.0, Field(g, u), std::nullopt});
  rec.push(mon.schrodinger(0, 0.0, u, c));

  for (long step = 1; step <= total; ++step) {
    const double t = step * cfg.dt;
    if (!linear) half_phase(u, 0.5 * cfg.dt, p);
    c = forward_transform(g, u) * lin;
    u = inverse_transform_raw(g, c);
    if (!linear) half_phase(u, 0.5 * cfg.dt, p);
    if (!u.allFinite()) {
      rec.non_finite(t);
      break;
    }
    c = forward_transform(g, u);
    const bool go_on = rec.push(mon.schrodinger(step, t, u, c));
    if (rec.want_snapshot(step, total) || !go_on) rec.traj.snapshots.push_back({t, Field(g, u), std::nullopt});
    if (!go_on) break;
  }
  return std::move(rec.traj);
}

Trajectory integrate_nlfw(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.params.kind != EquationKind::NLFW) throw DomainError("integrate_nlfw needs a wave configuration");
  const PeriodicGrid g = PeriodicGrid::make(cfg.grid.d, cfg.grid.n, cfg.grid.box_length);
  const auto& p = cfg.params;
  const bool linear = cfg.linear_mode;
  const Monitor mon(g, p, cfg.gamma_monitor(), true, cfg.linear_mode);
  const Eigen::ArrayXd w = frequencies(g, p.sigma);
  const Eigen::ArrayXd mask = g.dealias_mask();
  const Eigen::ArrayXd* maskp = cfg.dealias_active() ? &mask : nullptr;
  const long total = cfg.steps();
  const double kick = 0.5 * cfg.dt * p.mu;

  Recorder rec(cfg);
  Eigen::ArrayXcd a = make_initial(g, cfg.initial).values();
  Eigen::ArrayXcd b = make_initial(g, cfg.initial_velocity).values();
  rec.traj.snapshots.push_back({0.0, Field(g, a), Field(g, b)});
  rec.push(mon.wave(0, 0.0, a, forward_transform(g, a), b));

  for (long step = 1; step <= total; ++step) {
    const double t = step * cfg.dt;
    if (!linear) b -= kick * power_nonlinearity(a, p.nu);
    Eigen::ArrayXcd ca = forward_transform(g, a), cb = forward_transform(g, b);
    wave_linear(ca, cb, w, cfg.dt, maskp);
    a = inverse_transform_raw(g, ca);
    b = inverse_transform_raw(g, cb);
    if (!linear) b -= kick * power_nonlinearity(a, p.nu);
    if (!a.allFinite() || !b.allFinite()) {
      rec.non_finite(t);
      break;
    }
    const bool go_on = rec.push(mon.wave(step, t, a, linear ? ca : forward_transform(g, a), b));
    if (rec.want_snapshot(step, total) || !go_on) rec.traj.snapshots.push_back({t, Field(g, a), Field(g, b)});
    if (!go_on) break;
  }
  return std::move(rec.traj);
}

// --- Picard iteration on the Duhamel functionals ---------------------------

namespace {

struct PicardGrid {
  long steps;
  int nodes;
  long samples;  // steps * nodes + 1
  double h;
};

PicardGrid picard_grid(const RunConfig& cfg) {
  PicardGrid pg;
  pg.steps = cfg.steps();
  pg.nodes = cfg.picard.nodes_per_step;
  pg.samples = pg.steps * pg.nodes + 1;
  pg.h = cfg.dt / pg.nodes;
  return pg;
}

double l2_coeff(const PeriodicGrid& g, const Eigen::ArrayXcd& c) { return std::sqrt(g.volume() * c.abs2().sum()); }

// Advance the report by one difference; returns true when iteration stops.
bool picard_progress(ContractionReport& rep, double diff, double scale, const RunConfig& cfg) {
  if (!std::isfinite(diff)) throw NoContractionError("Picard iterates became non-finite", rep);
  if (!rep.differences.empty()) {
    const double prev = rep.differences.back();
    rep.ratios.push_back(prev > 0.0 ? diff / prev : 0.0);
  }
  rep.differences.push_back(diff);
  rep.iterations = static_cast<int>(rep.differences.size());
  if (rep.ratios.size() == 1) rep.contraction_factor = rep.ratios.front();
  if (diff <= cfg.picard.tolerance * scale) {
    rep.converged = true;
    return true;
  }
  if (rep.iterations >= cfg.picard.max_iters) {
    if (!rep.ratios.empty() && rep.ratios.back() >= 1.0)
      throw NoContractionError("Picard iteration did not contract (last ratio " + std::to_string(rep.ratios.back()) +
                                   ")",
                               rep);
    return true;
  }
  return false;
}

}  // namespace

PicardResult picard_solve_nlfs(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.params.kind != EquationKind::NLFS) throw DomainError("picard_solve_nlfs needs a Schrodinger configuration");
  const PeriodicGrid g = PeriodicGrid::make(cfg.grid.d, cfg.grid.n, cfg.grid.box_length);
  const auto& p = cfg.params;
  const PicardGrid pg = picard_grid(cfg);
  const Eigen::ArrayXd w = frequencies(g, p.sigma);
  const Eigen::Index N = g.size();

  const Eigen::ArrayXcd phi = forward_transform(make_initial(g, cfg.initial));
  const double scale = l2_coeff(g, phi);

  // Interaction picture: W_j = e^{i s_j Omega} hat u(s_j).
  std::vector<Eigen::ArrayXcd> W(pg.samples, phi);
  std::vector<Eigen::ArrayXcd> phase(pg.samples);
  for (long j = 0; j < pg.samples; ++j) {
    phase[j].resize(N);
    const double s = j * pg.h;
    for (Eigen::Index i = 0; i < N; ++i) phase[j][i] = std::polar(1.0, -s * w[i]);
  }

  PicardResult res;
  ContractionReport& rep = res.report;
  for (;;) {
    std::vector<Eigen::ArrayXcd> G(pg.samples);
    for (long j = 0; j < pg.samples; ++j) {
      if (cfg.linear_mode) {
        G[j] = Eigen::ArrayXcd::Zero(N);
        continue;
      }
      const Eigen::ArrayXcd u = inverse_transform_raw(g, phase[j] * W[j]);
      G[j] = phase[j].conjugate() * forward_transform(g, power_nonlinearity(u, p.nu));
    }
    double diff = 0.0;
    Eigen::ArrayXcd integral = Eigen::ArrayXcd::Zero(N);
    for (long j = 0; j < pg.samples; ++j) {
      if (j > 0) integral += (0.5 * pg.h) * (G[j - 1] + G[j]);
      Eigen::ArrayXcd next = phi + (kI * static_cast<double>(p.mu)) * integral;
      diff = std::max(diff, l2_coeff(g, next - W[j]));
      W[j] = std::move(next);
    }
    if (picard_progress(rep, diff, scale, cfg)) break;
  }

  Recorder rec(cfg);
  const Monitor mon(g, p, cfg.gamma_monitor(), false, cfg.linear_mode);
  for (long step = 0; step <= pg.steps; ++step) {
    const long j = step * pg.nodes;
    const double t = step * cfg.dt;
    const Eigen::ArrayXcd c = phase[j] * W[j];
    const Eigen::ArrayXcd u = inverse_transform_raw(g, c);
    StepRecord r = mon.schrodinger(step, t, u, c);
    r.picard_iterations = rep.iterations;
    r.contraction = rep.contraction_factor;
    rec.push(r);
    if (rec.want_snapshot(step, pg.steps)) rec.traj.snapshots.push_back({t, Field(g, u), std::nullopt});
  }
  rec.traj.status = RunStatus::Completed;
  if (!rep.converged) rec.traj.message = "max_iters reached before tolerance";
  res.trajectory = std::move(rec.traj);
  return res;
}

PicardResult picard_solve_nlfw(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.params.kind != EquationKind::NLFW) throw DomainError("picard_solve_nlfw needs a wave configuration");
  const PeriodicGrid g = PeriodicGrid::make(cfg.grid.d, cfg.grid.n, cfg.grid.box_length);
  const auto& p = cfg.params;
  const PicardGrid pg = picard_grid(cfg);
  const Eigen::ArrayXd w = frequencies(g, p.sigma);
  const Eigen::Index N = g.size();

  const Eigen::ArrayXcd phi = forward_transform(make_initial(g, cfg.initial));
  const Eigen::ArrayXcd psi = forward_transform(make_initial(g, cfg.initial_velocity));
  const double scale = std::hypot(l2_coeff(g, phi), l2_coeff(g, psi));

  // cos(s Omega), sin(s Omega)/Omega (s at Omega = 0) and Omega sin(s Omega).
  std::vector<Eigen::ArrayXd> C(pg.samples), S(pg.samples), WS(pg.samples);
  for (long j = 0; j < pg.samples; ++j) {
    const double s = j * pg.h;
    C[j].resize(N);
    S[j].resize(N);
    WS[j].resize(N);
    for (Eigen::Index i = 0; i < N; ++i) {
      if (w[i] == 0.0) {
        C[j][i] = 1.0;
        S[j][i] = s;
        WS[j][i] = 0.0;
      } else {
        C[j][i] = std::cos(s * w[i]);
        S[j][i] = std::sin(s * w[i]) / w[i];
        WS[j][i] = w[i] * std::sin(s * w[i]);
      }
    }
  }
  std::vector<Eigen::ArrayXcd> A(pg.samples), B(pg.samples);  // position and velocity coefficients
  for (long j = 0; j < pg.samples; ++j) {
    A[j] = C[j] * phi + S[j] * psi;
    B[j] = -WS[j] * phi + C[j] * psi;
  }
  const std::vector<Eigen::ArrayXcd> A0 = A, B0 = B;

  PicardResult res;
  ContractionReport& rep = res.report;
  for (;;) {
    std::vector<Eigen::ArrayXcd> F(pg.samples);
    for (long j = 0; j < pg.samples; ++j) {
      if (cfg.linear_mode)
        F[j] = Eigen::ArrayXcd::Zero(N);
      else
        F[j] = forward_transform(g, power_nonlinearity(inverse_transform_raw(g, A[j]), p.nu));
    }
    double diff = 0.0;
    Eigen::ArrayXcd Ic = Eigen::ArrayXcd::Zero(N), Is = Eigen::ArrayXcd::Zero(N);
    for (long j = 0; j < pg.samples; ++j) {
      if (j > 0) {
        Ic += (0.5 * pg.h) * (C[j - 1] * F[j - 1] + C[j] * F[j]);
        Is += (0.5 * pg.h) * (S[j - 1] * F[j - 1] + S[j] * F[j]);
      }
      Eigen::ArrayXcd na = A0[j] - static_cast<double>(p.mu) * (S[j] * Ic - C[j] * Is);
      Eigen::ArrayXcd nb = B0[j] - static_cast<double>(p.mu) * (C[j] * Ic + WS[j] * Is);
      diff = std::max(diff, l2_coeff(g, na - A[j]));
      A[j] = std::move(na);
      B[j] = std::move(nb);
    }
    if (picard_progress(rep, diff, scale, cfg)) break;
  }

  Recorder rec(cfg);
  const Monitor mon(g, p, cfg.gamma_monitor(), true, cfg.linear_mode);
  for (long step = 0; step <= pg.steps; ++step) {
    const long j = step * pg.nodes;
    const double t = step * cfg.dt;
    const Eigen::ArrayXcd a = inverse_transform_raw(g, A[j]);
    const Eigen::ArrayXcd b = inverse_transform_raw(g, B[j]);
    StepRecord r = mon.wave(step, t, a, A[j], b);
    r.picard_iterations = rep.iterations;
    r.contraction = rep.contraction_factor;
    rec.push(r);
    if (rec.want_snapshot(step, pg.steps)) rec.traj.snapshots.push_back({t, Field(g, a), Field(g, b)});
  }
  rec.traj.status = RunStatus::Completed;
  if (!rep.converged) rec.traj.message = "max_iters reached before tolerance";
  res.trajectory = std::move(rec.traj);
  return res;
}

PicardResult integrate(const RunConfig& cfg) {
  switch (cfg.method) {
    case Method::PicardDuhamel:
      return cfg.params.kind == EquationKind::NLFS ? picard_solve_nlfs(cfg) : picard_solve_nlfw(cfg);
    case Method::SplitStepStrang: return {integrate_nlfs(cfg), {}};
    case Method::WaveTrig: return {integrate_nlfw(cfg), {}};
  }
  throw DomainError("unknown method");
}

}  // namespace fraclab
