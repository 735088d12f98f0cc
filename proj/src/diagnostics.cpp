#include "fraclab/diagnostics.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "fraclab/errors.hpp"
#include "fraclab/spectral.hpp"

namespace fraclab {

namespace {

double scaling_power(const EquationParams<double>& p) {
  const double a = p.sigma / (p.nu - 1.0);
  return p.kind == EquationKind::NLFW ? 2.0 * a : a;
}

void require_power_of_two(double lambda) {
  int e = 0;
  if (!(lambda > 0.0) || std::frexp(lambda, &e) != 0.5)
    throw DomainError("scaling factor must be a power of two (got " + std::to_string(lambda) + ")");
}

double rel_l2(const Eigen::ArrayXcd& a, const Eigen::ArrayXcd& b) {
  const double nb = std::sqrt(b.abs2().sum());
  const double nd = std::sqrt((a - b).abs2().sum());
  return nb > 0.0 ? nd / nb : nd;
}

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Field lambda_power(const Field& u, double gamma) {
  if (gamma == 0.0) return u;
  return apply_multiplier(u, symbol::FracLaplacian{gamma});
}

double inv(double x) { return std::isinf(x) ? 0.0 : 1.0 / x; }

void require_relation(double lhs, double rhs, const std::string& what) {
  if (std::abs(lhs - rhs) > 1e-12 * std::max(1.0, std::abs(rhs)))
    throw DomainError("exponent relation violated: " + what + " (" + std::to_string(lhs) + " vs " +
                      std::to_string(rhs) + ")");
}

void require_open(double x, double lo, double hi, bool hi_closed, const std::string& name) {
  const bool ok = x > lo && (hi_closed ? x <= hi : x < hi);
  if (!ok) throw DomainError("exponent " + name + " = " + std::to_string(x) + " outside its admissible range");
}

Eigen::ArrayXcd power_map(const Eigen::ArrayXcd& u, double nu) { return abs_power(u, nu - 1.0).cast<Complex>() * u; }

}  // namespace

// --- scaling ---------------------------------------------------------------

double scaling_norm_exponent(const EquationParams<double>& p, double gamma) {
  return 0.5 * p.d - scaling_power(p) - gamma;
}

Field rescale_field(const Field& u, double lambda, const EquationParams<double>& params) {
  require_power_of_two(lambda);
  const PeriodicGrid& g = u.grid();
  if (lambda == 1.0) return u;
  const PeriodicGrid h = PeriodicGrid::make(g.dim(), g.points_per_axis(), lambda * g.box_length());
  const double factor = std::pow(lambda, -scaling_power(params));
  // On the wider box with the same n, sample j sits at lambda x_j, so
  // u(x'/lambda) is just the old sample.
  Field out(h, factor * u.values());
  const double expected = std::pow(lambda, scaling_norm_exponent(params, 0.0));
  const double n0 = lebesgue_norm(u, 2.0);
  if (n0 > 0.0) {
    const double got = lebesgue_norm(out, 2.0) / n0;
    if (std::abs(got - expected) > 1e-8 * expected)
      throw std::logic_error("rescaled L^2 norm violates the scaling law");
  }
  return out;
}

WaveState rescale_state(const WaveState& s, double lambda, const EquationParams<double>& params) {
  Field a = rescale_field(s.position(), lambda, params);
  Field b = rescale_field(s.velocity(), lambda, params);
  return WaveState(a, b.with_values(std::pow(lambda, -params.sigma) * b.values()));
}

ScalingCheck scaling_covariance_check(const RunConfig& cfg, double lambda) {
  require_power_of_two(lambda);
  cfg.validate();
  if (cfg.method == Method::PicardDuhamel) throw DomainError("scaling check runs the step integrators");
  const auto& p = cfg.params;
  const PeriodicGrid g = PeriodicGrid::make(cfg.grid.d, cfg.grid.n, cfg.grid.box_length);
  const bool wave = p.kind == EquationKind::NLFW;

  RunConfig twin = cfg;
  const double ls = std::pow(lambda, p.sigma);
  twin.grid.box_length = lambda * cfg.grid.box_length;
  twin.dt = ls * cfg.dt;
  twin.t_final = ls * cfg.t_final;
  const Field u0 = make_initial(g, cfg.initial);
  if (wave) {
    const WaveState s = rescale_state(WaveState(u0, make_initial(g, cfg.initial_velocity)), lambda, p);
    twin.initial = profile::Samples{s.position().values()};
    twin.initial_velocity = profile::Samples{s.velocity().values()};
  } else {
    twin.initial = profile::Samples{rescale_field(u0, lambda, p).values()};
  }

  const Trajectory base = integrate(cfg).trajectory;
  const Trajectory other = integrate(twin).trajectory;
  ScalingCheck out;
  out.under_resolved = base.aliasing_alarm || other.aliasing_alarm;
  const double factor = std::pow(lambda, -scaling_power(p));
  const std::size_t count = std::min(base.snapshots.size(), other.snapshots.size());
  for (std::size_t j = 0; j < count; ++j) {
    const double dj = rel_l2(other.snapshots[j].u.values(), factor * base.snapshots[j].u.values());
    out.times.push_back(other.snapshots[j].t);
    out.discrepancies.push_back(dj);
    out.max_discrepancy = std::max(out.max_discrepancy, dj);
  }
  return out;
}

// --- dispersive decay ------------------------------------------------------

DispersiveProbe dispersive_decay_probe(int d, double sigma, const std::vector<double>& times,
                                       const DispersiveOptions& opt) {
  if (times.size() < 2) throw DomainError("dispersive probe needs at least two times");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] > 0.0)) throw DomainError("dispersive probe times must be positive");
    if (i > 0 && !(times[i] > times[i - 1])) throw DomainError("dispersive probe times must increase");
  }
  const PeriodicGrid g = PeriodicGrid::make(d, opt.n, opt.box_length);
  const double c = 0.5 * g.box_length();
  const Eigen::ArrayXd& k = g.wavenumber_magnitude();
  Eigen::ArrayXcd hat(g.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    double phase = 0.0;
    for (int a = 0; a < d; ++a) phase += g.wavevector(a)[i] * c;
    hat[i] = cutoff_band(k[i]) * std::polar(1.0, -phase);
  }
  Eigen::ArrayXd boundary = Eigen::ArrayXd::Zero(g.size());
  const double edge = (0.5 - opt.boundary_band) * g.box_length();
  for (Eigen::Index i = 0; i < g.size(); ++i)
    for (int a = 0; a < d; ++a)
      if (std::abs(g.coordinate(a)[i] - c) > edge) boundary[i] = 1.0;

  DispersiveProbe out;
  std::vector<double> lx, ly;
  for (double t : times) {
    Eigen::ArrayXcd ct(g.size());
    for (Eigen::Index i = 0; i < g.size(); ++i)
      ct[i] = hat[i] * std::polar(1.0, -t * (k[i] == 0.0 ? 0.0 : std::pow(k[i], sigma)));
    const Eigen::ArrayXd a2 = inverse_transform_raw(g, ct).abs2();
    const double sup = std::sqrt(a2.maxCoeff());
    const double frac = (boundary * a2).sum() / a2.sum();
    out.times.push_back(t);
    out.sup_norms.push_back(sup);
    out.boundary_fraction.push_back(frac);
    if (frac > opt.alarm) out.wraparound_alarm = true;
    lx.push_back(std::log1p(t));
    ly.push_back(std::log(sup));
  }
  const double n = static_cast<double>(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  out.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return out;
}

// --- monitors --------------------------------------------------------------

std::vector<double> scattering_monitor(const Trajectory& traj, const EquationParams<double>& params, double gamma) {
  std::vector<double> out;
  for (std::size_t j = 1; j < traj.snapshots.size(); ++j) {
    const auto& a = traj.snapshots[j - 1];
    const auto& b = traj.snapshots[j];
    const Field wa = schrodinger_propagate(a.u, -a.t, params.sigma);
    const Field wb = schrodinger_propagate(b.u, -b.t, params.sigma);
    out.push_back(sobolev_norm(wb - wa, gamma, 2.0, false));
  }
  return out;
}

BlowupReport blowup_monitor(const Trajectory& traj, double gamma, double ceiling_factor) {
  BlowupReport r;
  for (const auto& s : traj.snapshots) {
    r.times.push_back(s.t);
    r.hgamma.push_back(sobolev_norm(s.u, gamma, 2.0, false));
  }
  if (traj.status == RunStatus::NonFinite) {
    r.status = RunStatus::NonFinite;
    r.time = traj.status_time;
    return r;
  }
  const double h0 = r.hgamma.empty() ? 0.0 : r.hgamma.front();
  for (std::size_t j = 0; j < r.hgamma.size(); ++j) {
    if (h0 > 0.0 && r.hgamma[j] > ceiling_factor * h0) {
      r.status = RunStatus::CeilingExceeded;
      r.time = r.times[j];
      return r;
    }
  }
  if (traj.status == RunStatus::CeilingExceeded) {
    r.status = traj.status;
    r.time = traj.status_time;
  }
  return r;
}

// --- random fields ---------------------------------------------------------

Field random_field(const PeriodicGrid& g, const RandomFieldSpec& spec) {
  if (spec.k_min < 0 || spec.k_max < spec.k_min) throw DomainError("random field shell is empty");
  if (2 * spec.k_max >= g.points_per_axis()) throw DomainError("random field shell exceeds the grid");
  Eigen::ArrayXcd c = Eigen::ArrayXcd::Zero(g.size());
  const double dk = 2.0 * std::numbers::pi / g.box_length();
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    long k2 = 0;
    std::uint64_t h = splitmix(spec.seed);
    for (int a = 0; a < g.dim(); ++a) {
      const int k = g.mode(a)[i];
      k2 += static_cast<long>(k) * k;
      h = splitmix(h ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(k) + 0x10000));
    }
    if (k2 < static_cast<long>(spec.k_min) * spec.k_min || k2 > static_cast<long>(spec.k_max) * spec.k_max) continue;
    std::mt19937_64 rng(h);
    std::normal_distribution<double> normal;
    const double x = normal(rng), y = normal(rng);
    const double xi = dk * std::sqrt(static_cast<double>(k2));
    const double w = k2 == 0 ? 1.0 : std::pow(xi, -spec.alpha);
    c[i] = w * Complex(x, y) / std::numbers::sqrt2;
  }
  Field u = inverse_transform(g, c);
  if (spec.unit_l2) {
    const double n = lebesgue_norm(u, 2.0);
    if (n > 0.0) u = (1.0 / n) * u;
  }
  return u;
}

// --- inequalities ----------------------------------------------------------

std::string inequality_name(InequalityKind k) {
  switch (k) {
    case InequalityKind::KatoPonce: return "kato-ponce";
    case InequalityKind::ChainRule: return "chain-rule";
    case InequalityKind::PowerEstimate: return "power-estimate";
    case InequalityKind::PowerDifference: return "power-difference";
  }
  return "?";
}

InequalityKind parse_inequality(const std::string& s) {
  if (s == "kato-ponce") return InequalityKind::KatoPonce;
  if (s == "chain-rule") return InequalityKind::ChainRule;
  if (s == "power-estimate") return InequalityKind::PowerEstimate;
  if (s == "power-difference") return InequalityKind::PowerDifference;
  throw DomainError("unknown inequality '" + s + "'");
}

InequalitySample inequality_sample(InequalityKind kind, const InequalityExponents& e, const Field& u, const Field* v,
                                   const std::string& descriptor) {
  InequalitySample s;
  s.descriptor = descriptor;
  auto L = [](const Field& f, double q) { return lebesgue_norm(f, q); };
  const double g = e.gamma;

  switch (kind) {
    case InequalityKind::KatoPonce: {
      if (!v) throw DomainError("Kato-Ponce needs two fields");
      if (!(g >= 0.0)) throw DomainError("Kato-Ponce needs gamma >= 0");
      require_open(e.r, 1.0, kInf, false, "r");
      require_open(e.p1, 1.0, kInf, true, "p1");
      require_open(e.q1, 1.0, kInf, true, "q1");
      require_open(e.p2, 1.0, kInf, true, "p2");
      require_open(e.q2, 1.0, kInf, true, "q2");
      require_relation(inv(e.r), inv(e.p1) + inv(e.q1), "1/r = 1/p1 + 1/q1");
      require_relation(inv(e.r), inv(e.p2) + inv(e.q2), "1/r = 1/p2 + 1/q2");
      const Field uv = u.with_values(u.values() * v->values());
      s.lhs = L(lambda_power(uv, g), e.r);
      s.rhs_without_constant = L(lambda_power(u, g), e.p1) * L(*v, e.q1) + L(u, e.p2) * L(lambda_power(*v, g), e.q2);
      break;
    }
    case InequalityKind::ChainRule: {
      if (!(g > 0.0 && g < 1.0)) throw HypothesisError("chain rule needs gamma in (0, 1)");
      require_open(e.r, 1.0, kInf, false, "r");
      require_open(e.p, 1.0, kInf, false, "p");
      require_open(e.q, 1.0, kInf, true, "q");
      require_relation(inv(e.r), inv(e.p) + inv(e.q), "1/r = 1/p + 1/q");
      Eigen::ArrayXcd Fu, dF;
      if (e.F == ChainFunction::Square) {
        Fu = u.values().square();
        dF = 2.0 * u.values().abs().cast<Complex>();
      } else {
        if (!(e.nu > 1.0)) throw HypothesisError("power nonlinearity needs nu > 1");
        Fu = power_map(u.values(), e.nu);
        dF = (e.nu * abs_power(u.values(), e.nu - 1.0)).cast<Complex>();
      }
      s.lhs = L(lambda_power(u.with_values(Fu), g), e.r);
      s.rhs_without_constant = L(u.with_values(dF), e.q) * L(lambda_power(u, g), e.p);
      break;
    }
    case InequalityKind::PowerEstimate:
    case InequalityKind::PowerDifference: {
      if (!(e.nu > 1.0)) throw HypothesisError("power nonlinearity needs nu > 1");
      if (!(g >= 0.0)) throw DomainError("power estimates need gamma >= 0");
      require_open(e.r, 1.0, kInf, false, "r");
      require_open(e.p, 1.0, kInf, false, "p");
      require_open(e.q, 1.0, kInf, true, "q");
      require_relation(inv(e.r), inv(e.p) + (e.nu - 1.0) * inv(e.q), "1/r = 1/p + (nu-1)/q");
      const bool odd = ScalarOps<double>::is_odd_integer(e.nu);
      const double slack = kind == InequalityKind::PowerEstimate ? e.nu : e.nu - 1.0;
      if (!odd && static_cast<double>(positive_ceil(g)) > slack + 1e-12)
        throw HypothesisError("smoothness hypothesis fails: ceil(gamma) = " + std::to_string(positive_ceil(g)) +
                              (kind == InequalityKind::PowerEstimate ? " > nu" : " > nu - 1"));
      if (kind == InequalityKind::PowerEstimate) {
        s.lhs = L(lambda_power(u.with_values(power_map(u.values(), e.nu)), g), e.r);
        s.rhs_without_constant = std::pow(L(u, e.q), e.nu - 1.0) * L(lambda_power(u, g), e.p);
      } else {
        if (!v) throw DomainError("power difference needs two fields");
        const Field diff = u - *v;
        s.lhs = L(lambda_power(u.with_values(power_map(u.values(), e.nu) - power_map(v->values(), e.nu)), g), e.r);
        const double uq = L(u, e.q), vq = L(*v, e.q);
        s.rhs_without_constant =
            (std::pow(uq, e.nu - 1.0) + std::pow(vq, e.nu - 1.0)) * L(lambda_power(diff, g), e.p) +
            (std::pow(uq, e.nu - 2.0) + std::pow(vq, e.nu - 2.0)) *
                (L(lambda_power(u, g), e.p) + L(lambda_power(*v, g), e.p)) * L(diff, e.q);
      }
      break;
    }
  }
  s.ratio = s.rhs_without_constant > 0.0 ? s.lhs / s.rhs_without_constant : 0.0;
  return s;
}

InequalitySuite inequality_suite(InequalityKind kind, const InequalityExponents& e, int d, int n, double box_length,
                                 int count, std::uint64_t seed, int k_max) {
  if (count < 1) throw DomainError("suite needs at least one sample");
  const PeriodicGrid g = PeriodicGrid::make(d, n, box_length);
  InequalitySuite out;
  const double L = box_length;
  for (int i = 0; i < count; ++i) {
    const std::uint64_t si = seed + static_cast<std::uint64_t>(i) * 7919u;
    const int type = i % 6;
    Field u = Field::zeros(g);
    std::string desc;
    if (type < 3) {
      u = random_field(g, {si, static_cast<double>(type), 1, k_max, true});
      desc = "random alpha=" + std::to_string(type) + " seed=" + std::to_string(si);
    } else {
      const double w = L * (0.08 + 0.02 * (i % 5));
      const double amp = 0.5 + 0.25 * (i % 4);
      if (type == 3) {
        u = make_initial(g, profile::Gaussian{amp, w, std::nullopt, {0.0, 0.0, 0.0}});
        desc = "gaussian";
      } else if (type == 4) {
        u = make_initial(g, profile::Bump{amp, 0.5 * w, std::nullopt});
        desc = "bump";
      } else {
        // Plane wave on top of a random shell, so that Lambda^gamma of it is nonzero.
        const Field base = random_field(g, {si, 1.0, 1, k_max, true});
        u = base + make_initial(g, profile::PlaneWave{Complex(amp, 0.0), {1 + i % 3, 0, 0}});
        desc = "plane-wave+random";
      }
    }
    Field v = random_field(g, {si + 104729u, static_cast<double>((i + 1) % 3), 1, k_max, true});
    if (kind == InequalityKind::PowerDifference) v = u + 0.3 * Complex(1.0, 0.0) * v;
    out.samples.push_back(inequality_sample(kind, e, u, &v, desc));
  }
  out.max_ratio = out.samples.front().ratio;
  out.min_ratio = out.samples.front().ratio;
  for (const auto& s : out.samples) {
    out.max_ratio = std::max(out.max_ratio, s.ratio);
    out.min_ratio = std::min(out.min_ratio, s.ratio);
  }
  return out;
}

}  // namespace fraclab
