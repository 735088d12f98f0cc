#include "fraclab/lp_norms.hpp"

#include <algorithm>
#include <cmath>

#include "fraclab/errors.hpp"

namespace fraclab {

namespace {

void check_q(double q) {
  if (!(q >= 1.0)) throw DomainError("Lebesgue exponent must lie in [1, inf]");
}

double lebesgue_of(const Eigen::ArrayXcd& v, double cell, double q) {
  check_q(q);
  const Eigen::ArrayXd a = v.abs();
  if (std::isinf(q)) return a.size() ? a.maxCoeff() : 0.0;
  if (q == 2.0) return std::sqrt(cell * a.square().sum());
  if (q == 1.0) return cell * a.sum();
  // Scale by the max first so large q does not overflow.
  const double m = a.maxCoeff();
  if (m == 0.0) return 0.0;
  return m * std::pow(cell * (a / m).pow(q).sum(), 1.0 / q);
}

Eigen::ArrayXd band_symbol(const PeriodicGrid& g, DyadicBand b, CutoffKind cutoff) {
  const Eigen::ArrayXd& k = g.wavenumber_magnitude();
  Eigen::ArrayXd s(g.size());
  if (b.low) {
    for (Eigen::Index i = 0; i < g.size(); ++i) s[i] = cutoff_low(k[i], cutoff);
  } else {
    const double N = b.scale();
    for (Eigen::Index i = 0; i < g.size(); ++i) s[i] = cutoff_band(k[i] / N, cutoff);
  }
  return s;
}

void guard_mean(const Eigen::ArrayXcd& c, double gamma, bool homogeneous, ZeroModePolicy policy) {
  if (homogeneous && gamma <= 0.0 && policy == ZeroModePolicy::Strict && has_nonzero_mean(c))
    throw ZeroModeError("homogeneous norm with gamma <= 0 on a field with nonzero mean; select project-out-mean");
}

}  // namespace

BandRange inhomogeneous_range(const PeriodicGrid& grid) {
  const int top = static_cast<int>(std::ceil(std::log2(grid.max_wavenumber()))) + 1;
  return {1, std::max(1, top)};
}

BandRange homogeneous_range(const PeriodicGrid& grid) {
  const int lo = static_cast<int>(std::floor(std::log2(grid.min_nonzero_wavenumber()))) - 1;
  const int hi = static_cast<int>(std::ceil(std::log2(grid.max_wavenumber()))) + 1;
  return {lo, hi};
}

Eigen::ArrayXd partition_sum(const PeriodicGrid& grid, bool homogeneous, CutoffKind cutoff) {
  const BandRange r = homogeneous ? homogeneous_range(grid) : inhomogeneous_range(grid);
  Eigen::ArrayXd s = homogeneous ? Eigen::ArrayXd::Zero(grid.size()) : band_symbol(grid, DyadicBand::low_block(), cutoff);
  for (int k = r.k_min; k <= r.k_max; ++k) s += band_symbol(grid, DyadicBand::dyadic(k), cutoff);
  return s;
}

Projection lp_project(const Field& u, DyadicBand band, CutoffKind cutoff) {
  const Eigen::ArrayXd s = band_symbol(u.grid(), band, cutoff);
  if ((s == 0.0).all()) return {Field::zeros(u.grid()), true};
  return {apply_symbol(u, s.cast<Complex>()), false};
}

double lebesgue_norm(const Field& u, double q) { return lebesgue_of(u.values(), u.grid().cell_volume(), q); }

double sobolev_norm(const Field& u, double gamma, double q, bool homogeneous, ZeroModePolicy policy) {
  check_q(q);
  if (gamma == 0.0 && !homogeneous) return lebesgue_norm(u, q);
  const PeriodicGrid& g = u.grid();
  Eigen::ArrayXcd c = forward_transform(u);
  guard_mean(c, gamma, homogeneous, policy);
  const Eigen::ArrayXd& k = g.wavenumber_magnitude();
  Eigen::ArrayXd w(g.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    if (homogeneous)
      w[i] = k[i] == 0.0 ? 0.0 : std::pow(k[i], gamma);
    else
      w[i] = std::pow(1.0 + k[i] * k[i], 0.5 * gamma);
  }
  c *= w.cast<Complex>();
  if (q == 2.0) return std::sqrt(g.volume() * c.abs2().sum());  // Plancherel
  return lebesgue_of(inverse_transform_raw(g, c), g.cell_volume(), q);
}

BesovBreakdown besov_breakdown(const Field& u, double gamma, double q, bool homogeneous, ZeroModePolicy policy,
                               CutoffKind cutoff) {
  check_q(q);
  const PeriodicGrid& g = u.grid();
  const Eigen::ArrayXcd c = forward_transform(u);
  guard_mean(c, gamma, homogeneous, policy);

  BesovBreakdown out;
  const BandRange r = homogeneous ? homogeneous_range(g) : inhomogeneous_range(g);
  Eigen::ArrayXd total = Eigen::ArrayXd::Zero(g.size());
  auto norm_of = [&](const Eigen::ArrayXd& s) {
    const Eigen::ArrayXcd pc = c * s.cast<Complex>();
    if (q == 2.0) return std::sqrt(g.volume() * pc.abs2().sum());
    return lebesgue_of(inverse_transform_raw(g, pc), g.cell_volume(), q);
  };
  if (!homogeneous) {
    const Eigen::ArrayXd s0 = band_symbol(g, DyadicBand::low_block(), cutoff);
    total += s0;
    out.low_norm = norm_of(s0);
  }
  double sum = 0.0;
  for (int k = r.k_min; k <= r.k_max; ++k) {
    const DyadicBand b = DyadicBand::dyadic(k);
    const Eigen::ArrayXd s = band_symbol(g, b, cutoff);
    total += s;
    const double nk = norm_of(s);
    out.band_k.push_back(k);
    out.band_norms.push_back(nk);
    sum += std::pow(b.scale(), 2.0 * gamma) * nk * nk;
  }
  out.value = out.low_norm + std::sqrt(sum);

  Eigen::ArrayXd miss = (1.0 - total).abs();
  if (homogeneous) miss[0] = 0.0;
  const Eigen::ArrayXd mass = c.abs2();
  const double m = homogeneous ? mass.sum() - mass[0] : mass.sum();
  out.out_of_range_fraction = m > 0.0 ? (miss * mass).sum() / m : 0.0;
  return out;
}

double besov_norm(const Field& u, double gamma, double q, bool homogeneous, ZeroModePolicy policy,
                  CutoffKind cutoff) {
  return besov_breakdown(u, gamma, q, homogeneous, policy, cutoff).value;
}

OrthogonalityCheck almost_orthogonality(const Field& u, CutoffKind cutoff) {
  const BesovBreakdown b = besov_breakdown(u, 0.0, 2.0, true, ZeroModePolicy::ProjectOutMean, cutoff);
  const Eigen::ArrayXcd c = forward_transform(u);
  const double total = u.grid().volume() * (c.abs2().sum() - std::norm(c[0]));
  OrthogonalityCheck out;
  double s = 0.0;
  for (double nb : b.band_norms) s += nb * nb;
  out.ratio = total > 0.0 ? s / total : 1.0;
  out.leakage = b.out_of_range_fraction;
  out.under_resolved = out.leakage >= 1e-8;
  return out;
}

SpaceKind parse_space(const std::string& name) {
  if (name == "lebesgue" || name == "L") return SpaceKind::Lebesgue;
  if (name == "sobolev" || name == "H") return SpaceKind::SobolevInhom;
  if (name == "sobolev-hom" || name == "Hdot") return SpaceKind::SobolevHom;
  if (name == "besov" || name == "B") return SpaceKind::BesovInhom;
  if (name == "besov-hom" || name == "Bdot") return SpaceKind::BesovHom;
  throw DomainError("unknown space '" + name + "' (lebesgue, sobolev, sobolev-hom, besov, besov-hom)");
}

std::string space_name(SpaceKind s) {
  switch (s) {
    case SpaceKind::Lebesgue: return "lebesgue";
    case SpaceKind::SobolevInhom: return "sobolev";
    case SpaceKind::SobolevHom: return "sobolev-hom";
    case SpaceKind::BesovInhom: return "besov";
    case SpaceKind::BesovHom: return "besov-hom";
  }
  return "?";
}

double parse_exponent(const std::string& text) {
  if (text == "inf" || text == "infinity" || text == "oo") return kInf;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw DomainError("cannot parse exponent '" + text + "'");
  }
  if (used != text.size()) throw DomainError("cannot parse exponent '" + text + "'");
  return v;
}

double spatial_norm(const Field& u, const NormSpec& s) {
  switch (s.space) {
    case SpaceKind::Lebesgue: return lebesgue_norm(u, s.q);
    case SpaceKind::SobolevInhom: return sobolev_norm(u, s.gamma, s.q, false, s.policy);
    case SpaceKind::SobolevHom: return sobolev_norm(u, s.gamma, s.q, true, s.policy);
    case SpaceKind::BesovInhom: return besov_norm(u, s.gamma, s.q, false, s.policy, s.cutoff);
    case SpaceKind::BesovHom: return besov_norm(u, s.gamma, s.q, true, s.policy, s.cutoff);
  }
  throw DomainError("unknown space");
}

double time_norm(const std::vector<double>& t, const std::vector<double>& f, double p) {
  if (t.size() != f.size()) throw DomainError("time and value counts differ");
  if (t.size() < 2) throw DomainError("space-time norm needs at least two snapshots");
  if (!(p >= 1.0)) throw DomainError("time exponent must lie in [1, inf]");
  for (std::size_t i = 1; i < t.size(); ++i)
    if (!(t[i] > t[i - 1])) throw DomainError("snapshot times must be strictly increasing");
  if (std::isinf(p)) return *std::max_element(f.begin(), f.end());
  double acc = 0.0;
  for (std::size_t i = 1; i < t.size(); ++i)
    acc += 0.5 * (t[i] - t[i - 1]) * (std::pow(f[i], p) + std::pow(f[i - 1], p));
  return std::pow(acc, 1.0 / p);
}

double spacetime_norm(const Trajectory& traj, double p, const NormSpec& inner) {
  std::vector<double> t, f;
  t.reserve(traj.snapshots.size());
  f.reserve(traj.snapshots.size());
  for (const auto& s : traj.snapshots) {
    t.push_back(s.t);
    f.push_back(spatial_norm(s.u, inner));
  }
  return time_norm(t, f, p);
}

std::string status_name(RunStatus s) {
  switch (s) {
    case RunStatus::Completed: return "completed";
    case RunStatus::NonFinite: return "blowup-suspected";
    case RunStatus::CeilingExceeded: return "ceiling-exceeded";
    case RunStatus::NoContraction: return "no-contraction";
  }
  return "?";
}

}  // namespace fraclab
