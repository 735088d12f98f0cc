#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "fraclab/field.hpp"
#include "fraclab/spectral.hpp"
#include "fraclab/trajectory.hpp"

namespace fraclab {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// P_0 (the low block) or P_N with N = 2^k.
struct DyadicBand {
  bool low = false;
  int k = 0;

  static DyadicBand low_block() { return {true, 0}; }
  static DyadicBand dyadic(int k) { return {false, k}; }
  double scale() const { return low ? 1.0 : std::ldexp(1.0, k); }
  /// Annulus N/2 <= |xi| <= 2N, or |xi| <= 2 for the low block.
  double support_lo() const { return low ? 0.0 : 0.5 * scale(); }
  double support_hi() const { return 2.0 * scale(); }
};

struct BandRange {
  int k_min;
  int k_max;
};

/// Bands k = 1 .. K with 2^K past the largest lattice wavenumber. Together
/// with P_0 they resolve the identity.
BandRange inhomogeneous_range(const PeriodicGrid& grid);
/// k from floor(log2 xi_min) - 1 to ceil(log2 xi_max) + 1.
BandRange homogeneous_range(const PeriodicGrid& grid);

/// Pointwise sum of the band symbols over the chosen family.
Eigen::ArrayXd partition_sum(const PeriodicGrid& grid, bool homogeneous, CutoffKind cutoff = CutoffKind::Standard);

struct Projection {
  Field field;
  bool empty;  // no lattice point carries a nonzero symbol value
};

Projection lp_project(const Field& u, DyadicBand band, CutoffKind cutoff = CutoffKind::Standard);

/// (L^d n^-d sum |u|^q)^(1/q); q = inf gives the grid max.
double lebesgue_norm(const Field& u, double q);

/// ||<Lambda>^gamma u||_q, or ||Lambda^gamma u||_q when homogeneous.
double sobolev_norm(const Field& u, double gamma, double q, bool homogeneous,
                    ZeroModePolicy policy = ZeroModePolicy::Strict);

struct BesovBreakdown {
  double value = 0.0;
  double low_norm = 0.0;               // ||P_0 u||_q, inhomogeneous only
  std::vector<int> band_k;             // k of each dyadic band used
  std::vector<double> band_norms;      // ||P_N u||_q (unweighted)
  double out_of_range_fraction = 0.0;  // L^2 mass the family fails to resolve, relative
};

BesovBreakdown besov_breakdown(const Field& u, double gamma, double q, bool homogeneous,
                               ZeroModePolicy policy = ZeroModePolicy::Strict,
                               CutoffKind cutoff = CutoffKind::Standard);
double besov_norm(const Field& u, double gamma, double q, bool homogeneous,
                  ZeroModePolicy policy = ZeroModePolicy::Strict, CutoffKind cutoff = CutoffKind::Standard);

struct OrthogonalityCheck {
  double ratio = 0.0;    // sum_N ||P_N u||^2 / ||u||^2 over the homogeneous family
  double leakage = 0.0;  // relative mass outside the resolvable range
  bool under_resolved = false;
};

OrthogonalityCheck almost_orthogonality(const Field& u, CutoffKind cutoff = CutoffKind::Standard);

enum class SpaceKind { Lebesgue, SobolevInhom, SobolevHom, BesovInhom, BesovHom };

struct NormSpec {
  SpaceKind space = SpaceKind::Lebesgue;
  double gamma = 0.0;
  double q = 2.0;
  ZeroModePolicy policy = ZeroModePolicy::Strict;
  CutoffKind cutoff = CutoffKind::Standard;
};

SpaceKind parse_space(const std::string& name);
std::string space_name(SpaceKind s);
/// Accepts a number or "inf".
double parse_exponent(const std::string& text);

double spatial_norm(const Field& u, const NormSpec& spec);

/// Trapezoid L^p over (times, values); p = inf is the max.
double time_norm(const std::vector<double>& times, const std::vector<double>& values, double p);

/// L^p_t of the inner spatial norm over the trajectory snapshots.
double spacetime_norm(const Trajectory& traj, double p, const NormSpec& inner);

}  // namespace fraclab
