#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fraclab/conserved.hpp"
#include "fraclab/evolution.hpp"
#include "fraclab/exponents.hpp"
#include "fraclab/lp_norms.hpp"
#include "fraclab/trajectory.hpp"

namespace fraclab {

// --- scaling ---------------------------------------------------------------

/// d/2 - sigma/(nu-1) - gamma (Schrodinger) or d/2 - 2 sigma/(nu-1) - gamma (wave):
/// the power of lambda picked up by the homogeneous gamma-norm under rescaling.
double scaling_norm_exponent(const EquationParams<double>& params, double gamma);

/// lambda^{-a} u(x / lambda) on the box lambda L, a = sigma/(nu-1) or
/// 2 sigma/(nu-1). lambda must be 2^m. The L^2 scaling law is verified
/// internally to 1e-8.
Field rescale_field(const Field& u, double lambda, const EquationParams<double>& params);

/// Velocity component of a rescaled wave state carries one extra lambda^{-sigma}.
WaveState rescale_state(const WaveState& s, double lambda, const EquationParams<double>& params);

struct ScalingCheck {
  double max_discrepancy = 0.0;  // relative L^2, maximized over stored checkpoints
  bool under_resolved = false;   // either run tripped its high-band monitor
  std::vector<double> times;
  std::vector<double> discrepancies;
};

/// Runs `cfg` and its lambda-rescaled twin and compares them at every stored snapshot.
ScalingCheck scaling_covariance_check(const RunConfig& cfg, double lambda);

// --- dispersive decay ------------------------------------------------------

struct DispersiveOptions {
  int n = 2048;
  double box_length = 1024.0;
  double boundary_band = 0.1;  // fraction of the box adjoining each face
  double alarm = 1e-8;         // boundary mass fraction that counts as wraparound
};

struct DispersiveProbe {
  double slope = 0.0;
  std::vector<double> times;
  std::vector<double> sup_norms;
  std::vector<double> boundary_fraction;
  bool wraparound_alarm = false;
};

/// Propagates the P_1 kernel (centered in the box) and fits log sup|u| against log(1+t).
DispersiveProbe dispersive_decay_probe(int d, double sigma, const std::vector<double>& times,
                                       const DispersiveOptions& opt = {});

// --- monitors --------------------------------------------------------------

/// ||w(t_{j+1}) - w(t_j)||_{H^gamma} with w(t) = e^{it Lambda^sigma} u(t).
std::vector<double> scattering_monitor(const Trajectory& traj, const EquationParams<double>& params, double gamma);

struct BlowupReport {
  RunStatus status = RunStatus::Completed;
  double time = 0.0;
  std::vector<double> times;
  std::vector<double> hgamma;
};

BlowupReport blowup_monitor(const Trajectory& traj, double gamma, double ceiling_factor = 1e6);

// --- seeded random fields --------------------------------------------------

struct RandomFieldSpec {
  std::uint64_t seed = 1;
  double alpha = 0.0;  // spectrum |xi|^-alpha
  int k_min = 1;       // integer-mode shell, |k| in [k_min, k_max]
  int k_max = 8;
  bool unit_l2 = true;
};

/// Band-limited complex Gaussian field. Each lattice mode draws from its own
/// seeded stream, so the same spec gives the same function on any grid that
/// resolves k_max.
Field random_field(const PeriodicGrid& grid, const RandomFieldSpec& spec);

// --- inequality sampling ---------------------------------------------------

enum class InequalityKind { KatoPonce, ChainRule, PowerEstimate, PowerDifference };
enum class ChainFunction { Power, Square };

std::string inequality_name(InequalityKind k);
InequalityKind parse_inequality(const std::string& s);

/// Exponents of one inequality. Unused entries are ignored. Infinity is kInf.
struct InequalityExponents {
  double gamma = 0.0;
  double r = 2.0;
  double p = 2.0;
  double q = kInf;
  double p1 = 2.0, q1 = kInf, p2 = kInf, q2 = 2.0;  // Kato-Ponce
  double nu = 3.0;
  ChainFunction F = ChainFunction::Power;
};

struct InequalitySample {
  double lhs = 0.0;
  double rhs_without_constant = 0.0;
  double ratio = 0.0;
  std::string descriptor;
};

/// Throws DomainError on an exponent-relation violation and HypothesisError
/// when the smoothness hypothesis fails. `v` is needed by KatoPonce and
/// PowerDifference.
InequalitySample inequality_sample(InequalityKind kind, const InequalityExponents& e, const Field& u,
                                   const Field* v = nullptr, const std::string& descriptor = "");

struct InequalitySuite {
  std::vector<InequalitySample> samples;
  double max_ratio = 0.0;
  double min_ratio = 0.0;
};

/// `count` samples over the declared distribution: random fields with
/// alpha in {0, 1, 2} plus Gaussian, plane-wave and bump profiles.
InequalitySuite inequality_suite(InequalityKind kind, const InequalityExponents& e, int d, int n, double box_length,
                                 int count, std::uint64_t seed, int k_max = 6);

}  // namespace fraclab
