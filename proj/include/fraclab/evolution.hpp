#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "fraclab/conserved.hpp"
#include "fraclab/exponents.hpp"
#include "fraclab/field.hpp"
#include "fraclab/grid.hpp"
#include "fraclab/trajectory.hpp"

namespace fraclab {

struct GridSpec {
  int d = 1;
  int n = 256;
  double box_length = 40.0;
};

namespace profile {

/// A exp(-|x - c|^2 / w^2) exp(i v.x). Center defaults to the box center.
struct Gaussian {
  double amplitude = 1.0;
  double width = 1.0;
  std::optional<std::array<double, 3>> center;
  std::array<double, 3> velocity{0.0, 0.0, 0.0};
};
/// A exp(i xi_k . x) for integer lattice mode k.
struct PlaneWave {
  Complex amplitude{1.0, 0.0};
  std::array<int, 3> mode{0, 0, 0};
};
/// A sech(|x - c| / w).
struct Bump {
  double amplitude = 1.0;
  double width = 1.0;
  std::optional<std::array<double, 3>> center;
};
/// Component `component` of an FDSP snapshot on the same grid.
struct File {
  std::string path;
  int component = 0;
};
struct Zero {};
/// Explicit samples, used for programmatic twins of a run.
struct Samples {
  Eigen::ArrayXcd values;
};

}  // namespace profile

using InitialProfile =
    std::variant<profile::Gaussian, profile::PlaneWave, profile::Bump, profile::File, profile::Zero, profile::Samples>;

Field make_initial(const PeriodicGrid& grid, const InitialProfile& profile);

enum class Method { SplitStepStrang, PicardDuhamel, WaveTrig };

std::string method_name(Method m);
Method parse_method(const std::string& name);

struct PicardOptions {
  int max_iters = 60;
  double tolerance = 1e-12;  // relative to ||phi||_{L^2} (plus ||phi_t|| for waves)
  int nodes_per_step = 1;
};

struct RunConfig {
  EquationParams<double> params;
  GridSpec grid;
  InitialProfile initial = profile::Gaussian{};
  InitialProfile initial_velocity = profile::Zero{};
  double dt = 1e-3;
  double t_final = 1.0;
  Method method = Method::SplitStepStrang;
  PicardOptions picard;
  double epsilon = 0.0;           // smallness threshold for scattering runs, informational
  int snapshot_stride = 1;        // steps between stored snapshots
  std::optional<double> monitor_gamma;  // H^gamma monitor, default sigma/2
  double ceiling_factor = 1e6;
  bool linear_mode = false;       // nonlinearity switched off
  std::optional<bool> dealias;    // default: on for odd integer nu
  double high_band_alarm = 1e-6;

  void validate() const;
  long steps() const;
  double gamma_monitor() const { return monitor_gamma.value_or(0.5 * params.sigma); }
  bool dealias_active() const;
};

/// u exp(i mu |u|^{nu-1} dt): exact flow of the nonlinear part.
Field nonlinear_phase_step(const Field& u, double dt, const EquationParams<double>& params);

/// One Strang step: half phase, linear propagation, half phase. `dealias`
/// folds the two-thirds mask into the linear stage.
Field strang_step(const Field& u, double dt, const EquationParams<double>& params, bool dealias = false,
                  bool linear = false);

/// One symmetric trigonometric step for the wave equation: half kick,
/// exact linear propagation, half kick.
WaveState wave_trig_step(const WaveState& s, double dt, const EquationParams<double>& params, bool dealias = false,
                         bool linear = false);

Trajectory integrate_nlfs(const RunConfig& cfg);
Trajectory integrate_nlfw(const RunConfig& cfg);

struct ContractionReport {
  std::vector<double> differences;  // L^inf_t L^2_x distance between iterates k and k-1
  std::vector<double> ratios;       // differences[k] / differences[k-1]
  double contraction_factor = 0.0;  // first ratio
  int iterations = 0;
  bool converged = false;
};

struct PicardResult {
  Trajectory trajectory;
  ContractionReport report;
};

/// Iterates stopped with ratio >= 1. Carries the ratio history.
struct NoContractionError : std::runtime_error {
  NoContractionError(const std::string& what, ContractionReport r) : std::runtime_error(what), report(std::move(r)) {}
  ContractionReport report;
};

PicardResult picard_solve_nlfs(const RunConfig& cfg);
PicardResult picard_solve_nlfw(const RunConfig& cfg);

/// Dispatch on cfg.method and cfg.params.kind.
PicardResult integrate(const RunConfig& cfg);

}  // namespace fraclab
