#pragma once

#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "fraclab/field.hpp"
#include "fraclab/grid.hpp"

namespace fraclab {

/// What to do with the xi = 0 coefficient when a symbol is singular there.
enum class ZeroModePolicy {
  Strict,          // nonzero mean raises ZeroModeError
  ProjectOutMean,  // mean coefficient is dropped
};

/// Littlewood-Paley cutoff family. Standard has its transition on [1, 2];
/// Alternate on [1, 1.6]. Both equal 1 on |xi| <= 1.
enum class CutoffKind { Standard, Alternate };

/// chi_0(r) for r = |xi| >= 0.
double cutoff_low(double r, CutoffKind kind = CutoffKind::Standard);
/// chi(r) = chi_0(r) - chi_0(2r); supported in [1/2, 2].
double cutoff_band(double r, CutoffKind kind = CutoffKind::Standard);

namespace symbol {

/// |xi|^s. For s < 0 the zero mode follows `policy`.
struct FracLaplacian {
  double s;
  ZeroModePolicy policy = ZeroModePolicy::Strict;
};
/// (1 + |xi|^2)^(gamma/2).
struct JapaneseBracket {
  double gamma;
};
/// |xi|^(-sigma), sigma > 0.
struct FracIntegral {
  double sigma;
  ZeroModePolicy policy = ZeroModePolicy::Strict;
};
/// exp(-i t |xi|^sigma).
struct SchrodingerPhase {
  double t;
  double sigma;
};
/// cos(t |xi|^sigma).
struct WaveCos {
  double t;
  double sigma;
};
/// sin(t |xi|^sigma) / |xi|^sigma, equal to t at xi = 0.
struct WaveSinc {
  double t;
  double sigma;
};
/// chi(xi / N).
struct LPBand {
  double scale;
  CutoffKind cutoff = CutoffKind::Standard;
};
/// chi_0(xi).
struct LPLow {
  CutoffKind cutoff = CutoffKind::Standard;
};
/// i xi_axis. Odd, so the Nyquist coefficient is zeroed.
struct Derivative {
  int axis;
};

}  // namespace symbol

using MultiplierSymbol =
    std::variant<symbol::FracLaplacian, symbol::JapaneseBracket, symbol::FracIntegral, symbol::SchrodingerPhase,
                 symbol::WaveCos, symbol::WaveSinc, symbol::LPBand, symbol::LPLow, symbol::Derivative>;

std::string symbol_name(const MultiplierSymbol& m);

/// True for symbols with m(-xi) = -m(xi); those get the Nyquist row zeroed.
bool symbol_is_odd(const MultiplierSymbol& m);

/// Symbol evaluated at every coefficient index of `grid`. Zero-mode
/// regularization is applied (singular entries set to 0); the policy itself
/// is enforced by apply_multiplier.
Eigen::ArrayXcd symbol_values(const PeriodicGrid& grid, const MultiplierSymbol& m);

/// Coefficients with the zero coefficient holding the mean: hat u_k = n^-d sum_x u(x) e^{-i xi.x}.
Eigen::ArrayXcd forward_transform(const Field& u);
Eigen::ArrayXcd forward_transform(const PeriodicGrid& grid, const Eigen::ArrayXcd& samples);
/// Inverse of forward_transform.
Field inverse_transform(const PeriodicGrid& grid, const Eigen::ArrayXcd& coefficients);
Eigen::ArrayXcd inverse_transform_raw(const PeriodicGrid& grid, const Eigen::ArrayXcd& coefficients);

/// Multiplies the coefficients by one symbol. Throws ZeroModeError when a
/// symbol that is singular at xi = 0 meets nonzero mean under Strict policy.
Field apply_multiplier(const Field& u, const MultiplierSymbol& m);
/// Multiplies by an arbitrary tabulated symbol (e.g. a product of symbols).
Field apply_symbol(const Field& u, const Eigen::ArrayXcd& values);

/// True when |hat u_0| is above round-off relative to the largest coefficient.
bool has_nonzero_mean(const Eigen::ArrayXcd& coefficients);

/// e^{-it Lambda^sigma} u.
Field schrodinger_propagate(const Field& u, double t, double sigma);

/// e^{tA} applied to (v, v_t) for the free fractional wave equation.
WaveState wave_propagate(const WaveState& state, double t, double sigma);

/// Spectral (zero-padded) evaluation of max |u| on a grid refined by `factor`.
double refined_max_abs(const Field& u, int factor = 4);

// --- snapshot files --------------------------------------------------------

/// Decoded snapshot: one Field (Schrodinger) or two components (wave).
struct SnapshotData {
  PeriodicGrid grid;
  std::vector<Eigen::ArrayXcd> components;
};

std::string encode_snapshot(const PeriodicGrid& grid, const std::vector<const Eigen::ArrayXcd*>& components);
std::string encode_snapshot(const Field& u);
std::string encode_snapshot(const WaveState& s);
SnapshotData decode_snapshot(const std::string& bytes);

void write_snapshot(const std::string& path, const Field& u);
void write_snapshot(const std::string& path, const WaveState& s);
SnapshotData read_snapshot(const std::string& path);

}  // namespace fraclab
