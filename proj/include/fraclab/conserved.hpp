#pragma once

#include "fraclab/exponents.hpp"
#include "fraclab/field.hpp"

namespace fraclab {

/// M_s and E_s (Schrodinger) or E_w (wave). `mass` is reported for both.
struct ConservedSet {
  double time = 0.0;
  double mass = 0.0;
  double energy = 0.0;
  double kinetic = 0.0;    // 1/2 ||Lambda^{sigma/2} u||^2, or the wave quadratic part
  double potential = 0.0;  // -mu/(nu+1) int |u|^{nu+1} (NLFS), +mu/(nu+1) int |v|^{nu+1} (NLFW)
};

/// |z|^e computed as exp(e log|z|), with 0^e = 0.
Eigen::ArrayXd abs_power(const Eigen::ArrayXcd& z, double e);

double mass(const Field& u);

ConservedSet conserved_set(const Field& u, const EquationParams<double>& params, double time = 0.0);
ConservedSet conserved_set(const WaveState& s, const EquationParams<double>& params, double time = 0.0);

}  // namespace fraclab
