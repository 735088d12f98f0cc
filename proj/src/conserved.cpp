#include "fraclab/conserved.hpp"

#include <cmath>

#include "fraclab/spectral.hpp"

namespace fraclab {

Eigen::ArrayXd abs_power(const Eigen::ArrayXcd& z, double e) {
  Eigen::ArrayXd a = z.abs();
  if (e == 1.0) return a;
  if (e == 2.0) return a.square();
  for (Eigen::Index i = 0; i < a.size(); ++i) a[i] = a[i] > 0.0 ? std::exp(e * std::log(a[i])) : 0.0;
  return a;
}

double mass(const Field& u) { return u.grid().cell_volume() * u.values().abs2().sum(); }

namespace {

// The Schrodinger flow as written conserves the kinetic term minus this
// integral; the wave flow conserves the sum.
double potential_integral(const Field& u, const EquationParams<double>& p) {
  return p.mu / (p.nu + 1.0) * u.grid().cell_volume() * abs_power(u.values(), p.nu + 1.0).sum();
}

// sum over modes of |xi|^{2s} |hat u|^2 times L^d, i.e. ||Lambda^s u||^2.
double homogeneous_square(const Field& u, double s) {
  const Eigen::ArrayXcd c = forward_transform(u);
  const Eigen::ArrayXd& k = u.grid().wavenumber_magnitude();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < c.size(); ++i)
    if (k[i] > 0.0) acc += std::pow(k[i], 2.0 * s) * std::norm(c[i]);
  return u.grid().volume() * acc;
}

}  // namespace

ConservedSet conserved_set(const Field& u, const EquationParams<double>& p, double time) {
  ConservedSet c;
  c.time = time;
  c.mass = mass(u);
  c.kinetic = 0.5 * homogeneous_square(u, 0.5 * p.sigma);
  c.potential = -potential_integral(u, p);
  c.energy = c.kinetic + c.potential;
  return c;
}

ConservedSet conserved_set(const WaveState& s, const EquationParams<double>& p, double time) {
  ConservedSet c;
  c.time = time;
  c.mass = mass(s.position());
  c.kinetic = 0.5 * mass(s.velocity()) + 0.5 * homogeneous_square(s.position(), p.sigma);
  c.potential = potential_integral(s.position(), p);
  c.energy = c.kinetic + c.potential;
  return c;
}

}  // namespace fraclab
