#pragma once

#include <cmath>
#include <random>

#include "fraclab/field.hpp"
#include "fraclab/spectral.hpp"

namespace testing {

inline constexpr double kPi = 3.14159265358979323846;

/// Random coefficients on |k|_inf < cap, zero elsewhere.
inline fraclab::Field band_limited(const fraclab::PeriodicGrid& g, std::mt19937_64& rng, int cap,
                                   bool mean_free = false) {
  std::normal_distribution<double> z(0.0, 1.0);
  Eigen::ArrayXcd c = Eigen::ArrayXcd::Zero(g.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    bool inside = true;
    for (int a = 0; a < g.dim(); ++a) inside = inside && std::abs(g.mode(a)(i)) < cap;
    if (inside) c(i) = {z(rng), z(rng)};
  }
  if (mean_free) c(0) = 0.0;
  return fraclab::inverse_transform(g, c);
}

/// e^{i xi.x} for integer modes k.
inline fraclab::Field plane_wave(const fraclab::PeriodicGrid& g, const int* k) {
  const double L = g.box_length();
  const int d = g.dim();
  return fraclab::Field::sample(g, [&](const double* x) {
    double ph = 0.0;
    for (int a = 0; a < d; ++a) ph += 2.0 * kPi * k[a] / L * x[a];
    return std::polar(1.0, ph);
  });
}

inline double l2(const fraclab::Field& u) { return std::sqrt(u.grid().cell_volume() * u.values().abs2().sum()); }

inline double rel_diff(const fraclab::Field& a, const fraclab::Field& b) {
  const double ref = (a.values().abs() + b.values().abs()).maxCoeff();
  return (a.values() - b.values()).abs().maxCoeff() / (ref > 0.0 ? ref : 1.0);
}

}  // namespace testing
