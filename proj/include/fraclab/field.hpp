#pragma once

#include <complex>
#include <functional>

#include <Eigen/Core>

#include "fraclab/grid.hpp"

namespace fraclab {

using Complex = std::complex<double>;

/// Complex samples of a function on a PeriodicGrid. Immutable value; every
/// constructor rejects a wrong sample count or any non-finite sample.
class Field {
 public:
  Field(PeriodicGrid grid, Eigen::ArrayXcd values);

  static Field zeros(const PeriodicGrid& grid);
  static Field constant(const PeriodicGrid& grid, Complex value);
  /// Samples f(x) where x holds the d coordinates of each grid point.
  static Field sample(const PeriodicGrid& grid, const std::function<Complex(const double* x)>& f);

  const PeriodicGrid& grid() const { return grid_; }
  const Eigen::ArrayXcd& values() const { return values_; }
  Eigen::Index size() const { return values_.size(); }

  Field with_values(Eigen::ArrayXcd values) const { return Field(grid_, std::move(values)); }

  friend Field operator+(const Field& a, const Field& b);
  friend Field operator-(const Field& a, const Field& b);
  friend Field operator*(Complex c, const Field& a);

 private:
  PeriodicGrid grid_;
  Eigen::ArrayXcd values_;
};

/// (v, dv/dt) of the wave equation; both components live on one grid.
class WaveState {
 public:
  WaveState(Field position, Field velocity);

  const Field& position() const { return position_; }
  const Field& velocity() const { return velocity_; }
  const PeriodicGrid& grid() const { return position_.grid(); }

 private:
  Field position_;
  Field velocity_;
};

}  // namespace fraclab
