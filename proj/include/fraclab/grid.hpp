#pragma once

#include <memory>

#include <Eigen/Core>

namespace fraclab {

/// Uniform periodic grid on the torus [0, L)^d with n points per axis.
///
/// Samples and Fourier coefficients are stored row-major (axis 0 slowest).
/// Coefficient index j on an axis maps to the integer mode k = j for
/// j < n/2 and k = j - n otherwise, so the lone k = -n/2 entry is the
/// Nyquist mode. Wavenumbers are xi = 2 pi k / L.
///
/// Copies are cheap: the lattice tables are shared and immutable.
class PeriodicGrid {
 public:
  /// Throws DomainError unless d in {1,2,3}, n a power of two >= 8 and L > 0.
  static PeriodicGrid make(int d, int n, double box_length);

  int dim() const { return data_->d; }
  int points_per_axis() const { return data_->n; }
  double box_length() const { return data_->length; }
  Eigen::Index size() const { return data_->size; }

  double spacing() const { return data_->length / data_->n; }
  /// Quadrature weight of one sample, (L/n)^d.
  double cell_volume() const { return data_->cell; }
  /// L^d.
  double volume() const { return data_->volume; }

  /// |xi| at every coefficient index.
  const Eigen::ArrayXd& wavenumber_magnitude() const { return data_->kmag; }
  /// xi component along `axis` at every coefficient index.
  const Eigen::ArrayXd& wavevector(int axis) const { return data_->kvec[axis]; }
  /// Integer mode along `axis` at every coefficient index.
  const Eigen::ArrayXi& mode(int axis) const { return data_->modes[axis]; }
  /// Physical coordinate along `axis` at every sample index.
  const Eigen::ArrayXd& coordinate(int axis) const { return data_->coords[axis]; }
  /// 1 where any axis sits on the Nyquist mode, 0 elsewhere.
  const Eigen::ArrayXd& nyquist_mask() const { return data_->nyquist; }
  /// 1 where every axis satisfies |k| < n/3 (two-thirds rule), 0 elsewhere.
  const Eigen::ArrayXd& dealias_mask() const { return data_->dealias; }

  double min_nonzero_wavenumber() const { return 2.0 * 3.14159265358979323846 / data_->length; }
  double max_wavenumber() const { return data_->kmag.maxCoeff(); }

  /// Flat index of the coefficient carrying integer modes `k` (k[axis] in [-n/2, n/2)).
  Eigen::Index coefficient_index(const int* k) const;

  friend bool operator==(const PeriodicGrid& a, const PeriodicGrid& b) {
    return a.data_ == b.data_ ||
           (a.dim() == b.dim() && a.points_per_axis() == b.points_per_axis() && a.box_length() == b.box_length());
  }
  friend bool operator!=(const PeriodicGrid& a, const PeriodicGrid& b) { return !(a == b); }

 private:
  struct Data {
    int d = 1;
    int n = 8;
    double length = 1.0;
    Eigen::Index size = 0;
    double cell = 0.0;
    double volume = 0.0;
    Eigen::ArrayXd kmag;
    Eigen::ArrayXd kvec[3];
    Eigen::ArrayXi modes[3];
    Eigen::ArrayXd coords[3];
    Eigen::ArrayXd nyquist;
    Eigen::ArrayXd dealias;
  };
  explicit PeriodicGrid(std::shared_ptr<const Data> data) : data_(std::move(data)) {}
  std::shared_ptr<const Data> data_;
};

/// Free-function spelling of PeriodicGrid::make.
inline PeriodicGrid make_grid(int d, int n, double box_length) { return PeriodicGrid::make(d, n, box_length); }

}  // namespace fraclab
