#include "fraclab/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "fraclab/errors.hpp"
#include "fraclab/field.hpp"

namespace fraclab {

PeriodicGrid PeriodicGrid::make(int d, int n, double box_length) {
  if (d < 1 || d > 3) throw DomainError("grid dimension must be 1, 2 or 3 (got " + std::to_string(d) + ")");
  if (n < 8 || (n & (n - 1)) != 0) throw DomainError("points per axis must be a power of two >= 8 (got " + std::to_string(n) + ")");
  if (!(box_length > 0.0) || !std::isfinite(box_length)) throw DomainError("box length must be positive and finite");

  auto data = std::make_shared<Data>();
  data->d = d;
  data->n = n;
  data->length = box_length;
  Eigen::Index size = 1;
  for (int a = 0; a < d; ++a) size *= n;
  data->size = size;
  data->cell = std::pow(box_length / n, d);
  data->volume = std::pow(box_length, d);

  const double dk = 2.0 * std::numbers::pi / box_length;
  const double dx = box_length / n;
  data->kmag = Eigen::ArrayXd::Zero(size);
  data->nyquist = Eigen::ArrayXd::Zero(size);
  data->dealias = Eigen::ArrayXd::Ones(size);
  for (int a = 0; a < d; ++a) {
    data->kvec[a].resize(size);
    data->modes[a].resize(size);
    data->coords[a].resize(size);
  }
  for (Eigen::Index flat = 0; flat < size; ++flat) {
    Eigen::Index rem = flat;
    double k2 = 0.0;
    for (int a = d - 1; a >= 0; --a) {
      const int j = static_cast<int>(rem % n);
      rem /= n;
      const int k = j < n / 2 ? j : j - n;
      data->modes[a][flat] = k;
      data->kvec[a][flat] = dk * k;
      data->coords[a][flat] = dx * j;
      k2 += (dk * k) * (dk * k);
      if (j == n / 2) data->nyquist[flat] = 1.0;
      if (3 * std::abs(k) >= n) data->dealias[flat] = 0.0;
    }
    data->kmag[flat] = std::sqrt(k2);
  }
  return PeriodicGrid(std::move(data));
}

Eigen::Index PeriodicGrid::coefficient_index(const int* k) const {
  const int n = data_->n;
  Eigen::Index flat = 0;
  for (int a = 0; a < data_->d; ++a) {
    if (k[a] < -n / 2 || k[a] >= n / 2) throw DomainError("mode outside the lattice");
    flat = flat * n + (k[a] >= 0 ? k[a] : k[a] + n);
  }
  return flat;
}

// ---------------------------------------------------------------------------

Field::Field(PeriodicGrid grid, Eigen::ArrayXcd values) : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw DomainError("field sample count " + std::to_string(values_.size()) + " does not match grid size " +
                      std::to_string(grid_.size()));
  if (!values_.allFinite()) throw NonFiniteError("field contains non-finite samples");
}

Field Field::zeros(const PeriodicGrid& grid) { return Field(grid, Eigen::ArrayXcd::Zero(grid.size())); }

Field Field::constant(const PeriodicGrid& grid, Complex value) {
  return Field(grid, Eigen::ArrayXcd::Constant(grid.size(), value));
}

Field Field::sample(const PeriodicGrid& grid, const std::function<Complex(const double* x)>& f) {
  Eigen::ArrayXcd v(grid.size());
  double x[3] = {0.0, 0.0, 0.0};
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    for (int a = 0; a < grid.dim(); ++a) x[a] = grid.coordinate(a)[i];
    v[i] = f(x);
  }
  return Field(grid, std::move(v));
}

Field operator+(const Field& a, const Field& b) {
  if (a.grid() != b.grid()) throw DomainError("field grids differ");
  return a.with_values(a.values() + b.values());
}

Field operator-(const Field& a, const Field& b) {
  if (a.grid() != b.grid()) throw DomainError("field grids differ");
  return a.with_values(a.values() - b.values());
}

Field operator*(Complex c, const Field& a) { return a.with_values(c * a.values()); }

WaveState::WaveState(Field position, Field velocity) : position_(std::move(position)), velocity_(std::move(velocity)) {
  if (position_.grid() != velocity_.grid()) throw DomainError("wave state components live on different grids");
}

}  // namespace fraclab
