#pragma once

// Uniform periodic grids in 1 to 3 real dimensions and the finite-difference
// operators the reductions share.

#include <array>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace dal {

class GridError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Real samples on a periodic box [0,L_0) x ... x [0,L_{d-1}), last axis fastest.
class PeriodicField {
 public:
  PeriodicField() = default;
  PeriodicField(std::vector<int> dims, std::vector<double> lengths, double value = 0.0);

  int dimension() const { return static_cast<int>(dims_.size()); }
  int size(int axis) const { return dims_[static_cast<std::size_t>(axis)]; }
  double length(int axis) const { return lengths_[static_cast<std::size_t>(axis)]; }
  double spacing(int axis) const { return length(axis) / size(axis); }
  const std::vector<int>& dims() const { return dims_; }
  const std::vector<double>& lengths() const { return lengths_; }
  std::size_t count() const { return data_.size(); }
  double cell_volume() const;
  double volume() const;

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }
  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  /// Flat index of a multi-index; every component is wrapped periodically.
  std::size_t index(const std::array<int, 3>& ijk) const;
  std::array<int, 3> multi_index(std::size_t flat) const;
  /// Coordinate x_axis = i * h_axis of a flat index.
  std::array<double, 3> position(std::size_t flat) const;

  bool same_grid(const PeriodicField& o) const;
  /// Fills samples from f(x) with x padded to three components.
  void fill(const std::function<double(const std::array<double, 3>&)>& f);

  double min() const;
  double max() const;
  std::size_t argmin() const;
  std::size_t argmax() const;
  double sum() const;
  /// Periodic trapezoid (= midpoint) rule.
  double integral() const { return sum() * cell_volume(); }
  double mean() const { return sum() / static_cast<double>(count()); }
  bool all_finite() const;

  PeriodicField& operator+=(const PeriodicField& o);
  PeriodicField& operator-=(const PeriodicField& o);
  PeriodicField& operator*=(double s);

 private:
  std::vector<int> dims_;
  std::vector<double> lengths_;
  std::vector<double> data_;
};

PeriodicField operator+(PeriodicField a, const PeriodicField& b);
PeriodicField operator-(PeriodicField a, const PeriodicField& b);
PeriodicField operator*(double s, PeriodicField a);
/// Grid inner product sum f h * cell volume.
double dot(const PeriodicField& f, const PeriodicField& h);
/// Applies a pointwise map.
PeriodicField map(const PeriodicField& f, const std::function<double(double)>& fn);

/// Centered Laplacian of order 2 or 4.
PeriodicField laplacian(const PeriodicField& f, int order = 2);
/// Centered first derivative (order 2).
PeriodicField derivative(const PeriodicField& f, int axis);
/// Centered second derivative d^2 f / dx^a dx^b (order 2).
PeriodicField second_derivative(const PeriodicField& f, int a, int b);

/// Hessian components H[a][b] (symmetric, filled for all a, b).
using HessianField = std::array<std::array<PeriodicField, 3>, 3>;
HessianField hessian(const PeriodicField& f);
/// det(background * I + centered Hessian of phi) pointwise, d in {1,2,3}.
PeriodicField hessian_det(const PeriodicField& phi, double background = 0.0);

/// Periodic tensor-product cubic Lagrange interpolation at an arbitrary point.
double interpolate_cubic(const PeriodicField& f, const std::array<double, 3>& x);

/// Periodic C^2 cubic B-spline interpolant of grid samples, with analytic
/// first and second derivatives.
class PeriodicSpline {
 public:
  explicit PeriodicSpline(const PeriodicField& f);
  double value(const std::array<double, 3>& x) const;
  /// Value, gradient and Hessian at x (unused axes are zero).
  double evaluate(const std::array<double, 3>& x, std::array<double, 3>& grad,
                  std::array<std::array<double, 3>, 3>& hess) const;
  const PeriodicField& coefficients() const { return coef_; }

 private:
  PeriodicField coef_;
};

/// Forward-difference Dirichlet energy (1/2) sum |grad_h f|^2 * cell volume,
/// the quadratic form of the 5-point (order 2) Laplacian.
double dirichlet_energy(const PeriodicField& f);

}  // namespace dal
