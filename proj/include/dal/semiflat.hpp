#pragma once

// Semi-flat toolkit on a flat d-torus base: Hessian metrics g = I + Hess phi
// of the potential |x|^2/2 + phi, the Legendre transform to the dual affine
// coordinates y = x + grad phi, and the T-duality residual of the semi-flat
// flows.

#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dal/grid.hpp"

namespace dal {

/// Loss of strict convexity (or a Legendre map that folds over).
class ConvexityError : public std::runtime_error {
 public:
  ConvexityError(const std::string& what, std::size_t witness, double value)
      : std::runtime_error(what), witness(witness), value(value) {}
  std::size_t witness;  // flat grid index
  double value;         // offending determinant or eigenvalue
};

/// Pointwise metric g_ab = delta_ab + d_a d_b phi (order 2 stencils).
struct MetricField {
  HessianField g;
  PeriodicField det;
  PeriodicField min_eigenvalue;
  /// ||Omega|| = det(g)^{-1/2}.
  PeriodicField dilaton() const;
};
/// Throws ConvexityError at the first point where g is not positive definite.
MetricField metric_from_potential(const PeriodicField& phi);

/// phi on the x grid and its transform chi on the uniform y grid (same box):
/// |y|^2/2 + chi(y) = x.y - |x|^2/2 - phi(x) at y = x + grad phi(x).
struct LegendrePair {
  PeriodicField phi;
  PeriodicField chi;
  /// Preimage x(y) of every dual grid point, unwrapped (x near y).
  std::array<PeriodicField, 3> preimage;
  int newton_iterations = 0;  // worst case over the grid
};

/// Exact transform of the C^2 cubic spline interpolant of phi: the map
/// y = x + grad phi is inverted pointwise by Newton's method on the spline.
LegendrePair legendre_transform(const PeriodicField& phi);
/// The transform is an involution; this transforms chi back to the x grid.
PeriodicField legendre_inverse(const LegendrePair& lp);

/// max |phi - inverse(transform(phi))|.
double involution_residual(const PeriodicField& phi);
/// max over dual grid points of |G(y) g(x(y)) - I|, G = I + Hess chi on the
/// grid and g from the spline of phi.
double inverse_hessian_residual(const LegendrePair& lp);

enum class DualityKind { kahler_ricci, anomaly };
std::string to_string(DualityKind k);
/// Throws std::invalid_argument on unknown names.
DualityKind parse_duality_kind(const std::string& name);

/// Residual fields at one amplitude, reduced to max norms over the dual grid
/// and all metric components. "Even" is the part even in eps,
/// (R(eps) + R(-eps)) / 2, which cancels the discretization error of the
/// linear terms.
struct DualityReport {
  DualityKind kind = DualityKind::kahler_ricci;
  double eps = 0.0;
  /// Transported primal rate minus the dual flow's rate, even part.
  double second_order = 0.0;
  /// The same minus the first-order correction sum_q y'_q d_{y_q} g^{jk}.
  double corrected = 0.0;
  /// Odd part of the mismatch (the cancelled linear terms).
  double odd = 0.0;
  /// Size of the dual rate itself, for scale.
  double dual_rate = 0.0;
};

/// phi = eps * seed on the grid of `seed`; d = n.
DualityReport duality_residual(DualityKind kind, const PeriodicField& seed, double eps);

struct DualitySweep {
  DualityKind kind = DualityKind::kahler_ricci;
  std::vector<DualityReport> reports;
  /// Least-squares slopes of log residual against log eps.
  double exponent_second_order = 0.0;
  double exponent_corrected = 0.0;
};
DualitySweep duality_sweep(DualityKind kind, const PeriodicField& seed, const std::vector<double>& eps);

/// Smooth periodic seed with second derivatives of order one, suitable for
/// eps-small potentials on a box of period `length`.
PeriodicField duality_seed(int dimension, int n_points, double length, std::uint64_t seed);

/// Least-squares slope of log y against log x.
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace dal
