#pragma once

// Reductions of the dual Anomaly flow (and the conformally Kahler semi-flat
// Anomaly flow) to scalar ODEs and PDEs, with the per-reduction dilaton and
// volume models used by the functionals.

#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "dal/grid.hpp"
#include "dal/integrator.hpp"

namespace dal {

enum class ReductionKind {
  inverse_ma,
  calabi_gray,
  product_fibration,
  iwasawa,
  sl2c,
  anomaly_ck_semiflat,
  dual_anomaly_semiflat,
};

std::string to_string(ReductionKind k);
/// Throws std::invalid_argument on unknown names.
ReductionKind parse_reduction_kind(const std::string& name);
bool is_scalar_ode(ReductionKind k);

struct ReductionParams {
  ReductionKind kind = ReductionKind::product_fibration;
  int n = 3;                 // ambient complex dimension
  int grid = 64;             // points per axis
  double length = 0.0;       // period; 0 selects the per-kind default
  int laplacian_order = 2;
  double amplitude = 0.0;    // initial perturbation size; 0 selects the per-kind default
  double r = 0.0;            // R for iwasawa (R = e^{2 u0}) and sl2c (rho0 = R); 0 selects 1 / 2
  double kappa = -1.0;       // constant Gauss curvature for calabi_gray
  std::uint64_t seed = 1;
};

/// A reduction ready to integrate. For grid kinds the state is the flattened
/// field on `grid`; scalar ODEs carry a one-component state.
struct Reduction {
  ReductionParams params;
  PeriodicField grid;  // template (unused for scalar ODEs)
  State initial;
  FlowSystem system;
  bool dual_flow = true;  // false for the Anomaly flow
  /// Quadrature weight per state component (cell volume, or V_hat for ODEs).
  double weight = 1.0;
  /// Pointwise dilaton ||Omega||_omega and volume density of the flow metric.
  std::function<void(const State&, State& dilaton, State& volume)> dilaton_volume;
  std::vector<std::string> conservation_names;
  std::function<std::vector<double>(const State&)> conservation;
  /// Dirichlet energy where the reduction defines one.
  std::function<double(const State&)> dirichlet;
  /// |numeric - closed form| at time t for reductions with explicit solutions.
  std::function<double(double, const State&)> closed_form_error;
  /// Distance of the state from the flow's stationary (Kahler Ricci-flat) set.
  std::function<double(const State&)> stationary_residual;

  PeriodicField as_field(const State& y) const;
  /// max |y'| over the state.
  double velocity_norm(const State& y) const;
};

Reduction make_reduction(const ReductionParams& p);

/// Smooth random periodic field: a seeded combination of Fourier modes with
/// |k_i| <= modes, rescaled to max |f| = amplitude and zero mean.
PeriodicField smooth_random_field(const PeriodicField& grid, std::mt19937_64& rng, int modes, double amplitude);

// Right-hand sides, exposed for direct testing.

/// phi' = 1 - e^{rho0 + c} / (1 + Lap phi)
void rhs_inverse_ma(const PeriodicField& phi, const PeriodicField& e_rho_c, int order, PeriodicField& out);
/// u' = (u^2/4)(Lap u - 2 kappa u)
void rhs_calabi_gray(const PeriodicField& u, double kappa, int order, PeriodicField& out);
/// u' = (u^2/4) Lap u
void rhs_product_fibration(const PeriodicField& u, int order, PeriodicField& out);
/// u' = -e^{-2u}/2
double rhs_iwasawa(double u);
/// rho' = -1
double rhs_sl2c(double rho);
/// phi' = (det(I + Hess phi) - mean) / (2(n-1))
void rhs_anomaly_ck_semiflat(const PeriodicField& phi, int n, PeriodicField& out);
/// chi' = -(det(I + Hess chi)^{-1} - mean) / (2(n-1))
void rhs_dual_anomaly_semiflat(const PeriodicField& chi, int n, PeriodicField& out);

/// Calabi-Gray synthetic eigen-data on the flat torus: alpha = sin(2 pi x / Lx),
/// beta = cos(2 pi x / Lx), gamma = 0, with Lx tuned so the discrete Laplacian
/// of order `order` has eigenvalue 2 kappa on this mode.
struct CalabiGrayData {
  PeriodicField alpha, beta, gamma;
  double kappa = -1.0;
  double unit_norm_residual() const;
  double eigen_residual(int order) const;
};
double calabi_gray_period(int n_points, double kappa, int order);
CalabiGrayData calabi_gray_data(const PeriodicField& grid, double kappa);

}  // namespace dal
