#pragma once

// Torsion tensors of a Hermitian metric at a point and machine checks of the
// algebraic identities relating them.
//
// Normalizations:
//   T      = (1/2) T_{kbar j l} dz^l ^ dz^j ^ dzbar^k,   T_{kbar j l} = -T_{kbar l j}
//   tau_l  = g^{j kbar} T_{kbar j l}
//   |T|^2  = g^{j kbar} g^{s ubar} g^{t vbar} T_{kbar s t} conj(T_{jbar u v})
//   |tau|^2 = g^{j kbar} tau_j conj(tau_k)
//   d omega = -i T, dbar omega = i conj(T)
// The codifferentials dbar* omega and d* omega are evaluated pointwise as
// -star(d omega ^ omega^{n-2})/(n-2)! and its conjugate counterpart; only
// first derivatives of g enter.

#include <optional>
#include <string>
#include <vector>

#include "dal/hermitian.hpp"

namespace dal {

/// T_{kbar j l} stored densely; index order (k, j, l).
class TorsionTensor {
 public:
  explicit TorsionTensor(int n) : n_(n), data_(static_cast<std::size_t>(n * n * n)) {}

  int dim() const { return n_; }
  cplx operator()(int k, int j, int l) const { return data_[index(k, j, l)]; }
  /// Sets T_{kbar j l} = v and T_{kbar l j} = -v.
  void set(int k, int j, int l, cplx v);
  bool antisymmetric(double tol = 1e-14) const;

 private:
  std::size_t index(int k, int j, int l) const { return static_cast<std::size_t>((k * n_ + j) * n_ + l); }
  int n_;
  std::vector<cplx> data_;
};

TorsionTensor random_torsion(int n, std::mt19937_64& rng);

struct HermitianPointData {
  HermitianMetric metric;
  TorsionTensor torsion;
  Form rho;          // real (1,1) stand-in for the Chern-Ricci form
  Form ddbar_omega;  // real (2,2) stand-in for i d dbar omega
};

HermitianPointData random_point_data(int n, std::mt19937_64& rng);

struct TorsionContractions {
  Form tau;     // (1,0)
  Form box;     // i T box conj(T), real (1,1)
  Form circ;    // i T circ conj(T), real (1,1)
  double norm_t2 = 0.0;
  double norm_tau2 = 0.0;
};

TorsionContractions build_contractions(const HermitianPointData& d);

/// The (2,1)-form T.
Form torsion_form(const TorsionTensor& t);
/// dbar* omega, a (1,0)-form, through the star of d omega ^ omega^{n-2}.
Form dbar_star_omega(const HermitianMetric& m, const TorsionTensor& t);
/// d* omega, a (0,1)-form, through the star of dbar omega ^ omega^{n-2}.
Form d_star_omega(const HermitianMetric& m, const TorsionTensor& t);
/// Positive-semidefiniteness of a real (1,1)-form as a Hermitian matrix.
double min_eigenvalue_11(const Form& a);

/// One checked line of an identity.
struct IdentityLine {
  std::string name;
  double residual = 0.0;
  bool verified = true;  // false for logged-only quantities
  double value = 0.0;    // logged quantity when !verified
};

struct IdentityReport {
  std::vector<IdentityLine> lines;
  double tolerance = 1e-10;

  double max_residual() const;
  /// Name of the first verified line above tolerance.
  std::optional<std::string> failed_line() const;
  bool ok() const { return !failed_line().has_value(); }
};

struct VerifyOptions {
  double tolerance = 1e-10;
  /// Negates one named term before comparing (negative-control hook).
  std::string inject_sign_flip;
};

/// Lambda of A, the torsion part of Lambda B, Lambda^2 C / 2 and Lambda^3 C / 6
/// with A = rho/(n-1) + 4i(n-2)/(n-1)^2 tau^taubar,
/// B = (2n-4)/(n-1)(T^taubar + Tbar^tau) + ddbar_omega, C = i T ^ Tbar.
IdentityReport verify_lambda_ladder(const HermitianPointData& d, const VerifyOptions& opt = {});

/// The n = 3 quadratic torsion identity for
/// Lambda(d*omega ^ d omega + dbar*omega ^ dbar omega).
IdentityReport verify_quadratic_torsion(const HermitianPointData& d, const VerifyOptions& opt = {});

/// Solves -(1/2) s tr(X) omega^{n-1} + (n-1) s X ^ omega^{n-2} = Phi for the
/// (1,1)-form X by a dense linear solve.
Form solve_metric_velocity(const Form& phi, const HermitianMetric& m, double dilaton);
/// Same solution through (n-1)! s X = -star Phi + tr(star Phi)/(n-2) omega.
Form metric_velocity_from_star(const Form& phi, const HermitianMetric& m, double dilaton);

/// Agreement of the two metric-velocity routes for a free real (n-1,n-1)-form.
IdentityReport verify_flow_rewrite(const HermitianMetric& m, const Form& phi, double dilaton,
                                   const VerifyOptions& opt = {});

/// For free real A (1,1), B (2,2), C (3,3) assembles
/// Phi = -(n-2) s^{2(n-2)/(n-1)} (A^w^{n-2} + B^w^{n-3} + (n-3) C^w^{n-4})
/// and compares the metric velocity with the closed Lambda-form
/// -s^{(n-3)/(n-1)}/(n-1) ((n-2)A + Lambda B + Lambda^2 C/2 + (Lambda A - Lambda^3 C/(6(n-2))) omega).
/// C is ignored for n = 3.
IdentityReport verify_velocity_formula(const HermitianMetric& m, const Form& a, const Form& b, const Form& c,
                                       double dilaton, const VerifyOptions& opt = {});

/// Star identities for free real A (1,1), B (2,2), C (3,3):
///   star(A ^ w^{n-2}) = -(n-2)! A + (n-2)! (Lambda A) w
///   star(B ^ w^{n-3}) = -(n-3)! Lambda B + (n-3)! (Lambda^2 B / 2) w
///   star(C ^ w^{n-4}) = (n-4)! ((Lambda^3 C / 6) w - Lambda^2 C / 2)       (n >= 4)
///   tr star(C ^ w^{n-4}) = (n-3)! Lambda^3 C / 6                           (n >= 4)
IdentityReport verify_star_formulas(const HermitianMetric& m, const Form& a, const Form& b, const Form& c,
                                    const VerifyOptions& opt = {});

/// Lefschetz ladder of a (3,3)-form C = P6 + P4 w + P2 w^2 + P0 w^3:
///   Lambda C       = (n-4) P4 + 2(n-3) P2 w + 3(n-2) P0 w^2
///   Lambda^2 C / 2 = (n-3)(n-2) P2 + 3(n-2)(n-1) P0 w
///   Lambda^3 C / 6 = (n-2)(n-1) n P0
/// `p4_coefficient` overrides the (n-4) factor of the first line.
IdentityReport verify_c_ladder(const Form& c, const HermitianMetric& m, std::optional<double> p4_coefficient = {},
                               const VerifyOptions& opt = {});

}  // namespace dal
