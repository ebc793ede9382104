#pragma once

// Metric-dependent operations on (p,q)-forms: Lefschetz L, its adjoint
// contraction Lambda, the Gram inner product, the Hodge star and the
// primitive (Lefschetz) decomposition.
//
// Conventions (all sign and i-power choices live here):
//   omega        = i g_{kbar j} dz^j ^ dzbar^k, stored as g(k, j) = g_{kbar j}
//   g^{j kbar}   = inverse()(j, k)
//   <dz^a, dz^b> = g^{a bbar}, <dzbar^a, dzbar^b> = conj(g^{a bbar}), induced
//                  Gram determinants on multi-vectors
//   vol          = omega^n / n!
//   star         complex-linear, a ^ star(conj b) = <a, b> vol
//   Lambda       = -i g^{j kbar} i(d/dzbar^k) i(d/dz^j), the adjoint of L
//   tr(a)        defined by n a ^ omega^{n-1} = tr(a) omega^n, equal to Lambda a
//
// With these choices star(L^r P) = (-1)^{k(k+1)/2} r!/(n-k-r)! L^{n-k-r} I(P)
// for primitive P of degree k, I = i^{p-q} on (p,q)-forms.

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "dal/forms.hpp"

namespace dal {

using CMatrix = Eigen::MatrixXcd;

class MetricError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Positive-definite Hermitian metric at a point; g(k, j) = g_{kbar j}.
class HermitianMetric {
 public:
  explicit HermitianMetric(CMatrix g);
  static HermitianMetric identity(int n);

  int dim() const { return static_cast<int>(g_.rows()); }
  const CMatrix& g() const { return g_; }
  /// inverse()(j, k) = g^{j kbar}.
  const CMatrix& inverse() const { return ginv_; }
  const Form& omega() const { return omega_; }
  /// omega^k (cached for all k).
  const Form& omega_power(int k) const { return omega_powers_.at(static_cast<std::size_t>(k)); }
  /// Coefficient v with omega^n/n! = v dz^1..dz^n dzbar^1..dzbar^n.
  cplx volume_coefficient() const { return vol_coeff_; }
  Form volume() const;

 private:
  CMatrix g_;
  CMatrix ginv_;
  Form omega_;
  std::vector<Form> omega_powers_;
  cplx vol_coeff_;
};

Form lefschetz(const Form& a, const HermitianMetric& m);
Form lefschetz_power(const Form& a, const HermitianMetric& m, int r);
Form contraction(const Form& a, const HermitianMetric& m);
Form contraction_power(const Form& a, const HermitianMetric& m, int r);

/// Hermitian Gram inner product, linear in the first slot.
cplx inner(const Form& a, const Form& b, const HermitianMetric& m);

/// Hodge star from the defining pairing, solved against the Gram matrix.
Form hodge_star(const Form& a, const HermitianMetric& m);

/// a = sum_r L^r parts[r], each part primitive (Lambda parts[r] = 0).
struct Sl2Decomposition {
  std::vector<Form> parts;   // parts[i] has Lefschetz exponent powers[i]
  std::vector<int> powers;

  Form reassemble(const HermitianMetric& m) const;
  /// Component with Lefschetz exponent r, or a zero form of matching shape.
  const Form* with_power(int r) const;
};

Sl2Decomposition primitive_decompose(const Form& a, const HermitianMetric& m);

/// Hodge star assembled from the primitive decomposition and the closed-form
/// star of L^r P.
Form hodge_star_primitive(const Form& a, const HermitianMetric& m);

/// Trace of a (1,1)-form by direct index contraction g^{j kbar} a_{kbar j}.
double trace_11(const Form& a, const HermitianMetric& m);

// Random data (uniform in [-1,1] for each real component).

HermitianMetric random_metric(int n, std::mt19937_64& rng);
Form random_form(int n, int p, int q, std::mt19937_64& rng);
Form random_real_form(int n, int p, std::mt19937_64& rng);
Form random_primitive(int n, int p, int q, const HermitianMetric& m, std::mt19937_64& rng);
double uniform_pm1(std::mt19937_64& rng);

}  // namespace dal
