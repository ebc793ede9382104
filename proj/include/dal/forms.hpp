#pragma once

// Pointwise exterior algebra of (p,q)-forms on C^n.
//
// A (p,q)-form is stored densely over strictly increasing multi-indices
//   a = sum_{|I|=p, |J|=q} a_{IJ} dz^I ^ dzbar^J,
// with the holomorphic factor always written first. Indices are 0-based.

#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dal/combinatorics.hpp"

namespace dal {

using cplx = std::complex<double>;

/// Raised when a bidegree is out of range or two forms do not fit together.
class DegreeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class Form {
 public:
  Form() = default;
  /// Zero (p,q)-form on C^n.
  Form(int n, int p, int q);

  int n() const { return n_; }
  int p() const { return p_; }
  int q() const { return q_; }
  int degree() const { return p_ + q_; }
  std::size_t size() const { return coeffs_.size(); }
  std::size_t rows() const { return binomial(n_, p_); }
  std::size_t cols() const { return binomial(n_, q_); }

  std::span<cplx> coeffs() { return coeffs_; }
  std::span<const cplx> coeffs() const { return coeffs_; }

  /// Coefficient addressed by holomorphic / antiholomorphic index masks.
  cplx& at(Mask hol, Mask anti) { return coeffs_[subset_rank(n_, hol) * cols() + subset_rank(n_, anti)]; }
  cplx at(Mask hol, Mask anti) const {
    return coeffs_[subset_rank(n_, hol) * cols() + subset_rank(n_, anti)];
  }
  cplx& operator[](std::size_t i) { return coeffs_[i]; }
  cplx operator[](std::size_t i) const { return coeffs_[i]; }

  Mask hol_mask(std::size_t i) const { return subsets(n_, p_)[i / cols()]; }
  Mask anti_mask(std::size_t i) const { return subsets(n_, q_)[i % cols()]; }

  Form& operator+=(const Form& o);
  Form& operator-=(const Form& o);
  Form& operator*=(cplx s);

  double max_abs() const;
  bool same_shape(const Form& o) const { return n_ == o.n_ && p_ == o.p_ && q_ == o.q_; }

  std::string describe() const;

 private:
  int n_ = 0;
  int p_ = 0;
  int q_ = 0;
  std::vector<cplx> coeffs_;
};

Form operator+(Form a, const Form& b);
Form operator-(Form a, const Form& b);
Form operator-(Form a);
Form operator*(cplx s, Form a);
Form operator*(Form a, cplx s);

/// Max-norm of a - b; shapes must agree.
double max_diff(const Form& a, const Form& b);

/// Constant function s as a (0,0)-form.
Form scalar_form(int n, cplx s);
/// The value of a (0,0)-form.
cplx scalar_value(const Form& a);

/// dz^{j} or dzbar^{j}.
Form dz(int n, int j);
Form dzbar(int n, int j);
/// dz^I ^ dzbar^J for increasing 0-based index lists.
Form basis_form(int n, std::span<const int> hol, std::span<const int> anti);

Form wedge(const Form& a, const Form& b);

/// Complex conjugate; maps (p,q) to (q,p).
Form conj(const Form& a);

/// Whether conj(a) == a to tolerance (only meaningful for p == q).
bool is_real(const Form& a, double tol = 1e-12);

/// (a + conj a) / 2 for p == q.
Form real_part(const Form& a);

}  // namespace dal
