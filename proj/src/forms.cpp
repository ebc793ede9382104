#include "dal/forms.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dal {
namespace {

void check_degrees(int n, int p, int q) {
  if (n < 1 || n > kMaxDim) throw DegreeError("complex dimension must lie in [1, 8]");
  if (p < 0 || q < 0 || p > n || q > n) {
    std::ostringstream os;
    os << "bidegree (" << p << "," << q << ") invalid for n=" << n;
    throw DegreeError(os.str());
  }
}

Mask mask_of(std::span<const int> idx, int n) {
  Mask m = 0;
  int prev = -1;
  for (int i : idx) {
    if (i <= prev || i >= n) throw DegreeError("multi-index must be strictly increasing and < n");
    m |= Mask{1} << i;
    prev = i;
  }
  return m;
}

}  // namespace

Form::Form(int n, int p, int q) : n_(n), p_(p), q_(q) {
  check_degrees(n, p, q);
  coeffs_.assign(binomial(n, p) * binomial(n, q), cplx{});
}

Form& Form::operator+=(const Form& o) {
  if (!same_shape(o)) throw DegreeError("adding forms of different shape: " + describe() + " + " + o.describe());
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
  return *this;
}

Form& Form::operator-=(const Form& o) {
  if (!same_shape(o)) throw DegreeError("subtracting forms of different shape: " + describe() + " - " + o.describe());
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
  return *this;
}

Form& Form::operator*=(cplx s) {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

double Form::max_abs() const {
  double m = 0.0;
  for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

std::string Form::describe() const {
  std::ostringstream os;
  os << "(" << p_ << "," << q_ << ")-form on C^" << n_;
  return os.str();
}

Form operator+(Form a, const Form& b) { return a += b; }
Form operator-(Form a, const Form& b) { return a -= b; }
Form operator-(Form a) { return a *= -1.0; }
Form operator*(cplx s, Form a) { return a *= s; }
Form operator*(Form a, cplx s) { return a *= s; }

double max_diff(const Form& a, const Form& b) { return (a - b).max_abs(); }

Form scalar_form(int n, cplx s) {
  Form f(n, 0, 0);
  f[0] = s;
  return f;
}

cplx scalar_value(const Form& a) {
  if (a.p() != 0 || a.q() != 0) throw DegreeError("expected a (0,0)-form, got " + a.describe());
  return a[0];
}

Form dz(int n, int j) {
  const int idx[] = {j};
  return basis_form(n, idx, {});
}

Form dzbar(int n, int j) {
  const int idx[] = {j};
  return basis_form(n, {}, idx);
}

Form basis_form(int n, std::span<const int> hol, std::span<const int> anti) {
  Form f(n, static_cast<int>(hol.size()), static_cast<int>(anti.size()));
  f.at(mask_of(hol, n), mask_of(anti, n)) = 1.0;
  return f;
}

Form wedge(const Form& a, const Form& b) {
  if (a.n() != b.n()) throw DegreeError("wedge of forms on different spaces");
  const int n = a.n();
  const int p = a.p() + b.p();
  const int q = a.q() + b.q();
  if (p > n || q > n) throw DegreeError("wedge degree overflow: " + a.describe() + " ^ " + b.describe());
  Form out(n, p, q);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const cplx ca = a[i];
    if (ca == cplx{}) continue;
    const Mask ah = a.hol_mask(i);
    const Mask aa = a.anti_mask(i);
    const Mask afull = ah | (aa << n);
    for (std::size_t j = 0; j < b.size(); ++j) {
      const cplx cb = b[j];
      if (cb == cplx{}) continue;
      const Mask bh = b.hol_mask(j);
      const Mask ba = b.anti_mask(j);
      if ((ah & bh) || (aa & ba)) continue;
      const int s = merge_sign(afull, bh | (ba << n));
      out.at(ah | bh, aa | ba) += static_cast<double>(s) * ca * cb;
    }
  }
  return out;
}

Form conj(const Form& a) {
  // conj(dz^I ^ dzbar^J) = dzbar^I ^ dz^J = (-1)^{pq} dz^J ^ dzbar^I
  Form out(a.n(), a.q(), a.p());
  const double s = ((a.p() * a.q()) & 1) ? -1.0 : 1.0;
  for (std::size_t i = 0; i < a.size(); ++i) out.at(a.anti_mask(i), a.hol_mask(i)) = s * std::conj(a[i]);
  return out;
}

bool is_real(const Form& a, double tol) {
  if (a.p() != a.q()) return false;
  return max_diff(conj(a), a) <= tol;
}

Form real_part(const Form& a) {
  if (a.p() != a.q()) throw DegreeError("real_part needs p == q, got " + a.describe());
  return 0.5 * (a + conj(a));
}

}  // namespace dal
