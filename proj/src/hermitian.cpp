#include "dal/hermitian.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dal {
namespace {

constexpr cplx kI{0.0, 1.0};

cplx ipow(int e) {
  switch (((e % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

// Table of k x k minors det(h[I, K]) over k-subsets I, K of {0..n-1}.
CMatrix minors(const CMatrix& h, int k) {
  const int n = static_cast<int>(h.rows());
  const auto sets = subsets(n, k);
  const auto sz = static_cast<Eigen::Index>(sets.size());
  CMatrix out(sz, sz);
  if (k == 0) {
    out(0, 0) = 1.0;
    return out;
  }
  std::vector<int> rows(k), cols(k);
  CMatrix sub(k, k);
  for (Eigen::Index a = 0; a < sz; ++a) {
    int t = 0;
    for (int i = 0; i < n; ++i)
      if (sets[a] >> i & 1) rows[t++] = i;
    for (Eigen::Index b = 0; b < sz; ++b) {
      t = 0;
      for (int i = 0; i < n; ++i)
        if (sets[b] >> i & 1) cols[t++] = i;
      for (int r = 0; r < k; ++r)
        for (int c = 0; c < k; ++c) sub(r, c) = h(rows[r], cols[c]);
      out(a, b) = sub.determinant();
    }
  }
  return out;
}

CMatrix as_matrix(const Form& a) {
  CMatrix m(static_cast<Eigen::Index>(a.rows()), static_cast<Eigen::Index>(a.cols()));
  for (std::size_t i = 0; i < a.size(); ++i)
    m(static_cast<Eigen::Index>(i / a.cols()), static_cast<Eigen::Index>(i % a.cols())) = a[i];
  return m;
}

void check_same_space(const Form& a, const HermitianMetric& m) {
  if (a.n() != m.dim()) {
    std::ostringstream os;
    os << "form on C^" << a.n() << " used with metric of dimension " << m.dim();
    throw DegreeError(os.str());
  }
}

}  // namespace

HermitianMetric::HermitianMetric(CMatrix g) : g_(std::move(g)) {
  const auto n = g_.rows();
  if (n != g_.cols() || n < 1 || n > kMaxDim) throw MetricError("metric must be square with 1 <= n <= 8");
  if ((g_ - g_.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + g_.cwiseAbs().maxCoeff()))
    throw MetricError("metric is not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(g_);
  if (es.eigenvalues().minCoeff() <= 0.0) throw MetricError("metric is not positive definite");
  ginv_ = g_.inverse();

  const int dim = static_cast<int>(n);
  omega_ = Form(dim, 1, 1);
  for (int j = 0; j < dim; ++j)
    for (int k = 0; k < dim; ++k) omega_.at(Mask{1} << j, Mask{1} << k) = kI * g_(k, j);

  omega_powers_.reserve(static_cast<std::size_t>(dim) + 1);
  omega_powers_.push_back(scalar_form(dim, 1.0));
  for (int k = 1; k <= dim; ++k) omega_powers_.push_back(wedge(omega_powers_.back(), omega_));
  vol_coeff_ = omega_powers_.back()[0] / factorial(dim);
}

HermitianMetric HermitianMetric::identity(int n) { return HermitianMetric(CMatrix::Identity(n, n)); }

Form HermitianMetric::volume() const { return (1.0 / factorial(dim())) * omega_powers_.back(); }

Form lefschetz(const Form& a, const HermitianMetric& m) {
  check_same_space(a, m);
  return wedge(m.omega(), a);
}

Form lefschetz_power(const Form& a, const HermitianMetric& m, int r) {
  check_same_space(a, m);
  if (r == 0) return a;
  return wedge(m.omega_power(r), a);
}

Form contraction(const Form& a, const HermitianMetric& m) {
  check_same_space(a, m);
  const int n = a.n();
  if (a.p() == 0 || a.q() == 0) return Form(n, std::max(a.p() - 1, 0), std::max(a.q() - 1, 0));
  Form out(n, a.p() - 1, a.q() - 1);
  const CMatrix& ginv = m.inverse();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const cplx c = a[i];
    if (c == cplx{}) continue;
    const Mask hol = a.hol_mask(i);
    const Mask anti = a.anti_mask(i);
    const Mask full = hol | (anti << n);
    for (int j = 0; j < n; ++j) {
      if (!(hol >> j & 1)) continue;
      const int s1 = contraction_sign(full, j);
      const Mask full1 = full & ~(Mask{1} << j);
      for (int k = 0; k < n; ++k) {
        if (!(anti >> k & 1)) continue;
        const int s2 = contraction_sign(full1, n + k);
        out.at(hol & ~(Mask{1} << j), anti & ~(Mask{1} << k)) += -kI * ginv(j, k) * static_cast<double>(s1 * s2) * c;
      }
    }
  }
  return out;
}

Form contraction_power(const Form& a, const HermitianMetric& m, int r) {
  Form out = a;
  for (int i = 0; i < r; ++i) out = contraction(out, m);
  return out;
}

cplx inner(const Form& a, const Form& b, const HermitianMetric& m) {
  check_same_space(a, m);
  if (!a.same_shape(b)) return 0.0;  // different bidegrees are orthogonal
  const CMatrix d1 = minors(m.inverse(), a.p());
  const CMatrix d2 = minors(m.inverse().conjugate(), a.q());
  const CMatrix prod = as_matrix(a) * d2 * as_matrix(b).adjoint();
  return d1.cwiseProduct(prod).sum();
}

Form hodge_star(const Form& a, const HermitianMetric& m) {
  check_same_space(a, m);
  const int n = a.n();
  const int p = a.p();
  const int q = a.q();
  // Pair every basis element e_A of bidegree (q,p) with its complement:
  // e_A ^ star(a) = <e_A, conj a> vol.
  const Form b = conj(a);
  const CMatrix d1 = minors(m.inverse(), q);
  const CMatrix d2 = minors(m.inverse().conjugate(), p);
  const CMatrix pair = d1 * as_matrix(b).conjugate() * d2.transpose();
  const Mask all = (Mask{1} << n) - 1;
  const cplx v = m.volume_coefficient();
  Form out(n, n - q, n - p);
  const auto hol_sets = subsets(n, q);
  const auto anti_sets = subsets(n, p);
  for (std::size_t r = 0; r < hol_sets.size(); ++r) {
    for (std::size_t c = 0; c < anti_sets.size(); ++c) {
      const Mask ih = hol_sets[r];
      const Mask ia = anti_sets[c];
      const Mask ch = all & ~ih;
      const Mask ca = all & ~ia;
      const int s = merge_sign(ih | (ia << n), ch | (ca << n));
      out.at(ch, ca) = pair(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) * v * static_cast<double>(s);
    }
  }
  return out;
}

Form Sl2Decomposition::reassemble(const HermitianMetric& m) const {
  if (parts.empty()) throw DegreeError("empty decomposition");
  Form out = lefschetz_power(parts[0], m, powers[0]);
  for (std::size_t i = 1; i < parts.size(); ++i) out += lefschetz_power(parts[i], m, powers[i]);
  return out;
}

const Form* Sl2Decomposition::with_power(int r) const {
  for (std::size_t i = 0; i < powers.size(); ++i)
    if (powers[i] == r) return &parts[i];
  return nullptr;
}

Sl2Decomposition primitive_decompose(const Form& a, const HermitianMetric& m) {
  check_same_space(a, m);
  const int n = a.n();
  const int k = a.degree();
  const int rmax = std::min(a.p(), a.q());
  const int rmin = std::max(0, k - n);
  Sl2Decomposition out;
  Form residual = a;
  // Lambda^r L^r P = prod_{i=1..r} i (n - deg P - i + 1) P for primitive P, and
  // Lambda^r kills L^j P' for j < r, so peel components from the top.
  for (int r = rmax; r >= rmin; --r) {
    const int deg = k - 2 * r;
    double coef = 1.0;
    for (int i = 1; i <= r; ++i) coef *= static_cast<double>(i * (n - deg - i + 1));
    if (std::abs(coef) < 1e-300) throw MetricError("singular Lefschetz system");
    Form part = (1.0 / coef) * contraction_power(residual, m, r);
    residual -= lefschetz_power(part, m, r);
    out.parts.push_back(std::move(part));
    out.powers.push_back(r);
  }
  // Primitive forms of degree > n vanish; keep them as explicit zeros so the
  // decomposition always lists exponents 0..min(p,q).
  for (int r = rmin - 1; r >= 0; --r) {
    out.parts.push_back(Form(n, a.p() - r, a.q() - r));
    out.powers.push_back(r);
  }
  std::reverse(out.parts.begin(), out.parts.end());
  std::reverse(out.powers.begin(), out.powers.end());
  return out;
}

Form hodge_star_primitive(const Form& a, const HermitianMetric& m) {
  const int n = a.n();
  const auto dec = primitive_decompose(a, m);
  Form out(n, n - a.q(), n - a.p());
  for (std::size_t i = 0; i < dec.parts.size(); ++i) {
    const Form& pr = dec.parts[i];
    const int r = dec.powers[i];
    const int k = pr.degree();
    const int e = n - k - r;
    if (e < 0) continue;  // L^r P vanishes
    const double sign = ((k * (k + 1) / 2) & 1) ? -1.0 : 1.0;
    const cplx factor = sign * factorial(r) / factorial(e) * ipow(pr.p() - pr.q());
    out += factor * lefschetz_power(pr, m, e);
  }
  return out;
}

double trace_11(const Form& a, const HermitianMetric& m) {
  check_same_space(a, m);
  if (a.p() != 1 || a.q() != 1) throw DegreeError("trace_11 needs a (1,1)-form, got " + a.describe());
  const int n = a.n();
  cplx t{};
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) t += m.inverse()(j, k) * a.at(Mask{1} << j, Mask{1} << k);
  return (-kI * t).real();
}

double uniform_pm1(std::mt19937_64& rng) {
  // 53-bit mantissa from the raw engine output keeps this implementation-independent.
  return static_cast<double>(rng() >> 11) * 0x1.0p-52 - 1.0;
}

HermitianMetric random_metric(int n, std::mt19937_64& rng) {
  CMatrix mm(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) mm(i, j) = cplx(uniform_pm1(rng), uniform_pm1(rng));
  CMatrix g = CMatrix::Identity(n, n) + 0.3 * (mm + mm.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(g);
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.1);
  g = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
  g = 0.5 * (g + g.adjoint()).eval();
  return HermitianMetric(g);
}

Form random_form(int n, int p, int q, std::mt19937_64& rng) {
  Form f(n, p, q);
  for (auto& c : f.coeffs()) c = cplx(uniform_pm1(rng), uniform_pm1(rng));
  return f;
}

Form random_real_form(int n, int p, std::mt19937_64& rng) { return real_part(random_form(n, p, p, rng)); }

Form random_primitive(int n, int p, int q, const HermitianMetric& m, std::mt19937_64& rng) {
  const auto dec = primitive_decompose(random_form(n, p, q, rng), m);
  if (const Form* f = dec.with_power(0)) return *f;
  return Form(n, p, q);
}

}  // namespace dal
