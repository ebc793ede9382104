#include "dal/pointwise.hpp"

#include <algorithm>
#include <cmath>

namespace dal {
namespace {

constexpr cplx kI{0.0, 1.0};

Mask bit(int i) { return Mask{1} << i; }

double scaled_residual(const Form& lhs, const Form& rhs) { return max_diff(lhs, rhs) / (1.0 + rhs.max_abs()); }

double scaled_residual(double lhs, double rhs) { return std::abs(lhs - rhs) / (1.0 + std::abs(rhs)); }

double flip(const VerifyOptions& opt, const std::string& name) { return opt.inject_sign_flip == name ? -1.0 : 1.0; }

void add_line(IdentityReport& rep, const VerifyOptions& opt, const std::string& name, const Form& lhs,
              const Form& rhs) {
  rep.lines.push_back({name, scaled_residual(lhs, flip(opt, name) * rhs), true, 0.0});
}

void add_line(IdentityReport& rep, const VerifyOptions& opt, const std::string& name, double lhs, double rhs) {
  rep.lines.push_back({name, scaled_residual(lhs, flip(opt, name) * rhs), true, 0.0});
}

double real_scalar(const Form& f) { return scalar_value(f).real(); }

struct TorsionForms {
  Form t;           // (2,1)
  Form tbar;        // (1,2)
  Form d_omega;     // (2,1)
  Form dbar_omega;  // (1,2)
  Form d_star;      // (0,1)
  Form dbar_star;   // (1,0)
};

TorsionForms torsion_forms(const HermitianMetric& m, const TorsionTensor& t) {
  TorsionForms f;
  f.t = torsion_form(t);
  f.tbar = conj(f.t);
  f.d_omega = -kI * f.t;
  f.dbar_omega = conj(f.d_omega);
  f.d_star = d_star_omega(m, t);
  f.dbar_star = dbar_star_omega(m, t);
  return f;
}

}  // namespace

void TorsionTensor::set(int k, int j, int l, cplx v) {
  data_[index(k, j, l)] = v;
  data_[index(k, l, j)] = -v;
}

bool TorsionTensor::antisymmetric(double tol) const {
  for (int k = 0; k < n_; ++k)
    for (int j = 0; j < n_; ++j)
      for (int l = 0; l < n_; ++l)
        if (std::abs((*this)(k, j, l) + (*this)(k, l, j)) > tol) return false;
  return true;
}

TorsionTensor random_torsion(int n, std::mt19937_64& rng) {
  TorsionTensor t(n);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int l = j + 1; l < n; ++l) t.set(k, j, l, cplx(uniform_pm1(rng), uniform_pm1(rng)));
  return t;
}

HermitianPointData random_point_data(int n, std::mt19937_64& rng) {
  auto metric = random_metric(n, rng);
  auto torsion = random_torsion(n, rng);
  auto rho = random_real_form(n, 1, rng);
  auto ddbar = random_real_form(n, 2, rng);
  return {std::move(metric), std::move(torsion), std::move(rho), std::move(ddbar)};
}

TorsionContractions build_contractions(const HermitianPointData& d) {
  const int n = d.metric.dim();
  const CMatrix& gi = d.metric.inverse();
  const TorsionTensor& t = d.torsion;
  TorsionContractions out;

  std::vector<cplx> tau(static_cast<std::size_t>(n));
  for (int l = 0; l < n; ++l)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) tau[l] += gi(j, k) * t(k, j, l);
  out.tau = Form(n, 1, 0);
  for (int l = 0; l < n; ++l) out.tau.at(bit(l), 0) = tau[l];

  cplx tau2{};
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) tau2 += gi(j, k) * tau[j] * std::conj(tau[k]);
  out.norm_tau2 = tau2.real();

  // Contract the second T index once with the first conjugate index ("box")
  // or the first T index pair ("circ").
  out.box = Form(n, 1, 1);
  out.circ = Form(n, 1, 1);
  cplx t2{};
  for (int k = 0; k < n; ++k)
    for (int s = 0; s < n; ++s)
      for (int tt = 0; tt < n; ++tt) {
        const cplx a = t(k, s, tt);
        if (a == cplx{}) continue;
        for (int j = 0; j < n; ++j)
          for (int u = 0; u < n; ++u)
            for (int v = 0; v < n; ++v) {
              const cplx prod = a * std::conj(t(j, u, v));
              if (prod == cplx{}) continue;
              out.box.at(bit(s), bit(u)) += kI * prod * gi(j, k) * gi(tt, v);
              out.circ.at(bit(j), bit(k)) += kI * prod * gi(s, u) * gi(tt, v);
              t2 += prod * gi(j, k) * gi(s, u) * gi(tt, v);
            }
      }
  out.norm_t2 = t2.real();
  return out;
}

Form torsion_form(const TorsionTensor& t) {
  const int n = t.dim();
  Form f(n, 2, 1);
  // (1/2) T_{kjl} dz^l dz^j collapses to T_{kjl} dz^l ^ dz^j over l < j.
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l)
      for (int j = l + 1; j < n; ++j) f.at(bit(l) | bit(j), bit(k)) = t(k, j, l);
  return f;
}

Form dbar_star_omega(const HermitianMetric& m, const TorsionTensor& t) {
  const int n = m.dim();
  const Form d_omega = -kI * torsion_form(t);
  return (-1.0 / factorial(n - 2)) * hodge_star(wedge(d_omega, m.omega_power(n - 2)), m);
}

Form d_star_omega(const HermitianMetric& m, const TorsionTensor& t) {
  const int n = m.dim();
  const Form dbar_omega = conj(-kI * torsion_form(t));
  return (-1.0 / factorial(n - 2)) * hodge_star(wedge(dbar_omega, m.omega_power(n - 2)), m);
}

double min_eigenvalue_11(const Form& a) {
  if (a.p() != 1 || a.q() != 1) throw DegreeError("expected a (1,1)-form, got " + a.describe());
  const int n = a.n();
  CMatrix h(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) h(j, k) = a.at(bit(j), bit(k)) / kI;
  const CMatrix herm = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(herm, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double IdentityReport::max_residual() const {
  double r = 0.0;
  for (const auto& l : lines)
    if (l.verified) r = std::max(r, l.residual);
  return r;
}

std::optional<std::string> IdentityReport::failed_line() const {
  for (const auto& l : lines)
    if (l.verified && !(l.residual <= tolerance)) return l.name;
  return std::nullopt;
}

IdentityReport verify_lambda_ladder(const HermitianPointData& d, const VerifyOptions& opt) {
  const auto& m = d.metric;
  const int n = m.dim();
  if (n < 3) throw DegreeError("the torsion ladder needs n >= 3");
  const double nd = n;
  const auto tc = build_contractions(d);
  const auto tf = torsion_forms(m, d.torsion);
  const Form taubar = conj(tc.tau);
  const Form tau_taubar = kI * wedge(tc.tau, taubar);

  IdentityReport rep;
  rep.tolerance = opt.tolerance;

  // i dbar* omega reproduces tau.
  add_line(rep, opt, "codifferential_tau", kI * tf.dbar_star, tc.tau);

  const Form a = (1.0 / (nd - 1)) * d.rho + (4.0 * (nd - 2) / ((nd - 1) * (nd - 1))) * tau_taubar;
  const double scalar_curv = trace_11(d.rho, m);
  add_line(rep, opt, "lambda_A", real_scalar(contraction(a, m)),
           scalar_curv / (nd - 1) + 4.0 * (nd - 2) / ((nd - 1) * (nd - 1)) * tc.norm_tau2);

  const Form quad = wedge(tf.d_omega, tf.d_star) + wedge(tf.dbar_omega, tf.dbar_star);
  const Form lambda_quad = contraction(quad, m);
  const double bcoef = (2.0 * nd - 4.0) / (nd - 1.0);
  const Form b_torsion = bcoef * (wedge(tf.t, taubar) + wedge(tf.tbar, tc.tau));
  add_line(rep, opt, "lambda_B_torsion", contraction(b_torsion, m), bcoef * lambda_quad);
  rep.lines.push_back({"lambda_ddbar_omega", 0.0, false, contraction(d.ddbar_omega, m).max_abs()});

  const Form c = kI * wedge(tf.t, tf.tbar);
  const Form l2c = 0.5 * contraction_power(c, m, 2);
  add_line(rep, opt, "lambda2_C", l2c, -1.0 * lambda_quad - tau_taubar - tc.box - 0.5 * tc.circ);
  add_line(rep, opt, "lambda3_C", real_scalar(contraction_power(c, m, 3)) / 6.0, tc.norm_tau2 - 0.5 * tc.norm_t2);
  return rep;
}

IdentityReport verify_quadratic_torsion(const HermitianPointData& d, const VerifyOptions& opt) {
  const auto& m = d.metric;
  if (m.dim() != 3) throw DegreeError("the quadratic torsion identity is specific to n = 3");
  const auto tc = build_contractions(d);
  const auto tf = torsion_forms(m, d.torsion);
  const Form lhs = contraction(wedge(tf.d_star, tf.d_omega) + wedge(tf.dbar_star, tf.dbar_omega), m);
  const Form rhs = tc.box + 0.5 * tc.circ + (tc.norm_tau2 - 0.5 * tc.norm_t2) * m.omega() +
                   kI * wedge(tc.tau, conj(tc.tau));
  IdentityReport rep;
  rep.tolerance = opt.tolerance;
  add_line(rep, opt, "quadratic_torsion_n3", lhs, rhs);
  return rep;
}

Form solve_metric_velocity(const Form& phi, const HermitianMetric& m, double dilaton) {
  const int n = m.dim();
  if (phi.p() != n - 1 || phi.q() != n - 1) throw DegreeError("Phi must be an (n-1,n-1)-form");
  const auto dim = static_cast<Eigen::Index>(n * n);
  CMatrix op(dim, dim);
  for (Eigen::Index col = 0; col < dim; ++col) {
    Form e(n, 1, 1);
    e[static_cast<std::size_t>(col)] = 1.0;
    const cplx tr = scalar_value(contraction(e, m));
    const Form image = dilaton * (-0.5 * tr * m.omega_power(n - 1) + (n - 1.0) * wedge(e, m.omega_power(n - 2)));
    for (Eigen::Index row = 0; row < dim; ++row) op(row, col) = image[static_cast<std::size_t>(row)];
  }
  Eigen::VectorXcd rhs(dim);
  for (Eigen::Index i = 0; i < dim; ++i) rhs(i) = phi[static_cast<std::size_t>(i)];
  const Eigen::VectorXcd x = op.fullPivLu().solve(rhs);
  Form out(n, 1, 1);
  for (Eigen::Index i = 0; i < dim; ++i) out[static_cast<std::size_t>(i)] = x(i);
  return out;
}

Form metric_velocity_from_star(const Form& phi, const HermitianMetric& m, double dilaton) {
  const int n = m.dim();
  if (n < 3) throw DegreeError("metric velocity needs n >= 3");
  const Form s = hodge_star(phi, m);
  const cplx tr = scalar_value(contraction(s, m));
  return (1.0 / (factorial(n - 1) * dilaton)) * (-1.0 * s + (tr / (n - 2.0)) * m.omega());
}

IdentityReport verify_flow_rewrite(const HermitianMetric& m, const Form& phi, double dilaton,
                                   const VerifyOptions& opt) {
  IdentityReport rep;
  rep.tolerance = opt.tolerance;
  const Form x_solve = solve_metric_velocity(phi, m, dilaton);
  const Form x_star = metric_velocity_from_star(phi, m, dilaton);
  add_line(rep, opt, "velocity_star_vs_solve", x_star, x_solve);
  return rep;
}

IdentityReport verify_velocity_formula(const HermitianMetric& m, const Form& a, const Form& b, const Form& c,
                                       double dilaton, const VerifyOptions& opt) {
  const int n = m.dim();
  const double nd = n;
  Form inner_sum = wedge(a, m.omega_power(n - 2)) + wedge(b, m.omega_power(n - 3));
  if (n >= 4) inner_sum += (nd - 3) * wedge(c, m.omega_power(n - 4));
  const Form phi = (-(nd - 2) * std::pow(dilaton, 2.0 * (nd - 2) / (nd - 1))) * inner_sum;

  const double lambda_a = real_scalar(contraction(a, m));
  Form closed = (nd - 2) * a + contraction(b, m);
  double wcoef = lambda_a;
  if (n >= 4) {
    closed += 0.5 * contraction_power(c, m, 2);
    wcoef -= real_scalar(contraction_power(c, m, 3)) / (6.0 * (nd - 2));
  }
  closed += wcoef * m.omega();
  closed *= -std::pow(dilaton, (nd - 3) / (nd - 1)) / (nd - 1);

  IdentityReport rep;
  rep.tolerance = opt.tolerance;
  add_line(rep, opt, "velocity_lambda_form_vs_solve", solve_metric_velocity(phi, m, dilaton), closed);
  add_line(rep, opt, "velocity_lambda_form_vs_star", metric_velocity_from_star(phi, m, dilaton), closed);
  return rep;
}

IdentityReport verify_star_formulas(const HermitianMetric& m, const Form& a, const Form& b, const Form& c,
                                    const VerifyOptions& opt) {
  const int n = m.dim();
  IdentityReport rep;
  rep.tolerance = opt.tolerance;

  const Form star_a = hodge_star(wedge(a, m.omega_power(n - 2)), m);
  add_line(rep, opt, "star_A", star_a,
           factorial(n - 2) * (-1.0 * a + scalar_value(contraction(a, m)) * m.omega()));

  const Form lb = contraction(b, m);
  const cplx l2b = scalar_value(contraction(lb, m));
  const Form star_b = hodge_star(wedge(b, m.omega_power(n - 3)), m);
  add_line(rep, opt, "star_B", star_b, factorial(n - 3) * (-1.0 * lb + (0.5 * l2b) * m.omega()));

  if (n >= 4) {
    const Form l2c = contraction_power(c, m, 2);
    const cplx l3c = scalar_value(contraction(l2c, m));
    const Form star_c = hodge_star(wedge(c, m.omega_power(n - 4)), m);
    add_line(rep, opt, "star_C", star_c, factorial(n - 4) * ((l3c / 6.0) * m.omega() - 0.5 * l2c));
    add_line(rep, opt, "trace_star_C", trace_11(star_c, m), factorial(n - 3) * l3c.real() / 6.0);
  }
  return rep;
}

IdentityReport verify_c_ladder(const Form& c, const HermitianMetric& m, std::optional<double> p4_coefficient,
                               const VerifyOptions& opt) {
  if (c.p() != 3 || c.q() != 3) throw DegreeError("ladder needs a (3,3)-form, got " + c.describe());
  const int n = m.dim();
  const double nd = n;
  const auto dec = primitive_decompose(c, m);
  const Form& p4 = *dec.with_power(1);
  const Form& p2 = *dec.with_power(2);
  const Form& p0 = *dec.with_power(3);

  IdentityReport rep;
  rep.tolerance = opt.tolerance;
  double prim = 0.0;
  for (const auto& part : dec.parts) prim = std::max(prim, contraction(part, m).max_abs());
  rep.lines.push_back({"components_primitive", prim, true, 0.0});
  add_line(rep, opt, "reassembly", dec.reassemble(m), c);

  const double a4 = p4_coefficient.value_or(nd - 4);
  add_line(rep, opt, "lambda_C", contraction(c, m),
           a4 * p4 + 2.0 * (nd - 3) * lefschetz(p2, m) + 3.0 * (nd - 2) * lefschetz_power(p0, m, 2));
  add_line(rep, opt, "half_lambda2_C", 0.5 * contraction_power(c, m, 2),
           (nd - 3) * (nd - 2) * p2 + 3.0 * (nd - 2) * (nd - 1) * lefschetz(p0, m));
  add_line(rep, opt, "sixth_lambda3_C", (1.0 / 6.0) * contraction_power(c, m, 3), (nd - 2) * (nd - 1) * nd * p0);
  return rep;
}

}  // namespace dal
