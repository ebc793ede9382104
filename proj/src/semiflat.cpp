#include "dal/semiflat.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>

#include "dal/reductions.hpp"

namespace dal {
namespace {

const double kPi = std::acos(-1.0);
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>;
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 3, 1>;

Mat matrix_at(const HessianField& h, int d, std::size_t i, double background) {
  Mat m(d, d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) m(a, b) = h[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)][i] + (a == b ? background : 0.0);
  return m;
}

std::array<double, 3> preimage_at(const LegendrePair& lp, std::size_t i) {
  std::array<double, 3> x{0, 0, 0};
  for (int a = 0; a < lp.phi.dimension(); ++a) x[static_cast<std::size_t>(a)] = lp.preimage[static_cast<std::size_t>(a)][i];
  return x;
}

void require_convex(const PeriodicField& phi) {
  const int d = phi.dimension();
  const auto h = hessian(phi);
  for (std::size_t i = 0; i < phi.count(); ++i) {
    const Mat m = matrix_at(h, d, i, 1.0);
    const double lo = Eigen::SelfAdjointEigenSolver<Mat>(m, Eigen::EigenvaluesOnly).eigenvalues()(0);
    if (!(lo > 0.0)) throw ConvexityError("potential is not strictly convex", i, lo);
  }
}

// Pointwise function F of the primal metric whose Hessian drives the flow:
// g' = Hess_x F, so the dual flow is G' = -Hess_y F at fixed y.
double flow_potential(DualityKind kind, double det_g, int n) {
  return kind == DualityKind::kahler_ricci ? 0.5 * std::log(det_g) : det_g / (2.0 * (n - 1));
}

struct MismatchFields {
  std::vector<PeriodicField> mismatch;  // transported minus dual, one per (j <= k)
  std::vector<PeriodicField> first_order;
  std::vector<PeriodicField> dual_rate;
};

MismatchFields mismatch_fields(DualityKind kind, const PeriodicField& phi) {
  const int d = phi.dimension();
  const int n = d;
  const std::size_t count = phi.count();

  // Primal side: G' at fixed x is -g^{-1} (Hess_x F) g^{-1}.
  const auto hx = hessian(phi);
  PeriodicField fx = phi;
  for (std::size_t i = 0; i < count; ++i) fx[i] = flow_potential(kind, matrix_at(hx, d, i, 1.0).determinant(), n);
  const auto hf = hessian(fx);
  std::vector<PeriodicField> transported_x;
  for (int j = 0; j < d; ++j)
    for (int k = j; k < d; ++k) transported_x.emplace_back(phi.dims(), phi.lengths());
  for (std::size_t i = 0; i < count; ++i) {
    const Mat ginv = matrix_at(hx, d, i, 1.0).inverse();
    const Mat rate = -ginv * matrix_at(hf, d, i, 0.0) * ginv;
    std::size_t c = 0;
    for (int j = 0; j < d; ++j)
      for (int k = j; k < d; ++k) transported_x[c++][i] = rate(j, k);
  }

  // Resample to the dual grid through the Legendre map.
  const auto lp = legendre_transform(phi);
  MismatchFields out;
  for (const auto& f : transported_x) {
    const PeriodicSpline sp(f);
    PeriodicField m(f.dims(), f.lengths());
    for (std::size_t i = 0; i < count; ++i) m[i] = sp.value(preimage_at(lp, i));
    out.mismatch.push_back(std::move(m));
  }

  // Dual side on the y grid: G = I + Hess chi, F = F(det g = 1 / det G).
  const auto hy = hessian(lp.chi);
  PeriodicField fy = lp.chi;
  for (std::size_t i = 0; i < count; ++i) fy[i] = flow_potential(kind, 1.0 / matrix_at(hy, d, i, 1.0).determinant(), n);
  const auto hfy = hessian(fy);
  std::array<PeriodicField, 3> grad_f;
  for (int a = 0; a < d; ++a) grad_f[static_cast<std::size_t>(a)] = derivative(fy, a);
  // d_{y_q} G^{jk}
  std::vector<std::array<PeriodicField, 3>> dg;
  for (int j = 0; j < d; ++j)
    for (int k = j; k < d; ++k) {
      std::array<PeriodicField, 3> comp;
      for (int q = 0; q < d; ++q)
        comp[static_cast<std::size_t>(q)] = derivative(hy[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)], q);
      dg.push_back(std::move(comp));
    }
  for (std::size_t c = 0; c < out.mismatch.size(); ++c) {
    out.first_order.emplace_back(phi.dims(), phi.lengths());
    out.dual_rate.emplace_back(phi.dims(), phi.lengths());
  }
  for (std::size_t i = 0; i < count; ++i) {
    // y'_q = d_{x^q} F = sum_j g_{qj} d_{y_j} F with g = G^{-1}.
    const Mat g = matrix_at(hy, d, i, 1.0).inverse();
    Vec gf(d);
    for (int a = 0; a < d; ++a) gf(a) = grad_f[static_cast<std::size_t>(a)][i];
    const Vec ydot = g * gf;
    std::size_t c = 0;
    for (int j = 0; j < d; ++j)
      for (int k = j; k < d; ++k, ++c) {
        const double rate = -hfy[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)][i];
        double fo = 0.0;
        for (int q = 0; q < d; ++q) fo += ydot(q) * dg[c][static_cast<std::size_t>(q)][i];
        out.dual_rate[c][i] = rate;
        out.first_order[c][i] = fo;
        out.mismatch[c][i] -= rate;
      }
  }
  return out;
}

double max_norm(const std::vector<PeriodicField>& fs) {
  double m = 0.0;
  for (const auto& f : fs)
    for (double v : f.data()) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

PeriodicField MetricField::dilaton() const {
  return map(det, [](double v) { return 1.0 / std::sqrt(v); });
}

MetricField metric_from_potential(const PeriodicField& phi) {
  const int d = phi.dimension();
  MetricField m;
  m.g = hessian(phi);
  for (int a = 0; a < d; ++a) m.g[static_cast<std::size_t>(a)][static_cast<std::size_t>(a)] += PeriodicField(phi.dims(), phi.lengths(), 1.0);
  m.det = PeriodicField(phi.dims(), phi.lengths());
  m.min_eigenvalue = m.det;
  for (std::size_t i = 0; i < phi.count(); ++i) {
    const Mat g = matrix_at(m.g, d, i, 0.0);
    const double lo = Eigen::SelfAdjointEigenSolver<Mat>(g, Eigen::EigenvaluesOnly).eigenvalues()(0);
    if (!(lo > 0.0)) throw ConvexityError("metric is not positive definite", i, lo);
    m.det[i] = g.determinant();
    m.min_eigenvalue[i] = lo;
  }
  return m;
}

LegendrePair legendre_transform(const PeriodicField& phi) {
  const int d = phi.dimension();
  require_convex(phi);
  const PeriodicSpline sp(phi);

  LegendrePair lp;
  lp.phi = phi;
  lp.chi = PeriodicField(phi.dims(), phi.lengths());
  for (int a = 0; a < d; ++a) lp.preimage[static_cast<std::size_t>(a)] = lp.chi;
  double scale = 0.0;
  for (int a = 0; a < d; ++a) scale = std::max(scale, phi.length(a));
  const double tol = 1e-14 * scale;

  std::array<double, 3> grad;
  std::array<std::array<double, 3>, 3> hess;
  for (std::size_t i = 0; i < phi.count(); ++i) {
    const auto y = phi.position(i);
    // Start from x = y - grad phi(y), then Newton on x + grad phi(x) = y.
    std::array<double, 3> x = y;
    sp.evaluate(y, grad, hess);
    for (int a = 0; a < d; ++a) x[static_cast<std::size_t>(a)] -= grad[static_cast<std::size_t>(a)];
    int it = 0;
    bool done = false;
    for (; it < 60 && !done; ++it) {
      sp.evaluate(x, grad, hess);
      Vec r(d);
      Mat jac(d, d);
      for (int a = 0; a < d; ++a) {
        const auto ua = static_cast<std::size_t>(a);
        r(a) = x[ua] + grad[ua] - y[ua];
        for (int b = 0; b < d; ++b) jac(a, b) = (a == b ? 1.0 : 0.0) + hess[ua][static_cast<std::size_t>(b)];
      }
      const double det = jac.determinant();
      if (!(det > 0.0)) throw ConvexityError("Legendre map folds over", i, det);
      const Vec dx = jac.partialPivLu().solve(r);
      for (int a = 0; a < d; ++a) x[static_cast<std::size_t>(a)] -= dx(a);
      done = dx.lpNorm<Eigen::Infinity>() < tol;
    }
    if (!done) throw ConvexityError("Legendre map could not be inverted", i, 0.0);
    lp.newton_iterations = std::max(lp.newton_iterations, it);
    double shift2 = 0.0;
    for (int a = 0; a < d; ++a) {
      const double s = y[static_cast<std::size_t>(a)] - x[static_cast<std::size_t>(a)];
      shift2 += s * s;
      lp.preimage[static_cast<std::size_t>(a)][i] = x[static_cast<std::size_t>(a)];
    }
    // x.y - |x|^2/2 - phi(x) - |y|^2/2 = -|y - x|^2/2 - phi(x)
    lp.chi[i] = -0.5 * shift2 - sp.value(x);
  }
  return lp;
}

PeriodicField legendre_inverse(const LegendrePair& lp) { return legendre_transform(lp.chi).chi; }

double involution_residual(const PeriodicField& phi) {
  const auto back = legendre_inverse(legendre_transform(phi));
  double m = 0.0;
  for (std::size_t i = 0; i < phi.count(); ++i) m = std::max(m, std::abs(back[i] - phi[i]));
  return m;
}

double inverse_hessian_residual(const LegendrePair& lp) {
  const int d = lp.phi.dimension();
  const PeriodicSpline sp(lp.phi);
  const auto hy = hessian(lp.chi);
  std::array<double, 3> grad;
  std::array<std::array<double, 3>, 3> hess;
  double m = 0.0;
  for (std::size_t i = 0; i < lp.chi.count(); ++i) {
    sp.evaluate(preimage_at(lp, i), grad, hess);
    Mat g(d, d);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) g(a, b) = (a == b ? 1.0 : 0.0) + hess[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
    const Mat prod = matrix_at(hy, d, i, 1.0) * g - Mat::Identity(d, d);
    m = std::max(m, prod.cwiseAbs().maxCoeff());
  }
  return m;
}

std::string to_string(DualityKind k) { return k == DualityKind::kahler_ricci ? "kahler_ricci" : "anomaly"; }

DualityKind parse_duality_kind(const std::string& name) {
  if (name == "kahler_ricci") return DualityKind::kahler_ricci;
  if (name == "anomaly") return DualityKind::anomaly;
  throw std::invalid_argument("unknown duality kind: " + name);
}

DualityReport duality_residual(DualityKind kind, const PeriodicField& seed, double eps) {
  DualityReport r;
  r.kind = kind;
  r.eps = eps;
  if (eps == 0.0) return r;
  const auto plus = mismatch_fields(kind, eps * seed);
  const auto minus = mismatch_fields(kind, -eps * seed);
  std::vector<PeriodicField> even, odd, corrected;
  for (std::size_t c = 0; c < plus.mismatch.size(); ++c) {
    even.push_back(0.5 * (plus.mismatch[c] + minus.mismatch[c]));
    odd.push_back(0.5 * (plus.mismatch[c] - minus.mismatch[c]));
    corrected.push_back(even.back() - 0.5 * (plus.first_order[c] + minus.first_order[c]));
  }
  r.second_order = max_norm(even);
  r.corrected = max_norm(corrected);
  r.odd = max_norm(odd);
  r.dual_rate = max_norm(plus.dual_rate);
  return r;
}

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t m = x.size();
  if (m < 2 || y.size() != m) throw std::invalid_argument("slope fit needs two or more matching samples");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double md = static_cast<double>(m);
  return (md * sxy - sx * sy) / (md * sxx - sx * sx);
}

DualitySweep duality_sweep(DualityKind kind, const PeriodicField& seed, const std::vector<double>& eps) {
  DualitySweep s;
  s.kind = kind;
  std::vector<double> second, corrected;
  for (double e : eps) {
    s.reports.push_back(duality_residual(kind, seed, e));
    second.push_back(s.reports.back().second_order);
    corrected.push_back(s.reports.back().corrected);
  }
  s.exponent_second_order = log_log_slope(eps, second);
  s.exponent_corrected = log_log_slope(eps, corrected);
  return s;
}

PeriodicField duality_seed(int dimension, int n_points, double length, std::uint64_t seed) {
  const PeriodicField grid(std::vector<int>(static_cast<std::size_t>(dimension), n_points),
                           std::vector<double>(static_cast<std::size_t>(dimension), length));
  std::mt19937_64 rng(seed);
  const double k = 2.0 * kPi / length;
  return smooth_random_field(grid, rng, 1, 1.0 / (k * k));
}

}  // namespace dal
