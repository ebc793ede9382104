#include "dal/reductions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dal/hermitian.hpp"

namespace dal {
namespace {

const double kPi = std::acos(-1.0);

double order_factor(int order) { return order == 4 ? 0.75 : 1.0; }

// Largest stable explicit step divided by the cfl factor: 2 h^2 / (d D_max),
// where 2/(h^2 d) bounds the spectral radius of the order-2 Laplacian per unit
// diffusivity; order 4 is 4/3 stiffer.
double parabolic_dt(const PeriodicField& grid, double d_max, int order) {
  double h2 = std::numeric_limits<double>::infinity();
  for (int a = 0; a < grid.dimension(); ++a) h2 = std::min(h2, grid.spacing(a) * grid.spacing(a));
  if (!(d_max > 0.0)) return std::numeric_limits<double>::infinity();
  return 2.0 * h2 * order_factor(order) / (grid.dimension() * d_max);
}

PeriodicField field_of(const PeriodicField& grid, const State& y) {
  PeriodicField f = grid;
  f.data() = y;
  return f;
}

double max_abs_dev(const State& y, double target) {
  double m = 0.0;
  for (double v : y) m = std::max(m, std::abs(v - target));
  return m;
}

// Trace of the adjugate of the symmetric matrix I + H at point i.
double adjugate_trace(const HessianField& h, int d, std::size_t i) {
  auto e = [&](int a, int b) { return h[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)][i] + (a == b ? 1.0 : 0.0); };
  if (d == 1) return 1.0;
  if (d == 2) return e(0, 0) + e(1, 1);
  return (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1)) + (e(0, 0) * e(2, 2) - e(0, 2) * e(2, 0)) +
         (e(0, 0) * e(1, 1) - e(0, 1) * e(1, 0));
}

// Fast integer powers keep per-step monitoring of F_alpha cheap.
double power(double x, double e) {
  const double r = std::round(e);
  if (r == e && std::abs(r) <= 32.0) {
    int k = static_cast<int>(std::abs(r));
    double acc = 1.0, b = x;
    while (k) {
      if (k & 1) acc *= b;
      b *= b;
      k >>= 1;
    }
    return r < 0 ? 1.0 / acc : acc;
  }
  return std::pow(x, e);
}

void semiflat_dilaton_volume(const State& det, int n, State& dil, State& vol) {
  // Flow metric is the conformal rescaling ||Omega||^{-2/(n-2)} omega of the
  // semi-flat Kahler metric with ||Omega|| = det^{-1/2}.
  const double nd = n;
  const double e_dil = 2.0 * (nd - 1.0) / (nd - 2.0);
  const double e_vol = -2.0 * nd / (nd - 2.0) - 2.0;
  dil.resize(det.size());
  vol.resize(det.size());
  for (std::size_t i = 0; i < det.size(); ++i) {
    const double s = 1.0 / std::sqrt(det[i]);
    dil[i] = power(s, e_dil);
    vol[i] = power(s, e_vol);
  }
}

}  // namespace

std::string to_string(ReductionKind k) {
  switch (k) {
    case ReductionKind::inverse_ma: return "inverse_ma";
    case ReductionKind::calabi_gray: return "calabi_gray";
    case ReductionKind::product_fibration: return "product_fibration";
    case ReductionKind::iwasawa: return "iwasawa";
    case ReductionKind::sl2c: return "sl2c";
    case ReductionKind::anomaly_ck_semiflat: return "anomaly_ck_semiflat";
    default: return "dual_anomaly_semiflat";
  }
}

ReductionKind parse_reduction_kind(const std::string& name) {
  for (auto k : {ReductionKind::inverse_ma, ReductionKind::calabi_gray, ReductionKind::product_fibration,
                 ReductionKind::iwasawa, ReductionKind::sl2c, ReductionKind::anomaly_ck_semiflat,
                 ReductionKind::dual_anomaly_semiflat})
    if (to_string(k) == name) return k;
  throw std::invalid_argument("unknown reduction kind '" + name + "'");
}

bool is_scalar_ode(ReductionKind k) { return k == ReductionKind::iwasawa || k == ReductionKind::sl2c; }

PeriodicField Reduction::as_field(const State& y) const { return field_of(grid, y); }

double Reduction::velocity_norm(const State& y) const {
  State dy(y.size());
  system.rhs(y, dy);
  double m = 0.0;
  for (double v : dy) m = std::max(m, std::abs(v));
  return m;
}

PeriodicField smooth_random_field(const PeriodicField& grid, std::mt19937_64& rng, int modes, double amplitude) {
  const int d = grid.dimension();
  PeriodicField f(grid.dims(), grid.lengths());
  const int span = 2 * modes + 1;
  int total = 1;
  for (int a = 0; a < d; ++a) total *= span;
  for (int m = 0; m < total; ++m) {
    std::array<int, 3> k{0, 0, 0};
    int rest = m;
    for (int a = 0; a < d; ++a) {
      k[static_cast<std::size_t>(a)] = rest % span - modes;
      rest /= span;
    }
    if (k == std::array<int, 3>{0, 0, 0}) continue;
    const double ca = uniform_pm1(rng), sa = uniform_pm1(rng);
    for (std::size_t i = 0; i < f.count(); ++i) {
      const auto x = grid.position(i);
      double phase = 0.0;
      for (int a = 0; a < d; ++a) phase += 2.0 * kPi * k[static_cast<std::size_t>(a)] * x[static_cast<std::size_t>(a)] / grid.length(a);
      f[i] += ca * std::cos(phase) + sa * std::sin(phase);
    }
  }
  const double mean = f.mean();
  for (auto& v : f.data()) v -= mean;
  double mx = 0.0;
  for (double v : f.data()) mx = std::max(mx, std::abs(v));
  if (mx > 0.0) f *= amplitude / mx;
  return f;
}

void rhs_inverse_ma(const PeriodicField& phi, const PeriodicField& e_rho_c, int order, PeriodicField& out) {
  out = laplacian(phi, order);
  for (std::size_t i = 0; i < out.count(); ++i) out[i] = 1.0 - e_rho_c[i] / (1.0 + out[i]);
}

void rhs_calabi_gray(const PeriodicField& u, double kappa, int order, PeriodicField& out) {
  out = laplacian(u, order);
  for (std::size_t i = 0; i < out.count(); ++i) out[i] = 0.25 * u[i] * u[i] * (out[i] - 2.0 * kappa * u[i]);
}

void rhs_product_fibration(const PeriodicField& u, int order, PeriodicField& out) {
  out = laplacian(u, order);
  for (std::size_t i = 0; i < out.count(); ++i) out[i] *= 0.25 * u[i] * u[i];
}

double rhs_iwasawa(double u) { return -0.5 * std::exp(-2.0 * u); }

double rhs_sl2c(double) { return -1.0; }

void rhs_anomaly_ck_semiflat(const PeriodicField& phi, int n, PeriodicField& out) {
  out = hessian_det(phi, 1.0);
  const double mean = out.mean();
  const double c = 1.0 / (2.0 * (n - 1));
  for (auto& v : out.data()) v = c * (v - mean);
}

void rhs_dual_anomaly_semiflat(const PeriodicField& chi, int n, PeriodicField& out) {
  out = hessian_det(chi, 1.0);
  for (auto& v : out.data()) v = 1.0 / v;
  const double mean = out.mean();
  const double c = 1.0 / (2.0 * (n - 1));
  for (auto& v : out.data()) v = -c * (v - mean);
}

double calabi_gray_period(int n_points, double kappa, int order) {
  if (!(kappa < 0.0)) throw std::invalid_argument("calabi_gray eigen-data needs kappa < 0");
  const double th = 2.0 * kPi / n_points;
  // Discrete symbol of the Laplacian on the first mode, times h^2.
  const double s = order == 4 ? (-2.0 * std::cos(2.0 * th) + 32.0 * std::cos(th) - 30.0) / 12.0 : 2.0 * std::cos(th) - 2.0;
  return n_points * std::sqrt(s / (2.0 * kappa));
}

CalabiGrayData calabi_gray_data(const PeriodicField& grid, double kappa) {
  CalabiGrayData d;
  d.kappa = kappa;
  d.alpha = PeriodicField(grid.dims(), grid.lengths());
  d.beta = d.alpha;
  d.gamma = d.alpha;
  const double lx = grid.length(0);
  d.alpha.fill([&](const auto& x) { return std::sin(2.0 * kPi * x[0] / lx); });
  d.beta.fill([&](const auto& x) { return std::cos(2.0 * kPi * x[0] / lx); });
  return d;
}

double CalabiGrayData::unit_norm_residual() const {
  double r = 0.0;
  for (std::size_t i = 0; i < alpha.count(); ++i)
    r = std::max(r, std::abs(alpha[i] * alpha[i] + beta[i] * beta[i] + gamma[i] * gamma[i] - 1.0));
  return r;
}

double CalabiGrayData::eigen_residual(int order) const {
  double r = 0.0;
  for (const PeriodicField* f : {&alpha, &beta, &gamma}) {
    const auto lf = laplacian(*f, order);
    for (std::size_t i = 0; i < f->count(); ++i) r = std::max(r, std::abs(lf[i] - 2.0 * kappa * (*f)[i]));
  }
  return r;
}

Reduction make_reduction(const ReductionParams& p) {
  if (p.n < 3) throw std::invalid_argument("ambient dimension n must be at least 3");
  if (p.laplacian_order != 2 && p.laplacian_order != 4) throw std::invalid_argument("laplacian_order must be 2 or 4");
  Reduction red;
  red.params = p;
  const int order = p.laplacian_order;
  const double nd = p.n;
  std::mt19937_64 rng(p.seed);

  switch (p.kind) {
    case ReductionKind::iwasawa: {
      const double r = p.r > 0.0 ? p.r : 1.0;
      red.params.r = r;
      red.initial = {0.5 * std::log(r)};
      red.system.rhs = [](const State& y, State& dy) { dy[0] = rhs_iwasawa(y[0]); };
      red.system.stable_dt = [](const State& y) { return std::exp(2.0 * y[0]); };
      red.system.floor_field = [](const State& y, State& out) { out.assign(1, std::exp(2.0 * y[0])); };
      red.dilaton_volume = [](const State& y, State& dil, State& vol) {
        dil.assign(1, std::exp(-y[0]));
        vol.assign(1, std::exp(2.0 * y[0]));
      };
      red.closed_form_error = [r](double t, const State& y) { return std::abs(y[0] - 0.5 * std::log(r - t)); };
      break;
    }
    case ReductionKind::sl2c: {
      const double r = p.r > 0.0 ? p.r : 2.0;
      red.params.r = r;
      red.initial = {r};
      red.system.rhs = [](const State& y, State& dy) { dy[0] = rhs_sl2c(y[0]); };
      red.system.stable_dt = [](const State& y) { return y[0]; };
      red.dilaton_volume = [](const State& y, State& dil, State& vol) {
        dil.assign(1, std::pow(y[0], -1.5));
        vol.assign(1, y[0] * y[0] * y[0]);
      };
      red.closed_form_error = [r](double t, const State& y) { return std::abs(y[0] - (r - t)); };
      break;
    }
    case ReductionKind::product_fibration:
    case ReductionKind::calabi_gray: {
      const bool cg = p.kind == ReductionKind::calabi_gray;
      const int n_pts = p.grid;
      double len = p.length > 0.0 ? p.length : 2.0 * kPi;
      if (cg) {
        if (!(p.kappa < 0.0)) throw std::invalid_argument("calabi_gray needs kappa < 0");
        len = calabi_gray_period(n_pts, p.kappa, order);
      }
      red.params.length = len;
      red.grid = PeriodicField({n_pts, n_pts}, {len, len});
      const double a = p.amplitude > 0.0 ? p.amplitude : (cg ? 0.3 : 1.0);
      red.params.amplitude = a;
      PeriodicField u0 = red.grid;
      if (cg) {
        u0.fill([&](const auto& x) { return 1.0 + a * std::sin(2.0 * kPi * x[0] / len) + 0.1 * std::cos(2.0 * kPi * x[1] / len); });
      } else {
        u0.fill([&](const auto& x) { return 2.0 + a * std::cos(2.0 * kPi * x[0] / len) + 0.2 * a * std::sin(2.0 * kPi * x[1] / len); });
      }
      if (!(u0.min() > 0.0)) throw std::invalid_argument("initial u must be positive; lower the amplitude");
      red.initial = u0.data();
      red.weight = red.grid.cell_volume();
      const PeriodicField g = red.grid;
      const double kappa = p.kappa;
      if (cg) {
        red.system.rhs = [g, kappa, order](const State& y, State& dy) {
          PeriodicField out;
          rhs_calabi_gray(field_of(g, y), kappa, order, out);
          dy = std::move(out.data());
        };
      } else {
        red.system.rhs = [g, order](const State& y, State& dy) {
          PeriodicField out;
          rhs_product_fibration(field_of(g, y), order, out);
          dy = std::move(out.data());
        };
      }
      red.system.stable_dt = [g, order, cg, kappa](const State& y) {
        double umax = 0.0;
        for (double v : y) umax = std::max(umax, std::abs(v));
        double dt = parabolic_dt(g, 0.25 * umax * umax, order);
        // The reaction term u^3 |kappa| / 2 limits the step near blow-up.
        if (cg) dt = std::min(dt, 2.0 / (1.5 * std::abs(kappa) * umax * umax));
        return dt;
      };
      red.dilaton_volume = [](const State& y, State& dil, State& vol) {
        dil.resize(y.size());
        vol.resize(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) {
          dil[i] = y[i] * y[i];
          vol[i] = 1.0 / (dil[i] * dil[i]);
        }
      };
      red.dirichlet = [g](const State& y) { return dirichlet_energy(field_of(g, y)); };
      if (cg) {
        const auto data = calabi_gray_data(red.grid, kappa);
        red.conservation_names = {"int_inv_u", "V0_alpha", "V0_beta", "V0_gamma"};
        red.conservation = [data, g](const State& y) {
          double s = 0, va = 0, vb = 0, vc = 0;
          for (std::size_t i = 0; i < y.size(); ++i) {
            const double iu = 1.0 / y[i];
            s += iu;
            va += iu * data.alpha[i];
            vb += iu * data.beta[i];
            vc += iu * data.gamma[i];
          }
          const double w = g.cell_volume();
          return std::vector<double>{s * w, va * w, vb * w, vc * w};
        };
      } else {
        red.conservation_names = {"int_inv_u"};
        red.conservation = [g](const State& y) {
          double s = 0;
          for (double v : y) s += 1.0 / v;
          return std::vector<double>{s * g.cell_volume()};
        };
        red.stationary_residual = [](const State& y) {
          double mean = 0;
          for (double v : y) mean += v;
          return max_abs_dev(y, mean / static_cast<double>(y.size()));
        };
      }
      break;
    }
    case ReductionKind::inverse_ma: {
      const int n_pts = p.grid;
      const double len = p.length > 0.0 ? p.length : 2.0 * kPi;
      red.params.length = len;
      red.grid = PeriodicField({n_pts, n_pts}, {len, len});
      const double a = p.amplitude > 0.0 ? p.amplitude : 0.05;
      red.params.amplitude = a;
      const PeriodicField rho0 = smooth_random_field(red.grid, rng, 2, 0.3);
      const PeriodicField phi0 = smooth_random_field(red.grid, rng, 2, a);
      PeriodicField e_rho = map(rho0, [](double v) { return std::exp(v); });
      const double c = -std::log(e_rho.mean());
      PeriodicField e_rho_c = map(rho0, [c](double v) { return std::exp(v + c); });
      const PeriodicField k_field = map(rho0, [nd](double v) { return (nd - 1.0) * std::exp(v); });
      const auto j0 = laplacian(phi0, order);
      if (!(j0.min() > -1.0)) throw std::invalid_argument("initial potential is not admissible (1 + Lap phi <= 0)");
      red.initial = phi0.data();
      red.weight = red.grid.cell_volume();
      const PeriodicField g = red.grid;
      red.system.rhs = [g, e_rho_c, order](const State& y, State& dy) {
        PeriodicField out;
        rhs_inverse_ma(field_of(g, y), e_rho_c, order, out);
        dy = std::move(out.data());
      };
      red.system.stable_dt = [g, e_rho_c, order](const State& y) {
        const auto lap = laplacian(field_of(g, y), order);
        double dmax = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) {
          const double j = 1.0 + lap[i];
          if (!(j > 0.0)) return 0.0;
          dmax = std::max(dmax, e_rho_c[i] / (j * j));
        }
        return parabolic_dt(g, dmax, order);
      };
      red.system.floor_field = [g, order](const State& y, State& out) {
        out = laplacian(field_of(g, y), order).data();
        for (auto& v : out) v += 1.0;
      };
      red.dilaton_volume = [g, k_field, order, nd](const State& y, State& dil, State& vol) {
        const auto lap = laplacian(field_of(g, y), order);
        dil.resize(y.size());
        vol.resize(y.size());
        const double e_dil = (nd - 1.0) / (nd - 2.0);
        const double e_vol = -nd / (nd - 2.0);
        for (std::size_t i = 0; i < y.size(); ++i) {
          const double j = 1.0 + lap[i];
          const double q = k_field[i] / j;
          dil[i] = power(q, e_dil);
          vol[i] = power(q, e_vol) * j;
        }
      };
      red.stationary_residual = [g, e_rho_c, order](const State& y) {
        const auto lap = laplacian(field_of(g, y), order);
        double r = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) r = std::max(r, std::abs(1.0 + lap[i] - e_rho_c[i]));
        return r;
      };
      break;
    }
    case ReductionKind::anomaly_ck_semiflat:
    case ReductionKind::dual_anomaly_semiflat: {
      const bool dual = p.kind == ReductionKind::dual_anomaly_semiflat;
      red.dual_flow = dual;
      const int d = p.n;
      if (d > 3) throw std::invalid_argument("semi-flat runs support n = 3 (a 3-torus base)");
      const int n_pts = p.grid;
      const double len = p.length > 0.0 ? p.length : 1.0;
      red.params.length = len;
      red.grid = PeriodicField(std::vector<int>(static_cast<std::size_t>(d), n_pts),
                               std::vector<double>(static_cast<std::size_t>(d), len));
      const double a = p.amplitude > 0.0 ? p.amplitude : 0.003;
      red.params.amplitude = a;
      const PeriodicField phi0 = smooth_random_field(red.grid, rng, 1, a);
      if (!(hessian_det(phi0, 1.0).min() > 0.0)) throw std::invalid_argument("initial potential is not convex");
      red.initial = phi0.data();
      red.weight = red.grid.cell_volume();
      const PeriodicField g = red.grid;
      const int n = p.n;
      if (dual) {
        red.system.rhs = [g, n](const State& y, State& dy) {
          PeriodicField out;
          rhs_dual_anomaly_semiflat(field_of(g, y), n, out);
          dy = std::move(out.data());
        };
      } else {
        red.system.rhs = [g, n](const State& y, State& dy) {
          PeriodicField out;
          rhs_anomaly_ck_semiflat(field_of(g, y), n, out);
          dy = std::move(out.data());
        };
      }
      red.system.stable_dt = [g, n, d, dual](const State& y) {
        const auto f = field_of(g, y);
        const auto h = hessian(f);
        const auto det = hessian_det(f, 1.0);
        double dmax = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) {
          if (!(det[i] > 0.0)) return 0.0;
          const double adj = adjugate_trace(h, d, i);
          dmax = std::max(dmax, dual ? adj / (det[i] * det[i]) : adj);
        }
        // Semi-flat stencils are order 2 regardless of laplacian_order.
        return parabolic_dt(g, dmax / (2.0 * (n - 1)), 2);
      };
      red.system.floor_field = [g](const State& y, State& out) { out = hessian_det(field_of(g, y), 1.0).data(); };
      red.dilaton_volume = [g, n](const State& y, State& dil, State& vol) {
        semiflat_dilaton_volume(hessian_det(field_of(g, y), 1.0).data(), n, dil, vol);
      };
      red.stationary_residual = [g](const State& y) { return max_abs_dev(hessian_det(field_of(g, y), 1.0).data(), 1.0); };
      break;
    }
  }
  return red;
}

}  // namespace dal
