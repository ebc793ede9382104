#include "dal/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dal {
namespace {

int wrap(int i, int n) {
  const int r = i % n;
  return r < 0 ? r + n : r;
}

// Strides for the last-axis-fastest layout, padded to three axes.
std::array<std::size_t, 3> strides(const PeriodicField& f) {
  std::array<std::size_t, 3> s{0, 0, 0};
  std::size_t acc = 1;
  for (int a = f.dimension() - 1; a >= 0; --a) {
    s[static_cast<std::size_t>(a)] = acc;
    acc *= static_cast<std::size_t>(f.size(a));
  }
  return s;
}

// Flat index of the point shifted by `shift` along `axis`.
struct Shifter {
  const PeriodicField& f;
  std::array<std::size_t, 3> st;

  explicit Shifter(const PeriodicField& field) : f(field), st(strides(field)) {}

  std::size_t operator()(std::size_t flat, const std::array<int, 3>& mi, int axis, int shift) const {
    const int n = f.size(axis);
    const int j = wrap(mi[static_cast<std::size_t>(axis)] + shift, n);
    return flat + (static_cast<std::size_t>(j) - static_cast<std::size_t>(mi[static_cast<std::size_t>(axis)])) *
                      st[static_cast<std::size_t>(axis)];
  }
};

void require_same(const PeriodicField& a, const PeriodicField& b) {
  if (!a.same_grid(b)) throw GridError("fields live on different grids");
}

}  // namespace

PeriodicField::PeriodicField(std::vector<int> dims, std::vector<double> lengths, double value)
    : dims_(std::move(dims)), lengths_(std::move(lengths)) {
  if (dims_.empty() || dims_.size() > 3) throw GridError("grid dimension must be 1, 2 or 3");
  if (lengths_.size() != dims_.size()) throw GridError("one period per axis is required");
  std::size_t total = 1;
  for (std::size_t a = 0; a < dims_.size(); ++a) {
    if (dims_[a] < 8) throw GridError("each grid axis needs at least 8 points");
    if (!(lengths_[a] > 0.0) || !std::isfinite(lengths_[a])) throw GridError("periods must be positive");
    total *= static_cast<std::size_t>(dims_[a]);
  }
  data_.assign(total, value);
}

double PeriodicField::cell_volume() const {
  double v = 1.0;
  for (int a = 0; a < dimension(); ++a) v *= spacing(a);
  return v;
}

double PeriodicField::volume() const {
  double v = 1.0;
  for (double l : lengths_) v *= l;
  return v;
}

std::size_t PeriodicField::index(const std::array<int, 3>& ijk) const {
  std::size_t flat = 0;
  for (int a = 0; a < dimension(); ++a)
    flat = flat * static_cast<std::size_t>(size(a)) + static_cast<std::size_t>(wrap(ijk[static_cast<std::size_t>(a)], size(a)));
  return flat;
}

std::array<int, 3> PeriodicField::multi_index(std::size_t flat) const {
  std::array<int, 3> mi{0, 0, 0};
  for (int a = dimension() - 1; a >= 0; --a) {
    const auto n = static_cast<std::size_t>(size(a));
    mi[static_cast<std::size_t>(a)] = static_cast<int>(flat % n);
    flat /= n;
  }
  return mi;
}

std::array<double, 3> PeriodicField::position(std::size_t flat) const {
  const auto mi = multi_index(flat);
  std::array<double, 3> x{0.0, 0.0, 0.0};
  for (int a = 0; a < dimension(); ++a) x[static_cast<std::size_t>(a)] = mi[static_cast<std::size_t>(a)] * spacing(a);
  return x;
}

bool PeriodicField::same_grid(const PeriodicField& o) const { return dims_ == o.dims_ && lengths_ == o.lengths_; }

void PeriodicField::fill(const std::function<double(const std::array<double, 3>&)>& f) {
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] = f(position(i));
}

double PeriodicField::min() const { return *std::min_element(data_.begin(), data_.end()); }
double PeriodicField::max() const { return *std::max_element(data_.begin(), data_.end()); }
std::size_t PeriodicField::argmin() const {
  return static_cast<std::size_t>(std::min_element(data_.begin(), data_.end()) - data_.begin());
}
std::size_t PeriodicField::argmax() const {
  return static_cast<std::size_t>(std::max_element(data_.begin(), data_.end()) - data_.begin());
}
double PeriodicField::sum() const { return std::accumulate(data_.begin(), data_.end(), 0.0); }

bool PeriodicField::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

PeriodicField& PeriodicField::operator+=(const PeriodicField& o) {
  require_same(*this, o);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

PeriodicField& PeriodicField::operator-=(const PeriodicField& o) {
  require_same(*this, o);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

PeriodicField& PeriodicField::operator*=(double s) {
  for (auto& v : data_) v *= s;
  return *this;
}

PeriodicField operator+(PeriodicField a, const PeriodicField& b) { return a += b; }
PeriodicField operator-(PeriodicField a, const PeriodicField& b) { return a -= b; }
PeriodicField operator*(double s, PeriodicField a) { return a *= s; }

double dot(const PeriodicField& f, const PeriodicField& h) {
  require_same(f, h);
  double s = 0.0;
  for (std::size_t i = 0; i < f.count(); ++i) s += f[i] * h[i];
  return s * f.cell_volume();
}

PeriodicField map(const PeriodicField& f, const std::function<double(double)>& fn) {
  PeriodicField out = f;
  for (auto& v : out.data()) v = fn(v);
  return out;
}

PeriodicField laplacian(const PeriodicField& f, int order) {
  if (order != 2 && order != 4) throw GridError("Laplacian order must be 2 or 4");
  PeriodicField out(f.dims(), f.lengths());
  const int d = f.dimension();
  // Pad to three axes; wrapped neighbour tables per axis avoid per-point index arithmetic.
  std::array<int, 3> n{1, 1, 1};
  std::array<double, 3> w{0.0, 0.0, 0.0};
  for (int a = 0; a < d; ++a) {
    n[static_cast<std::size_t>(3 - d + a)] = f.size(a);
    w[static_cast<std::size_t>(3 - d + a)] = 1.0 / (f.spacing(a) * f.spacing(a));
  }
  std::array<std::vector<std::array<int, 4>>, 3> nb;
  for (std::size_t a = 0; a < 3; ++a) {
    nb[a].resize(static_cast<std::size_t>(n[a]));
    for (int i = 0; i < n[a]; ++i)
      nb[a][static_cast<std::size_t>(i)] = {wrap(i - 2, n[a]), wrap(i - 1, n[a]), wrap(i + 1, n[a]), wrap(i + 2, n[a])};
  }
  const double* src = f.data().data();
  double* dst = out.data().data();
  const std::size_t s1 = static_cast<std::size_t>(n[2]);
  const std::size_t s0 = s1 * static_cast<std::size_t>(n[1]);
  auto at = [&](int i, int j, int k) { return src[static_cast<std::size_t>(i) * s0 + static_cast<std::size_t>(j) * s1 + static_cast<std::size_t>(k)]; };
  for (int i = 0; i < n[0]; ++i) {
    const auto& ni = nb[0][static_cast<std::size_t>(i)];
    for (int j = 0; j < n[1]; ++j) {
      const auto& nj = nb[1][static_cast<std::size_t>(j)];
      const std::size_t row = static_cast<std::size_t>(i) * s0 + static_cast<std::size_t>(j) * s1;
      for (int k = 0; k < n[2]; ++k) {
        const auto& nk = nb[2][static_cast<std::size_t>(k)];
        const double c = src[row + static_cast<std::size_t>(k)];
        double acc = 0.0;
        if (order == 2) {
          if (n[0] > 1) acc += w[0] * (at(ni[1], j, k) - 2.0 * c + at(ni[2], j, k));
          if (n[1] > 1) acc += w[1] * (at(i, nj[1], k) - 2.0 * c + at(i, nj[2], k));
          acc += w[2] * (src[row + static_cast<std::size_t>(nk[1])] - 2.0 * c + src[row + static_cast<std::size_t>(nk[2])]);
        } else {
          auto st = [c](double m2, double m1, double p1, double p2) { return (-p2 + 16.0 * p1 - 30.0 * c + 16.0 * m1 - m2) / 12.0; };
          if (n[0] > 1) acc += w[0] * st(at(ni[0], j, k), at(ni[1], j, k), at(ni[2], j, k), at(ni[3], j, k));
          if (n[1] > 1) acc += w[1] * st(at(i, nj[0], k), at(i, nj[1], k), at(i, nj[2], k), at(i, nj[3], k));
          acc += w[2] * st(src[row + static_cast<std::size_t>(nk[0])], src[row + static_cast<std::size_t>(nk[1])],
                           src[row + static_cast<std::size_t>(nk[2])], src[row + static_cast<std::size_t>(nk[3])]);
        }
        dst[row + static_cast<std::size_t>(k)] = acc;
      }
    }
  }
  return out;
}

PeriodicField derivative(const PeriodicField& f, int axis) {
  if (axis < 0 || axis >= f.dimension()) throw GridError("axis out of range");
  PeriodicField out(f.dims(), f.lengths());
  const Shifter sh(f);
  const double inv = 0.5 / f.spacing(axis);
  for (std::size_t i = 0; i < f.count(); ++i) {
    const auto mi = f.multi_index(i);
    out[i] = (f[sh(i, mi, axis, 1)] - f[sh(i, mi, axis, -1)]) * inv;
  }
  return out;
}

PeriodicField second_derivative(const PeriodicField& f, int a, int b) {
  if (a < 0 || a >= f.dimension() || b < 0 || b >= f.dimension()) throw GridError("axis out of range");
  PeriodicField out(f.dims(), f.lengths());
  const Shifter sh(f);
  if (a == b) {
    const double inv = 1.0 / (f.spacing(a) * f.spacing(a));
    for (std::size_t i = 0; i < f.count(); ++i) {
      const auto mi = f.multi_index(i);
      out[i] = (f[sh(i, mi, a, 1)] - 2.0 * f[i] + f[sh(i, mi, a, -1)]) * inv;
    }
    return out;
  }
  const double inv = 0.25 / (f.spacing(a) * f.spacing(b));
  for (std::size_t i = 0; i < f.count(); ++i) {
    const auto mi = f.multi_index(i);
    const std::size_t ap = sh(i, mi, a, 1);
    const std::size_t am = sh(i, mi, a, -1);
    auto mp = mi;
    mp[static_cast<std::size_t>(a)] = wrap(mi[static_cast<std::size_t>(a)] + 1, f.size(a));
    auto mm = mi;
    mm[static_cast<std::size_t>(a)] = wrap(mi[static_cast<std::size_t>(a)] - 1, f.size(a));
    out[i] = (f[sh(ap, mp, b, 1)] - f[sh(ap, mp, b, -1)] - f[sh(am, mm, b, 1)] + f[sh(am, mm, b, -1)]) * inv;
  }
  return out;
}

HessianField hessian(const PeriodicField& f) {
  HessianField h;
  const int d = f.dimension();
  for (int a = 0; a < d; ++a)
    for (int b = a; b < d; ++b) {
      h[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = second_derivative(f, a, b);
      if (a != b) h[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] = h[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
    }
  return h;
}

PeriodicField hessian_det(const PeriodicField& phi, double background) {
  const int d = phi.dimension();
  const HessianField h = hessian(phi);
  PeriodicField out(phi.dims(), phi.lengths());
  for (std::size_t i = 0; i < phi.count(); ++i) {
    auto e = [&](int a, int b) { return h[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)][i] + (a == b ? background : 0.0); };
    switch (d) {
      case 1: out[i] = e(0, 0); break;
      case 2: out[i] = e(0, 0) * e(1, 1) - e(0, 1) * e(1, 0); break;
      default:
        out[i] = e(0, 0) * (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1)) - e(0, 1) * (e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0)) +
                 e(0, 2) * (e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0));
    }
  }
  return out;
}

double interpolate_cubic(const PeriodicField& f, const std::array<double, 3>& x) {
  const int d = f.dimension();
  std::array<std::array<double, 4>, 3> w{};
  std::array<int, 3> base{0, 0, 0};
  for (int a = 0; a < d; ++a) {
    const double s = x[static_cast<std::size_t>(a)] / f.spacing(a);
    const double fl = std::floor(s);
    const double t = s - fl;
    base[static_cast<std::size_t>(a)] = static_cast<int>(fl) - 1;
    // Lagrange weights on nodes -1, 0, 1, 2 relative to floor(s).
    auto& wa = w[static_cast<std::size_t>(a)];
    wa[0] = -t * (t - 1.0) * (t - 2.0) / 6.0;
    wa[1] = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
    wa[2] = -(t + 1.0) * t * (t - 2.0) / 2.0;
    wa[3] = (t + 1.0) * t * (t - 1.0) / 6.0;
  }
  for (int a = d; a < 3; ++a) w[static_cast<std::size_t>(a)] = {1.0, 0.0, 0.0, 0.0};
  const int n1 = d > 1 ? 4 : 1;
  const int n2 = d > 2 ? 4 : 1;
  double acc = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < n1; ++j)
      for (int k = 0; k < n2; ++k) {
        const double wt = w[0][static_cast<std::size_t>(i)] * w[1][static_cast<std::size_t>(j)] * w[2][static_cast<std::size_t>(k)];
        acc += wt * f[f.index({base[0] + i, base[1] + j, base[2] + k})];
      }
  return acc;
}

PeriodicSpline::PeriodicSpline(const PeriodicField& f) : coef_(f) {
  // Undo the (1, 4, 1)/6 B-spline sampling along each axis with the periodic
  // inverse kernel sqrt(3) r^|m|, r = sqrt(3) - 2.
  const double r = std::sqrt(3.0) - 2.0;
  const Shifter sh(coef_);
  for (int a = 0; a < coef_.dimension(); ++a) {
    const int n = coef_.size(a);
    std::vector<double> kernel(static_cast<std::size_t>(n));
    const double rn = std::pow(r, n);
    for (int m = 0; m < n; ++m) kernel[static_cast<std::size_t>(m)] = std::sqrt(3.0) * (std::pow(r, m) + std::pow(r, n - m)) / (1.0 - rn);
    PeriodicField out = coef_;
    for (std::size_t i = 0; i < coef_.count(); ++i) {
      const auto mi = coef_.multi_index(i);
      double acc = 0.0;
      for (int m = 0; m < n; ++m) acc += kernel[static_cast<std::size_t>(m)] * coef_[sh(i, mi, a, m)];
      out[i] = acc;
    }
    coef_ = std::move(out);
  }
}

double PeriodicSpline::value(const std::array<double, 3>& x) const {
  std::array<double, 3> g;
  std::array<std::array<double, 3>, 3> h;
  return evaluate(x, g, h);
}

double PeriodicSpline::evaluate(const std::array<double, 3>& x, std::array<double, 3>& grad,
                                std::array<std::array<double, 3>, 3>& hess) const {
  const int d = coef_.dimension();
  // Basis values and derivatives on nodes -1, 0, 1, 2 relative to floor(s).
  std::array<std::array<double, 4>, 3> b{}, db{}, ddb{};
  std::array<int, 3> base{0, 0, 0};
  for (int a = 0; a < 3; ++a) {
    const auto ua = static_cast<std::size_t>(a);
    if (a >= d) {
      b[ua] = {1.0, 0.0, 0.0, 0.0};
      continue;
    }
    const double h = coef_.spacing(a);
    const double s = x[ua] / h;
    const double fl = std::floor(s);
    const double t = s - fl;
    base[ua] = static_cast<int>(fl) - 1;
    const double u = 1.0 - t;
    b[ua] = {u * u * u / 6.0, (3.0 * t * t * t - 6.0 * t * t + 4.0) / 6.0,
             (-3.0 * t * t * t + 3.0 * t * t + 3.0 * t + 1.0) / 6.0, t * t * t / 6.0};
    db[ua] = {-0.5 * u * u / h, (1.5 * t * t - 2.0 * t) / h, (-1.5 * t * t + t + 0.5) / h, 0.5 * t * t / h};
    ddb[ua] = {u / (h * h), (3.0 * t - 2.0) / (h * h), (1.0 - 3.0 * t) / (h * h), t / (h * h)};
  }
  const int n1 = d > 1 ? 4 : 1;
  const int n2 = d > 2 ? 4 : 1;
  double v = 0.0;
  grad = {0.0, 0.0, 0.0};
  hess = {};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < n1; ++j)
      for (int k = 0; k < n2; ++k) {
        const double c = coef_[coef_.index({base[0] + i, base[1] + j, base[2] + k})];
        const std::array<int, 3> id{i, j, k};
        std::array<double, 3> bv, dv, ddv;
        for (std::size_t a = 0; a < 3; ++a) {
          const auto ia = static_cast<std::size_t>(id[a]);
          bv[a] = b[a][ia];
          dv[a] = db[a][ia];
          ddv[a] = ddb[a][ia];
        }
        v += c * bv[0] * bv[1] * bv[2];
        for (std::size_t a = 0; a < static_cast<std::size_t>(d); ++a) {
          std::array<double, 3> g = bv;
          g[a] = dv[a];
          grad[a] += c * g[0] * g[1] * g[2];
          for (std::size_t e = a; e < static_cast<std::size_t>(d); ++e) {
            std::array<double, 3> hh = bv;
            if (e == a) {
              hh[a] = ddv[a];
            } else {
              hh[a] = dv[a];
              hh[e] = dv[e];
            }
            hess[a][e] += c * hh[0] * hh[1] * hh[2];
          }
        }
      }
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t e = 0; e < a; ++e) hess[a][e] = hess[e][a];
  return v;
}

double dirichlet_energy(const PeriodicField& f) {
  const Shifter sh(f);
  double acc = 0.0;
  for (std::size_t i = 0; i < f.count(); ++i) {
    const auto mi = f.multi_index(i);
    for (int a = 0; a < f.dimension(); ++a) {
      const double g = (f[sh(i, mi, a, 1)] - f[i]) / f.spacing(a);
      acc += g * g;
    }
  }
  return 0.5 * acc * f.cell_volume();
}

}  // namespace dal
