#include <doctest.h>

#include <cmath>
#include <random>

#include "dal/grid.hpp"

using namespace dal;

namespace {

const double kTwoPi = 2.0 * std::acos(-1.0);

PeriodicField sine_field(int n, double length) {
  PeriodicField f({n}, {length});
  f.fill([&](const auto& x) { return std::sin(kTwoPi * x[0] / length); });
  return f;
}

double laplacian_rel_error(int n, int order) {
  const double len = 3.0;
  const auto f = sine_field(n, len);
  const double k2 = std::pow(kTwoPi / len, 2);
  const auto lf = laplacian(f, order);
  double err = 0.0;
  for (std::size_t i = 0; i < f.count(); ++i) err = std::max(err, std::abs(lf[i] + k2 * f[i]));
  return err / k2;
}

// Trigonometric polynomial with exact derivatives, used as the Hessian oracle.
struct TrigPoly {
  double l0, l1, l2;
  double operator()(const std::array<double, 3>& x) const {
    const double a = kTwoPi * x[0] / l0, b = kTwoPi * x[1] / l1, c = kTwoPi * x[2] / l2;
    return 0.1 * std::sin(a) * std::cos(b) + 0.05 * std::cos(a + c) + 0.07 * std::sin(b) * std::sin(c);
  }
  std::array<std::array<double, 3>, 3> hess(const std::array<double, 3>& x) const {
    const double ka = kTwoPi / l0, kb = kTwoPi / l1, kc = kTwoPi / l2;
    const double a = ka * x[0], b = kb * x[1], c = kc * x[2];
    std::array<std::array<double, 3>, 3> h{};
    h[0][0] = -0.1 * ka * ka * std::sin(a) * std::cos(b) - 0.05 * ka * ka * std::cos(a + c);
    h[1][1] = -0.1 * kb * kb * std::sin(a) * std::cos(b) - 0.07 * kb * kb * std::sin(b) * std::sin(c);
    h[2][2] = -0.05 * kc * kc * std::cos(a + c) - 0.07 * kc * kc * std::sin(b) * std::sin(c);
    h[0][1] = -0.1 * ka * kb * std::cos(a) * std::sin(b);
    h[0][2] = -0.05 * ka * kc * std::cos(a + c);
    h[1][2] = 0.07 * kb * kc * std::cos(b) * std::cos(c);
    h[1][0] = h[0][1];
    h[2][0] = h[0][2];
    h[2][1] = h[1][2];
    return h;
  }
};

double det3(const std::array<std::array<double, 3>, 3>& e) {
  return e[0][0] * (e[1][1] * e[2][2] - e[1][2] * e[2][1]) - e[0][1] * (e[1][0] * e[2][2] - e[1][2] * e[2][0]) +
         e[0][2] * (e[1][0] * e[2][1] - e[1][1] * e[2][0]);
}

double hessian_det_error(int n) {
  const TrigPoly p{1.0, 1.0, 1.0};
  PeriodicField phi({n, n, n}, {1.0, 1.0, 1.0});
  phi.fill(p);
  const auto det = hessian_det(phi, 1.0);
  double err = 0.0;
  for (std::size_t i = 0; i < phi.count(); ++i) {
    auto h = p.hess(phi.position(i));
    for (int a = 0; a < 3; ++a) h[a][a] += 1.0;
    err = std::max(err, std::abs(det[i] - det3(h)));
  }
  return err;
}

}  // namespace

TEST_CASE("grid construction rules") {
  CHECK_THROWS_AS(PeriodicField({4}, {1.0}), GridError);
  CHECK_THROWS_AS(PeriodicField({8, 8}, {1.0}), GridError);
  CHECK_THROWS_AS(PeriodicField({8}, {-1.0}), GridError);
  PeriodicField f({8, 16}, {1.0, 2.0});
  CHECK(f.count() == 128);
  CHECK(f.index({-1, 17}) == f.index({7, 1}));
  const auto mi = f.multi_index(f.index({3, 5}));
  CHECK(mi[0] == 3);
  CHECK(mi[1] == 5);
  CHECK(f.volume() == doctest::Approx(2.0));
}

TEST_CASE("Laplacian annihilates constants") {
  PeriodicField f({8, 12, 10}, {1.0, 2.0, 3.0}, 4.25);
  for (int order : {2, 4}) CHECK(laplacian(f, order).max() == 0.0);
  CHECK(laplacian(f, 4).min() == 0.0);
}

TEST_CASE("Laplacian of a sine eigenfunction") {
  CHECK(laplacian_rel_error(64, 2) < 1e-3);
  CHECK(laplacian_rel_error(64, 4) < 2e-6);
}

TEST_CASE("Laplacian refinement ratios") {
  const double r2 = laplacian_rel_error(32, 2) / laplacian_rel_error(64, 2);
  CHECK(r2 == doctest::Approx(4.0).epsilon(0.02));
  const double r4 = laplacian_rel_error(32, 4) / laplacian_rel_error(64, 4);
  CHECK(r4 == doctest::Approx(16.0).epsilon(0.05));
}

TEST_CASE("Laplacian is symmetric") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  PeriodicField f({8, 10, 12}, {1.0, 1.5, 2.0}), h({8, 10, 12}, {1.0, 1.5, 2.0});
  for (auto& v : f.data()) v = u(rng);
  for (auto& v : h.data()) v = u(rng);
  for (int order : {2, 4}) {
    const double a = dot(laplacian(f, order), h);
    const double b = dot(f, laplacian(h, order));
    CHECK(std::abs(a - b) < 1e-10 * std::abs(a));
  }
}

TEST_CASE("Dirichlet energy is the quadratic form of the Laplacian") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  PeriodicField f({16, 12}, {2.0, 1.0});
  for (auto& v : f.data()) v = u(rng);
  CHECK(dirichlet_energy(f) == doctest::Approx(-0.5 * dot(f, laplacian(f, 2))).epsilon(1e-12));
}

TEST_CASE("Hessian determinant basics") {
  PeriodicField zero({8, 8, 8}, {1.0, 1.0, 1.0});
  const auto d = hessian_det(zero, 1.0);
  CHECK(d.min() == 1.0);
  CHECK(d.max() == 1.0);
  // d = 1 collapses to phi''.
  const auto f = sine_field(64, 2.0);
  const auto det1 = hessian_det(f);
  const auto d2 = second_derivative(f, 0, 0);
  for (std::size_t i = 0; i < f.count(); ++i) CHECK(det1[i] == d2[i]);
}

TEST_CASE("Hessian determinant matches the analytic oracle at second order") {
  const double e16 = hessian_det_error(16);
  const double e32 = hessian_det_error(32);
  const double e64 = hessian_det_error(64);
  CHECK(e64 < 1.0);  // determinants reach O(50) here
  CHECK(e16 / e32 == doctest::Approx(4.0).epsilon(0.1));
  CHECK(e32 / e64 == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("2-d Hessian determinant") {
  const TrigPoly p{1.0, 2.0, 1.0};
  PeriodicField phi({64, 64}, {1.0, 2.0});
  phi.fill([&](const auto& x) { return p({x[0], x[1], 0.25}); });
  const auto det = hessian_det(phi, 1.0);
  double err = 0.0;
  for (std::size_t i = 0; i < phi.count(); ++i) {
    auto x = phi.position(i);
    x[2] = 0.25;
    const auto h = p.hess(x);
    err = std::max(err, std::abs(det[i] - ((1.0 + h[0][0]) * (1.0 + h[1][1]) - h[0][1] * h[1][0])));
  }
  CHECK(err < 0.03);
}

TEST_CASE("cubic interpolation") {
  // Exact on nodes and on cubic polynomials restricted to a stencil; fourth order on smooth data.
  const auto f = sine_field(32, 1.0);
  CHECK(interpolate_cubic(f, {5 * f.spacing(0), 0, 0}) == doctest::Approx(f[5]).epsilon(1e-14));
  auto err_at = [](int n) {
    const auto g = sine_field(n, 1.0);
    double e = 0.0;
    for (double x = -0.3; x < 1.3; x += 0.0137) e = std::max(e, std::abs(interpolate_cubic(g, {x, 0, 0}) - std::sin(kTwoPi * x)));
    return e;
  };
  CHECK(err_at(32) / err_at(64) == doctest::Approx(16.0).epsilon(0.1));

  const TrigPoly p{1.0, 1.0, 1.0};
  PeriodicField g({32, 32, 32}, {1.0, 1.0, 1.0});
  g.fill(p);
  const std::array<double, 3> x{0.31, 0.77, 1.05};
  CHECK(std::abs(interpolate_cubic(g, x) - p(x)) < 1e-5);
}

TEST_CASE("quadrature is exact on constants and spectrally accurate on trig data") {
  PeriodicField c({8, 8}, {2.0, 3.0}, 1.5);
  CHECK(c.integral() == doctest::Approx(9.0));
  PeriodicField s({16}, {2.0});
  s.fill([](const auto& x) { return 1.0 + std::cos(kTwoPi * x[0] / 2.0); });
  CHECK(s.integral() == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("periodic spline interpolates nodes and converges at fourth order") {
  const double two_pi = 2.0 * std::acos(-1.0);
  auto f = [&](const std::array<double, 3>& x) { return std::sin(two_pi * x[0]) * std::cos(two_pi * x[1]) + 0.3 * std::cos(two_pi * x[0]); };
  auto err = [&](int n) {
    PeriodicField g({n, n}, {1.0, 1.0});
    g.fill(f);
    const PeriodicSpline sp(g);
    double node = 0.0;
    for (std::size_t i = 0; i < g.count(); i += 7) node = std::max(node, std::abs(sp.value(g.position(i)) - g[i]));
    CHECK(node < 1e-13);
    double e = 0.0, eg = 0.0, eh = 0.0;
    std::array<double, 3> grad;
    std::array<std::array<double, 3>, 3> hess;
    for (int k = 0; k < 50; ++k) {
      const std::array<double, 3> x{0.0137 * k + 0.003, 0.7 - 0.0191 * k, 0.0};
      const double v = sp.evaluate(x, grad, hess);
      e = std::max(e, std::abs(v - f(x)));
      const double gx = two_pi * std::cos(two_pi * x[0]) * std::cos(two_pi * x[1]) - 0.3 * two_pi * std::sin(two_pi * x[0]);
      eg = std::max(eg, std::abs(grad[0] - gx));
      const double hxy = -two_pi * two_pi * std::cos(two_pi * x[0]) * std::sin(two_pi * x[1]);
      eh = std::max(eh, std::abs(hess[0][1] - hxy));
      CHECK(hess[1][0] == hess[0][1]);
    }
    return std::array<double, 3>{e, eg, eh};
  };
  const auto e32 = err(32), e64 = err(64);
  CHECK(e32[0] / e64[0] > 12.0);
  CHECK(e32[1] / e64[1] > 6.0);
  CHECK(e32[2] / e64[2] > 3.0);
  CHECK(e64[0] < 1e-6);
}
