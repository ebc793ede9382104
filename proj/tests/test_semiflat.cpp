#include <doctest.h>

#include <cmath>

#include "dal/semiflat.hpp"

using namespace dal;

namespace {

const double kTwoPi = 2.0 * std::acos(-1.0);

PeriodicField cosine_potential(int d, int n, double eps) {
  PeriodicField phi(std::vector<int>(static_cast<std::size_t>(d), n), std::vector<double>(static_cast<std::size_t>(d), 1.0));
  phi.fill([&](const auto& x) { return eps * std::cos(kTwoPi * x[0]); });
  return phi;
}

// Exact transform of eps cos(2 pi x) at y: solve x - 2 pi eps sin(2 pi x) = y.
double exact_chi_1d(double eps, double y) {
  double x = y;
  for (int it = 0; it < 100; ++it) {
    const double r = x - kTwoPi * eps * std::sin(kTwoPi * x) - y;
    x -= r / (1.0 - kTwoPi * kTwoPi * eps * std::cos(kTwoPi * x));
  }
  return -0.5 * (y - x) * (y - x) - eps * std::cos(kTwoPi * x);
}

double chi_error_1d(int n, double eps) {
  const auto lp = legendre_transform(cosine_potential(1, n, eps));
  double e = 0.0;
  for (std::size_t i = 0; i < lp.chi.count(); ++i) e = std::max(e, std::abs(lp.chi[i] - exact_chi_1d(eps, lp.chi.position(i)[0])));
  return e;
}

}  // namespace

TEST_CASE("flat potential gives the identity metric and transform") {
  const PeriodicField zero({8, 8, 8}, {1.0, 1.0, 1.0});
  const auto m = metric_from_potential(zero);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) CHECK(m.g[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)][17] == (a == b ? 1.0 : 0.0));
  CHECK(m.det.min() == 1.0);
  CHECK(m.dilaton().max() == 1.0);
  const auto lp = legendre_transform(zero);
  CHECK(std::max(lp.chi.max(), -lp.chi.min()) < 1e-15);
}

TEST_CASE("metric of a cosine potential") {
  const double eps = 0.002;
  const int n = 64;
  const auto m = metric_from_potential(cosine_potential(3, n, eps));
  double err = 0.0;
  for (std::size_t i = 0; i < m.det.count(); i += 5) {
    const double x = m.det.position(i)[0];
    err = std::max(err, std::abs(m.g[0][0][i] - (1.0 - eps * kTwoPi * kTwoPi * std::cos(kTwoPi * x))));
    CHECK(m.g[1][1][i] == 1.0);
    CHECK(m.g[0][2][i] == 0.0);
  }
  CHECK(err < eps * std::pow(kTwoPi, 4) / (12.0 * n * n) * 1.01);
}

TEST_CASE("metric determinant matches the Hessian determinant oracle") {
  const auto phi = 0.01 * duality_seed(3, 16, 1.0, 5);
  const auto m = metric_from_potential(phi);
  const auto det = hessian_det(phi, 1.0);
  for (std::size_t i = 0; i < det.count(); ++i) CHECK(m.det[i] == doctest::Approx(det[i]).epsilon(1e-13));
  for (std::size_t i = 0; i < det.count(); i += 11) CHECK(m.dilaton()[i] == doctest::Approx(1.0 / std::sqrt(det[i])));
}

TEST_CASE("loss of convexity is reported with a witness") {
  const auto phi = cosine_potential(2, 16, 0.05);  // 1 - 0.05 (2 pi)^2 < 0 at x = 0
  try {
    metric_from_potential(phi);
    FAIL("expected ConvexityError");
  } catch (const ConvexityError& e) {
    CHECK(e.value <= 0.0);
    CHECK(phi.position(e.witness)[0] < 0.25);
  }
  CHECK_THROWS_AS(legendre_transform(phi), ConvexityError);
}

TEST_CASE("one-dimensional transform against the exact Legendre transform") {
  const double eps = 0.01;
  const double e32 = chi_error_1d(32, eps), e64 = chi_error_1d(64, eps), e128 = chi_error_1d(128, eps);
  CHECK(e64 < 1e-6);
  CHECK(e32 / e64 > 3.5);
  CHECK(e64 / e128 > 3.5);
}

TEST_CASE("involution and inverse-Hessian duality converge under refinement") {
  std::vector<double> inv, ih;
  for (int n : {32, 64, 128}) {
    const auto phi = 0.01 * duality_seed(2, n, 1.0, 3);
    inv.push_back(involution_residual(phi));
    ih.push_back(inverse_hessian_residual(legendre_transform(phi)));
  }
  for (std::size_t k = 0; k + 1 < inv.size(); ++k) {
    CHECK(inv[k] / inv[k + 1] > 3.5);
    CHECK(ih[k] / ih[k + 1] > 3.5);
  }
  CHECK(inv[2] < 1e-9);
  CHECK(ih[2] < 1e-5);
}

TEST_CASE("Newton inversion converges quickly for small data") {
  const auto lp = legendre_transform(0.01 * duality_seed(3, 16, 1.0, 1));
  CHECK(lp.newton_iterations <= 6);
}

TEST_CASE("duality kinds parse") {
  CHECK(parse_duality_kind("kahler_ricci") == DualityKind::kahler_ricci);
  CHECK(parse_duality_kind(to_string(DualityKind::anomaly)) == DualityKind::anomaly);
  CHECK_THROWS_AS(parse_duality_kind("ricci"), std::invalid_argument);
}

TEST_CASE("duality residual vanishes at zero amplitude") {
  const auto r = duality_residual(DualityKind::anomaly, duality_seed(2, 16, 1.0, 1), 0.0);
  CHECK(r.second_order == 0.0);
  CHECK(r.corrected == 0.0);
}

TEST_CASE("transported and dual rates differ at second order by the first-order term") {
  const auto seed = duality_seed(2, 64, 1.0, 2);
  for (auto kind : {DualityKind::kahler_ricci, DualityKind::anomaly}) {
    const auto s = duality_sweep(kind, seed, {0.02, 0.01, 0.005});
    CHECK(s.exponent_second_order == doctest::Approx(2.0).epsilon(0.05));
    CHECK(s.exponent_corrected == doctest::Approx(2.0).epsilon(0.15));
    for (const auto& r : s.reports) {
      // The linear parts cancel, so the mismatch is small against the rate.
      CHECK(r.second_order < 0.05 * r.dual_rate);
      // The printed correction accounts for most of it.
      CHECK(r.corrected < 0.2 * r.second_order);
    }
    // The odd part starts at third order.
    CHECK(s.reports[0].odd / s.reports[1].odd > 6.0);
  }
}

TEST_CASE("slope fit recovers a power law") {
  CHECK(log_log_slope({1.0, 2.0, 4.0}, {3.0, 12.0, 48.0}) == doctest::Approx(2.0));
  CHECK_THROWS_AS(log_log_slope({1.0}, {1.0}), std::invalid_argument);
}
