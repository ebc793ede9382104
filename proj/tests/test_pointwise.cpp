#include <doctest.h>

#include <cmath>
#include <random>

#include "dal/pointwise.hpp"

using namespace dal;

namespace {

constexpr cplx kI{0.0, 1.0};

HermitianPointData flat_point(int n, const TorsionTensor& t) {
  return {HermitianMetric::identity(n), t, Form(n, 1, 1), Form(n, 2, 2)};
}

}  // namespace

TEST_CASE("torsion tensor antisymmetry") {
  std::mt19937_64 rng(31);
  const auto t = random_torsion(4, rng);
  CHECK(t.antisymmetric());
  for (int k = 0; k < 4; ++k)
    for (int j = 0; j < 4; ++j) CHECK(t(k, j, j) == cplx{});
}

TEST_CASE("vanishing torsion") {
  const auto d = flat_point(3, TorsionTensor(3));
  const auto tc = build_contractions(d);
  CHECK(tc.norm_t2 == 0.0);
  CHECK(tc.norm_tau2 == 0.0);
  CHECK(tc.box.max_abs() == 0.0);
  CHECK(verify_lambda_ladder(d).ok());
  CHECK(verify_quadratic_torsion(d).ok());
}

TEST_CASE("single torsion entry T_{1bar 2 3} at the identity metric") {
  // Hand computation: tau = 0, |T|^2 = 2 (both orderings of (2,3)),
  // T = T_{1bar32} dz^2 dz^3 dzbar^1 gives C = i T ^ Tbar = -omega^3/6.
  TorsionTensor t(3);
  t.set(0, 1, 2, 1.0);
  const auto d = flat_point(3, t);
  const auto tc = build_contractions(d);
  CHECK(tc.norm_tau2 == doctest::Approx(0.0));
  CHECK(tc.norm_t2 == doctest::Approx(2.0));
  CHECK(tc.tau.max_abs() == 0.0);
  const Form c = kI * wedge(torsion_form(t), conj(torsion_form(t)));
  CHECK(max_diff(c, (-1.0 / 6.0) * d.metric.omega_power(3)) < 1e-15);
  CHECK(scalar_value(contraction_power(c, d.metric, 3)).real() / 6.0 == doctest::Approx(-1.0));
  const auto rep = verify_lambda_ladder(d);
  CHECK(rep.ok());
  CHECK(verify_quadratic_torsion(d).ok());
}

TEST_CASE("trace torsion from a T_{1bar 1 2} entry") {
  // tau_l = sum_j T_{jbar j l}: only T_{1bar 1 2} = 1 contributes, tau_2 = 1.
  TorsionTensor t(3);
  t.set(0, 0, 1, 1.0);
  const auto d = flat_point(3, t);
  const auto tc = build_contractions(d);
  CHECK(std::abs(tc.tau.at(0b010, 0) - cplx(1.0)) < 1e-15);
  CHECK(std::abs(tc.tau.at(0b001, 0)) < 1e-15);
  CHECK(tc.norm_tau2 == doctest::Approx(1.0));
  CHECK(tc.norm_t2 == doctest::Approx(2.0));
  CHECK(verify_lambda_ladder(d).ok());
  CHECK(verify_quadratic_torsion(d).ok());
}

TEST_CASE("codifferential of omega is -i tau through the star") {
  std::mt19937_64 rng(37);
  for (int n = 3; n <= 5; ++n) {
    const auto d = random_point_data(n, rng);
    const auto tc = build_contractions(d);
    CHECK(max_diff(kI * dbar_star_omega(d.metric, d.torsion), tc.tau) < 1e-11);
    CHECK(max_diff(-1.0 * kI * d_star_omega(d.metric, d.torsion), conj(tc.tau)) < 1e-11);
  }
}

TEST_CASE("Lambda T = -i tau") {
  std::mt19937_64 rng(41);
  const auto d = random_point_data(4, rng);
  const auto tc = build_contractions(d);
  CHECK(max_diff(contraction(torsion_form(d.torsion), d.metric), -1.0 * kI * tc.tau) < 1e-12);
}

TEST_CASE("box and circ contractions are real and positive semidefinite") {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 3 + trial % 3;
    const auto d = random_point_data(n, rng);
    const auto tc = build_contractions(d);
    CHECK(is_real(tc.box, 1e-12));
    CHECK(is_real(tc.circ, 1e-12));
    CHECK(min_eigenvalue_11(tc.box) > -1e-12);
    CHECK(min_eigenvalue_11(tc.circ) > -1e-12);
    // Both contractions trace to |T|^2.
    CHECK(trace_11(tc.box, d.metric) == doctest::Approx(tc.norm_t2).epsilon(1e-12));
    CHECK(trace_11(tc.circ, d.metric) == doctest::Approx(tc.norm_t2).epsilon(1e-12));
  }
}

TEST_CASE("Lambda ladder on random Hermitian data") {
  std::mt19937_64 rng(47);
  double worst = 0.0;
  for (int trial = 0; trial < 120; ++trial) {
    const int n = 3 + trial % 3;
    const auto d = random_point_data(n, rng);
    const auto rep = verify_lambda_ladder(d);
    INFO("trial " << trial << " failed " << rep.failed_line().value_or("none"));
    CHECK(rep.ok());
    worst = std::max(worst, rep.max_residual());
    bool logged = false;
    for (const auto& l : rep.lines) logged = logged || (!l.verified && l.name == "lambda_ddbar_omega");
    CHECK(logged);
  }
  MESSAGE("ladder worst residual " << worst);
}

TEST_CASE("n = 3 quadratic torsion identity over 500 seeds") {
  std::mt19937_64 rng(53);
  double worst = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const auto d = random_point_data(3, rng);
    const auto rep = verify_quadratic_torsion(d);
    worst = std::max(worst, rep.max_residual());
  }
  CHECK(worst < 1e-10);
  std::mt19937_64 rng4(59);
  CHECK_THROWS_AS(verify_quadratic_torsion(random_point_data(4, rng4)), DegreeError);
}

TEST_CASE("sign flips are detected") {
  std::mt19937_64 rng(61);
  const auto d = random_point_data(3, rng);
  VerifyOptions opt;
  opt.inject_sign_flip = "quadratic_torsion_n3";
  const auto rep = verify_quadratic_torsion(d, opt);
  REQUIRE(rep.failed_line().has_value());
  CHECK(*rep.failed_line() == "quadratic_torsion_n3");
  opt.inject_sign_flip = "lambda2_C";
  CHECK(verify_lambda_ladder(d, opt).failed_line() == std::optional<std::string>("lambda2_C"));
}

TEST_CASE("metric velocity: linear solve vs star route") {
  std::mt19937_64 rng(67);
  for (int n = 3; n <= 5; ++n) {
    for (int trial = 0; trial < 10; ++trial) {
      const auto m = random_metric(n, rng);
      const Form phi = random_real_form(n, n - 1, rng);
      const double s = 0.5 + std::abs(uniform_pm1(rng));
      const auto rep = verify_flow_rewrite(m, phi, s);
      CHECK(rep.ok());
      CHECK(is_real(solve_metric_velocity(phi, m, s), 1e-10));
    }
  }
}

TEST_CASE("metric velocity of Phi = omega^{n-1}") {
  // X = c omega: -(1/2) s n c omega^{n-1} + (n-1) s c omega^{n-1} = omega^{n-1}
  // gives c = 2 / (s (n - 2)).
  for (int n = 3; n <= 5; ++n) {
    const auto m = HermitianMetric::identity(n);
    const double s = 1.7;
    const Form x = solve_metric_velocity(m.omega_power(n - 1), m, s);
    CHECK(max_diff(x, (2.0 / (s * (n - 2))) * m.omega()) < 1e-12);
  }
}

TEST_CASE("closed Lambda form of the metric velocity") {
  std::mt19937_64 rng(71);
  for (int n = 3; n <= 5; ++n) {
    for (int trial = 0; trial < 10; ++trial) {
      const auto m = random_metric(n, rng);
      const Form a = random_real_form(n, 1, rng);
      const Form b = random_real_form(n, 2, rng);
      const Form c = random_real_form(n, 3, rng);
      const double s = 0.5 + std::abs(uniform_pm1(rng));
      const auto rep = verify_velocity_formula(m, a, b, c, s);
      INFO("n=" << n << " residual " << rep.max_residual());
      CHECK(rep.ok());
    }
  }
}

TEST_CASE("star identities for A, B and C") {
  std::mt19937_64 rng(73);
  for (int n = 3; n <= 6; ++n) {
    const int seeds = n == 6 ? 20 : 200;
    double worst = 0.0;
    for (int s = 0; s < seeds; ++s) {
      const auto m = random_metric(n, rng);
      const auto rep = verify_star_formulas(m, random_real_form(n, 1, rng), random_real_form(n, 2, rng),
                                            random_real_form(n, 3, rng));
      worst = std::max(worst, rep.max_residual());
    }
    INFO("n=" << n);
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("Lefschetz ladder of a (3,3)-form") {
  std::mt19937_64 rng(79);
  for (int n = 3; n <= 6; ++n) {
    for (int trial = 0; trial < 10; ++trial) {
      const auto m = random_metric(n, rng);
      const auto rep = verify_c_ladder(random_real_form(n, 3, rng), m);
      INFO("n=" << n << " failed " << rep.failed_line().value_or("none"));
      CHECK(rep.ok());
    }
  }
}

TEST_CASE("a P4 coefficient of (n-2) fails whenever P4 is nonzero") {
  std::mt19937_64 rng(83);
  for (int n = 5; n <= 6; ++n) {
    const auto m = random_metric(n, rng);
    const Form c = random_real_form(n, 3, rng);
    const auto rep = verify_c_ladder(c, m, static_cast<double>(n - 2));
    CHECK(rep.failed_line() == std::optional<std::string>("lambda_C"));
  }
  // For n <= 4, L P4 vanishes on (3,3)-forms and any coefficient passes.
  for (int n = 3; n <= 4; ++n) {
    const auto m = random_metric(n, rng);
    CHECK(verify_c_ladder(random_real_form(n, 3, rng), m, static_cast<double>(n - 2)).ok());
  }
}
