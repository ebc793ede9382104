#include <doctest.h>

#include <cmath>
#include <sstream>

#include "dal/functionals.hpp"

using namespace dal;

namespace {

MonitorSeries synthetic(std::vector<double> f, std::vector<double> lo, std::vector<double> hi) {
  MonitorSeries s;
  s.alphas = {0.5};
  for (std::size_t r = 0; r < f.size(); ++r) {
    s.t.push_back(0.1 * static_cast<double>(r));
    s.dt.push_back(0.1);
  }
  s.f = {f};
  s.allowance = {std::vector<double>(f.size(), 0.0)};
  s.min_dilaton = std::move(lo);
  s.max_dilaton = std::move(hi);
  return s;
}

MonitorSeries record(const Reduction& red, std::vector<double> alphas, double t_end) {
  SeriesRecorder rec(red, std::move(alphas));
  IntegrateOptions opt;
  opt.t_end = t_end;
  integrate(red.initial, red.system, opt, [&](const StepInfo& s) {
    rec.observe(s);
    return true;
  });
  return rec.series();
}

}  // namespace

TEST_CASE("sl2c functional matches rho^(3 - 3 alpha / 2)") {
  ReductionParams p;
  p.kind = ReductionKind::sl2c;
  p.r = 2.0;
  const auto red = make_reduction(p);
  for (double rho : {2.0, 0.7, 0.01})
    for (double a : {-1.0, 0.0, 0.5, 1.0, 3.0})
      CHECK(f_alpha(red, {rho}, a) == doctest::Approx(red.weight * std::pow(rho, 3.0 - 1.5 * a)).epsilon(1e-13));
}

TEST_CASE("iwasawa F_1 follows the closed-form square root to the accuracy of u") {
  ReductionParams p;
  p.kind = ReductionKind::iwasawa;
  p.r = 1.0;
  const auto red = make_reduction(p);
  const auto s = record(red, {1.0}, 0.9);
  for (std::size_t r = 0; r < s.rows(); ++r)
    CHECK(std::abs(s.f[0][r] / (red.weight * std::sqrt(1.0 - s.t[r])) - 1.0) < 1e-7);
  CHECK(check_monotone_dual(s, 0, 3).verdict == Verdict::pass);
}

TEST_CASE("product fibration functional on constant data") {
  ReductionParams p;
  p.kind = ReductionKind::product_fibration;
  p.grid = 16;
  const auto red = make_reduction(p);
  const State y(red.initial.size(), 1.5);
  const double vol = red.grid.volume();
  for (double a : {-1.0, 0.0, 1.0, 2.5})
    CHECK(f_alpha(red, y, a) == doctest::Approx(vol * std::pow(1.5, 2.0 * a - 4.0)).epsilon(1e-12));
  const auto ext = dilaton_extremes(red, y);
  CHECK(ext.min == doctest::Approx(2.25));
  CHECK(ext.max == doctest::Approx(2.25));
}

TEST_CASE("theorem ranges decide which verdicts are binding") {
  auto s = synthetic({1.0, 0.9, 0.8}, {1, 1, 1}, {1, 1, 1});
  s.alphas = {1.0};
  CHECK(check_monotone_dual(s, 0, 3).in_hypothesis);
  s.alphas = {1.01};
  CHECK_FALSE(check_monotone_dual(s, 0, 3).in_hypothesis);
  CHECK(check_monotone_dual(s, 0, 3).verdict == Verdict::recorded);
  s.alphas = {2.0 / 3.0};
  CHECK(check_monotone_dual(s, 0, 4).in_hypothesis);
  s.alphas = {2.0};
  CHECK_FALSE(check_monotone_anomaly(s, 0).in_hypothesis);
  s.alphas = {2.5};
  CHECK(check_monotone_anomaly(s, 0).in_hypothesis);
}

TEST_CASE("monotone check uses the relative floor and the truncation allowance") {
  auto s = synthetic({1.0, 0.9, 0.9 + 5e-9, 0.95}, {1, 1, 1, 1}, {1, 1, 1, 1});
  auto v = check_monotone_dual(s, 0, 3);
  CHECK(v.verdict == Verdict::fail);
  CHECK(v.violations == 1);
  REQUIRE(v.first_violation_t);
  CHECK(*v.first_violation_t == doctest::Approx(0.3));
  CHECK(v.worst_excess == doctest::Approx(0.05 - 0.9e-8 - 5e-17).epsilon(1e-6));
  s.allowance[0][3] = 0.06;
  CHECK(check_monotone_dual(s, 0, 3).verdict == Verdict::pass);
  s.f[0][2] = std::nan("");
  CHECK(check_monotone_dual(s, 0, 3).verdict == Verdict::fail);
}

TEST_CASE("dilaton bound checks") {
  auto s = synthetic({1, 1, 1}, {2.0, 2.0 + 1e-3, 2.0 - 5e-9}, {3.0, 3.0 - 1e-3, 3.0 + 5e-9});
  CHECK(check_dilaton_bounds(s, BoundKind::dual_lower).verdict == Verdict::pass);
  CHECK(check_dilaton_bounds(s, BoundKind::anomaly_upper).verdict == Verdict::pass);
  s.min_dilaton[2] = 2.0 - 2e-8;
  s.max_dilaton[1] = 3.0 + 2e-8;
  const auto lo = check_dilaton_bounds(s, BoundKind::dual_lower);
  CHECK(lo.verdict == Verdict::fail);
  CHECK(lo.violations == 1);
  CHECK(lo.worst == doctest::Approx(2e-8).epsilon(1e-6));
  const auto hi = check_dilaton_bounds(s, BoundKind::anomaly_upper);
  CHECK(hi.violations == 1);
  REQUIRE(hi.first_violation_t);
  CHECK(*hi.first_violation_t == doctest::Approx(0.1));
}

TEST_CASE("recorder on a dual flow: monotone in range, allowance lazy") {
  ReductionParams p;
  p.kind = ReductionKind::product_fibration;
  p.grid = 16;
  const auto red = make_reduction(p);
  const auto s = record(red, {-1.0, 0.0, 1.0}, 0.5);
  REQUIRE(s.rows() > 2);
  CHECK(s.t.front() == 0.0);
  CHECK(s.conservation.size() == 1);
  CHECK(s.dirichlet.size() == s.rows());
  for (std::size_t a = 0; a < 3; ++a) {
    CHECK(check_monotone_dual(s, a, 3).verdict == Verdict::pass);
    for (double al : s.allowance[a]) CHECK(al == 0.0);
  }
  CHECK(check_dilaton_bounds(s, BoundKind::dual_lower).verdict == Verdict::pass);
}

TEST_CASE("stationary check on the product fibration") {
  ReductionParams p;
  p.kind = ReductionKind::product_fibration;
  p.grid = 16;
  const auto red = make_reduction(p);
  const State y(red.initial.size(), 2.0);
  const auto st = stationary_check(red, y);
  CHECK(st.converged);
  CHECK(st.residual < 1e-15);
  CHECK_FALSE(stationary_check(red, red.initial).converged);
}

TEST_CASE("CSV layout and number format") {
  auto s = synthetic({1.0, 0.5}, {1, 1}, {2, 2});
  s.conservation_names = {"int_inv_u"};
  s.conservation = {{3.0, 3.0}};
  std::ostringstream os;
  write_csv(os, s, {"singular"}, {{0, 1}});
  std::istringstream in(os.str());
  std::string header, row0, row1, extra;
  std::getline(in, header);
  std::getline(in, row0);
  std::getline(in, row1);
  CHECK(header == "t,dt,F_alpha[0.5],min_dilaton,max_dilaton,conservation[int_inv_u],singular");
  CHECK(row0 ==
        "0.0000000000000000e+00,1.0000000000000001e-01,1.0000000000000000e+00,1.0000000000000000e+00,"
        "2.0000000000000000e+00,3.0000000000000000e+00,0");
  CHECK(row1.substr(row1.size() - 2) == ",1");
  CHECK_FALSE(std::getline(in, extra));
  CHECK(format_double(-0.25) == "-2.5000000000000000e-01");
}
