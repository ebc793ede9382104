#include <doctest.h>

#include <cmath>

#include "dal/grid.hpp"
#include "dal/integrator.hpp"

using namespace dal;

namespace {

FlowSystem linear_decay() {
  FlowSystem sys;
  sys.rhs = [](const State& y, State& dy) { dy[0] = -y[0]; };
  return sys;
}

FlowSystem iwasawa_ode() {
  FlowSystem sys;
  sys.rhs = [](const State& y, State& dy) { dy[0] = -0.5 * std::exp(-2.0 * y[0]); };
  sys.stable_dt = [](const State& y) { return std::exp(2.0 * y[0]); };
  sys.floor_field = [](const State& y, State& out) { out.assign(1, std::exp(2.0 * y[0])); };
  return sys;
}

double decay_error(double dt) {
  IntegrateOptions opt;
  opt.t_end = 1.0;
  opt.ctrl.max_dt = dt;
  const auto res = integrate({1.0}, linear_decay(), opt);
  return std::abs(res.y[0] - std::exp(-1.0));
}

}  // namespace

TEST_CASE("linear decay to e^-1") {
  CHECK(decay_error(1e-2) < 1e-8);
  IntegrateOptions opt;
  opt.ctrl.max_dt = 0.3;
  const auto res = integrate({1.0}, linear_decay(), opt);
  CHECK(res.t == 1.0);
  CHECK(res.steps == 4);
}

TEST_CASE("RK4 convergence order by Richardson slope") {
  const double dts[] = {0.1, 0.05, 0.025, 0.0125};
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (double dt : dts) {
    const double x = std::log(dt), y = std::log(decay_error(dt));
    sx += x, sy += y, sxx += x * x, sxy += x * y;
  }
  const double slope = (4 * sxy - sx * sy) / (4 * sxx - sx * sx);
  CHECK(slope == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("Iwasawa-type extinction ODE") {
  IntegrateOptions opt;
  opt.t_end = 2.0;
  opt.ctrl.max_dt = 1e-2;
  double err = 0.0;
  const auto res = integrate({0.0}, iwasawa_ode(), opt, [&](const StepInfo& s) {
    if (s.t <= 0.9) err = std::max(err, std::abs((*s.after)[0] - 0.5 * std::log(1.0 - s.t)));
    return true;
  });
  CHECK(err < 1e-7);
  REQUIRE(res.singularity.has_value());
  CHECK(res.singularity->type == SingularityType::field_min_zero);
  CHECK(std::abs(res.singularity->t_star - 1.0) <= 2.0 * res.singularity->dt_last);
  CHECK(res.singularity->t_detect <= 1.0);
}

TEST_CASE("heat equation first mode decay") {
  const double len = 1.0;
  PeriodicField u({64}, {len});
  const double k = 2.0 * std::acos(-1.0) / len;
  u.fill([&](const auto& x) { return std::sin(k * x[0]); });
  FlowSystem sys;
  sys.rhs = [&](const State& y, State& dy) {
    PeriodicField f = u;
    f.data() = y;
    dy = laplacian(f, 4).data();
  };
  const double h = u.spacing(0);
  sys.stable_dt = [h](const State&) { return 0.75 * 2.0 * h * h; };
  sys.floor_field = [](const State&, State& out) { out.assign(1, 1.0); };
  IntegrateOptions opt;
  opt.t_end = 1.0 / (k * k);
  opt.ctrl.max_dt = 1.0;
  const auto res = integrate(u.data(), sys, opt);
  const double amp = res.y[16] / u[16];
  CHECK(std::abs(amp - std::exp(-1.0)) < 1e-4);
}

TEST_CASE("singularity detection on recorded trajectories") {
  FlowTrajectory tr;
  tr.t = {0.0, 0.5, 1.0};
  tr.dt = {0.0, 0.5, 0.5};
  tr.floor_min = {1.0, 0.9, 0.8};
  tr.floor_max = {1.0, 10.0, 2e6};
  tr.argmin = {0, 0, 0};
  tr.argmax = {0, 3, 3};
  auto s = detect_singularity(tr, 1e-6, 1e-12);
  REQUIRE(s.has_value());
  CHECK(s->type == SingularityType::field_max_blowup);
  CHECK(s->witness == 3);
  // 1/max falls from 0.1 to 5e-7 over dt 0.5: linear zero just after t = 1.
  CHECK(s->t_star == doctest::Approx(1.0 + 5e-7 * 0.5 / (0.1 - 5e-7)));

  tr.floor_max = {1.0, 1.0, 1.0};
  tr.dt = {0.0, 1e-14, 0.5};
  s = detect_singularity(tr, 1e-6, 1e-12);
  REQUIRE(s.has_value());
  CHECK(s->type == SingularityType::dt_underflow);

  tr.dt = {0.0, 0.5, 0.5};
  CHECK_FALSE(detect_singularity(tr, 1e-6, 1e-12).has_value());
}

TEST_CASE("NaN states count as blow-up and dt underflow stops integration") {
  FlowSystem sys;
  sys.rhs = [](const State& y, State& dy) { dy[0] = y[0] * y[0]; };  // blows up at t = 1
  IntegrateOptions opt;
  opt.t_end = 5.0;
  opt.ctrl.max_dt = 0.25;
  auto res = integrate({1.0}, sys, opt);
  REQUIRE(res.singularity.has_value());
  CHECK(res.singularity->type == SingularityType::field_max_blowup);

  sys.stable_dt = [](const State& y) { return 1e-3 / (y[0] * y[0]); };
  opt.ctrl.min_dt = 1e-9;
  res = integrate({1.0}, sys, opt);
  REQUIRE(res.singularity.has_value());
  CHECK(res.singularity->t_star < 1.0);
  CHECK(res.singularity->t_star > 0.99);
}

TEST_CASE("integration is deterministic") {
  IntegrateOptions opt;
  opt.t_end = 0.95;
  const auto a = integrate({0.0}, iwasawa_ode(), opt);
  const auto b = integrate({0.0}, iwasawa_ode(), opt);
  CHECK(a.y == b.y);
  CHECK(a.trajectory.t == b.trajectory.t);
}
