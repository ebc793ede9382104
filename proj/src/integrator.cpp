#include "dal/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dal {
namespace {

void floor_values(const FlowSystem& sys, const State& y, State& out) {
  if (sys.floor_field) {
    sys.floor_field(y, out);
  } else {
    out = y;
  }
}

void record(FlowTrajectory& traj, const FlowSystem& sys, const State& y, double t, double dt, State& scratch) {
  floor_values(sys, y, scratch);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  std::size_t ilo = 0, ihi = 0;
  bool bad = false;
  for (std::size_t i = 0; i < scratch.size(); ++i) {
    const double v = scratch[i];
    if (!std::isfinite(v)) {
      bad = true;
      ihi = i;
      break;
    }
    if (v < lo) lo = v, ilo = i;
    if (v > hi) hi = v, ihi = i;
  }
  if (bad) hi = std::numeric_limits<double>::infinity();
  traj.t.push_back(t);
  traj.dt.push_back(dt);
  traj.floor_min.push_back(lo);
  traj.floor_max.push_back(hi);
  traj.argmin.push_back(ilo);
  traj.argmax.push_back(ihi);
}

std::optional<SingularityReport> check_sample(const FlowTrajectory& traj, std::size_t i, double floor) {
  const double lo = traj.floor_min[i];
  const double hi = traj.floor_max[i];
  SingularityReport rep;
  rep.t_detect = traj.t[i];
  rep.t_star = traj.t[i];
  rep.dt_last = traj.dt[i];
  if (lo <= floor) {
    rep.type = SingularityType::field_min_zero;
    rep.witness = traj.argmin[i];
    rep.value = lo;
    if (i > 0 && traj.floor_min[i - 1] > lo) {
      const double slope = (traj.floor_min[i - 1] - lo) / (traj.t[i] - traj.t[i - 1]);
      rep.t_star = traj.t[i] + std::max(lo, 0.0) / slope;
    }
    return rep;
  }
  if (!(hi < 1.0 / floor)) {
    rep.type = SingularityType::field_max_blowup;
    rep.witness = traj.argmax[i];
    rep.value = hi;
    if (std::isfinite(hi) && i > 0 && std::isfinite(traj.floor_max[i - 1]) && traj.floor_max[i - 1] > 0.0) {
      const double r0 = 1.0 / traj.floor_max[i - 1];
      const double r1 = 1.0 / hi;
      if (r0 > r1) rep.t_star = traj.t[i] + r1 * (traj.t[i] - traj.t[i - 1]) / (r0 - r1);
    }
    return rep;
  }
  return std::nullopt;
}

}  // namespace

std::string to_string(SingularityType t) {
  switch (t) {
    case SingularityType::field_min_zero: return "field_min_zero";
    case SingularityType::field_max_blowup: return "field_max_blowup";
    default: return "dt_underflow";
  }
}

void step_rk4(State& y, const FlowSystem& sys, double dt) {
  const std::size_t n = y.size();
  State k1(n), k2(n), k3(n), k4(n), tmp(n);
  sys.rhs(y, k1);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * dt * k1[i];
  sys.rhs(tmp, k2);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * dt * k2[i];
  sys.rhs(tmp, k3);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + dt * k3[i];
  sys.rhs(tmp, k4);
  for (std::size_t i = 0; i < n; ++i) y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

double choose_dt(const FlowSystem& sys, const State& y, const StepController& ctrl) {
  double dt = ctrl.max_dt;
  if (sys.stable_dt) {
    const double s = sys.stable_dt(y);
    if (std::isnan(s)) return 0.0;
    dt = std::min(dt, ctrl.cfl * s);
  }
  return dt;
}

IntegrationResult integrate(State y0, const FlowSystem& sys, const IntegrateOptions& opt, const Monitor& monitor) {
  IntegrationResult res;
  res.y = std::move(y0);
  State scratch;
  record(res.trajectory, sys, res.y, 0.0, 0.0, scratch);
  if (auto s = check_sample(res.trajectory, 0, opt.floor)) {
    res.singularity = s;
    return res;
  }
  State before;
  if (monitor) {
    StepInfo info{0.0, 0.0, &res.y, &res.y, 0};
    if (!monitor(info)) {
      res.stopped_by_monitor = true;
      return res;
    }
  }
  // Relative slack so that t_end is reached exactly instead of by a sliver step.
  const double t_eps = 1e-13 * std::max(1.0, std::abs(opt.t_end));
  while (res.t < opt.t_end - t_eps && res.steps < opt.max_steps) {
    const double dt_stable = choose_dt(sys, res.y, opt.ctrl);
    if (!(dt_stable >= opt.ctrl.min_dt)) {
      SingularityReport rep;
      rep.type = SingularityType::dt_underflow;
      rep.t_star = rep.t_detect = res.t;
      rep.dt_last = res.trajectory.dt.back();
      rep.value = dt_stable;
      res.singularity = rep;
      return res;
    }
    const double dt = std::min(dt_stable, opt.t_end - res.t);
    if (monitor) before = res.y;
    step_rk4(res.y, sys, dt);
    ++res.steps;
    res.t = (opt.t_end - (res.t + dt) <= t_eps) ? opt.t_end : res.t + dt;
    record(res.trajectory, sys, res.y, res.t, dt, scratch);
    if (auto s = check_sample(res.trajectory, res.trajectory.t.size() - 1, opt.floor)) {
      res.singularity = s;
      return res;
    }
    if (monitor) {
      StepInfo info{res.t, dt, &before, &res.y, res.steps};
      if (!monitor(info)) {
        res.stopped_by_monitor = true;
        return res;
      }
    }
  }
  return res;
}

std::optional<SingularityReport> detect_singularity(const FlowTrajectory& traj, double floor, double min_dt) {
  for (std::size_t i = 0; i < traj.t.size(); ++i) {
    if (auto s = check_sample(traj, i, floor)) return s;
    if (i > 0 && traj.dt[i] < min_dt && i + 1 < traj.t.size()) {
      SingularityReport rep;
      rep.type = SingularityType::dt_underflow;
      rep.t_star = rep.t_detect = traj.t[i];
      rep.dt_last = traj.dt[i];
      rep.value = traj.dt[i];
      return rep;
    }
  }
  return std::nullopt;
}

}  // namespace dal
