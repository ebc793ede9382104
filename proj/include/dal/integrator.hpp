#pragma once

// Explicit RK4 time stepping with a state-dependent step limit and
// finite-time singularity detection.

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace dal {

using State = std::vector<double>;

struct StepController {
  double dt = 1e-3;
  double cfl = 0.25;
  double max_dt = 1e-2;
  double min_dt = 1e-12;
};

/// Autonomous system y' = rhs(y) plus the hooks the stepper needs.
struct FlowSystem {
  std::function<void(const State& y, State& dy)> rhs;
  /// Largest stable step for the current state, before the cfl factor
  /// (e.g. 2 h^2 / (d * max diffusivity)); empty means unlimited.
  std::function<double(const State& y)> stable_dt;
  /// Quantity watched for extinction (min -> 0) and blow-up (max -> infinity),
  /// evaluated per component. Defaults to the state itself.
  std::function<void(const State& y, State& out)> floor_field;
};

/// One classical RK4 step in place.
void step_rk4(State& y, const FlowSystem& sys, double dt);

enum class SingularityType { field_min_zero, field_max_blowup, dt_underflow };
std::string to_string(SingularityType t);

struct SingularityReport {
  double t_star = 0.0;     // estimated singular time
  SingularityType type = SingularityType::field_min_zero;
  std::size_t witness = 0; // component index of the extremal value
  double value = 0.0;      // extremal value at detection
  double t_detect = 0.0;   // time of the first offending sample
  double dt_last = 0.0;    // last accepted step
};

/// Per-sample record of the watched quantity.
struct FlowTrajectory {
  std::vector<double> t;
  std::vector<double> dt;
  std::vector<double> floor_min;
  std::vector<double> floor_max;
  std::vector<std::size_t> argmin;
  std::vector<std::size_t> argmax;
};

struct StepInfo {
  double t = 0.0;  // time after the step
  double dt = 0.0;
  const State* before = nullptr;
  const State* after = nullptr;
  std::size_t step = 0;
};

/// Called once with step == 0 on the initial state and after every accepted step.
/// Returning false stops the integration.
using Monitor = std::function<bool(const StepInfo&)>;

struct IntegrateOptions {
  double t_end = 1.0;
  StepController ctrl;
  double floor = 1e-6;
  std::size_t max_steps = 100000000;
};

struct IntegrationResult {
  State y;
  double t = 0.0;
  std::size_t steps = 0;
  FlowTrajectory trajectory;
  std::optional<SingularityReport> singularity;
  bool stopped_by_monitor = false;
};

/// Step size for the next step: min(max_dt, cfl * stable_dt(y), t_end - t).
double choose_dt(const FlowSystem& sys, const State& y, const StepController& ctrl);

IntegrationResult integrate(State y0, const FlowSystem& sys, const IntegrateOptions& opt,
                            const Monitor& monitor = {});

/// First sample violating min <= floor, max >= 1/floor or dt < min_dt. The
/// singular time is extrapolated linearly from the last two samples of the
/// offending extreme (min itself, or 1/max for blow-up).
std::optional<SingularityReport> detect_singularity(const FlowTrajectory& traj, double floor, double min_dt);

}  // namespace dal
