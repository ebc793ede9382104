#pragma once

// Dilaton-weighted functionals F_alpha, monitor series along a trajectory and
// the verdicts of the monotonicity and dilaton-bound theorems.

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "dal/reductions.hpp"

namespace dal {

/// F_alpha = integral of ||Omega||^alpha against the flow metric's volume form.
double f_alpha(const Reduction& red, const State& y, double alpha);

struct DilatonExtremes {
  double min = 0.0;
  double max = 0.0;
  std::size_t argmin = 0;
  std::size_t argmax = 0;
};
DilatonExtremes dilaton_extremes(const Reduction& red, const State& y);

/// Time series of diagnostics, one row per accepted step (row 0 = initial data).
struct MonitorSeries {
  std::vector<double> alphas;
  std::vector<std::string> conservation_names;
  bool has_dirichlet = false;

  std::vector<double> t, dt;
  std::vector<std::vector<double>> f;          // f[a][row]
  std::vector<std::vector<double>> allowance;  // truncation allowance 10 * est, f[a][row]
  std::vector<double> min_dilaton, max_dilaton;
  std::vector<std::vector<double>> conservation;  // conservation[c][row]
  std::vector<double> dirichlet;

  std::size_t rows() const { return t.size(); }
};

/// Records rows of a MonitorSeries from integrator callbacks. The truncation
/// allowance of a step is evaluated lazily, only when some F_alpha increases by
/// more than the relative floor: two half steps from the previous state are
/// compared with the accepted full step.
class SeriesRecorder {
 public:
  SeriesRecorder(const Reduction& red, std::vector<double> alphas);
  void observe(const StepInfo& s);
  const MonitorSeries& series() const { return series_; }
  MonitorSeries& series() { return series_; }

 private:
  const Reduction& red_;
  MonitorSeries series_;
};

enum class Verdict { pass, fail, recorded };
std::string to_string(Verdict v);

struct MonotoneVerdict {
  double alpha = 0.0;
  bool in_hypothesis = true;
  Verdict verdict = Verdict::pass;
  std::size_t violations = 0;
  double worst_excess = 0.0;  // max over steps of dF - tol_step
  std::optional<double> first_violation_t;
};

/// tol_step = 1e-8 |F| + allowance; binding for alpha <= 2/(n-1).
MonotoneVerdict check_monotone_dual(const MonitorSeries& s, std::size_t alpha_index, int n);
/// Binding for alpha > 2.
MonotoneVerdict check_monotone_anomaly(const MonitorSeries& s, std::size_t alpha_index);

enum class BoundKind { dual_lower, anomaly_upper };

struct BoundVerdict {
  Verdict verdict = Verdict::pass;
  std::size_t violations = 0;
  double worst = 0.0;  // largest breach
  std::optional<double> first_violation_t;
};
BoundVerdict check_dilaton_bounds(const MonitorSeries& s, BoundKind which, double tol = 1e-8);

struct StationaryReport {
  bool converged = false;  // ||y'||_inf below threshold
  double velocity = 0.0;
  double residual = 0.0;   // distance from the Ricci-flat surrogate
};
StationaryReport stationary_check(const Reduction& red, const State& y, double threshold = 1e-8);

/// CSV with 17-significant-digit scientific numbers; flag columns are 0/1.
void write_csv(std::ostream& os, const MonitorSeries& s, const std::vector<std::string>& flag_names,
               const std::vector<std::vector<int>>& flags);
std::string format_double(double v);

}  // namespace dal
