#include "dal/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace dal {

double f_alpha(const Reduction& red, const State& y, double alpha) {
  State dil, vol;
  red.dilaton_volume(y, dil, vol);
  double acc = 0.0;
  if (alpha == 0.0) {
    for (double v : vol) acc += v;
  } else if (alpha == 1.0) {
    for (std::size_t i = 0; i < dil.size(); ++i) acc += dil[i] * vol[i];
  } else if (alpha == -1.0) {
    for (std::size_t i = 0; i < dil.size(); ++i) acc += vol[i] / dil[i];
  } else {
    for (std::size_t i = 0; i < dil.size(); ++i) acc += std::pow(dil[i], alpha) * vol[i];
  }
  return acc * red.weight;
}

DilatonExtremes dilaton_extremes(const Reduction& red, const State& y) {
  State dil, vol;
  red.dilaton_volume(y, dil, vol);
  const auto [lo, hi] = std::minmax_element(dil.begin(), dil.end());
  return {*lo, *hi, static_cast<std::size_t>(lo - dil.begin()), static_cast<std::size_t>(hi - dil.begin())};
}

SeriesRecorder::SeriesRecorder(const Reduction& red, std::vector<double> alphas) : red_(red) {
  series_.alphas = std::move(alphas);
  series_.conservation_names = red.conservation_names;
  series_.has_dirichlet = static_cast<bool>(red.dirichlet);
  series_.f.resize(series_.alphas.size());
  series_.allowance.resize(series_.alphas.size());
  series_.conservation.resize(series_.conservation_names.size());
}

void SeriesRecorder::observe(const StepInfo& s) {
  const State& y = *s.after;
  auto& out = series_;
  out.t.push_back(s.t);
  out.dt.push_back(s.dt);

  State dil, vol;
  red_.dilaton_volume(y, dil, vol);
  const auto [lo, hi] = std::minmax_element(dil.begin(), dil.end());
  out.min_dilaton.push_back(*lo);
  out.max_dilaton.push_back(*hi);

  bool suspicious = false;
  for (std::size_t a = 0; a < out.alphas.size(); ++a) {
    const double fa = f_alpha(red_, y, out.alphas[a]);
    out.f[a].push_back(fa);
    out.allowance[a].push_back(0.0);
    const std::size_t r = out.f[a].size();
    if (r >= 2 && out.f[a][r - 1] - out.f[a][r - 2] > 1e-8 * std::abs(out.f[a][r - 2])) suspicious = true;
  }
  if (suspicious && s.step > 0) {
    State half = *s.before;
    step_rk4(half, red_.system, 0.5 * s.dt);
    step_rk4(half, red_.system, 0.5 * s.dt);
    for (std::size_t a = 0; a < out.alphas.size(); ++a)
      out.allowance[a].back() = 10.0 * std::abs(out.f[a].back() - f_alpha(red_, half, out.alphas[a]));
  }

  if (red_.conservation) {
    const auto c = red_.conservation(y);
    for (std::size_t i = 0; i < c.size(); ++i) out.conservation[i].push_back(c[i]);
  }
  if (red_.dirichlet) out.dirichlet.push_back(red_.dirichlet(y));
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "PASS";
    case Verdict::fail: return "FAIL";
    default: return "RECORDED";
  }
}

namespace {

MonotoneVerdict monotone(const MonitorSeries& s, std::size_t ai, bool in_hyp) {
  MonotoneVerdict v;
  v.alpha = s.alphas.at(ai);
  v.in_hypothesis = in_hyp;
  v.worst_excess = -std::numeric_limits<double>::infinity();
  const auto& f = s.f[ai];
  for (std::size_t r = 1; r < f.size(); ++r) {
    const double tol = 1e-8 * std::abs(f[r - 1]) + s.allowance[ai][r];
    const double excess = (f[r] - f[r - 1]) - tol;
    v.worst_excess = std::max(v.worst_excess, excess);
    if (excess > 0.0 || std::isnan(f[r])) {
      ++v.violations;
      if (!v.first_violation_t) v.first_violation_t = s.t[r];
    }
  }
  if (f.size() < 2) v.worst_excess = 0.0;
  v.verdict = !in_hyp ? Verdict::recorded : (v.violations == 0 ? Verdict::pass : Verdict::fail);
  return v;
}

}  // namespace

MonotoneVerdict check_monotone_dual(const MonitorSeries& s, std::size_t alpha_index, int n) {
  return monotone(s, alpha_index, s.alphas.at(alpha_index) <= 2.0 / (n - 1) + 1e-12);
}

MonotoneVerdict check_monotone_anomaly(const MonitorSeries& s, std::size_t alpha_index) {
  return monotone(s, alpha_index, s.alphas.at(alpha_index) > 2.0);
}

BoundVerdict check_dilaton_bounds(const MonitorSeries& s, BoundKind which, double tol) {
  BoundVerdict v;
  if (s.rows() == 0) return v;
  const double ref = which == BoundKind::dual_lower ? s.min_dilaton[0] : s.max_dilaton[0];
  for (std::size_t r = 0; r < s.rows(); ++r) {
    const double breach =
        which == BoundKind::dual_lower ? (ref - tol) - s.min_dilaton[r] : s.max_dilaton[r] - (ref + tol);
    v.worst = std::max(v.worst, breach + tol);
    if (breach > 0.0 || std::isnan(breach)) {
      ++v.violations;
      if (!v.first_violation_t) v.first_violation_t = s.t[r];
    }
  }
  v.verdict = v.violations == 0 ? Verdict::pass : Verdict::fail;
  return v;
}

StationaryReport stationary_check(const Reduction& red, const State& y, double threshold) {
  StationaryReport r;
  r.velocity = red.velocity_norm(y);
  r.converged = r.velocity < threshold;
  r.residual = red.stationary_residual ? red.stationary_residual(y) : std::nan("");
  return r;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

void write_csv(std::ostream& os, const MonitorSeries& s, const std::vector<std::string>& flag_names,
               const std::vector<std::vector<int>>& flags) {
  os << "t,dt";
  for (double a : s.alphas) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", a);
    os << ",F_alpha[" << buf << "]";
  }
  os << ",min_dilaton,max_dilaton";
  for (const auto& c : s.conservation_names) os << ",conservation[" << c << "]";
  if (s.has_dirichlet) os << ",dirichlet_energy";
  for (const auto& f : flag_names) os << "," << f;
  os << "\n";
  for (std::size_t r = 0; r < s.rows(); ++r) {
    os << format_double(s.t[r]) << "," << format_double(s.dt[r]);
    for (const auto& f : s.f) os << "," << format_double(f[r]);
    os << "," << format_double(s.min_dilaton[r]) << "," << format_double(s.max_dilaton[r]);
    for (const auto& c : s.conservation) os << "," << format_double(c[r]);
    if (s.has_dirichlet) os << "," << format_double(s.dirichlet[r]);
    for (const auto& f : flags) os << "," << f.at(r);
    os << "\n";
  }
}

}  // namespace dal
