#include "dal/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "dal/hermitian.hpp"
#include "dal/pointwise.hpp"

namespace dal {
namespace {

Json verdict_json(std::optional<Verdict> v) {
  if (!v) return nullptr;
  return to_string(*v);
}

Json number_or_null(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

Json optional_number(const std::optional<double>& v) {
  if (!v) return nullptr;
  return number_or_null(*v);
}

Verdict aggregate(const std::vector<MonotoneVerdict>& vs) {
  bool any_binding = false;
  for (const auto& v : vs) {
    if (v.verdict == Verdict::fail) return Verdict::fail;
    if (v.verdict == Verdict::pass) any_binding = true;
  }
  return any_binding ? Verdict::pass : Verdict::recorded;
}

Verdict pass_if(bool ok) { return ok ? Verdict::pass : Verdict::fail; }

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

// Per-row flags mirroring the monotone and bound checks.
void build_flags(RunOutcome& run) {
  const auto& s = run.series;
  const std::size_t rows = s.rows();
  std::vector<int> mono(rows, 0), bound(rows, 0);
  for (std::size_t a = 0; a < s.alphas.size(); ++a) {
    if (!run.monotone[a].in_hypothesis) continue;
    for (std::size_t r = 1; r < rows; ++r) {
      const double tol = 1e-8 * std::abs(s.f[a][r - 1]) + s.allowance[a][r];
      if (s.f[a][r] - s.f[a][r - 1] > tol || std::isnan(s.f[a][r])) mono[r] = 1;
    }
  }
  if (rows > 0) {
    const bool lower = run.reduction.dual_flow;
    const double ref = lower ? s.min_dilaton[0] : s.max_dilaton[0];
    const double tol = run.config.bound_tol;
    for (std::size_t r = 0; r < rows; ++r) {
      const double breach = lower ? (ref - tol) - s.min_dilaton[r] : s.max_dilaton[r] - (ref + tol);
      if (breach > 0.0 || std::isnan(breach)) bound[r] = 1;
    }
  }
  run.flag_names = {"monotone_violation", "dilaton_bound_violation"};
  run.flags = {mono, bound};
}

MonitorSeries strided(const MonitorSeries& s, std::size_t stride) {
  if (stride <= 1) return s;
  MonitorSeries out = s;
  auto keep = [&](std::size_t r) { return r % stride == 0 || r + 1 == s.rows(); };
  auto pick = [&](const std::vector<double>& v) {
    std::vector<double> o;
    for (std::size_t r = 0; r < v.size(); ++r)
      if (keep(r)) o.push_back(v[r]);
    return o;
  };
  out.t = pick(s.t);
  out.dt = pick(s.dt);
  out.min_dilaton = pick(s.min_dilaton);
  out.max_dilaton = pick(s.max_dilaton);
  for (std::size_t a = 0; a < s.f.size(); ++a) {
    out.f[a] = pick(s.f[a]);
    out.allowance[a] = pick(s.allowance[a]);
  }
  for (std::size_t c = 0; c < s.conservation.size(); ++c) out.conservation[c] = pick(s.conservation[c]);
  if (!s.dirichlet.empty()) out.dirichlet = pick(s.dirichlet);
  return out;
}

}  // namespace

RunOutcome execute_run(const RunConfig& cfg) {
  RunOutcome run;
  run.config = cfg;
  run.reduction = make_reduction(cfg.reduction);
  const Reduction& red = run.reduction;
  const ReductionKind kind = red.params.kind;
  const int n = red.params.n;

  SeriesRecorder rec(red, cfg.alphas);
  double cf_error = 0.0;
  const bool has_closed_form = static_cast<bool>(red.closed_form_error);
  const double cf_horizon = 0.9 * red.params.r;
  bool stationary = false;
  StationaryReport last_stationary;

  IntegrateOptions opt;
  opt.t_end = cfg.t_end;
  opt.ctrl = cfg.ctrl;
  opt.floor = cfg.floor;
  opt.max_steps = cfg.max_steps;
  run.result = integrate(red.initial, red.system, opt, [&](const StepInfo& s) {
    rec.observe(s);
    if (has_closed_form && s.t <= cf_horizon * (1.0 + 1e-12)) cf_error = std::max(cf_error, red.closed_form_error(s.t, *s.after));
    if (cfg.stop_when_stationary && s.step > 0 && s.step % cfg.stationary_every == 0) {
      if (red.velocity_norm(*s.after) < cfg.stationary_tol) {
        stationary = true;
        return false;
      }
    }
    return true;
  });
  run.series = rec.series();
  const auto& s = run.series;
  last_stationary = stationary_check(red, run.result.y, cfg.stationary_tol);

  // Monotonicity under the theorem matching the flow.
  for (std::size_t a = 0; a < s.alphas.size(); ++a)
    run.monotone.push_back(red.dual_flow ? check_monotone_dual(s, a, n) : check_monotone_anomaly(s, a));
  run.bound = check_dilaton_bounds(s, red.dual_flow ? BoundKind::dual_lower : BoundKind::anomaly_upper, cfg.bound_tol);
  build_flags(run);

  Json verdicts;
  Json details;
  verdicts["monotone_dual"] = red.dual_flow ? verdict_json(aggregate(run.monotone)) : Json(nullptr);
  verdicts["monotone_anomaly"] = red.dual_flow ? Json(nullptr) : verdict_json(aggregate(run.monotone));
  verdicts["dilaton_bound"] = to_string(run.bound.verdict);
  verdicts["conservation"] = nullptr;
  verdicts["max_principle"] = nullptr;

  Json mono = Json::array();
  for (const auto& v : run.monotone) {
    Json m;
    m["alpha"] = v.alpha;
    m["in_hypothesis"] = v.in_hypothesis;
    m["verdict"] = to_string(v.verdict);
    m["violations"] = v.violations;
    m["worst_excess"] = number_or_null(v.worst_excess);
    m["first_violation_t"] = optional_number(v.first_violation_t);
    mono.push_back(m);
  }
  details["monotone"] = mono;
  {
    Json b;
    b["kind"] = red.dual_flow ? "lower" : "upper";
    b["tolerance"] = cfg.bound_tol;
    b["initial"] = s.rows() ? (red.dual_flow ? s.min_dilaton.front() : s.max_dilaton.front()) : 0.0;
    b["violations"] = run.bound.violations;
    b["worst"] = number_or_null(run.bound.worst);
    b["first_violation_t"] = optional_number(run.bound.first_violation_t);
    details["dilaton_bound"] = b;
  }

  const bool product = kind == ReductionKind::product_fibration;
  const bool cg = kind == ReductionKind::calabi_gray;
  if ((product || cg) && s.rows() > 0) {
    // Conservation: int 1/u for the product, the vector V0 for Calabi-Gray.
    const double tol = cfg.conservation_tol >= 0.0 ? cfg.conservation_tol : (product ? 1e-8 : 1e-6);
    Json cons = Json::array();
    double worst = 0.0;
    if (product) {
      const auto& c = s.conservation[0];
      for (double v : c) worst = std::max(worst, std::abs(v - c.front()) / std::abs(c.front()));
    } else {
      double norm0 = 0.0;
      for (std::size_t k = 1; k < s.conservation.size(); ++k) norm0 += s.conservation[k].front() * s.conservation[k].front();
      norm0 = std::sqrt(norm0);
      for (std::size_t r = 0; r < s.rows(); ++r) {
        double d2 = 0.0;
        for (std::size_t k = 1; k < s.conservation.size(); ++k) {
          const double d = s.conservation[k][r] - s.conservation[k].front();
          d2 += d * d;
        }
        worst = std::max(worst, std::sqrt(d2) / norm0);
      }
    }
    for (std::size_t k = 0; k < s.conservation.size(); ++k) {
      Json c;
      c["name"] = s.conservation_names[k];
      c["initial"] = s.conservation[k].front();
      c["final"] = s.conservation[k].back();
      cons.push_back(c);
    }
    verdicts["conservation"] = to_string(pass_if(worst <= tol));
    details["conservation"] = {{"quantities", cons}, {"max_relative_drift", worst}, {"tolerance", tol}};
  }
  if (product && s.rows() > 0) {
    // u = sqrt(dilaton); the extremes of u may not leave their initial range.
    const double lo = std::sqrt(s.min_dilaton.front()), hi = std::sqrt(s.max_dilaton.front());
    double worst = 0.0;
    for (std::size_t r = 0; r < s.rows(); ++r)
      worst = std::max({worst, lo - std::sqrt(s.min_dilaton[r]), std::sqrt(s.max_dilaton[r]) - hi});
    verdicts["max_principle"] = to_string(pass_if(worst <= cfg.max_principle_tol));
    details["max_principle"] = {{"initial_min", lo}, {"initial_max", hi}, {"worst_breach", worst}, {"tolerance", cfg.max_principle_tol}};
    bool decay = true;
    for (std::size_t r = 1; r < s.dirichlet.size(); ++r)
      if (s.dirichlet[r] > s.dirichlet[r - 1] + 1e-12 * std::abs(s.dirichlet[r - 1])) decay = false;
    verdicts["energy_decay"] = to_string(pass_if(decay));
    // Harmonic-mean limit Vol / int u0^{-1}.
    const double predicted = red.grid.volume() / s.conservation[0].front();
    double dev = 0.0;
    for (double v : run.result.y) dev = std::max(dev, std::abs(v - predicted));
    details["limit"] = {{"predicted", predicted}, {"max_deviation", dev}, {"tolerance", cfg.limit_tol}};
    // The limit is only meaningful once the flow has settled.
    verdicts["limit_constant"] = last_stationary.converged ? to_string(pass_if(dev < cfg.limit_tol)) : "RECORDED";
  }
  if (cg && s.rows() > 1) {
    // d(S^2)/dt <= -Vol^2 step by step, and the singular time precedes the
    // time S^2 would reach |V0|^2 at that rate.
    const double vol = red.grid.volume();
    const auto& sv = s.conservation[0];
    bool rate_ok = true;
    double worst_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t r = 1; r < s.rows(); ++r) {
      const double drop = sv[r - 1] * sv[r - 1] - sv[r] * sv[r];
      const double need = vol * vol * s.dt[r];
      worst_ratio = std::min(worst_ratio, drop / need);
      if (drop < need * (1.0 - 1e-8)) rate_ok = false;
    }
    double v0 = 0.0;
    for (std::size_t k = 1; k < s.conservation.size(); ++k) v0 += s.conservation[k].front() * s.conservation[k].front();
    const double t_hit = (sv.front() * sv.front() - v0) / (vol * vol);
    verdicts["inverse_integral_rate"] = to_string(pass_if(rate_ok));
    const bool before = run.result.singularity && run.result.singularity->t_star <= t_hit;
    verdicts["singularity_before_hit"] = to_string(pass_if(before));
    details["inverse_integral"] = {{"volume", vol}, {"min_rate_ratio", number_or_null(worst_ratio)}, {"V0_norm", std::sqrt(v0)}, {"t_hit", t_hit},
                                   {"t_bound_initial", sv.front() * sv.front() / (vol * vol)}};
  }
  Json closed = nullptr;
  if (has_closed_form) {
    closed = cf_error;
    const double tol = kind == ReductionKind::iwasawa ? 1e-7 : 1e-9;
    verdicts["closed_form"] = to_string(pass_if(cf_error < tol));
    const double r = red.params.r;
    const bool bracket = run.result.singularity && std::abs(run.result.singularity->t_star - r) <= 2.0 * run.result.singularity->dt_last;
    verdicts["extinction_time"] = to_string(pass_if(bracket));
    details["extinction"] = {{"expected", r}, {"horizon_closed_form", cf_horizon}};
  }
  if (!is_scalar_ode(kind) && !cg && red.stationary_residual) {
    const bool limit_ok = last_stationary.converged && last_stationary.residual < cfg.flat_limit_tol;
    verdicts["convergence"] = cfg.stop_when_stationary ? to_string(pass_if(limit_ok)) : "RECORDED";
    details["stationary"] = {{"velocity", number_or_null(last_stationary.velocity)},
                             {"flat_limit_residual", number_or_null(last_stationary.residual)},
                             {"velocity_tolerance", cfg.stationary_tol},
                             {"flat_limit_tolerance", cfg.flat_limit_tol}};
  }

  Json sing = nullptr;
  if (run.result.singularity) {
    const auto& r = *run.result.singularity;
    sing = {{"t_star", r.t_star}, {"type", to_string(r.type)}, {"t_detect", r.t_detect}, {"dt_last", r.dt_last}, {"witness", r.witness}, {"value", number_or_null(r.value)}};
  }
  std::string stop = "t_end";
  if (run.result.singularity) stop = "singularity";
  else if (stationary) stop = "stationary";
  else if (run.result.t < cfg.t_end) stop = "max_steps";

  Json& j = run.summary;
  j["kind"] = to_string(kind);
  j["n"] = n;
  j["seed"] = red.params.seed;
  j["grid"] = is_scalar_ode(kind) ? Json(nullptr) : Json(red.params.grid);
  j["t_end"] = cfg.t_end;
  j["t_final"] = run.result.t;
  j["steps"] = run.result.steps;
  j["stopped_by"] = stop;
  j["singularity"] = sing;
  j["verdicts"] = verdicts;
  j["closed_form_error"] = closed;
  Json finals;
  for (std::size_t a = 0; a < s.alphas.size(); ++a) finals.push_back({{"alpha", s.alphas[a]}, {"initial", s.f[a].front()}, {"final", s.f[a].back()}});
  details["F_alpha"] = finals;
  details["dilaton"] = {{"min_initial", s.min_dilaton.front()}, {"max_initial", s.max_dilaton.front()},
                        {"min_final", s.min_dilaton.back()}, {"max_final", s.max_dilaton.back()}};
  j["details"] = details;

  run.exit_code = 0;
  for (const auto& [key, v] : verdicts.items())
    if (v.is_string() && v.get<std::string>() == "FAIL") run.exit_code = 1;
  return run;
}

void write_run_artifacts(const RunOutcome& run, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ostringstream csv;
  const auto series = strided(run.series, run.config.csv_stride);
  std::vector<std::vector<int>> flags = run.flags;
  if (run.config.csv_stride > 1) {
    for (auto& f : flags) {
      std::vector<int> o;
      const std::size_t rows = run.series.rows();
      for (std::size_t r = 0; r < rows; ++r) {
        if (r % run.config.csv_stride == 0 || r + 1 == rows) o.push_back(f[r]);
      }
      f = o;
    }
  }
  write_csv(csv, series, run.flag_names, flags);
  write_text(dir / "trajectory.csv", csv.str());
  write_text(dir / "summary.json", dump(run.summary));
}

SweepOutcome run_sweep(const SweepConfig& cfg, const std::filesystem::path& out, unsigned threads) {
  SweepOutcome sw;
  sw.values = cfg.values;
  const std::size_t m = cfg.values.size();
  sw.summaries.assign(m, Json());
  sw.exit_codes.assign(m, 0);
  std::vector<std::string> errors(m);
  std::vector<std::vector<double>> finals(m);
  std::filesystem::create_directories(out);

  auto run_dir = [&](std::size_t k) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "run_%03zu", k);
    return out / buf;
  };
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t k = next++; k < m; k = next++) {
      try {
        RunConfig rc = with_override(cfg.source, cfg.parameter, cfg.values[k]);
        rc.common = cfg.base.common;
        rc.reduction.seed = cfg.base.reduction.seed;
        const auto run = execute_run(rc);
        write_run_artifacts(run, run_dir(k));
        sw.summaries[k] = run.summary;
        sw.exit_codes[k] = run.exit_code;
        for (const auto& f : run.series.f) finals[k].push_back(f.back());
      } catch (const std::exception& e) {
        errors[k] = e.what();
        sw.exit_codes[k] = 1;
        sw.summaries[k] = {{"error", e.what()}};
      }
    }
  };
  const unsigned n_threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(m)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::ostringstream idx;
  idx << "run," << cfg.parameter << ",exit_code,t_final,singularity_t_star,singularity_type,monotone,dilaton_bound,error\n";
  for (std::size_t k = 0; k < m; ++k) {
    const auto& j = sw.summaries[k];
    idx << run_dir(k).filename().string() << ",\"" << cfg.values[k] << "\"," << sw.exit_codes[k] << ",";
    if (j.contains("t_final")) {
      idx << format_double(j["t_final"].get<double>()) << ",";
      if (j["singularity"].is_null()) {
        idx << ",,";
      } else {
        idx << format_double(j["singularity"]["t_star"].get<double>()) << "," << j["singularity"]["type"].get<std::string>() << ",";
      }
      const auto& v = j["verdicts"];
      const Json& mono = v["monotone_dual"].is_null() ? v["monotone_anomaly"] : v["monotone_dual"];
      idx << mono.get<std::string>() << "," << v["dilaton_bound"].get<std::string>() << ",";
    } else {
      idx << ",,,,,";
    }
    std::string err = errors[k];
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '"', '\'');
    idx << err << "\n";
  }
  write_text(out / "sweep_index.csv", idx.str());

  if (cfg.parameter == "grid") {
    // Final F_alpha per resolution, successive differences and observed orders.
    std::ostringstream conv;
    conv << "grid";
    for (double a : cfg.base.alphas) {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%g", a);
      conv << ",F_alpha[" << buf << "],delta[" << buf << "],order[" << buf << "]";
    }
    conv << "\n";
    for (std::size_t k = 0; k < m; ++k) {
      conv << cfg.values[k];
      for (std::size_t a = 0; a < cfg.base.alphas.size(); ++a) {
        const bool have = a < finals[k].size();
        conv << "," << (have ? format_double(finals[k][a]) : "");
        std::string delta, order;
        if (k >= 1 && have && a < finals[k - 1].size()) {
          const double d1 = std::abs(finals[k][a] - finals[k - 1][a]);
          delta = format_double(d1);
          if (k >= 2 && a < finals[k - 2].size()) {
            const double d0 = std::abs(finals[k - 1][a] - finals[k - 2][a]);
            if (d0 > 0.0 && d1 > 0.0) order = format_double(std::log2(d0 / d1));
          }
        }
        conv << "," << delta << "," << order;
      }
      conv << "\n";
    }
    write_text(out / "convergence.csv", conv.str());
  }
  sw.exit_code = *std::max_element(sw.exit_codes.begin(), sw.exit_codes.end());
  return sw;
}

AlgebraOutcome run_algebra_suite(const AlgebraConfig& cfg, const std::string& inject_sign_flip) {
  AlgebraOutcome out;
  out.tolerance = cfg.tolerance;
  VerifyOptions opt;
  opt.tolerance = cfg.tolerance;
  opt.inject_sign_flip = inject_sign_flip;

  for (int n : cfg.n_list) {
    std::vector<AlgebraRow> rows;
    auto absorb = [&](const IdentityReport& rep, int seed_index) {
      for (const auto& line : rep.lines) {
        auto it = std::find_if(rows.begin(), rows.end(), [&](const AlgebraRow& r) { return r.identity == line.name; });
        if (it == rows.end()) {
          AlgebraRow r;
          r.identity = line.name;
          r.n = n;
          r.verified = line.verified;
          rows.push_back(r);
          it = rows.end() - 1;
        }
        ++it->seeds;
        const double v = line.verified ? line.residual : std::abs(line.value);
        if (v > it->max_residual || std::isnan(v)) {
          it->max_residual = v;
          it->worst_seed = seed_index;
        }
        if (line.verified && !(line.residual <= cfg.tolerance)) it->pass = false;
      }
    };
    // One independent stream per (seed, n, section).
    auto stream = [&](int section) {
      std::seed_seq seq{static_cast<std::uint32_t>(cfg.common.seed), static_cast<std::uint32_t>(cfg.common.seed >> 32),
                        static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(section)};
      return std::mt19937_64(seq);
    };
    {
      auto rng = stream(1);
      for (int k = 0; k < cfg.seeds; ++k) {
        const auto m = random_metric(n, rng);
        const Form a = random_real_form(n, 1, rng), b = random_real_form(n, 2, rng), c = random_real_form(n, 3, rng);
        absorb(verify_star_formulas(m, a, b, c, opt), k);
      }
    }
    {
      auto rng = stream(2);
      for (int k = 0; k < cfg.seeds; ++k) absorb(verify_lambda_ladder(random_point_data(n, rng), opt), k);
    }
    if (n == 3) {
      auto rng = stream(3);
      for (int k = 0; k < cfg.seeds; ++k) absorb(verify_quadratic_torsion(random_point_data(n, rng), opt), k);
    }
    {
      auto rng = stream(4);
      for (int k = 0; k < cfg.seeds; ++k) {
        const auto m = random_metric(n, rng);
        const Form phi = random_real_form(n, n - 1, rng);
        const double s = 0.5 + std::abs(uniform_pm1(rng));
        absorb(verify_flow_rewrite(m, phi, s, opt), k);
      }
    }
    {
      auto rng = stream(5);
      for (int k = 0; k < cfg.seeds; ++k) {
        const auto m = random_metric(n, rng);
        const Form a = random_real_form(n, 1, rng), b = random_real_form(n, 2, rng), c = random_real_form(n, 3, rng);
        const double s = 0.5 + std::abs(uniform_pm1(rng));
        absorb(verify_velocity_formula(m, a, b, c, s, opt), k);
      }
    }
    if (n >= 4) {
      auto rng = stream(6);
      for (int k = 0; k < cfg.seeds; ++k) {
        const auto m = random_metric(n, rng);
        absorb(verify_c_ladder(random_real_form(n, 3, rng), m, std::nullopt, opt), k);
      }
    }
    for (const auto& r : rows) {
      if (!r.pass && !out.first_failure) out.first_failure = r.identity + " (n = " + std::to_string(n) + ")";
      out.rows.push_back(r);
    }
  }
  return out;
}

void write_algebra_report(const AlgebraOutcome& out, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ostringstream csv;
  csv << "identity,n,seeds,worst_seed,max_residual,verdict\n";
  Json rows = Json::array();
  for (const auto& r : out.rows) {
    const std::string verdict = !r.verified ? "RECORDED" : (r.pass ? "PASS" : "FAIL");
    csv << r.identity << "," << r.n << "," << r.seeds << "," << r.worst_seed << "," << format_double(r.max_residual) << "," << verdict << "\n";
    rows.push_back({{"identity", r.identity}, {"n", r.n}, {"seeds", r.seeds}, {"worst_seed", r.worst_seed},
                    {"max_residual", number_or_null(r.max_residual)}, {"verdict", verdict}});
  }
  write_text(dir / "algebra_report.csv", csv.str());
  Json j;
  j["tolerance"] = out.tolerance;
  j["ok"] = out.ok();
  j["first_failure"] = out.first_failure ? Json(*out.first_failure) : Json(nullptr);
  j["identities"] = rows;
  write_text(dir / "summary.json", dump(j));
}

LegendreOutcome run_legendre_check(const LegendreConfig& cfg) {
  LegendreOutcome out;
  out.exponent_lo = cfg.exponent_lo;
  out.exponent_hi = cfg.exponent_hi;
  const auto seed = duality_seed(cfg.dimension, cfg.grid, cfg.length, cfg.common.seed);
  for (auto kind : cfg.kinds) {
    out.sweeps.push_back(duality_sweep(kind, seed, cfg.eps));
    const auto& s = out.sweeps.back();
    for (double e : {s.exponent_second_order, s.exponent_corrected})
      if (!(e >= cfg.exponent_lo && e <= cfg.exponent_hi)) out.ok = false;
  }
  for (int n : cfg.involution_grids) {
    const auto phi = cfg.involution_eps * duality_seed(cfg.dimension, n, cfg.length, cfg.common.seed);
    const auto lp = legendre_transform(phi);
    out.involution_grids.push_back(n);
    out.involution.push_back(involution_residual(phi));
    out.inverse_hessian.push_back(inverse_hessian_residual(lp));
  }
  return out;
}

void write_legendre_report(const LegendreOutcome& out, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ostringstream csv;
  csv << "kind,eps,second_order,corrected,odd,dual_rate\n";
  Json sweeps = Json::array();
  for (const auto& s : out.sweeps) {
    for (const auto& r : s.reports)
      csv << to_string(r.kind) << "," << format_double(r.eps) << "," << format_double(r.second_order) << "," << format_double(r.corrected)
          << "," << format_double(r.odd) << "," << format_double(r.dual_rate) << "\n";
    const bool ok = s.exponent_second_order >= out.exponent_lo && s.exponent_second_order <= out.exponent_hi &&
                    s.exponent_corrected >= out.exponent_lo && s.exponent_corrected <= out.exponent_hi;
    sweeps.push_back({{"kind", to_string(s.kind)},
                      {"exponent_second_order", number_or_null(s.exponent_second_order)},
                      {"exponent_corrected", number_or_null(s.exponent_corrected)},
                      {"verdict", ok ? "PASS" : "FAIL"}});
  }
  write_text(dir / "duality.csv", csv.str());
  std::ostringstream inv;
  inv << "grid,involution_residual,inverse_hessian_residual\n";
  Json invj = Json::array();
  for (std::size_t k = 0; k < out.involution_grids.size(); ++k) {
    inv << out.involution_grids[k] << "," << format_double(out.involution[k]) << "," << format_double(out.inverse_hessian[k]) << "\n";
    invj.push_back({{"grid", out.involution_grids[k]}, {"involution", out.involution[k]}, {"inverse_hessian", out.inverse_hessian[k]}});
  }
  write_text(dir / "involution.csv", inv.str());
  Json j;
  j["exponent_range"] = {out.exponent_lo, out.exponent_hi};
  j["duality"] = sweeps;
  j["involution"] = invj;
  j["ok"] = out.ok;
  write_text(dir / "summary.json", dump(j));
}

void prepare_out_dir(const std::filesystem::path& dir, bool overwrite) {
  namespace fs = std::filesystem;
  if (fs::exists(dir)) {
    if (!fs::is_directory(dir)) throw ConfigError("output path exists and is not a directory: " + dir.string());
    if (!fs::is_empty(dir) && !overwrite)
      throw ConfigError("output directory " + dir.string() + " is not empty; pass --overwrite to reuse it");
  }
  fs::create_directories(dir);
}

unsigned sweep_threads() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("DUAL_ANOMALY_LAB_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
  }
  return n;
}

}  // namespace dal
