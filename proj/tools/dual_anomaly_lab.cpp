// dual_anomaly_lab: identity suites, flow runs, sweeps and the semi-flat
// Legendre check. Exit codes: 0 all verdicts pass, 1 a verdict failed,
// 2 configuration or usage error.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "dal/config.hpp"
#include "dal/runner.hpp"

namespace {

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  bool overwrite = false;
  std::string inject_sign_flip;
};

dal::IniFile load(const Options& o) {
  dal::IniFile ini;
  if (!o.config.empty()) ini = dal::load_ini(o.config);
  if (o.seed) ini.sections[""]["seed"] = std::to_string(*o.seed);
  return ini;
}

std::filesystem::path out_dir(const Options& o, const dal::CommonConfig& common) {
  const std::string dir = !o.out.empty() ? o.out : common.out_dir;
  if (dir.empty()) throw dal::ConfigError("no output directory: pass --out or set out_dir");
  dal::prepare_out_dir(dir, o.overwrite);
  return dir;
}

int cmd_verify_algebra(const Options& o) {
  const auto cfg = dal::read_algebra_config(load(o));
  const auto dir = out_dir(o, cfg.common);
  const auto result = dal::run_algebra_suite(cfg, o.inject_sign_flip);
  dal::write_algebra_report(result, dir);
  for (const auto& r : result.rows) {
    if (!r.verified) continue;
    std::cout << (r.pass ? "PASS " : "FAIL ") << r.identity << " n=" << r.n << " seeds=" << r.seeds
              << " max_residual=" << dal::format_double(r.max_residual) << "\n";
  }
  if (!result.ok()) {
    std::cerr << "identity failed: " << *result.first_failure << "\n";
    return 1;
  }
  return 0;
}

int cmd_run(const Options& o) {
  const auto cfg = dal::read_run_config(load(o));
  const auto dir = out_dir(o, cfg.common);
  const auto run = dal::execute_run(cfg);
  dal::write_run_artifacts(run, dir);
  std::cout << run.summary["verdicts"].dump() << "\n";
  return run.exit_code;
}

int cmd_sweep(const Options& o) {
  const auto cfg = dal::read_sweep_config(load(o));
  const auto dir = out_dir(o, cfg.base.common);
  const auto sw = dal::run_sweep(cfg, dir, dal::sweep_threads());
  for (std::size_t k = 0; k < sw.values.size(); ++k)
    std::cout << cfg.parameter << "=" << sw.values[k] << " exit=" << sw.exit_codes[k] << "\n";
  return sw.exit_code;
}

int cmd_legendre(const Options& o) {
  const auto cfg = dal::read_legendre_config(load(o));
  const auto dir = out_dir(o, cfg.common);
  const auto result = dal::run_legendre_check(cfg);
  dal::write_legendre_report(result, dir);
  for (const auto& s : result.sweeps)
    std::cout << dal::to_string(s.kind) << " exponent_second_order=" << s.exponent_second_order
              << " exponent_corrected=" << s.exponent_corrected << "\n";
  return result.ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dual Anomaly flow laboratory"};
  app.require_subcommand(1);
  Options o;
  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* c = sub->add_option("--config", o.config, "configuration file");
    if (needs_config) c->required();
    c->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "output directory (overrides out_dir)");
    sub->add_option("--seed", o.seed, "global seed (overrides the config)");
    sub->add_flag("--overwrite", o.overwrite, "write into a non-empty output directory");
  };
  auto* algebra = app.add_subcommand("verify-algebra", "pointwise identity suite");
  add_common(algebra, false);
  algebra->add_option("--inject-sign-flip", o.inject_sign_flip, "negate the named identity (test hook)")->group("");
  auto* run = app.add_subcommand("run", "single flow run");
  add_common(run, true);
  auto* sweep = app.add_subcommand("sweep", "parameter sweep of a run");
  add_common(sweep, true);
  auto* legendre = app.add_subcommand("legendre-check", "Legendre transform and T-duality residuals");
  add_common(legendre, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  try {
    if (algebra->parsed()) return cmd_verify_algebra(o);
    if (run->parsed()) return cmd_run(o);
    if (sweep->parsed()) return cmd_sweep(o);
    return cmd_legendre(o);
  } catch (const dal::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
