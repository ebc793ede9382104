#pragma once

// Flat key = value configuration files with [sections], validated against a
// fixed schema before anything runs.
//
//   seed = 7                 # global keys: seed, out_dir
//   out_dir = runs/product
//   [run]
//   kind = product_fibration
//   grid = 64
//   t_end = 50
//   alphas = -1, 0, 1
//   [sweep]
//   parameter = grid
//   values = 32, 64, 128

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dal/integrator.hpp"
#include "dal/reductions.hpp"
#include "dal/semiflat.hpp"

namespace dal {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parsed file: section -> key -> raw value. Keys before the first section
/// header live in section "". '#' and ';' start comments.
struct IniFile {
  std::map<std::string, std::map<std::string, std::string>> sections;
  bool has(const std::string& section) const { return sections.count(section) != 0; }
};

IniFile parse_ini(std::istream& in, const std::string& source = "<config>");
IniFile load_ini(const std::string& path);

struct CommonConfig {
  std::uint64_t seed = 1;
  std::string out_dir;
};

struct RunConfig {
  ReductionParams reduction;
  double t_end = 1.0;
  StepController ctrl;
  double floor = 1e-6;
  std::vector<double> alphas{-1.0, 0.0, 1.0};
  /// Stop once ||y'||_inf < stationary_tol (checked every stationary_every steps).
  bool stop_when_stationary = false;
  double stationary_tol = 1e-8;
  std::size_t stationary_every = 100;
  double flat_limit_tol = 1e-5;
  double bound_tol = 1e-8;
  double max_principle_tol = 1e-8;
  /// Relative drift allowed for conservation laws; negative selects the
  /// per-kind default (1e-8 product, 1e-6 calabi_gray).
  double conservation_tol = -1.0;
  double limit_tol = 1e-4;
  /// Write every k-th CSV row (the last row is always written).
  std::size_t csv_stride = 1;
  std::size_t max_steps = 100000000;
  CommonConfig common;
};

struct SweepConfig {
  RunConfig base;
  IniFile source;  // kept so each value can be re-validated through the schema
  std::string parameter;
  std::vector<std::string> values;
};

struct AlgebraConfig {
  std::vector<int> n_list{3, 4, 5, 6};
  int seeds = 200;
  double tolerance = 1e-10;
  CommonConfig common;
};

struct LegendreConfig {
  int dimension = 3;
  int grid = 32;
  double length = 1.0;
  std::vector<double> eps{0.02, 0.01, 0.005};
  std::vector<DualityKind> kinds{DualityKind::kahler_ricci, DualityKind::anomaly};
  std::vector<int> involution_grids{16, 32};
  double involution_eps = 0.01;
  double exponent_lo = 1.7;
  double exponent_hi = 2.3;
  CommonConfig common;
};

/// Each reader validates every key of the sections it consumes and rejects
/// sections that do not belong to the command.
RunConfig read_run_config(const IniFile& ini);
SweepConfig read_sweep_config(const IniFile& ini);
AlgebraConfig read_algebra_config(const IniFile& ini);
LegendreConfig read_legendre_config(const IniFile& ini);

/// RunConfig with one [run] key replaced (used by sweeps).
RunConfig with_override(const IniFile& ini, const std::string& key, const std::string& value);

// Value parsers; throw ConfigError naming the key.
double parse_double(const std::string& key, const std::string& v);
long long parse_int(const std::string& key, const std::string& v);
bool parse_bool(const std::string& key, const std::string& v);
std::vector<std::string> split_list(const std::string& v);

}  // namespace dal
