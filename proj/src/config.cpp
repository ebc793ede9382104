#include "dal/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace dal {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

const std::set<std::string> kGlobalKeys{"seed", "out_dir"};
const std::set<std::string> kRunKeys{
    "kind",         "n",           "grid",           "length",           "laplacian_order",
    "amplitude",    "r",           "kappa",          "t_end",            "dt",
    "cfl",          "max_dt",      "min_dt",         "floor",            "alphas",
    "stop_when_stationary", "stationary_tol", "stationary_every", "flat_limit_tol", "bound_tol",
    "max_principle_tol", "conservation_tol", "limit_tol", "csv_stride", "max_steps"};
const std::set<std::string> kSweepKeys{"parameter", "values"};
const std::set<std::string> kAlgebraKeys{"n", "seeds", "tolerance"};
const std::set<std::string> kLegendreKeys{"dimension", "grid",          "length",      "eps",
                                          "kinds",     "involution_grids", "involution_eps", "exponent_lo",
                                          "exponent_hi"};

void check_sections(const IniFile& ini, const std::set<std::string>& allowed) {
  for (const auto& [name, keys] : ini.sections) {
    if (name.empty() || allowed.count(name)) continue;
    throw ConfigError("section [" + name + "] is not used by this command");
  }
}

void check_keys(const IniFile& ini, const std::string& section, const std::set<std::string>& allowed) {
  const auto it = ini.sections.find(section);
  if (it == ini.sections.end()) return;
  for (const auto& [key, value] : it->second) {
    if (!allowed.count(key)) {
      const std::string where = section.empty() ? "top level" : "[" + section + "]";
      throw ConfigError("unknown key '" + key + "' in " + where);
    }
  }
}

const std::string* find(const IniFile& ini, const std::string& section, const std::string& key) {
  const auto s = ini.sections.find(section);
  if (s == ini.sections.end()) return nullptr;
  const auto k = s->second.find(key);
  return k == s->second.end() ? nullptr : &k->second;
}

CommonConfig read_common(const IniFile& ini) {
  check_keys(ini, "", kGlobalKeys);
  CommonConfig c;
  if (const auto* v = find(ini, "", "seed")) {
    const long long s = parse_int("seed", *v);
    if (s < 0) throw ConfigError("seed must be non-negative");
    c.seed = static_cast<std::uint64_t>(s);
  }
  if (const auto* v = find(ini, "", "out_dir")) c.out_dir = *v;
  return c;
}

std::vector<double> parse_double_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& item : split_list(v)) out.push_back(parse_double(key, item));
  if (out.empty()) throw ConfigError("'" + key + "' needs at least one value");
  return out;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  for (const auto& item : split_list(v)) out.push_back(static_cast<int>(parse_int(key, item)));
  if (out.empty()) throw ConfigError("'" + key + "' needs at least one value");
  return out;
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

}  // namespace

IniFile parse_ini(std::istream& in, const std::string& source) {
  IniFile ini;
  ini.sections[""];
  std::string section;
  std::set<std::string> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto cut = line.find_first_of("#;");
    if (cut != std::string::npos) line = line.substr(0, cut);
    line = trim(line);
    if (line.empty()) continue;
    const std::string at = source + ":" + std::to_string(lineno) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(at + "malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) throw ConfigError(at + "empty section name");
      if (!seen.insert(section).second) throw ConfigError(at + "duplicate section [" + section + "]");
      ini.sections[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(at + "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(at + "empty key");
    auto& keys = ini.sections[section];
    if (keys.count(key)) throw ConfigError(at + "duplicate key '" + key + "'");
    keys[key] = value;
  }
  return ini;
}

IniFile load_ini(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  return parse_ini(in, path);
}

double parse_double(const std::string& key, const std::string& v) {
  const std::string s = trim(v);
  errno = 0;
  char* end = nullptr;
  const double d = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE)
    throw ConfigError("'" + key + "' expects a number, got '" + v + "'");
  return d;
}

long long parse_int(const std::string& key, const std::string& v) {
  const std::string s = trim(v);
  errno = 0;
  char* end = nullptr;
  const long long i = std::strtoll(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE)
    throw ConfigError("'" + key + "' expects an integer, got '" + v + "'");
  return i;
}

bool parse_bool(const std::string& key, const std::string& v) {
  const std::string s = trim(v);
  if (s == "true" || s == "yes" || s == "1" || s == "on") return true;
  if (s == "false" || s == "no" || s == "0" || s == "off") return false;
  throw ConfigError("'" + key + "' expects true or false, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

RunConfig read_run_config(const IniFile& ini) {
  check_sections(ini, {"run", "sweep"});
  RunConfig c;
  c.common = read_common(ini);
  check_keys(ini, "run", kRunKeys);
  const auto* kind = find(ini, "run", "kind");
  require(kind != nullptr, "[run] needs 'kind'");
  try {
    c.reduction.kind = parse_reduction_kind(*kind);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  auto get = [&](const char* key) { return find(ini, "run", key); };
  if (const auto* v = get("n")) c.reduction.n = static_cast<int>(parse_int("n", *v));
  if (const auto* v = get("grid")) c.reduction.grid = static_cast<int>(parse_int("grid", *v));
  if (const auto* v = get("length")) c.reduction.length = parse_double("length", *v);
  if (const auto* v = get("laplacian_order")) c.reduction.laplacian_order = static_cast<int>(parse_int("laplacian_order", *v));
  if (const auto* v = get("amplitude")) c.reduction.amplitude = parse_double("amplitude", *v);
  if (const auto* v = get("r")) c.reduction.r = parse_double("r", *v);
  if (const auto* v = get("kappa")) c.reduction.kappa = parse_double("kappa", *v);
  const auto* t_end = get("t_end");
  require(t_end != nullptr, "[run] needs 't_end'");
  c.t_end = parse_double("t_end", *t_end);
  if (const auto* v = get("dt")) c.ctrl.dt = parse_double("dt", *v);
  if (const auto* v = get("cfl")) c.ctrl.cfl = parse_double("cfl", *v);
  if (const auto* v = get("max_dt")) c.ctrl.max_dt = parse_double("max_dt", *v);
  if (const auto* v = get("min_dt")) c.ctrl.min_dt = parse_double("min_dt", *v);
  if (const auto* v = get("floor")) c.floor = parse_double("floor", *v);
  if (const auto* v = get("alphas")) c.alphas = parse_double_list("alphas", *v);
  if (const auto* v = get("stop_when_stationary")) c.stop_when_stationary = parse_bool("stop_when_stationary", *v);
  if (const auto* v = get("stationary_tol")) c.stationary_tol = parse_double("stationary_tol", *v);
  if (const auto* v = get("stationary_every")) c.stationary_every = static_cast<std::size_t>(parse_int("stationary_every", *v));
  if (const auto* v = get("flat_limit_tol")) c.flat_limit_tol = parse_double("flat_limit_tol", *v);
  if (const auto* v = get("bound_tol")) c.bound_tol = parse_double("bound_tol", *v);
  if (const auto* v = get("max_principle_tol")) c.max_principle_tol = parse_double("max_principle_tol", *v);
  if (const auto* v = get("conservation_tol")) c.conservation_tol = parse_double("conservation_tol", *v);
  if (const auto* v = get("limit_tol")) c.limit_tol = parse_double("limit_tol", *v);
  if (const auto* v = get("csv_stride")) c.csv_stride = static_cast<std::size_t>(parse_int("csv_stride", *v));
  if (const auto* v = get("max_steps")) c.max_steps = static_cast<std::size_t>(parse_int("max_steps", *v));
  c.reduction.seed = c.common.seed;

  require(c.reduction.n >= 3, "n must be at least 3");
  require(c.reduction.grid >= 8, "grid must be at least 8");
  require(c.reduction.laplacian_order == 2 || c.reduction.laplacian_order == 4, "laplacian_order must be 2 or 4");
  require(c.t_end > 0.0, "t_end must be positive");
  require(c.ctrl.cfl > 0.0 && c.ctrl.max_dt > 0.0 && c.ctrl.min_dt > 0.0, "cfl, max_dt and min_dt must be positive");
  require(c.floor > 0.0 && c.floor < 1.0, "floor must lie in (0, 1)");
  require(c.csv_stride >= 1, "csv_stride must be at least 1");
  require(c.stationary_every >= 1, "stationary_every must be at least 1");
  return c;
}

SweepConfig read_sweep_config(const IniFile& ini) {
  SweepConfig s;
  s.base = read_run_config(ini);
  s.source = ini;
  check_keys(ini, "sweep", kSweepKeys);
  const auto* p = find(ini, "sweep", "parameter");
  const auto* v = find(ini, "sweep", "values");
  require(p != nullptr && v != nullptr, "[sweep] needs 'parameter' and 'values'");
  s.parameter = *p;
  require(kRunKeys.count(s.parameter) != 0, "sweep parameter '" + s.parameter + "' is not a [run] key");
  // List keys (alphas) take one value per run.
  s.values = split_list(*v);
  require(!s.values.empty(), "[sweep] values is empty");
  for (const auto& value : s.values) with_override(ini, s.parameter, value);
  return s;
}

RunConfig with_override(const IniFile& ini, const std::string& key, const std::string& value) {
  IniFile copy = ini;
  copy.sections["run"][key] = value;
  return read_run_config(copy);
}

AlgebraConfig read_algebra_config(const IniFile& ini) {
  check_sections(ini, {"algebra"});
  AlgebraConfig c;
  c.common = read_common(ini);
  check_keys(ini, "algebra", kAlgebraKeys);
  if (const auto* v = find(ini, "algebra", "n")) c.n_list = parse_int_list("n", *v);
  if (const auto* v = find(ini, "algebra", "seeds")) c.seeds = static_cast<int>(parse_int("seeds", *v));
  if (const auto* v = find(ini, "algebra", "tolerance")) c.tolerance = parse_double("tolerance", *v);
  for (int n : c.n_list) require(n >= 3 && n <= 8, "algebra n must lie in 3..8");
  require(c.seeds >= 1, "seeds must be positive");
  require(c.tolerance > 0.0, "tolerance must be positive");
  return c;
}

LegendreConfig read_legendre_config(const IniFile& ini) {
  check_sections(ini, {"legendre"});
  LegendreConfig c;
  c.common = read_common(ini);
  check_keys(ini, "legendre", kLegendreKeys);
  auto get = [&](const char* key) { return find(ini, "legendre", key); };
  if (const auto* v = get("dimension")) c.dimension = static_cast<int>(parse_int("dimension", *v));
  if (const auto* v = get("grid")) c.grid = static_cast<int>(parse_int("grid", *v));
  if (const auto* v = get("length")) c.length = parse_double("length", *v);
  if (const auto* v = get("eps")) c.eps = parse_double_list("eps", *v);
  if (const auto* v = get("kinds")) {
    c.kinds.clear();
    for (const auto& k : split_list(*v)) {
      try {
        c.kinds.push_back(parse_duality_kind(k));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    }
  }
  if (const auto* v = get("involution_grids")) c.involution_grids = parse_int_list("involution_grids", *v);
  if (const auto* v = get("involution_eps")) c.involution_eps = parse_double("involution_eps", *v);
  if (const auto* v = get("exponent_lo")) c.exponent_lo = parse_double("exponent_lo", *v);
  if (const auto* v = get("exponent_hi")) c.exponent_hi = parse_double("exponent_hi", *v);
  require(c.dimension >= 1 && c.dimension <= 3, "dimension must be 1, 2 or 3");
  require(c.grid >= 8, "grid must be at least 8");
  require(c.length > 0.0, "length must be positive");
  require(c.eps.size() >= 2, "eps needs at least two amplitudes for the fit");
  for (double e : c.eps) require(e > 0.0, "eps values must be positive");
  require(!c.kinds.empty(), "kinds is empty");
  for (int n : c.involution_grids) require(n >= 8, "involution grids need at least 8 points");
  return c;
}

}  // namespace dal
