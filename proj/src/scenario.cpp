#include "scc/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "scc/kvfile.hpp"

namespace scc {

namespace {

[[noreturn]] void fail(std::string_view source, int line, const std::string& msg) {
  throw ScenarioError(std::string(source) + ":" + std::to_string(line) + ": " + msg);
}

double number(const KvEntry& e, std::string_view source) {
  if (const auto* v = std::get_if<double>(&e.value)) return *v;
  fail(source, e.line, "'" + e.key + "' expects a number");
}

int integer(const KvEntry& e, std::string_view source) {
  const double v = number(e, source);
  if (v != std::floor(v) || std::abs(v) > 1e9) fail(source, e.line, "'" + e.key + "' expects an integer");
  return static_cast<int>(v);
}

const std::string& text(const KvEntry& e, std::string_view source) {
  if (const auto* v = std::get_if<std::string>(&e.value)) return *v;
  fail(source, e.line, "'" + e.key + "' expects a string");
}

const std::vector<double>& list(const KvEntry& e, std::string_view source) {
  if (const auto* v = std::get_if<std::vector<double>>(&e.value)) return *v;
  fail(source, e.line, "'" + e.key + "' expects a list");
}

void add_pins(const KvEntry& e, std::string_view source, ControlVar var, std::vector<ControlPin>& out) {
  const auto& v = list(e, source);
  if (v.size() % 2 != 0) fail(source, e.line, "'" + e.key + "' expects period/value pairs");
  for (std::size_t i = 0; i < v.size(); i += 2) {
    if (v[i] != std::floor(v[i])) fail(source, e.line, "pin period must be an integer");
    out.push_back({static_cast<int>(v[i]), var, v[i + 1]});
  }
}

}  // namespace

ScenarioConfig parse_scenario(std::string_view text_in, std::string_view source,
                              const std::filesystem::path& base_dir) {
  ScenarioConfig cfg;
  std::set<std::string> seen;
  bool have_params = false;
  bool have_output = false;
  for (const KvEntry& e : parse_kv(text_in, source)) {
    if (!seen.insert(e.key).second) fail(source, e.line, "duplicate key '" + e.key + "'");
    if (e.key == "name") {
      cfg.name = text(e, source);
    } else if (e.key == "params") {
      cfg.params_path = base_dir / text(e, source);
      have_params = true;
    } else if (e.key == "utility_variant") {
      const auto& v = text(e, source);
      if (v == "population_weighted") {
        cfg.utility_variant = UtilityVariant::PopulationWeighted;
      } else if (v == "unweighted") {
        cfg.utility_variant = UtilityVariant::Unweighted;
      } else {
        fail(source, e.line, "utility_variant must be population_weighted or unweighted");
      }
    } else if (e.key == "temp_cap") {
      const double cap = number(e, source);
      if (!(cap > 0.0)) fail(source, e.line, "temp_cap must be positive");
      cfg.temp_cap = cap;
    } else if (e.key == "horizon_override") {
      const int n = integer(e, source);
      if (n < 1) fail(source, e.line, "horizon_override must be >= 1");
      cfg.horizon_override = n;
    } else if (e.key == "plot_window") {
      const auto& v = list(e, source);
      if (v.size() != 2 || v[0] != std::floor(v[0]) || v[1] != std::floor(v[1]) || v[0] >= v[1]) {
        fail(source, e.line, "plot_window expects [year_from, year_to] with year_from < year_to");
      }
      cfg.plot_window = std::pair{static_cast<int>(v[0]), static_cast<int>(v[1])};
    } else if (e.key == "output_dir") {
      cfg.output_dir = text(e, source);
      have_output = true;
    } else if (e.key == "cumulative_cap") {
      const int flag = integer(e, source);
      if (flag != 0 && flag != 1) fail(source, e.line, "cumulative_cap must be 0 or 1");
      cfg.cumulative_cap = flag == 1;
    } else if (e.key == "pin_s") {
      add_pins(e, source, ControlVar::Savings, cfg.pins);
    } else if (e.key == "pin_mu") {
      add_pins(e, source, ControlVar::Abatement, cfg.pins);
    } else {
      fail(source, e.line, "unknown key '" + e.key + "'");
    }
  }
  if (cfg.name.empty()) fail(source, 0, "missing key 'name'");
  if (!have_params) fail(source, 0, "missing key 'params'");
  if (!have_output) cfg.output_dir = cfg.name;
  if (cfg.output_dir.is_absolute()) fail(source, 0, "output_dir must be relative");
  if (!std::filesystem::is_regular_file(cfg.params_path)) {
    fail(source, 0, "params file not found: " + cfg.params_path.string());
  }
  return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path.string(), path.parent_path());
}

Params scenario_params(const ScenarioConfig& cfg) {
  Params p = load_params(cfg.params_path);
  if (cfg.horizon_override) {
    if (*cfg.horizon_override > p.t_max) {
      throw ScenarioError("horizon_override " + std::to_string(*cfg.horizon_override) + " exceeds t_max " +
                          std::to_string(p.t_max));
    }
    p = p.truncated(*cfg.horizon_override);
  }
  if (cfg.utility_variant == UtilityVariant::Unweighted) p = p.with_unit_utility_weights();
  const ValidationReport report = validate(p);
  if (!report.ok()) {
    const auto& e = report.errors.front();
    throw ScenarioError("invalid parameters: " + e.field + ": " + e.message);
  }
  if (cfg.plot_window) {
    const auto [from, to] = *cfg.plot_window;
    if (from < period_year(1) || to > period_year(p.t_max)) {
      throw ScenarioError("plot_window [" + std::to_string(from) + ", " + std::to_string(to) +
                          "] outside the horizon " + std::to_string(period_year(1)) + "-" +
                          std::to_string(period_year(p.t_max)));
    }
  }
  try {
    check_constraints(scenario_constraints(cfg), p);
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(e.what());
  }
  return p;
}

ScenarioConstraints scenario_constraints(const ScenarioConfig& cfg) {
  ScenarioConstraints sc;
  sc.temp_cap = cfg.temp_cap;
  sc.cumulative_cap_enabled = cfg.cumulative_cap;
  sc.pins = cfg.pins;
  return sc;
}

}  // namespace scc
