#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "scc/optimizer.hpp"
#include "scc/params.hpp"

namespace scc {

enum class UtilityVariant { PopulationWeighted, Unweighted };

/// One run of the model. Scenario files use the parameter-file grammar:
///
///   name = baseline
///   params = ../data/dice2016.params   # relative to the scenario file
///   utility_variant = population_weighted   # or unweighted
///   temp_cap = 2.4                      # degC, every period
///   horizon_override = 20
///   plot_window = [2015, 2065]
///   output_dir = baseline               # relative to --output-dir
///   cumulative_cap = 1                  # 0 disables the cumulative cap
///   pin_s = [period, value, ...]        # fixed controls
///   pin_mu = [period, value, ...]
struct ScenarioConfig {
  std::string name;
  std::filesystem::path params_path;
  UtilityVariant utility_variant = UtilityVariant::PopulationWeighted;
  std::optional<double> temp_cap;
  std::optional<int> horizon_override;
  std::optional<std::pair<int, int>> plot_window;
  std::filesystem::path output_dir;
  bool cumulative_cap = true;
  std::vector<ControlPin> pins;
};

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Relative params paths are resolved against `base_dir`.
ScenarioConfig parse_scenario(std::string_view text, std::string_view source = "<scenario>",
                              const std::filesystem::path& base_dir = {});
ScenarioConfig load_scenario(const std::filesystem::path& path);

/// Calibration for the scenario: loaded, truncated and reweighted as
/// configured, then checked against the scenario (horizon, plot window,
/// pins). Throws ScenarioError, ParamsError or std::invalid_argument.
Params scenario_params(const ScenarioConfig& cfg);

ScenarioConstraints scenario_constraints(const ScenarioConfig& cfg);

}  // namespace scc
