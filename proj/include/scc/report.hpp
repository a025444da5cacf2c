#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "scc/marginals.hpp"
#include "scc/scenario.hpp"

namespace scc {

struct RunSummary {
  std::string name;
  double w_star = 0.0;
  double max_ratio = 0.0;  // max of scc/smac over the ratio column, NaN entries skipped
  int year_of_max = 0;
  bool converged = false;
  double kkt_residual = 0.0;
  double max_violation = 0.0;
  int outer_iterations = 0;
};

struct RunArtifacts {
  std::filesystem::path trajectory_csv;
  std::filesystem::path marginals_csv;
  std::filesystem::path plot_svg;
  std::filesystem::path convergence_log;
  std::filesystem::path summary_file;
  RunSummary summary;
  OptResult result;
  MarginalSeries marginals;  // empty when the optimum did not converge
};

/// Writes `content` to `path` through a sibling temp file and a rename.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// Optimizes the scenario and writes trajectory.csv, marginals.csv,
/// plot.svg, convergence.log and summary.txt under output_root/cfg.output_dir.
/// An unconverged optimum still writes every file; summary.converged is then
/// false and the marginal columns are NaN.
RunArtifacts run_scenario(const ScenarioConfig& cfg, const std::filesystem::path& output_root,
                          const OptimizerOptions& opts = {});

std::string format_summary(const RunSummary& s);
RunSummary parse_summary(std::string_view text, std::string_view source = "<summary>");

/// max of ratio (NaN skipped) and the year it occurs; {NaN, 0} if none.
std::pair<double, int> max_ratio(const std::vector<int>& years, const std::vector<double>& ratio);

/// Marginal columns of a finished run, read back from its directory.
struct RunData {
  std::string name;
  std::vector<int> years;
  std::vector<double> scc;
  std::vector<double> smac;
  std::vector<double> ratio;
};

RunData load_run(const std::filesystem::path& dir);

struct CompareReport {
  std::string table;                  // aligned text, one row per year
  std::vector<std::string> warnings;  // e.g. mismatched horizons
  int flagged = 0;                    // (scenario, year) cells with ratio outside [0.9, 1.1]
  std::vector<double> max_ratio;      // per run
};

/// Throws std::invalid_argument on an empty list.
CompareReport compare(const std::vector<RunData>& runs);

struct PlotSeries {
  std::string label;
  std::vector<int> years;
  std::vector<double> values;
};

/// Self-contained SVG with one polyline per series, year axis and USD/tCO2
/// axis. Points outside `window` or non-finite are dropped. Byte-identical
/// output for identical input. Throws std::invalid_argument on no series.
std::string emit_plot(const std::vector<PlotSeries>& series, const std::string& title,
                      std::optional<std::pair<int, int>> window = std::nullopt);

}  // namespace scc
