// Command-line front end: run, compare, gradcheck, oracle.
// Exit codes: 0 ok, 1 gradcheck above tolerance, 2 usage/config/IO, 3 not converged.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "scc/adjoint.hpp"
#include "scc/kvfile.hpp"
#include "scc/marginals.hpp"
#include "scc/report.hpp"
#include "scc/scenario.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kUsage = 2;
constexpr int kNotConverged = 3;

fs::path under(const fs::path& root, const fs::path& p) { return p.is_absolute() ? p : root / p; }

int cmd_run(const std::string& scenario_file, const fs::path& out_root, double tol) {
  const scc::ScenarioConfig cfg = scc::load_scenario(scenario_file);
  scc::OptimizerOptions opts;
  opts.tol = tol;
  const scc::RunArtifacts art = scc::run_scenario(cfg, out_root, opts);
  const auto& s = art.summary;
  std::printf("%s: W* = %.10g, max scc/smac = %.4f in %d, kkt = %.2e, %s\n", s.name.c_str(), s.w_star,
              s.max_ratio, s.year_of_max, s.kkt_residual, s.converged ? "converged" : "NOT CONVERGED");
  std::printf("artifacts in %s\n", art.trajectory_csv.parent_path().string().c_str());
  return s.converged ? kOk : kNotConverged;
}

int cmd_compare(const std::vector<std::string>& dirs, const fs::path& out_root) {
  std::vector<scc::RunData> runs;
  for (const auto& d : dirs) runs.push_back(scc::load_run(under(out_root, d)));
  const scc::CompareReport rep = scc::compare(runs);
  for (const auto& w : rep.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  std::fputs(rep.table.c_str(), stdout);
  return kOk;
}

int cmd_gradcheck(const std::string& params_file, double eps, double tol, int points, unsigned long long seed) {
  const scc::Params p = scc::load_params(params_file);
  double worst = 0.0;
  for (int k = 0; k < points; ++k) {
    const scc::Controls u = scc::interior_sample(p, seed + static_cast<unsigned long long>(k));
    const scc::FdReport rep = scc::fd_check(p, u, eps, tol);
    std::printf("point %d (seed %llu)\n%s\n", k + 1, seed + static_cast<unsigned long long>(k),
                rep.table().c_str());
    worst = std::max(worst, rep.max_rel_error());
  }
  const bool ok = worst <= tol;
  std::printf("max relative error %.3e, tolerance %.1e: %s\n", worst, tol, ok ? "PASS" : "FAIL");
  return ok ? kOk : kCheckFailed;
}

std::vector<int> parse_periods(const std::string& list) {
  std::vector<int> out;
  std::istringstream in(list);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    const int t = std::stoi(item, &used);
    if (used != item.size()) throw std::invalid_argument("bad period '" + item + "'");
    out.push_back(t);
  }
  if (out.empty()) throw std::invalid_argument("--periods is empty");
  return out;
}

int cmd_oracle(const std::string& scenario_file, const std::string& periods_arg, double delta, double tol,
               const fs::path& out_root) {
  const scc::ScenarioConfig cfg = scc::load_scenario(scenario_file);
  const scc::Params p = scc::scenario_params(cfg);
  const scc::ScenarioConstraints sc = scc::scenario_constraints(cfg);
  const std::vector<int> periods = parse_periods(periods_arg);
  for (int t : periods) {
    if (t < 1 || t > p.t_max) throw std::invalid_argument("period " + std::to_string(t) + " outside horizon");
  }
  scc::OracleOptions oo;
  oo.optimizer.tol = tol;
  const scc::OptResult base = scc::optimize(p, sc, oo.optimizer);
  if (!base.converged) throw scc::NotConvergedError("baseline optimization did not converge");
  const auto results = scc::oracle_batch(p, sc, base, periods, delta, oo);

  std::ostringstream csv;
  csv << "period,year,delta_e,x_compensating,scc_oracle,scc_predicted,relative_gap\n";
  std::printf("%6s %6s %14s %14s %12s\n", "period", "year", "oracle", "dual", "rel. gap");
  for (const auto& r : results) {
    const double oracle = p.unit_scale * r.x_compensating;
    std::printf("%6d %6d %14.6f %14.6f %12.3e\n", r.period, scc::period_year(r.period), oracle, r.scc_predicted,
                r.relative_gap);
    csv << r.period << ',' << scc::period_year(r.period) << ',' << scc::format_double(r.delta_e) << ','
        << scc::format_double(r.x_compensating) << ',' << scc::format_double(oracle) << ','
        << scc::format_double(r.scc_predicted) << ',' << scc::format_double(r.relative_gap) << '\n';
  }
  const fs::path dir = out_root / cfg.output_dir;
  fs::create_directories(dir);
  scc::write_atomic(dir / "oracle.csv", csv.str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal-control climate-economy model: SCC and SMAC from one optimum"};
  app.require_subcommand(1);
  std::string out_root = ".";
  app.add_option("--output-dir", out_root, "Root for all written and compared run directories");
  double tol = 1e-8;
  app.add_option("--tol", tol, "Optimizer KKT tolerance")->check(CLI::PositiveNumber);

  std::string scenario_file;
  auto* run = app.add_subcommand("run", "Optimize a scenario and write its artifacts");
  run->add_option("scenario", scenario_file, "Scenario file")->required();

  std::vector<std::string> dirs;
  auto* cmp = app.add_subcommand("compare", "Tabulate scc, smac and their ratio across runs");
  cmp->add_option("dirs", dirs, "Run directories")->required();

  std::string params_file;
  double eps = 1e-5, fd_tol = 1e-6;
  int points = 5;
  unsigned long long seed = 1;
  auto* grad = app.add_subcommand("gradcheck", "Compare the adjoint gradient against finite differences");
  grad->add_option("params", params_file, "Parameter file")->required();
  grad->add_option("--eps", eps, "Relative finite-difference step")->check(CLI::PositiveNumber);
  grad->add_option("--fd-tol", fd_tol, "Pass threshold on the relative error");
  grad->add_option("--points", points, "Random interior points")->check(CLI::PositiveNumber);
  grad->add_option("--seed", seed, "Seed of the first point");

  std::string periods = "2,5,10";
  double delta = 1e-3, oracle_tol = 1e-10;
  auto* orc = app.add_subcommand("oracle", "Check SCC against compensating re-optimization");
  orc->add_option("scenario", scenario_file, "Scenario file")->required();
  orc->add_option("--periods", periods, "Comma-separated periods");
  orc->add_option("--delta", delta, "Emissions bump, GtCO2")->check(CLI::PositiveNumber);
  orc->add_option("--oracle-tol", oracle_tol, "Optimizer KKT tolerance for the oracle runs")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*run) return cmd_run(scenario_file, out_root, tol);
    if (*cmp) return cmd_compare(dirs, out_root);
    if (*grad) return cmd_gradcheck(params_file, eps, fd_tol, points, seed);
    if (*orc) return cmd_oracle(scenario_file, periods, delta, oracle_tol, out_root);
  } catch (const scc::NotConvergedError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kNotConverged;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  }
  return kUsage;
}
