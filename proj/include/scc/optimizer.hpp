#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "scc/adjoint.hpp"
#include "scc/dynamics.hpp"

namespace scc {

enum class ControlVar { Savings, Abatement };

/// Fixes one control to a value; the optimizer then leaves it untouched.
struct ControlPin {
  int period = 1;  // 1-based
  ControlVar var = ControlVar::Savings;
  double value = 0.0;
};

struct ScenarioConstraints {
  std::optional<double> temp_cap;  // T_AT(t) <= cap for every period
  bool cumulative_cap_enabled = true;
  std::vector<ControlPin> pins;
};

/// Throws std::invalid_argument on a non-positive cap or out-of-range pin.
void check_constraints(const ScenarioConstraints& sc, const Params& p);

struct OptimizerOptions {
  double tol = 1e-8;           // relative KKT residual
  int max_outer = 40;
  int max_inner = 20000;       // per inner solve
  int memory = 12;             // L-BFGS pairs
  double penalty0 = 10.0;
  double penalty_growth = 10.0;
  double violation_ratio = 0.25;
  std::optional<Controls> start;  // default: fixed deterministic start
  std::ostream* log = nullptr;    // one line per outer iteration
};

/// One augmented-Lagrangian round. Lagrangian values are in maximization
/// form and welfare units, at the round's multipliers and penalty.
struct OuterRecord {
  double lagrangian_before = 0.0;  // at the inner solve's start
  double lagrangian_after = 0.0;   // at the inner solve's result
  double welfare = 0.0;
  double kkt_residual = 0.0;
  double max_violation = 0.0;
  double penalty = 0.0;
};

struct OptResult {
  Controls controls;
  Trajectory trajectory;
  double w_star = 0.0;
  std::vector<double> temperature_multipliers;  // per period, welfare units per degC
  double cumulative_multiplier = 0.0;           // welfare units per GtCO2
  double kkt_residual = 0.0;
  double max_violation = 0.0;                   // native units
  int iterations = 0;                           // inner iterations, all outer rounds
  int outer_iterations = 0;
  bool converged = false;
  std::vector<OuterRecord> history;

  std::vector<double> ineq_multipliers() const;
};

/// Maximizes welfare over the control box with the temperature and
/// cumulative-emissions caps handled by an augmented Lagrangian.
/// Perturbations shift the emissions/consumption right-hand sides of the
/// problem being solved.
OptResult optimize(const Params& p, const ScenarioConstraints& sc, const OptimizerOptions& opts = {},
                   std::span<const Perturbation> perturbations = {});

Controls default_start(const Params& p);

/// Clamps s to [0, 1] and mu to [0, pi35(t)].
Controls project(const Controls& u, const Params& p);

struct AlUpdate {
  std::vector<double> multipliers;
  double penalty = 0.0;
};

/// lambda' = max(0, lambda + penalty * violation); the penalty is multiplied
/// by `growth` when the worst positive violation did not shrink below
/// `ratio * previous_violation`.
AlUpdate al_update(std::span<const double> multipliers, std::span<const double> violations, double penalty,
                   double previous_violation, double ratio = 0.25, double growth = 10.0);

}  // namespace scc
