#pragma once

#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "scc/adjoint.hpp"
#include "scc/optimizer.hpp"

namespace scc {

class NotConvergedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateDual : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BisectionBracketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Per-period marginal values at an optimum.
///   eeq_m: welfare per GtCO2 added to the emissions balance
///   cc_m:  welfare per trillion USD added to consumption
///   scc:   -unit_scale * eeq_m / cc_m, USD/tCO2
///   smac:  c1 * mu^c2, USD/tCO2
struct MarginalSeries {
  std::vector<double> eeq_m;
  std::vector<double> cc_m;
  std::vector<double> scc;
  std::vector<double> smac;

  /// scc / smac; NaN where smac is zero.
  std::vector<double> ratio() const;
};

/// Reverse sweep of W - sum_t lambda_T(t) T_AT(t) - lambda_cum sum_t E_ind(t)
/// at the optimal controls and converged multipliers. Throws
/// NotConvergedError for an unconverged optimum.
AdjointResult lagrangian_sensitivities(const Params& p, const ScenarioConstraints& sc, const OptResult& opt);

double marginal_emissions(const Params& p, const ScenarioConstraints& sc, const OptResult& opt, int period);
double marginal_consumption(const Params& p, const ScenarioConstraints& sc, const OptResult& opt, int period);

/// -unit_scale * eeq_m / cc_m per period; DegenerateDual if |cc_m| < 1e-300.
std::vector<double> scc(const std::vector<double>& eeq_m, const std::vector<double>& cc_m, double unit_scale);

std::vector<double> smac(const Controls& u, const Params& p);

MarginalSeries compute_marginals(const Params& p, const ScenarioConstraints& sc, const OptResult& opt);

/// CSV columns year,eeq_m,cc_m,scc,smac,scc_over_smac.
void write_marginals_csv(std::ostream& out, const MarginalSeries& m);

struct OracleOptions {
  double tol = 1e-10;    // stop when |V(x) - V0| <= tol * |V0|
  double x_tol = 1e-10;  // ... and the bracket is narrower than x_tol * x
  double floor = 1e-12;  // denominator floor for the relative gap
  int max_doublings = 12;
  int max_bisections = 200;
  OptimizerOptions optimizer;
};

struct OracleResult {
  int period = 0;
  double delta_e = 0.0;         // GtCO2 added to the emissions balance
  double x_native = 0.0;        // trillion USD added to consumption
  double x_compensating = 0.0;  // x_native / delta_e
  double scc_predicted = 0.0;   // USD/tCO2, from the duals
  double relative_gap = 0.0;    // |unit_scale * x_compensating - scc_predicted| / max(|scc_predicted|, floor)
  int evaluations = 0;          // re-optimizations performed
};

/// Re-optimizes the problem with delta_e added to E(period) and bisects the
/// consumption addition x at the same period until the optimal welfare
/// matches the unperturbed optimum. `baseline` must be the converged
/// unperturbed optimum for (p, sc).
OracleResult oracle_compensation(const Params& p, const ScenarioConstraints& sc, const OptResult& baseline,
                                 int period, double delta_e, const OracleOptions& opts = {});

/// oracle_compensation for several periods; periods run concurrently.
std::vector<OracleResult> oracle_batch(const Params& p, const ScenarioConstraints& sc, const OptResult& baseline,
                                       const std::vector<int>& periods, double delta_e,
                                       const OracleOptions& opts = {});

}  // namespace scc
