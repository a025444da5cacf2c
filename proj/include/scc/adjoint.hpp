#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "scc/dynamics.hpp"

namespace scc {

struct Gradient {
  std::vector<double> d_s;   // dW/ds(t)
  std::vector<double> d_mu;  // dW/dmu(t)
};

/// Weights of the scalar functional differentiated by `adjoint`:
///   J = welfare * W + sum_t t_at[t] * T_AT(t) + sum_t e_ind[t] * E_ind(t).
/// Empty vectors mean zero weight. The optimizer uses the extra terms for
/// the temperature and cumulative-emissions constraints.
struct AdjointSeeds {
  double welfare = 1.0;
  std::vector<double> t_at;
  std::vector<double> e_ind;
};

struct AdjointResult {
  Trajectory trajectory;
  double value = 0.0;                 // J
  Gradient grad;                      // dJ/d(controls)
  std::vector<double> d_emissions;    // dJ/da for an emissions RHS addition at t
  std::vector<double> d_consumption;  // dJ/da for a consumption RHS addition at t
};

/// Forward simulation followed by the hand-derived reverse sweep.
AdjointResult adjoint(const Params& p, const Controls& u, const AdjointSeeds& seeds = {},
                      std::span<const Perturbation> perturbations = {});

/// Reverse sweep only, reusing a trajectory already simulated for `u`.
AdjointResult adjoint(const Params& p, const Controls& u, Trajectory trajectory, const AdjointSeeds& seeds);

Gradient grad_controls(const Params& p, const Controls& u);

struct RhsSensitivity {
  Equation target = Equation::Emissions;
  int period = 1;
  double value = 0.0;  // welfare units per native unit
};

/// dW/da at fixed controls. Meaningful as a marginal value only when `u`
/// is the converged optimum of the scenario in question.
RhsSensitivity sens_rhs(const Params& p, const Controls& u, Equation target, int period);

/// Gradient provider checked by fd_check; defaults to `adjoint` with unit
/// welfare seed.
using AdjointFn = std::function<AdjointResult(const Params&, const Controls&)>;

struct FdBlock {
  std::string name;
  double max_rel_error = 0.0;
  int worst_period = 0;
  double adjoint_value = 0.0;
  double fd_value = 0.0;
  bool flagged = false;
};

/// Relative errors are normwise per block: max_i |a_i - f_i| / max_i |f_i|.
struct FdReport {
  double eps = 0.0;
  std::vector<int> rhs_periods;
  std::vector<FdBlock> blocks;  // s, mu, emissions, consumption

  double max_rel_error() const;
  bool passed(double tol) const;
  std::string table() const;
};

/// Central differences on every control coordinate and on both RHS targets
/// at periods {1, t_max/2, t_max}; step eps * max(1, |value|). Columns run
/// in parallel under OpenMP. Throws std::invalid_argument for eps <= 0.
FdReport fd_check(const Params& p, const Controls& u, double eps, double flag_tol = 1e-6,
                  const AdjointFn& fn = {});

/// Single-threaded reference for fd_check; identical output.
FdReport fd_check_serial(const Params& p, const Controls& u, double eps, double flag_tol = 1e-6,
                         const AdjointFn& fn = {});

}  // namespace scc
