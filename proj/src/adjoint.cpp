#include "scc/adjoint.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <numbers>
#include <stdexcept>

namespace scc {

AdjointResult adjoint(const Params& p, const Controls& u, const AdjointSeeds& seeds,
                      std::span<const Perturbation> perturbations) {
  return adjoint(p, u, simulate(p, u, perturbations), seeds);
}

AdjointResult adjoint(const Params& p, const Controls& u, Trajectory trajectory, const AdjointSeeds& seeds) {
  AdjointResult res;
  res.trajectory = std::move(trajectory);
  const Trajectory& tr = res.trajectory;
  const int n = p.t_max;
  const auto sz = static_cast<std::size_t>(n);
  auto seed_at = [](const std::vector<double>& v, std::size_t i) { return v.empty() ? 0.0 : v[i]; };
  if ((!seeds.t_at.empty() && seeds.t_at.size() != sz) || (!seeds.e_ind.empty() && seeds.e_ind.size() != sz)) {
    throw std::invalid_argument("adjoint seeds must be empty or have t_max entries");
  }

  res.value = seeds.welfare * tr.W;
  for (std::size_t i = 0; i < sz; ++i) {
    res.value += seed_at(seeds.t_at, i) * tr.T_AT[i] + seed_at(seeds.e_ind, i) * tr.E_ind[i];
  }

  res.grad.d_s.assign(sz, 0.0);
  res.grad.d_mu.assign(sz, 0.0);
  res.d_emissions.assign(sz, 0.0);
  res.d_consumption.assign(sz, 0.0);

  // Adjoints of the state leaving period t, accumulated from later periods.
  double b_k = 0.0;
  double b_mat = 0.0, b_mup = 0.0, b_mlo = 0.0;
  double b_tat = 0.0, b_tlo = 0.0;

  const double temp_self = 1.0 - p.pi31 * p.pi32 - p.pi31 * p.pi33;
  const double temp_cross = p.pi31 * p.pi33;

  for (int t = n; t >= 1; --t) {
    const auto i = static_cast<std::size_t>(t - 1);
    const double k_prev = t == 1 ? p.k0 : tr.K[i - 1];
    const double s = u.s[i];
    const double mu = u.mu[i];

    // utility and per-capita consumption
    const double b_u = seeds.welfare * tr.R[i];
    const double b_cpc = b_u * p.pi1[i] * std::pow(tr.c[i], p.pi2 - 1.0);
    const double b_cons = b_cpc / p.pi12[i];
    res.d_consumption[i] = b_cons;

    // capital recursion and savings split
    const double b_inv = b_k;
    double b_kprev = -p.pi13 * b_k;
    const double b_q = (1.0 - s) * b_cons + s * b_inv;
    res.grad.d_s[i] = tr.Q[i] * (b_inv - b_cons);

    // net output
    const double one_plus_omega = 1.0 + tr.Omega[i];
    const double y_gross = p.pi4[i] * std::pow(k_prev, p.pi5) * std::pow(p.pi6[i], p.pi7);
    const double b_ygross = b_q * (1.0 - tr.Lambda[i]) / one_plus_omega;
    const double b_lambda = -b_q * y_gross / one_plus_omega;
    const double b_omega = -b_q * tr.Q[i] / one_plus_omega;
    b_kprev += b_ygross * p.pi5 * y_gross / k_prev;
    res.grad.d_mu[i] = b_lambda * p.pi10[i] * p.pi11 * std::pow(mu, p.pi11 - 1.0);

    // damages and temperature
    const double b_tat_t = b_tat + b_omega * (p.pi8 + 2.0 * p.pi9 * tr.T_AT[i]) + seed_at(seeds.t_at, i);
    const double b_forcing = p.pi31 * b_tat_t;
    const double b_tat_prev = temp_self * b_tat_t + p.pi34 * b_tlo;
    const double b_tlo_prev = temp_cross * b_tat_t + (1.0 - p.pi34) * b_tlo;

    // forcing and carbon cycle
    const double b_mat_t = b_mat + b_forcing * p.pi28 / (tr.M_AT[i] * std::numbers::ln2);
    const double b_emis = b_mat_t;
    res.d_emissions[i] = b_emis;
    const double b_mat_prev = p.pi21 * b_mat_t + p.pi23 * b_mup;
    const double b_mup_prev = p.pi22 * b_mat_t + p.pi24 * b_mup + p.pi26 * b_mlo;
    const double b_mlo_prev = p.pi25 * b_mup + p.pi27 * b_mlo;

    // industrial emissions
    const double e_gross = p.pi14[i] * p.pi15[i] * std::pow(k_prev, p.pi16) * std::pow(p.pi17[i], p.pi18);
    const double b_eind = b_emis + seed_at(seeds.e_ind, i);
    res.grad.d_mu[i] -= b_eind * e_gross;
    b_kprev += b_eind * (1.0 - mu) * p.pi16 * e_gross / k_prev;

    b_k = b_kprev;
    b_mat = b_mat_prev;
    b_mup = b_mup_prev;
    b_mlo = b_mlo_prev;
    b_tat = b_tat_prev;
    b_tlo = b_tlo_prev;
  }
  return res;
}

Gradient grad_controls(const Params& p, const Controls& u) { return adjoint(p, u).grad; }

RhsSensitivity sens_rhs(const Params& p, const Controls& u, Equation target, int period) {
  if (period < 1 || period > p.t_max) throw std::invalid_argument("period outside horizon");
  const auto res = adjoint(p, u);
  const auto i = static_cast<std::size_t>(period - 1);
  return {target, period, target == Equation::Emissions ? res.d_emissions[i] : res.d_consumption[i]};
}

// ---------------------------------------------------------------------------
// finite-difference verifier

double FdReport::max_rel_error() const {
  double worst = 0.0;
  for (const auto& b : blocks) {
    if (std::isnan(b.max_rel_error)) return b.max_rel_error;
    worst = std::max(worst, b.max_rel_error);
  }
  return worst;
}

bool FdReport::passed(double tol) const {
  const double worst = max_rel_error();
  return !std::isnan(worst) && worst <= tol;
}

std::string FdReport::table() const {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof line, "%-12s %14s %8s %24s %24s %s\n", "block", "max_rel_err", "period",
                "adjoint", "finite_diff", "");
  out += line;
  for (const auto& b : blocks) {
    std::snprintf(line, sizeof line, "%-12s %14.3e %8d %24.16e %24.16e %s\n", b.name.c_str(), b.max_rel_error,
                  b.worst_period, b.adjoint_value, b.fd_value, b.flagged ? "FLAG" : "ok");
    out += line;
  }
  std::snprintf(line, sizeof line, "eps = %.3e, rhs periods:", eps);
  out += line;
  for (int t : rhs_periods) out += " " + std::to_string(t);
  out += "\n";
  return out;
}

namespace {

enum class Column { Savings, Abatement, EmissionsRhs, ConsumptionRhs };

struct FdTask {
  Column kind;
  int period;  // 1-based
};

// Welfare with one coordinate moved by `delta`.
double shifted_welfare(const Params& p, const Controls& u, const FdTask& task, double delta) {
  if (task.kind == Column::Savings || task.kind == Column::Abatement) {
    Controls v = u;
    auto& x = task.kind == Column::Savings ? v.s : v.mu;
    x[static_cast<std::size_t>(task.period - 1)] += delta;
    return simulate(p, v).W;
  }
  const Perturbation pert{task.kind == Column::EmissionsRhs ? Equation::Emissions : Equation::Consumption,
                          task.period, delta};
  return simulate(p, u, std::span(&pert, 1)).W;
}

double fd_derivative(const Params& p, const Controls& u, const Trajectory& base, const FdTask& task, double eps) {
  const auto i = static_cast<std::size_t>(task.period - 1);
  double value = 0.0;
  double lo = -INFINITY;
  double hi = INFINITY;
  switch (task.kind) {
    case Column::Savings:
      value = u.s[i];
      lo = 0.0;
      hi = 1.0;
      break;
    case Column::Abatement:
      value = u.mu[i];
      lo = 0.0;
      hi = p.pi35[i];
      break;
    case Column::EmissionsRhs:
      value = base.E[i];
      break;
    case Column::ConsumptionRhs:
      value = base.C[i];
      break;
  }
  const double h = eps * std::max(1.0, std::abs(value));
  const bool is_control = task.kind == Column::Savings || task.kind == Column::Abatement;
  const double x = is_control ? value : 0.0;
  if (!is_control || (x - h >= lo && x + h <= hi)) {
    return (shifted_welfare(p, u, task, h) - shifted_welfare(p, u, task, -h)) / (2.0 * h);
  }
  // One-sided second-order stencil pointing into the feasible box.
  const double dir = x - h < lo ? 1.0 : -1.0;
  const double f0 = base.W;
  const double f1 = shifted_welfare(p, u, task, dir * h);
  const double f2 = shifted_welfare(p, u, task, dir * 2.0 * h);
  return dir * (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * h);
}

FdReport run_fd(const Params& p, const Controls& u, double eps, double flag_tol, const AdjointFn& fn,
                bool parallel) {
  if (!(eps > 0.0)) throw std::invalid_argument("fd_check requires eps > 0");
  check_controls(u, p);
  const AdjointResult ad = fn ? fn(p, u) : adjoint(p, u);
  const Trajectory& base = ad.trajectory;
  const int n = p.t_max;

  FdReport report;
  report.eps = eps;
  report.rhs_periods = {1, std::max(1, n / 2), n};
  report.rhs_periods.erase(std::unique(report.rhs_periods.begin(), report.rhs_periods.end()),
                           report.rhs_periods.end());

  std::vector<FdTask> tasks;
  for (int t = 1; t <= n; ++t) tasks.push_back({Column::Savings, t});
  for (int t = 1; t <= n; ++t) tasks.push_back({Column::Abatement, t});
  for (int t : report.rhs_periods) tasks.push_back({Column::EmissionsRhs, t});
  for (int t : report.rhs_periods) tasks.push_back({Column::ConsumptionRhs, t});

  std::vector<double> fd(tasks.size(), 0.0);
  const auto count = static_cast<long>(tasks.size());
  if (parallel) {
#pragma omp parallel for schedule(dynamic)
    for (long k = 0; k < count; ++k) {
      try {
        fd[static_cast<std::size_t>(k)] = fd_derivative(p, u, base, tasks[static_cast<std::size_t>(k)], eps);
      } catch (const std::exception&) {
        fd[static_cast<std::size_t>(k)] = NAN;
      }
    }
  } else {
    for (long k = 0; k < count; ++k) {
      try {
        fd[static_cast<std::size_t>(k)] = fd_derivative(p, u, base, tasks[static_cast<std::size_t>(k)], eps);
      } catch (const std::exception&) {
        fd[static_cast<std::size_t>(k)] = NAN;
      }
    }
  }

  auto adjoint_value = [&](const FdTask& task) {
    const auto i = static_cast<std::size_t>(task.period - 1);
    switch (task.kind) {
      case Column::Savings: return ad.grad.d_s[i];
      case Column::Abatement: return ad.grad.d_mu[i];
      case Column::EmissionsRhs: return ad.d_emissions[i];
      case Column::ConsumptionRhs: return ad.d_consumption[i];
    }
    return 0.0;
  };

  const std::pair<Column, const char*> names[] = {{Column::Savings, "d_s"},
                                                  {Column::Abatement, "d_mu"},
                                                  {Column::EmissionsRhs, "emissions"},
                                                  {Column::ConsumptionRhs, "consumption"}};
  for (const auto& [kind, name] : names) {
    FdBlock block;
    block.name = name;
    double norm = 0.0;
    double worst_abs = -1.0;
    bool bad = false;
    for (std::size_t k = 0; k < tasks.size(); ++k) {
      if (tasks[k].kind != kind) continue;
      if (!std::isfinite(fd[k]) || !std::isfinite(adjoint_value(tasks[k]))) bad = true;
      norm = std::max(norm, std::abs(fd[k]));
    }
    for (std::size_t k = 0; k < tasks.size(); ++k) {
      if (tasks[k].kind != kind) continue;
      const double a = adjoint_value(tasks[k]);
      const double diff = std::abs(a - fd[k]);
      if (diff > worst_abs) {
        worst_abs = diff;
        block.worst_period = tasks[k].period;
        block.adjoint_value = a;
        block.fd_value = fd[k];
      }
    }
    if (bad) {
      block.max_rel_error = NAN;
    } else if (norm > 0.0) {
      block.max_rel_error = worst_abs / norm;
    } else {
      block.max_rel_error = worst_abs > 0.0 ? INFINITY : 0.0;
    }
    block.flagged = !(block.max_rel_error <= flag_tol);
    report.blocks.push_back(block);
  }
  return report;
}

}  // namespace

FdReport fd_check(const Params& p, const Controls& u, double eps, double flag_tol, const AdjointFn& fn) {
  return run_fd(p, u, eps, flag_tol, fn, true);
}

FdReport fd_check_serial(const Params& p, const Controls& u, double eps, double flag_tol, const AdjointFn& fn) {
  return run_fd(p, u, eps, flag_tol, fn, false);
}

}  // namespace scc
