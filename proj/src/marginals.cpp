#include "scc/marginals.hpp"

#include <cmath>
#include <exception>
#include <ostream>

#include "scc/kvfile.hpp"

namespace scc {

std::vector<double> MarginalSeries::ratio() const {
  std::vector<double> out(scc.size());
  for (std::size_t i = 0; i < scc.size(); ++i) out[i] = smac[i] != 0.0 ? scc[i] / smac[i] : NAN;
  return out;
}

AdjointResult lagrangian_sensitivities(const Params& p, const ScenarioConstraints& sc, const OptResult& opt) {
  if (!opt.converged) throw NotConvergedError("marginal values need a converged optimum");
  const auto n = static_cast<std::size_t>(p.t_max);
  AdjointSeeds seeds;
  if (sc.temp_cap && std::isfinite(*sc.temp_cap)) {
    seeds.t_at.resize(n);
    for (std::size_t i = 0; i < n; ++i) seeds.t_at[i] = -opt.temperature_multipliers[i];
  }
  if (sc.cumulative_cap_enabled) seeds.e_ind.assign(n, -opt.cumulative_multiplier);
  return adjoint(p, opt.controls, opt.trajectory, seeds);
}

double marginal_emissions(const Params& p, const ScenarioConstraints& sc, const OptResult& opt, int period) {
  if (period < 1 || period > p.t_max) throw std::invalid_argument("period outside horizon");
  return lagrangian_sensitivities(p, sc, opt).d_emissions[static_cast<std::size_t>(period - 1)];
}

double marginal_consumption(const Params& p, const ScenarioConstraints& sc, const OptResult& opt, int period) {
  if (period < 1 || period > p.t_max) throw std::invalid_argument("period outside horizon");
  return lagrangian_sensitivities(p, sc, opt).d_consumption[static_cast<std::size_t>(period - 1)];
}

std::vector<double> scc(const std::vector<double>& eeq_m, const std::vector<double>& cc_m, double unit_scale) {
  if (eeq_m.size() != cc_m.size()) throw std::invalid_argument("marginal series differ in length");
  std::vector<double> out(eeq_m.size());
  for (std::size_t i = 0; i < eeq_m.size(); ++i) {
    if (!(std::abs(cc_m[i]) >= 1e-300)) {
      throw DegenerateDual("consumption marginal vanishes at period " + std::to_string(i + 1));
    }
    out[i] = -unit_scale * eeq_m[i] / cc_m[i];
  }
  return out;
}

std::vector<double> smac(const Controls& u, const Params& p) {
  std::vector<double> out(u.mu.size());
  for (std::size_t i = 0; i < u.mu.size(); ++i) out[i] = p.c1[i] * std::pow(u.mu[i], p.c2);
  return out;
}

MarginalSeries compute_marginals(const Params& p, const ScenarioConstraints& sc, const OptResult& opt) {
  const AdjointResult ad = lagrangian_sensitivities(p, sc, opt);
  MarginalSeries m;
  m.eeq_m = ad.d_emissions;
  m.cc_m = ad.d_consumption;
  m.scc = scc(m.eeq_m, m.cc_m, p.unit_scale);
  m.smac = smac(opt.controls, p);
  return m;
}

void write_marginals_csv(std::ostream& out, const MarginalSeries& m) {
  out << "year,eeq_m,cc_m,scc,smac,scc_over_smac\n";
  const auto ratio = m.ratio();
  for (std::size_t i = 0; i < m.scc.size(); ++i) {
    out << period_year(static_cast<int>(i) + 1) << ',' << format_double(m.eeq_m[i]) << ','
        << format_double(m.cc_m[i]) << ',' << format_double(m.scc[i]) << ',' << format_double(m.smac[i]) << ','
        << format_double(ratio[i]) << '\n';
  }
}

OracleResult oracle_compensation(const Params& p, const ScenarioConstraints& sc, const OptResult& baseline,
                                 int period, double delta_e, const OracleOptions& opts) {
  if (period < 1 || period > p.t_max) throw std::invalid_argument("period outside horizon");
  if (!std::isfinite(delta_e) || delta_e < 0.0) throw std::invalid_argument("delta_e must be finite and >= 0");
  const MarginalSeries m = compute_marginals(p, sc, baseline);
  const auto i = static_cast<std::size_t>(period - 1);

  OracleResult r;
  r.period = period;
  r.delta_e = delta_e;
  r.scc_predicted = m.scc[i];
  if (delta_e == 0.0) {
    r.relative_gap = NAN;
    return r;
  }

  const double v0 = baseline.w_star;
  OptimizerOptions oo = opts.optimizer;
  oo.start = baseline.controls;
  oo.log = nullptr;
  auto gap_at = [&](double x) {
    const Perturbation perts[] = {{Equation::Emissions, period, delta_e}, {Equation::Consumption, period, x}};
    const OptResult res = optimize(p, sc, oo, perts);
    ++r.evaluations;
    if (!res.converged) {
      throw NotConvergedError("perturbed problem did not converge at period " + std::to_string(period));
    }
    return res.w_star - v0;
  };

  double lo = 0.0;
  const double f_lo = gap_at(lo);
  if (f_lo >= 0.0) throw BisectionBracketError("extra emissions did not lower welfare");
  double hi = 10.0 * std::abs(m.eeq_m[i] / m.cc_m[i]) * delta_e;
  double f_hi = gap_at(hi);
  for (int k = 0; f_hi <= 0.0; ++k) {
    if (k >= opts.max_doublings) throw BisectionBracketError("no sign change in [0, x_max]");
    lo = hi;
    hi *= 2.0;
    f_hi = gap_at(hi);
  }

  const double target = opts.tol * std::abs(v0);
  double x = 0.5 * (lo + hi);
  for (int k = 0; k < opts.max_bisections; ++k) {
    x = 0.5 * (lo + hi);
    if (x <= lo || x >= hi) break;
    const double f = gap_at(x);
    if (std::abs(f) <= target && hi - lo <= opts.x_tol * x) break;
    (f < 0.0 ? lo : hi) = x;
  }

  r.x_native = x;
  r.x_compensating = x / delta_e;
  r.relative_gap = std::abs(p.unit_scale * r.x_compensating - r.scc_predicted) /
                   std::max(std::abs(r.scc_predicted), opts.floor);
  return r;
}

std::vector<OracleResult> oracle_batch(const Params& p, const ScenarioConstraints& sc, const OptResult& baseline,
                                       const std::vector<int>& periods, double delta_e,
                                       const OracleOptions& opts) {
  std::vector<OracleResult> out(periods.size());
  std::vector<std::exception_ptr> errors(periods.size());
  const auto count = static_cast<long>(periods.size());
#pragma omp parallel for schedule(dynamic)
  for (long k = 0; k < count; ++k) {
    const auto j = static_cast<std::size_t>(k);
    try {
      out[j] = oracle_compensation(p, sc, baseline, periods[j], delta_e, opts);
    } catch (...) {
      errors[j] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace scc
