#include "scc/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace scc {

void check_constraints(const ScenarioConstraints& sc, const Params& p) {
  if (sc.temp_cap && !(*sc.temp_cap > 0.0)) throw std::invalid_argument("temperature cap must be positive");
  for (const auto& pin : sc.pins) {
    if (pin.period < 1 || pin.period > p.t_max) {
      throw std::invalid_argument("pin period " + std::to_string(pin.period) + " outside horizon");
    }
    const double hi = pin.var == ControlVar::Savings ? 1.0 : p.pi35[static_cast<std::size_t>(pin.period - 1)];
    if (!(pin.value >= 0.0 && pin.value <= hi)) {
      throw std::invalid_argument("pin value outside control bounds at period " + std::to_string(pin.period));
    }
  }
}

std::vector<double> OptResult::ineq_multipliers() const {
  std::vector<double> out = temperature_multipliers;
  out.push_back(cumulative_multiplier);
  return out;
}

Controls default_start(const Params& p) {
  const int n = p.t_max;
  Controls u;
  u.s.assign(static_cast<std::size_t>(n), 0.25);
  u.mu.resize(static_cast<std::size_t>(n));
  for (int t = 1; t <= n; ++t) {
    const auto i = static_cast<std::size_t>(t - 1);
    const double target = std::min(1.0, p.pi35[i]);
    const double frac = n > 1 ? static_cast<double>(t - 1) / static_cast<double>(n - 1) : 0.0;
    u.mu[i] = 0.03 + frac * (target - 0.03);
  }
  return project(u, p);
}

Controls project(const Controls& u, const Params& p) {
  Controls out = u;
  for (std::size_t i = 0; i < out.s.size(); ++i) out.s[i] = std::clamp(out.s[i], 0.0, 1.0);
  for (std::size_t i = 0; i < out.mu.size(); ++i) out.mu[i] = std::clamp(out.mu[i], 0.0, p.pi35[i]);
  return out;
}

AlUpdate al_update(std::span<const double> multipliers, std::span<const double> violations, double penalty,
                   double previous_violation, double ratio, double growth) {
  if (!(penalty > 0.0)) throw std::invalid_argument("penalty must be positive");
  if (multipliers.size() != violations.size()) throw std::invalid_argument("size mismatch");
  AlUpdate out;
  out.multipliers.resize(multipliers.size());
  double worst = 0.0;
  for (std::size_t j = 0; j < multipliers.size(); ++j) {
    out.multipliers[j] = std::max(0.0, multipliers[j] + penalty * violations[j]);
    worst = std::max(worst, violations[j]);
  }
  out.penalty = worst > ratio * previous_violation ? penalty * growth : penalty;
  return out;
}

namespace {

constexpr double kMaxPenalty = 1e12;

// Internal form: minimize f(x) = -W / welfare_scale subject to g_j(x) <= 0,
// x = [s(1..n), mu(1..n)] inside [lo, hi]. Temperature rows are in degC,
// the cumulative row is normalized by pi19.
struct Problem {
  const Params& p;
  std::span<const Perturbation> perturbations;
  int n = 0;
  std::vector<double> lo = {}, hi = {};
  bool has_temp = false;
  double cap = 0.0;
  bool has_cum = false;
  double welfare_scale = 1.0;

  std::size_t rows() const { return (has_temp ? static_cast<std::size_t>(n) : 0) + (has_cum ? 1 : 0); }
};

struct Eval {
  std::vector<double> x;
  Trajectory trajectory;
  std::vector<double> g;  // constraint values
  double phi = 0.0;       // augmented Lagrangian (minimization form)
  std::vector<double> grad;
};

Controls to_controls(const std::vector<double>& x, int n) {
  Controls u;
  u.s.assign(x.begin(), x.begin() + n);
  u.mu.assign(x.begin() + n, x.end());
  return u;
}

std::vector<double> constraint_values(const Problem& pr, const Trajectory& tr) {
  std::vector<double> g;
  g.reserve(pr.rows());
  if (pr.has_temp) {
    for (double t_at : tr.T_AT) g.push_back(t_at - pr.cap);
  }
  if (pr.has_cum) {
    double total = 0.0;
    for (double e : tr.E_ind) total += e;
    g.push_back((total - pr.p.pi19) / pr.p.pi19);
  }
  return g;
}

Eval evaluate(const Problem& pr, std::vector<double> x, const std::vector<double>& lam, double rho) {
  Eval ev;
  ev.x = std::move(x);
  const Controls u = to_controls(ev.x, pr.n);
  Trajectory tr = simulate(pr.p, u, pr.perturbations);
  ev.g = constraint_values(pr, tr);

  AdjointSeeds seeds;
  seeds.welfare = -1.0 / pr.welfare_scale;
  ev.phi = -tr.W / pr.welfare_scale;
  std::size_t row = 0;
  if (pr.has_temp) seeds.t_at.assign(static_cast<std::size_t>(pr.n), 0.0);
  for (std::size_t j = 0; j < ev.g.size(); ++j) {
    const double shifted = std::max(0.0, lam[j] + rho * ev.g[j]);
    ev.phi += (shifted * shifted - lam[j] * lam[j]) / (2.0 * rho);
    if (pr.has_temp && row < static_cast<std::size_t>(pr.n)) {
      seeds.t_at[row] = shifted;
    } else {
      seeds.e_ind.assign(static_cast<std::size_t>(pr.n), shifted / pr.p.pi19);
    }
    ++row;
  }

  AdjointResult ad = adjoint(pr.p, u, std::move(tr), seeds);
  ev.trajectory = std::move(ad.trajectory);
  ev.grad.resize(ev.x.size());
  std::copy(ad.grad.d_s.begin(), ad.grad.d_s.end(), ev.grad.begin());
  std::copy(ad.grad.d_mu.begin(), ad.grad.d_mu.end(), ev.grad.begin() + pr.n);
  if (!std::isfinite(ev.phi)) throw SimulationDomainError(0, "non-finite objective");
  return ev;
}

double projected_gradient_norm(const Problem& pr, const std::vector<double>& x, const std::vector<double>& g) {
  double norm = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double moved = std::clamp(x[i] - g[i], pr.lo[i], pr.hi[i]);
    norm = std::max(norm, std::abs(x[i] - moved));
  }
  return norm;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

struct InnerOutcome {
  Eval at;
  double pg_norm = 0.0;
  int iterations = 0;
  bool reached_tol = false;
};

// Projected L-BFGS: two-loop recursion on the free variables, projected
// backtracking search along the bent path P(x + alpha d).
InnerOutcome inner_solve(const Problem& pr, Eval start, const std::vector<double>& lam, double rho, double tol,
                         int max_iter, int memory) {
  InnerOutcome out;
  out.at = std::move(start);
  std::deque<std::vector<double>> s_hist, y_hist;
  std::deque<double> rho_hist;
  const std::size_t dim = out.at.x.size();
  std::vector<char> fixed(dim, 0);

  for (int it = 0; it < max_iter; ++it) {
    Eval& cur = out.at;
    out.pg_norm = projected_gradient_norm(pr, cur.x, cur.grad);
    if (out.pg_norm <= tol) {
      out.reached_tol = true;
      return out;
    }

    for (std::size_t i = 0; i < dim; ++i) {
      const bool at_lo = cur.x[i] <= pr.lo[i];
      const bool at_hi = cur.x[i] >= pr.hi[i];
      fixed[i] = (pr.lo[i] == pr.hi[i]) || (at_lo && cur.grad[i] > 0.0) || (at_hi && cur.grad[i] < 0.0);
    }

    std::vector<double> q(dim);
    for (std::size_t i = 0; i < dim; ++i) q[i] = fixed[i] ? 0.0 : cur.grad[i];

    std::vector<double> d = q;
    if (!s_hist.empty()) {
      std::vector<double> alpha(s_hist.size());
      for (std::size_t k = s_hist.size(); k-- > 0;) {
        alpha[k] = rho_hist[k] * dot(s_hist[k], d);
        for (std::size_t i = 0; i < dim; ++i) d[i] -= alpha[k] * y_hist[k][i];
      }
      const double gamma = dot(s_hist.back(), y_hist.back()) / dot(y_hist.back(), y_hist.back());
      for (double& v : d) v *= gamma;
      for (std::size_t k = 0; k < s_hist.size(); ++k) {
        const double beta = rho_hist[k] * dot(y_hist[k], d);
        for (std::size_t i = 0; i < dim; ++i) d[i] += (alpha[k] - beta) * s_hist[k][i];
      }
    }
    for (std::size_t i = 0; i < dim; ++i) d[i] = fixed[i] ? 0.0 : -d[i];

    double slope = dot(d, cur.grad);
    if (!(slope < 0.0)) {
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      for (std::size_t i = 0; i < dim; ++i) d[i] = -q[i];
      slope = dot(d, cur.grad);
    }

    double alpha = 1.0;
    if (s_hist.empty()) {
      double dmax = 0.0;
      for (double v : d) dmax = std::max(dmax, std::abs(v));
      if (dmax > 0.1) alpha = 0.1 / dmax;
    }

    bool accepted = false;
    Eval next;
    for (int ls = 0; ls < 60 && !accepted; ++ls, alpha *= 0.5) {
      std::vector<double> xn(dim);
      for (std::size_t i = 0; i < dim; ++i) xn[i] = std::clamp(cur.x[i] + alpha * d[i], pr.lo[i], pr.hi[i]);
      if (xn == cur.x) break;
      try {
        next = evaluate(pr, std::move(xn), lam, rho);
      } catch (const SimulationDomainError&) {
        continue;
      }
      double decrease = 0.0;
      for (std::size_t i = 0; i < dim; ++i) decrease += cur.grad[i] * (next.x[i] - cur.x[i]);
      if (next.phi <= cur.phi + 1e-4 * decrease) {
        accepted = true;
      } else if (next.phi <= cur.phi + 64.0 * std::numeric_limits<double>::epsilon() * std::abs(cur.phi) &&
                 projected_gradient_norm(pr, next.x, next.grad) < out.pg_norm) {
        // Objective change is at rounding level; accept on gradient progress.
        accepted = true;
      }
    }
    if (!accepted) {
      if (s_hist.empty()) return out;
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      continue;
    }

    std::vector<double> sv(dim), yv(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      sv[i] = next.x[i] - cur.x[i];
      yv[i] = next.grad[i] - cur.grad[i];
    }
    const double sy = dot(sv, yv);
    if (sy > 1e-12 * std::sqrt(dot(sv, sv) * dot(yv, yv))) {
      s_hist.push_back(std::move(sv));
      y_hist.push_back(std::move(yv));
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    out.at = std::move(next);
    ++out.iterations;
  }
  out.pg_norm = projected_gradient_norm(pr, out.at.x, out.at.grad);
  out.reached_tol = out.pg_norm <= tol;
  return out;
}

}  // namespace

OptResult optimize(const Params& p, const ScenarioConstraints& sc, const OptimizerOptions& opts,
                   std::span<const Perturbation> perturbations) {
  check_constraints(sc, p);
  const int n = p.t_max;
  Problem pr{.p = p, .perturbations = perturbations};
  pr.n = n;
  pr.lo.assign(static_cast<std::size_t>(2 * n), 0.0);
  pr.hi.resize(static_cast<std::size_t>(2 * n));
  for (int i = 0; i < n; ++i) {
    pr.hi[static_cast<std::size_t>(i)] = 1.0;
    pr.hi[static_cast<std::size_t>(n + i)] = p.pi35[static_cast<std::size_t>(i)];
  }
  for (const auto& pin : sc.pins) {
    const auto k = static_cast<std::size_t>((pin.var == ControlVar::Savings ? 0 : n) + pin.period - 1);
    pr.lo[k] = pr.hi[k] = pin.value;
  }
  pr.has_temp = sc.temp_cap.has_value() && std::isfinite(*sc.temp_cap);
  pr.cap = pr.has_temp ? *sc.temp_cap : 0.0;
  pr.has_cum = sc.cumulative_cap_enabled;

  Controls u0 = opts.start ? *opts.start : default_start(p);
  if (u0.s.size() != static_cast<std::size_t>(n) || u0.mu.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument("start controls must have t_max entries");
  }
  std::vector<double> x0(static_cast<std::size_t>(2 * n));
  for (int i = 0; i < n; ++i) {
    x0[static_cast<std::size_t>(i)] = u0.s[static_cast<std::size_t>(i)];
    x0[static_cast<std::size_t>(n + i)] = u0.mu[static_cast<std::size_t>(i)];
  }
  for (std::size_t k = 0; k < x0.size(); ++k) x0[k] = std::clamp(x0[k], pr.lo[k], pr.hi[k]);

  const Trajectory tr0 = simulate(p, to_controls(x0, n), perturbations);
  pr.welfare_scale = std::max(1.0, std::abs(tr0.W));

  const std::size_t m = pr.rows();
  std::vector<double> lam(m, 0.0);
  double rho = opts.penalty0;
  double prev_violation = std::numeric_limits<double>::infinity();

  OptResult res;
  Eval cur = evaluate(pr, x0, lam, rho);
  double kkt = std::numeric_limits<double>::infinity();
  double violation = 0.0;

  for (int outer = 0; outer < opts.max_outer; ++outer) {
    const double inner_tol = m == 0 ? opts.tol : std::max(opts.tol, 1e-3 * std::pow(10.0, -outer));
    OuterRecord rec;
    rec.lagrangian_before = -cur.phi * pr.welfare_scale;
    rec.penalty = rho;
    InnerOutcome inner = inner_solve(pr, std::move(cur), lam, rho, inner_tol, opts.max_inner, opts.memory);
    res.iterations += inner.iterations;
    res.outer_iterations = outer + 1;
    cur = std::move(inner.at);

    violation = 0.0;
    for (double g : cur.g) violation = std::max(violation, g);
    AlUpdate upd = al_update(lam, cur.g, rho, prev_violation, opts.violation_ratio, opts.penalty_growth);
    double complementarity = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      complementarity = std::max(complementarity, std::abs(upd.multipliers[j] * std::min(0.0, cur.g[j])));
    }
    kkt = std::max({inner.pg_norm, violation, complementarity});
    rec.lagrangian_after = -cur.phi * pr.welfare_scale;
    rec.welfare = cur.trajectory.W;
    rec.kkt_residual = kkt;
    rec.max_violation = violation;
    res.history.push_back(rec);

    if (opts.log) {
      char line[200];
      std::snprintf(line, sizeof line, "%4d %24.16e %12.4e %12.4e %12.4e\n", outer + 1, cur.trajectory.W, kkt,
                    violation, rho);
      *opts.log << line;
    }

    const bool done = inner.reached_tol && inner_tol <= opts.tol && kkt <= opts.tol;
    if (m == 0 || done) {
      res.converged = inner.reached_tol && kkt <= opts.tol;
      break;
    }
    lam = std::move(upd.multipliers);
    rho = std::min(upd.penalty, kMaxPenalty);
    prev_violation = violation;
    cur = evaluate(pr, std::move(cur.x), lam, rho);
  }

  res.controls = to_controls(cur.x, n);
  res.trajectory = std::move(cur.trajectory);
  res.w_star = res.trajectory.W;
  res.kkt_residual = kkt;

  // Multipliers in native units: welfare per degC and per GtCO2.
  res.temperature_multipliers.assign(static_cast<std::size_t>(n), 0.0);
  std::size_t row = 0;
  if (pr.has_temp) {
    for (int i = 0; i < n; ++i, ++row) {
      res.temperature_multipliers[static_cast<std::size_t>(i)] =
          pr.welfare_scale * std::max(0.0, lam[row] + rho * cur.g[row]);
    }
  }
  double temp_violation = 0.0;
  double cum_violation = 0.0;
  if (pr.has_temp) {
    for (double t_at : res.trajectory.T_AT) temp_violation = std::max(temp_violation, t_at - pr.cap);
  }
  if (pr.has_cum) {
    res.cumulative_multiplier = pr.welfare_scale * std::max(0.0, lam[row] + rho * cur.g[row]) / p.pi19;
    double total = 0.0;
    for (double e : res.trajectory.E_ind) total += e;
    cum_violation = std::max(0.0, total - p.pi19);
  }
  res.max_violation = std::max(temp_violation, cum_violation);
  return res;
}

}  // namespace scc
