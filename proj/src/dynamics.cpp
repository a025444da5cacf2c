#include "scc/dynamics.hpp"

#include <cmath>
#include <ostream>
#include <random>
#include <string>

#include "scc/kvfile.hpp"

namespace scc {

SimulationDomainError::SimulationDomainError(int period, const std::string& what)
    : std::runtime_error("period " + std::to_string(period) + ": " + what), period_(period) {}

const char* to_string(Equation eq) { return eq == Equation::Emissions ? "emissions" : "consumption"; }

void check_controls(const Controls& u, const Params& p) {
  const auto n = static_cast<std::size_t>(p.t_max);
  if (u.s.size() != n || u.mu.size() != n) {
    throw std::invalid_argument("controls must have t_max entries");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(u.s[i] >= 0.0 && u.s[i] <= 1.0)) {
      throw std::invalid_argument("savings rate out of [0, 1] at period " + std::to_string(i + 1));
    }
    if (!(u.mu[i] >= 0.0 && u.mu[i] <= p.pi35[i])) {
      throw std::invalid_argument("abatement rate out of [0, pi35] at period " + std::to_string(i + 1));
    }
  }
}

double damage_fraction(double t_at, const Params& p) { return p.pi8 * t_at + p.pi9 * t_at * t_at; }

double abatement_fraction(double mu, int period, const Params& p) {
  return p.pi10[static_cast<std::size_t>(period - 1)] * std::pow(mu, p.pi11);
}

CarbonState carbon_step(const CarbonState& prev, double e, const Params& p) {
  return {
      e + p.pi21 * prev.m_at + p.pi22 * prev.m_up,
      p.pi23 * prev.m_at + p.pi24 * prev.m_up + p.pi25 * prev.m_lo,
      p.pi26 * prev.m_up + p.pi27 * prev.m_lo,
  };
}

double forcing(double m_at, int period, const Params& p) {
  if (!(m_at > 0.0)) throw SimulationDomainError(period, "non-positive atmospheric carbon");
  return p.pi28 * std::log2(m_at / p.pi29) + p.pi30[static_cast<std::size_t>(period - 1)];
}

TemperatureState temperature_step(const TemperatureState& prev, double m_at, int period, const Params& p) {
  const double f = forcing(m_at, period, p);
  return {
      prev.t_at + p.pi31 * (f - p.pi32 * prev.t_at - p.pi33 * (prev.t_at - prev.t_lo)),
      prev.t_lo + p.pi34 * (prev.t_at - prev.t_lo),
  };
}

Trajectory simulate(const Params& p, const Controls& u, std::span<const Perturbation> perturbations) {
  const int n = p.t_max;
  const auto sz = static_cast<std::size_t>(n);
  if (u.s.size() != sz || u.mu.size() != sz) {
    throw std::invalid_argument("controls must have t_max entries");
  }
  std::vector<double> extra_e(sz, 0.0);
  std::vector<double> extra_c(sz, 0.0);
  for (const auto& pert : perturbations) {
    if (pert.period < 1 || pert.period > n) {
      throw std::invalid_argument("perturbation period " + std::to_string(pert.period) + " outside horizon");
    }
    if (!std::isfinite(pert.amount)) throw std::invalid_argument("perturbation amount not finite");
    auto& slot = pert.target == Equation::Emissions ? extra_e : extra_c;
    slot[static_cast<std::size_t>(pert.period - 1)] += pert.amount;
  }

  Trajectory tr;
  for (auto* v : {&tr.U, &tr.R, &tr.Q, &tr.Omega, &tr.Lambda, &tr.C, &tr.I, &tr.c, &tr.K, &tr.E_ind,
                  &tr.E, &tr.M_AT, &tr.M_UP, &tr.M_LO, &tr.F, &tr.T_AT, &tr.T_LO}) {
    v->resize(sz);
  }

  double k_prev = p.k0;
  CarbonState carbon{p.m_at0, p.m_up0, p.m_lo0};
  TemperatureState temp{p.t_at0, p.t_lo0};
  double w = 0.0;

  for (int t = 1; t <= n; ++t) {
    const auto i = static_cast<std::size_t>(t - 1);
    const double s = u.s[i];
    const double mu = u.mu[i];

    const double e_gross = p.pi14[i] * p.pi15[i] * std::pow(k_prev, p.pi16) * std::pow(p.pi17[i], p.pi18);
    tr.E_ind[i] = (1.0 - mu) * e_gross;
    tr.E[i] = tr.E_ind[i] + p.pi20[i] + extra_e[i];

    carbon = carbon_step(carbon, tr.E[i], p);
    tr.M_AT[i] = carbon.m_at;
    tr.M_UP[i] = carbon.m_up;
    tr.M_LO[i] = carbon.m_lo;

    tr.F[i] = forcing(carbon.m_at, t, p);
    temp = temperature_step(temp, carbon.m_at, t, p);
    tr.T_AT[i] = temp.t_at;
    tr.T_LO[i] = temp.t_lo;

    tr.Omega[i] = damage_fraction(temp.t_at, p);
    tr.Lambda[i] = abatement_fraction(mu, t, p);
    const double y_gross = p.pi4[i] * std::pow(k_prev, p.pi5) * std::pow(p.pi6[i], p.pi7);
    tr.Q[i] = (1.0 - tr.Lambda[i]) * y_gross / (1.0 + tr.Omega[i]);

    tr.I[i] = s * tr.Q[i];
    tr.C[i] = (1.0 - s) * tr.Q[i] + extra_c[i];
    if (!(tr.C[i] > 0.0)) throw SimulationDomainError(t, "non-positive consumption");
    tr.c[i] = tr.C[i] / p.pi12[i];

    tr.K[i] = tr.I[i] - p.pi13 * k_prev;
    if (!(tr.K[i] > 0.0)) throw SimulationDomainError(t, "non-positive capital");
    k_prev = tr.K[i];

    tr.U[i] = p.pi2 == 0.0 ? p.pi1[i] * std::log(tr.c[i]) : p.pi1[i] * std::pow(tr.c[i], p.pi2) / p.pi2;
    tr.R[i] = std::pow(p.pi3, -static_cast<double>(t));
    w += tr.U[i] * tr.R[i];
  }
  tr.W = w;
  return tr;
}

double welfare(const Trajectory& tr) {
  double w = 0.0;
  for (std::size_t i = 0; i < tr.U.size(); ++i) w += tr.U[i] * tr.R[i];
  return w;
}

int period_year(int period) { return 2010 + 5 * period; }

Controls interior_sample(const Params& p, unsigned long long seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Controls u;
  const auto n = static_cast<std::size_t>(p.t_max);
  u.s.resize(n);
  u.mu.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    u.s[i] = 0.1 + 0.3 * unit(rng);
    u.mu[i] = (0.05 + 0.9 * unit(rng)) * p.pi35[i];
  }
  return u;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& tr, const Controls& u) {
  out << "year,s,mu,Q,C,c,I,K,E_ind,E,M_AT,M_UP,M_LO,F,T_AT,T_LO,Omega,Lambda,U,R\n";
  for (std::size_t i = 0; i < tr.U.size(); ++i) {
    out << period_year(static_cast<int>(i) + 1);
    for (double v : {u.s[i], u.mu[i], tr.Q[i], tr.C[i], tr.c[i], tr.I[i], tr.K[i], tr.E_ind[i], tr.E[i],
                     tr.M_AT[i], tr.M_UP[i], tr.M_LO[i], tr.F[i], tr.T_AT[i], tr.T_LO[i], tr.Omega[i],
                     tr.Lambda[i], tr.U[i], tr.R[i]}) {
      out << ',' << format_double(v);
    }
    out << '\n';
  }
}

}  // namespace scc
