#pragma once

#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include "scc/params.hpp"

namespace scc {

/// Decision variables, indexed by period - 1.
struct Controls {
  std::vector<double> s;   // savings rate, [0, 1]
  std::vector<double> mu;  // abatement rate, [0, pi35(t)]

  bool operator==(const Controls&) const = default;
};

/// Throws std::invalid_argument when sizes or bounds are violated.
void check_controls(const Controls& u, const Params& p);

/// Pseudo-random controls strictly inside the box: s in [0.1, 0.4],
/// mu in [0.05, 0.95] * pi35(t). Same seed, same point.
Controls interior_sample(const Params& p, unsigned long long seed);

enum class Equation { Emissions, Consumption };

const char* to_string(Equation eq);

/// Right-hand-side addition to the emissions balance (GtCO2) or to total
/// consumption after the savings split (trillion USD) in one period.
struct Perturbation {
  Equation target = Equation::Emissions;
  int period = 1;  // 1-based
  double amount = 0.0;
};

struct Trajectory {
  std::vector<double> U, R, Q, Omega, Lambda, C, I, c, K, E_ind, E, M_AT, M_UP, M_LO, F, T_AT, T_LO;
  double W = 0.0;

  int periods() const { return static_cast<int>(U.size()); }
};

class SimulationDomainError : public std::runtime_error {
 public:
  SimulationDomainError(int period, const std::string& what);
  int period() const { return period_; }

 private:
  int period_;
};

struct CarbonState {
  double m_at = 0.0;
  double m_up = 0.0;
  double m_lo = 0.0;
};

struct TemperatureState {
  double t_at = 0.0;
  double t_lo = 0.0;
};

double damage_fraction(double t_at, const Params& p);
double abatement_fraction(double mu, int period, const Params& p);

/// One step of the three-reservoir carbon cycle; `e` enters the atmosphere only.
CarbonState carbon_step(const CarbonState& prev, double e, const Params& p);

/// Radiative forcing for atmospheric carbon `m_at` in `period`.
/// Throws SimulationDomainError when m_at <= 0.
double forcing(double m_at, int period, const Params& p);

/// Advances surface and deep-ocean temperature given this period's
/// atmospheric carbon.
TemperatureState temperature_step(const TemperatureState& prev, double m_at, int period, const Params& p);

/// Runs the full model forward for one set of controls.
///
/// Per period: industrial emissions from the capital entering the period,
/// carbon and temperature update, damages and abatement cost, net output,
/// the savings split, per-capita consumption, capital for the next period,
/// and discounted utility. Perturbations are added to E(t) and C(t).
Trajectory simulate(const Params& p, const Controls& u, std::span<const Perturbation> perturbations = {});

double welfare(const Trajectory& tr);

int period_year(int period);

/// CSV with columns year,s,mu,Q,C,c,I,K,E_ind,E,M_AT,M_UP,M_LO,F,T_AT,T_LO,Omega,Lambda,U,R.
void write_trajectory_csv(std::ostream& out, const Trajectory& tr, const Controls& u);

}  // namespace scc
