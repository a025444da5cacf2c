#include <doctest.h>

#include <cmath>
#include <sstream>

#include "scc/adjoint.hpp"
#include "scc/dynamics.hpp"
#include "support.hpp"

using namespace scc;
using testing::desk;
using testing::rel_diff;

namespace {

Controls constant(const Params& p, double s, double mu) {
  return {std::vector<double>(static_cast<std::size_t>(p.t_max), s),
          std::vector<double>(static_cast<std::size_t>(p.t_max), mu)};
}

bool same_prefix(const std::vector<double>& a, const std::vector<double>& b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i] != b[i]) return false;
  }
  return true;
}

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("damage fraction") {
  Params p = desk();
  CHECK(damage_fraction(0.0, p) == 0.0);
  CHECK(damage_fraction(1.0, p) == doctest::Approx(0.00236).epsilon(1e-15));
  p.pi8 = 0.0;
  p.pi9 = 0.7;
  CHECK(damage_fraction(2.0, p) == doctest::Approx(2.8).epsilon(1e-15));
  p.pi8 = 0.01;
  double prev = damage_fraction(0.0, p);
  for (double t = 0.1; t < 6.0; t += 0.1) {
    CHECK(damage_fraction(t, p) >= prev);
    prev = damage_fraction(t, p);
  }
}

TEST_CASE("abatement fraction") {
  const Params& p = desk();
  CHECK(abatement_fraction(0.0, 1, p) == 0.0);
  CHECK(abatement_fraction(1.0, 7, p) == p.pi10[6]);
  // pback * sigma(1) / theta2 / 1000 * 0.5^theta2
  const double sigma1 = 35.85 / (105.5 * 0.97);
  CHECK(abatement_fraction(0.5, 1, p) ==
        doctest::Approx(550.0 * sigma1 / 2.6 / 1000.0 * std::pow(0.5, 2.6)).epsilon(1e-13));
}

TEST_CASE("carbon step") {
  Params id = desk();
  id.pi21 = id.pi24 = id.pi27 = 1.0;
  id.pi22 = id.pi23 = id.pi25 = id.pi26 = 0.0;
  const CarbonState s0{10.0, 20.0, 30.0};
  const CarbonState same = carbon_step(s0, 0.0, id);
  CHECK(same.m_at == 10.0);
  CHECK(same.m_up == 20.0);
  CHECK(same.m_lo == 30.0);

  // DICE-2016R transfer coefficients from b12 = 0.12, b23 = 0.007 and the
  // equilibrium masses 588 / 360 / 1720 GtC; initial state in GtCO2.
  const Params& p = desk();
  const double mat = 851 * 3.666, mup = 460 * 3.666, mlo = 1740 * 3.666;
  const double b21 = 0.12 * 588 / 360, b32 = 0.007 * 360 / 1720;
  const CarbonState next = carbon_step({mat, mup, mlo}, 180.0, p);
  CHECK(next.m_at == doctest::Approx(180.0 + 0.88 * mat + b21 * mup).epsilon(1e-14));
  CHECK(next.m_up == doctest::Approx(0.12 * mat + (1 - b21 - 0.007) * mup + b32 * mlo).epsilon(1e-14));
  CHECK(next.m_lo == doctest::Approx(0.007 * mup + (1 - b32) * mlo).epsilon(1e-14));
}

TEST_CASE("carbon conservation with zero emissions") {
  const Params& p = desk();
  REQUIRE(p.carbon_conservation);
  CarbonState s{p.m_at0, p.m_up0, p.m_lo0};
  const double total0 = s.m_at + s.m_up + s.m_lo;
  for (int k = 0; k < 1000; ++k) {
    s = carbon_step(s, 0.0, p);
    const double total = s.m_at + s.m_up + s.m_lo;
    REQUIRE(rel_diff(total, total0) <= 1e-9);
  }
}

TEST_CASE("forcing and temperature step") {
  Params p = desk();
  p.pi30.assign(p.pi30.size(), 0.0);
  CHECK(forcing(p.pi29, 1, p) == 0.0);
  const TemperatureState still = temperature_step({0.0, 0.0}, p.pi29, 1, p);
  CHECK(still.t_at == 0.0);
  CHECK(still.t_lo == 0.0);
  CHECK(forcing(2 * p.pi29, 1, p) == doctest::Approx(p.pi28).epsilon(1e-15));
  CHECK_THROWS_AS(forcing(0.0, 4, p), SimulationDomainError);
  try {
    temperature_step({0.0, 0.0}, -1.0, 4, p);
  } catch (const SimulationDomainError& e) {
    CHECK(e.period() == 4);
  }

  // one step from the bundled initial state, DICE-2016R coefficients
  const Params& d = desk();
  const double m = 3200.0;
  const double f = 3.6813 * std::log2(m / (588 * 3.666)) + d.pi30[0];
  const TemperatureState next = temperature_step({0.85, 0.0068}, m, 1, d);
  CHECK(next.t_at ==
        doctest::Approx(0.85 + 0.1005 * (f - 3.6813 / 3.1 * 0.85 - 0.088 * (0.85 - 0.0068))).epsilon(1e-14));
  CHECK(next.t_lo == doctest::Approx(0.0068 + 0.025 * (0.85 - 0.0068)).epsilon(1e-15));
}

TEST_CASE("first period by hand") {
  const Params& p = desk();
  const Controls u = constant(p, 0.22, 0.1);
  const Trajectory tr = simulate(p, u);
  const double k0 = 223.0, l0 = 7403.0;
  const double sigma1 = 35.85 / (105.5 * 0.97);
  // 5-year flow: 5 * sigma * (1 - mu) * annual gross output
  const double e_ind = 5 * sigma1 * 0.9 * 5.115 * std::pow(k0, 0.3) * std::pow(l0 / 1000, 0.7);
  CHECK(tr.E_ind[0] == doctest::Approx(e_ind).epsilon(1e-13));
  const double e = e_ind + 5 * 2.6;
  const double mat = e + 0.88 * 851 * 3.666 + (0.12 * 588 / 360) * 460 * 3.666;
  CHECK(tr.M_AT[0] == doctest::Approx(mat).epsilon(1e-13));
  const double f = 3.6813 * std::log2(mat / (588 * 3.666)) + p.pi30[0];
  const double tat = 0.85 + 0.1005 * (f - 3.6813 / 3.1 * 0.85 - 0.088 * (0.85 - 0.0068));
  CHECK(tr.T_AT[0] == doctest::Approx(tat).epsilon(1e-13));
  const double omega = 0.00236 * tat * tat;
  const double lambda = 550.0 * sigma1 / 2.6 / 1000.0 * std::pow(0.1, 2.6);
  const double q = (1 - lambda) * 5 * 5.115 * std::pow(k0, 0.3) * std::pow(l0 / 1000, 0.7) / (1 + omega);
  CHECK(tr.Q[0] == doctest::Approx(q).epsilon(1e-13));
  CHECK(tr.C[0] == doctest::Approx(0.78 * q).epsilon(1e-13));
  CHECK(tr.K[0] == doctest::Approx(0.22 * q + std::pow(0.9, 5) * k0).epsilon(1e-13));
  const double c = 0.78 * q / l0;
  const double util = p.pi1[0] * std::pow(c, -0.45) / -0.45;
  CHECK(tr.U[0] == doctest::Approx(util).epsilon(1e-13));
  CHECK(tr.R[0] == doctest::Approx(1 / std::pow(1.015, 5)).epsilon(1e-15));
}

TEST_CASE("zero abatement") {
  const Params& p = desk();
  const Trajectory tr = simulate(p, constant(p, 0.2, 0.0));
  for (int i = 0; i < p.t_max; ++i) {
    CHECK(tr.Lambda[static_cast<std::size_t>(i)] == 0.0);
    CHECK(tr.E_ind[static_cast<std::size_t>(i)] > 0.0);
  }
}

TEST_CASE("perturbations are local in time") {
  const Params& p = desk();
  const Controls u = constant(p, 0.2, 0.3);
  const Trajectory base = simulate(p, u);
  const double a = 7.5;
  const Perturbation pe[] = {{Equation::Emissions, 3, a}};
  const Trajectory tr = simulate(p, u, pe);
  for (auto member : {&Trajectory::U, &Trajectory::Q, &Trajectory::C, &Trajectory::K, &Trajectory::E,
                      &Trajectory::M_AT, &Trajectory::T_AT, &Trajectory::T_LO}) {
    CHECK(same_prefix(base.*member, tr.*member, 2));
  }
  CHECK(tr.E[2] - base.E[2] == doctest::Approx(a).epsilon(1e-12));
  CHECK(tr.E_ind[2] == base.E_ind[2]);
  CHECK(tr.T_AT[2] > base.T_AT[2]);
  CHECK(tr.Q[2] < base.Q[2]);  // warmer, same capital: lower output

  const Perturbation pc[] = {{Equation::Consumption, 5, 0.5}};
  const Trajectory tc = simulate(p, u, pc);
  CHECK(same_prefix(base.U, tc.U, 4));
  CHECK(tc.C[4] - base.C[4] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(tc.I[4] == base.I[4]);
  CHECK(tc.K == base.K);
}

TEST_CASE("first-order response to both perturbations") {
  const Params& p = desk();
  const Controls u = constant(p, 0.24, 0.4);
  const double w0 = simulate(p, u).W;
  const double le = sens_rhs(p, u, Equation::Emissions, 6).value;
  const double lc = sens_rhs(p, u, Equation::Consumption, 6).value;
  auto residual = [&](double a) {
    const Perturbation pp[] = {{Equation::Emissions, 6, a}, {Equation::Consumption, 6, a * 0.03}};
    return std::abs(simulate(p, u, pp).W - w0 - le * a - lc * a * 0.03);
  };
  const double r1 = residual(40.0), r2 = residual(20.0), r3 = residual(10.0);
  CHECK(r1 > 0.0);
  CHECK(r2 / r1 < 0.3);  // quadratic remainder: ratio near 1/4
  CHECK(r3 / r2 < 0.3);
  CHECK(residual(10.0) < 1e-3 * std::abs(le * 10.0 + lc * 0.3));
}

TEST_CASE("simulation domain errors name the period") {
  const Params& p = desk();
  Controls u = constant(p, 0.2, 0.3);
  u.s[6] = 1.0;  // no consumption left in period 7
  try {
    simulate(p, u);
    FAIL("expected a domain error");
  } catch (const SimulationDomainError& e) {
    CHECK(e.period() == 7);
  }
  const Perturbation big[] = {{Equation::Consumption, 2, -1e6}};
  CHECK_THROWS_AS(simulate(p, constant(p, 0.2, 0.3), big), SimulationDomainError);
  const Perturbation outside[] = {{Equation::Emissions, 21, 1.0}};
  CHECK_THROWS_AS(simulate(p, constant(p, 0.2, 0.3), outside), std::invalid_argument);
  CHECK_THROWS_AS(check_controls(constant(p, 1.2, 0.3), p), std::invalid_argument);
}

TEST_CASE("welfare sums discounted utility") {
  const Params& p = desk();
  const Trajectory tr = simulate(p, constant(p, 0.25, 0.5));
  CHECK(welfare(tr) == tr.W);
  long double reverse = 0.0L;
  for (std::size_t i = tr.U.size(); i-- > 0;) reverse += static_cast<long double>(tr.U[i]) * tr.R[i];
  CHECK(rel_diff(tr.W, static_cast<double>(reverse)) < 1e-13);

  Trajectory zero = tr;
  zero.U.assign(zero.U.size(), 0.0);
  CHECK(welfare(zero) == 0.0);

  const Params one = p.truncated(1);
  const Trajectory t1 = simulate(one, constant(one, 0.25, 0.5));
  CHECK(t1.W == t1.U[0] * t1.R[0]);
}

TEST_CASE("log utility when the exponent is zero") {
  Params p = desk();
  p.pi2 = 0.0;
  const Trajectory tr = simulate(p, constant(p, 0.25, 0.5));
  CHECK(tr.U[3] == doctest::Approx(p.pi1[3] * std::log(tr.c[3])).epsilon(1e-15));
}

TEST_CASE("unit weights reproduce a run whose weights are already one") {
  Params p = desk();
  p.pi1.assign(p.pi1.size(), 1.0);
  const Controls u = constant(p, 0.25, 0.5);
  const Trajectory a = simulate(p, u);
  const Trajectory b = simulate(p.with_unit_utility_weights(), u);
  CHECK(a.W == b.W);
  CHECK(a.U == b.U);
}

TEST_CASE("simulation is bit-reproducible") {
  const Params& p = desk();
  const Controls u = interior_sample(p, 42);
  CHECK(u == interior_sample(p, 42));
  CHECK(u != interior_sample(p, 43));
  check_controls(u, p);
  const Trajectory a = simulate(p, u);
  const Trajectory b = simulate(p, u);
  CHECK(a.W == b.W);
  CHECK(a.T_AT == b.T_AT);
  std::ostringstream x, y;
  write_trajectory_csv(x, a, u);
  write_trajectory_csv(y, b, u);
  CHECK(x.str() == y.str());
}

TEST_CASE("trajectory csv layout") {
  const Params& p = desk();
  const Controls u = constant(p, 0.25, 0.5);
  const Trajectory tr = simulate(p, u);
  std::ostringstream out;
  write_trajectory_csv(out, tr, u);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "year,s,mu,Q,C,c,I,K,E_ind,E,M_AT,M_UP,M_LO,F,T_AT,T_LO,Omega,Lambda,U,R");
  int rows = 0;
  std::string first;
  while (std::getline(in, line)) {
    if (rows == 0) first = line;
    ++rows;
  }
  CHECK(rows == 20);
  CHECK(first.rfind("2015,0.25,0.5,", 0) == 0);
  // 17 significant digits survive the round trip
  const std::string q = first.substr(14, first.find(',', 14) - 14);
  CHECK(std::stod(q) == tr.Q[0]);
}

}
