#include <doctest.h>

#include <cmath>
#include <sstream>

#include "scc/marginals.hpp"
#include "support.hpp"

using namespace scc;
using testing::desk;
using testing::rel_diff;

namespace {

OptimizerOptions tight() {
  OptimizerOptions o;
  o.tol = 1e-10;
  return o;
}

const OptResult& free_opt() {
  static const OptResult r = optimize(desk(), {}, tight());
  return r;
}

ScenarioConstraints capped(double cap) {
  ScenarioConstraints sc;
  sc.temp_cap = cap;
  return sc;
}

const OptResult& capped_opt() {
  static const OptResult r = optimize(desk(), capped(2.2), tight());
  return r;
}

}  // namespace

TEST_SUITE("marginals") {

TEST_CASE("scc from the defining equation") {
  const auto v = scc::scc(std::vector<double>{-2e-4}, std::vector<double>{1e-1}, 1000.0);
  CHECK(v[0] == doctest::Approx(2.0).epsilon(1e-15));
  CHECK_THROWS_AS(scc::scc(std::vector<double>{-1.0}, std::vector<double>{0.0}, 1000.0), DegenerateDual);
  CHECK_THROWS_AS(scc::scc(std::vector<double>{-1.0}, std::vector<double>{1e-301}, 1000.0), DegenerateDual);
  CHECK_THROWS_AS(scc::scc(std::vector<double>{-1.0, 2.0}, std::vector<double>{1.0}, 1000.0), std::invalid_argument);
}

TEST_CASE("smac") {
  const Params& p = desk();
  Controls u = default_start(p);
  u.mu[0] = 0.0;
  u.mu[1] = 1.0;
  u.mu[2] = 0.5;
  const auto v = smac(u, p);
  CHECK(v[0] == 0.0);
  CHECK(v[1] == p.c1[1]);
  // pback (1 - gback)^2 0.5^1.6
  CHECK(v[2] == doctest::Approx(550.0 * 0.975 * 0.975 * std::pow(0.5, 1.6)).epsilon(1e-14));
}

TEST_CASE("unconverged optima are rejected") {
  OptResult r = free_opt();
  r.converged = false;
  CHECK_THROWS_AS(compute_marginals(desk(), {}, r), NotConvergedError);
  CHECK_THROWS_AS(marginal_emissions(desk(), {}, r, 3), NotConvergedError);
  CHECK_THROWS_AS(marginal_consumption(desk(), {}, free_opt(), 0), std::invalid_argument);
}

TEST_CASE("signs and the defining identity") {
  for (const OptResult* r : {&free_opt(), &capped_opt()}) {
    const ScenarioConstraints sc = r == &free_opt() ? ScenarioConstraints{} : capped(2.2);
    const MarginalSeries m = compute_marginals(desk(), sc, *r);
    REQUIRE(m.scc.size() == 20);
    for (std::size_t i = 0; i < m.scc.size(); ++i) {
      CHECK(m.eeq_m[i] <= 0.0);
      CHECK(m.cc_m[i] > 0.0);
      CHECK(m.scc[i] >= 0.0);
      CHECK(std::abs(m.eeq_m[i] + m.scc[i] / 1000.0 * m.cc_m[i]) <= 4 * 2.2e-16 * std::abs(m.eeq_m[i]));
    }
  }
}

TEST_CASE("consumption marginal is discounted marginal utility at the optimum") {
  const Params& p = desk();
  const OptResult& r = free_opt();
  for (int t : {1, 5, 12, 20}) {
    const auto i = static_cast<std::size_t>(t - 1);
    const double closed = r.trajectory.R[i] * p.pi1[i] / p.pi12[i] * std::pow(r.trajectory.c[i], p.pi2 - 1);
    CHECK(rel_diff(marginal_consumption(p, {}, r, t), closed) <= 1e-8);
  }
}

TEST_CASE("doubling population with the trajectory frozen halves the consumption marginal") {
  const Params& p = desk();
  const OptResult& r = free_opt();
  Params q = p;
  q.pi12[6] *= 2;
  const AdjointResult a = adjoint(p, r.controls, r.trajectory, AdjointSeeds{});
  const AdjointResult b = adjoint(q, r.controls, r.trajectory, AdjointSeeds{});
  CHECK(b.d_consumption[6] == 0.5 * a.d_consumption[6]);
  CHECK(b.d_consumption[5] == a.d_consumption[5]);
}

TEST_CASE("envelope: marginals match re-optimized difference quotients") {
  const Params& p = desk();
  const OptResult& r = free_opt();
  const double a = 1e-3;
  for (int t : {2, 5, 10}) {
    for (Equation eq : {Equation::Emissions, Equation::Consumption}) {
      const Perturbation pert[] = {{eq, t, a}};
      OptimizerOptions o = tight();
      o.start = r.controls;
      const OptResult bumped = optimize(p, {}, o, pert);
      REQUIRE(bumped.converged);
      const double quotient = (bumped.w_star - r.w_star) / a;
      const double dual = eq == Equation::Emissions ? marginal_emissions(p, {}, r, t)
                                                    : marginal_consumption(p, {}, r, t);
      CAPTURE(t);
      CHECK(rel_diff(dual, quotient) <= 0.01);
    }
  }
}

TEST_CASE("a binding cap raises the emissions marginal") {
  const Params& p = desk();
  for (int t : {5, 10, 15}) {
    CHECK(std::abs(marginal_emissions(p, capped(2.2), capped_opt(), t)) >
          std::abs(marginal_emissions(p, {}, free_opt(), t)));
  }
}

TEST_CASE("Lagrangian stationarity in abatement where it is interior") {
  const Params& p = desk();
  const OptResult& r = free_opt();
  const AdjointResult ad = lagrangian_sensitivities(p, {}, r);
  for (std::size_t i = 0; i < r.controls.mu.size(); ++i) {
    if (r.controls.mu[i] > 1e-6 && r.controls.mu[i] < p.pi35[i] - 1e-6) {
      CHECK(std::abs(ad.grad.d_mu[i]) <= 1e-7 * std::abs(r.w_star));
    }
  }
}

TEST_CASE("oracle: zero bump is trivially compensated") {
  const OracleResult o = oracle_compensation(desk(), {}, free_opt(), 5, 0.0);
  CHECK(o.x_compensating == 0.0);
  CHECK(o.x_native == 0.0);
  CHECK(o.evaluations == 0);
  CHECK_THROWS_AS(oracle_compensation(desk(), {}, free_opt(), 5, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(oracle_compensation(desk(), {}, free_opt(), 21, 1e-3), std::invalid_argument);
}

TEST_CASE("oracle agrees with the dual scc") {
  OracleOptions oo;
  oo.optimizer = tight();
  for (int t : {2, 5, 10, 20}) {
    const OracleResult o = oracle_compensation(desk(), {}, free_opt(), t, 1e-3, oo);
    CAPTURE(t);
    CHECK(o.relative_gap <= 0.02);
    CHECK(o.relative_gap ==
          doctest::Approx(std::abs(1000.0 * o.x_compensating - o.scc_predicted) / std::abs(o.scc_predicted)));
    CHECK(o.x_native == doctest::Approx(o.x_compensating * o.delta_e));
  }
}

TEST_CASE("oracle gap shrinks with the bump in the first-order regime") {
  OracleOptions oo;
  oo.optimizer = tight();
  double prev = INFINITY;
  for (double d = 4.0; d >= 0.25; d /= 2) {
    const OracleResult o = oracle_compensation(desk(), {}, free_opt(), 5, d, oo);
    CHECK(o.relative_gap <= prev);
    prev = o.relative_gap;
  }
}

TEST_CASE("under a binding cap only the Lagrangian marginals survive the oracle") {
  const Params& p = desk();
  OracleOptions oo;
  oo.optimizer = tight();
  const OptResult& r = capped_opt();
  const AdjointResult raw = adjoint(p, r.controls, r.trajectory, AdjointSeeds{});
  for (int t : {2, 10}) {
    const auto i = static_cast<std::size_t>(t - 1);
    const OracleResult o = oracle_compensation(p, capped(2.2), r, t, 1e-3, oo);
    const double raw_scc = -1000.0 * raw.d_emissions[i] / raw.d_consumption[i];
    CAPTURE(t);
    CHECK(o.relative_gap <= 0.02);
    CHECK(rel_diff(raw_scc, 1000.0 * o.x_compensating) > 0.5);
  }
}

TEST_CASE("oracle batch equals one-by-one runs") {
  OracleOptions oo;
  oo.optimizer = tight();
  const std::vector<int> periods{3, 7, 11};
  const auto batch = oracle_batch(desk(), {}, free_opt(), periods, 1e-3, oo);
  for (std::size_t k = 0; k < periods.size(); ++k) {
    const OracleResult one = oracle_compensation(desk(), {}, free_opt(), periods[k], 1e-3, oo);
    CHECK(batch[k].period == periods[k]);
    CHECK(batch[k].x_native == one.x_native);
    CHECK(batch[k].relative_gap == one.relative_gap);
  }
}

TEST_CASE("no sign change means no compensating payment") {
  Params p = desk();
  p.pi9 = -0.002;  // warming helps: extra carbon raises welfare
  const OptResult r = optimize(p, {}, tight());
  REQUIRE(r.converged);
  CHECK_THROWS_AS(oracle_compensation(p, {}, r, 5, 1e-3), BisectionBracketError);
}

TEST_CASE("marginals csv") {
  MarginalSeries m{{-1.0, -2.0}, {0.5, 0.25}, {2000.0, 8000.0}, {1000.0, 0.0}};
  CHECK(std::isnan(m.ratio()[1]));
  std::ostringstream out;
  write_marginals_csv(out, m);
  CHECK(out.str() == "year,eeq_m,cc_m,scc,smac,scc_over_smac\n"
                     "2015,-1,0.5,2000,1000,2\n"
                     "2020,-2,0.25,8000,0,nan\n");
}

}
