#include <doctest.h>

#include <cmath>
#include <random>

#include "scc/adjoint.hpp"
#include "support.hpp"

using namespace scc;
using testing::desk;
using testing::rel_diff;

namespace {

// Independent central difference of an arbitrary functional of the trajectory.
template <class F>
double central(const Params& p, Controls u, bool savings, std::size_t i, double h, F&& functional) {
  auto& v = savings ? u.s : u.mu;
  const double x = v[i];
  v[i] = x + h;
  const double up = functional(simulate(p, u));
  v[i] = x - h;
  const double down = functional(simulate(p, u));
  return (up - down) / (2 * h);
}

}  // namespace

TEST_SUITE("adjoint") {

TEST_CASE("one period: savings derivative in closed form") {
  const Params p = desk().truncated(1);
  const Controls u{{0.3}, {0.2}};
  const Trajectory tr = simulate(p, u);
  // W = R pi1 ((1-s) Q / pi12)^pi2 / pi2, Q independent of s
  const double expected = -tr.R[0] * p.pi1[0] * tr.Q[0] * std::pow(tr.c[0], p.pi2 - 1) / p.pi12[0];
  const Gradient g = grad_controls(p, u);
  CHECK(g.d_s[0] == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("free abatement without damages leaves the last control inert") {
  // Period-t carbon warms period t, so damages must be off as well as cost.
  Params p = desk();
  p.pi10.back() = 0.0;
  p.pi8 = p.pi9 = 0.0;
  const Gradient g = grad_controls(p, interior_sample(p, 3));
  CHECK(g.d_mu.back() == 0.0);
}

TEST_CASE("adjoint matches finite differences at random interior points") {
  const Params& p = desk();
  for (unsigned long long seed = 1; seed <= 3; ++seed) {
    const FdReport rep = fd_check(p, interior_sample(p, seed), 1e-5);
    CHECK(rep.passed(1e-6));
    CHECK(rep.max_rel_error() <= 1e-6);
    REQUIRE(rep.blocks.size() == 4);
    for (const auto& b : rep.blocks) CHECK_FALSE(b.flagged);
  }
}

TEST_CASE("constraint seeds differentiate the combined functional") {
  const Params& p = desk();
  const Controls u = interior_sample(p, 11);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> w(-2.0, 2.0);
  AdjointSeeds seeds;
  seeds.welfare = 0.7;
  for (int i = 0; i < p.t_max; ++i) {
    seeds.t_at.push_back(w(rng) * 100);
    seeds.e_ind.push_back(w(rng));
  }
  auto functional = [&](const Trajectory& tr) {
    double j = seeds.welfare * tr.W;
    for (std::size_t i = 0; i < tr.T_AT.size(); ++i) j += seeds.t_at[i] * tr.T_AT[i] + seeds.e_ind[i] * tr.E_ind[i];
    return j;
  };
  const AdjointResult ad = adjoint(p, u, seeds);
  CHECK(ad.value == doctest::Approx(functional(simulate(p, u))).epsilon(1e-14));
  double num = 0, den = 0;
  for (std::size_t i = 0; i < u.s.size(); ++i) {
    const double fs = central(p, u, true, i, 1e-6, functional);
    const double fm = central(p, u, false, i, 1e-6, functional);
    num = std::max({num, std::abs(fs - ad.grad.d_s[i]), std::abs(fm - ad.grad.d_mu[i])});
    den = std::max({den, std::abs(fs), std::abs(fm)});
  }
  CHECK(num / den < 1e-6);
}

TEST_CASE("consumption sensitivity equals discounted marginal utility") {
  const Params& p = desk();
  const Controls u = interior_sample(p, 8);
  const Trajectory tr = simulate(p, u);
  for (int t : {1, 7, 20}) {
    const auto i = static_cast<std::size_t>(t - 1);
    const double closed = tr.R[i] * p.pi1[i] / p.pi12[i] * std::pow(tr.c[i], p.pi2 - 1);
    CHECK(sens_rhs(p, u, Equation::Consumption, t).value == doctest::Approx(closed).epsilon(1e-13));
  }
}

TEST_CASE("emissions sensitivity in the last period matches a difference quotient") {
  const Params& p = desk();
  const Controls u = interior_sample(p, 9);
  // |dW/da| ~ 1e-4 against |W| ~ 1e4: smaller steps drown in rounding.
  const double h = 0.1;
  const Perturbation up[] = {{Equation::Emissions, p.t_max, h}};
  const Perturbation down[] = {{Equation::Emissions, p.t_max, -h}};
  const double fd = (simulate(p, u, up).W - simulate(p, u, down).W) / (2 * h);
  const RhsSensitivity s = sens_rhs(p, u, Equation::Emissions, p.t_max);
  CHECK(s.target == Equation::Emissions);
  CHECK(s.period == p.t_max);
  CHECK(rel_diff(s.value, fd) <= 1e-6);
}

TEST_CASE("extra carbon never raises welfare") {
  const Params& p = desk();
  for (unsigned long long seed = 20; seed < 25; ++seed) {
    const AdjointResult ad = adjoint(p, interior_sample(p, seed));
    for (double v : ad.d_emissions) CHECK(v <= 0.0);
    for (double v : ad.d_consumption) CHECK(v > 0.0);
  }
}

TEST_CASE("fd_check flags a corrupted adjoint") {
  const Params& p = desk();
  const Controls u = interior_sample(p, 4);
  AdjointFn shifted = [](const Params& pp, const Controls& uu) {
    AdjointResult r = adjoint(pp, uu);
    // off by one period
    std::rotate(r.grad.d_mu.begin(), r.grad.d_mu.begin() + 1, r.grad.d_mu.end());
    return r;
  };
  const FdReport rep = fd_check(p, u, 1e-5, 1e-6, shifted);
  CHECK(rep.max_rel_error() > 1e-3);
  CHECK_FALSE(rep.passed(1e-6));
  bool mu_flagged = false;
  for (const auto& b : rep.blocks) {
    if (b.name == "d_mu") mu_flagged = b.flagged;
    if (b.name == "d_s") CHECK_FALSE(b.flagged);
  }
  CHECK(mu_flagged);
  CHECK(rep.table().find("FLAG") != std::string::npos);
}

TEST_CASE("fd_check rejects a non-positive step") {
  const Params& p = desk();
  CHECK_THROWS_AS(fd_check(p, interior_sample(p, 1), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(fd_check_serial(p, interior_sample(p, 1), -1e-5), std::invalid_argument);
}

TEST_CASE("parallel and serial fd_check agree exactly") {
  const Params& p = desk();
  const Controls u = interior_sample(p, 6);
  const FdReport a = fd_check(p, u, 1e-5);
  const FdReport b = fd_check_serial(p, u, 1e-5);
  CHECK(a.table() == b.table());
  CHECK(a.rhs_periods == std::vector<int>{1, 10, 20});
}

}
