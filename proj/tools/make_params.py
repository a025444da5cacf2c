#!/usr/bin/env python3
"""Regenerate data/dice2016.params and data/desk.params.

Constants are the DICE-2016R scalars (DICE2016R-091916ap.gms). The script
folds the model's unit bookkeeping into the per-period vectors so the
recursions in src/dynamics.cpp apply with no extra factors:

  * economic flows (Q, C, I) are trillion 2010 USD per 5-year period;
  * emissions are GtCO2 per period, carbon reservoirs are GtCO2;
  * per-capita consumption c = C / population is 1e6 USD per person per
    period, and the 200^pi2 factor that maps it back to thousand USD per
    year lives in pi1.

Usage: tools/make_params.py [outdir]
"""

import math
import sys
from pathlib import Path

TSTEP = 5
NT = 100

elasmu = 1.45
prstp = 0.015
gama = 0.300
pop0, popadj, popasym = 7403.0, 0.134, 11500.0
dk = 0.100
q0, k0 = 105.5, 223.0
a0, ga0, dela = 5.115, 0.076, 0.005
gsigma1, dsig = -0.0152, -0.001
eland0, deland = 2.6, 0.115
e0, miu0 = 35.85, 0.03
mat0, mu0, ml0 = 851.0, 460.0, 1740.0
mateq, mueq, mleq = 588.0, 360.0, 1720.0
b12, b23 = 0.12, 0.007
t2xco2, fex0, fex1 = 3.1, 0.5, 1.0
tocean0, tatm0 = 0.0068, 0.85
c1, c3, c4 = 0.1005, 0.088, 0.025
fco22x = 3.6813
a1, a2 = 0.0, 0.00236
expcost2, pback, gback, limmiu = 2.6, 550.0, 0.025, 1.2
fosslim = 6000.0
scale1 = 0.0302455265681763
CO2_PER_C = 3.666


def series(n):
    pop = [pop0]
    for _ in range(n - 1):
        pop.append(pop[-1] * (popasym / pop[-1]) ** popadj)
    tfp = [a0]
    for t in range(1, n):
        ga = ga0 * math.exp(-dela * TSTEP * (t - 1))
        tfp.append(tfp[-1] / (1.0 - ga))
    sig0 = e0 / (q0 * (1.0 - miu0))
    sigma, gsig = [sig0], gsigma1
    for _ in range(n - 1):
        sigma.append(sigma[-1] * math.exp(gsig * TSTEP))
        gsig *= (1.0 + dsig) ** TSTEP
    pbt = [pback * (1.0 - gback) ** t for t in range(n)]
    # Non-CO2 forcing ramps from fex0 to fex1 over 17 periods, then holds.
    # Index t+1: temperature in period t responds to end-of-period forcing.
    forcoth = []
    for t in range(1, n + 1):
        k = t + 1
        forcoth.append(fex0 + (fex1 - fex0) * (k - 1) / 17.0 if k < 19 else fex1)
    return pop, tfp, sigma, pbt, forcoth, sig0


def fmt(x):
    return repr(float(x))


def vec(values, per_line=5):
    rows = []
    for i in range(0, len(values), per_line):
        rows.append("    " + ", ".join(fmt(v) for v in values[i:i + per_line]))
    return "[\n" + ",\n".join(rows) + "\n]"


def render(n, title):
    pop, tfp, sigma, pbt, forcoth, sig0 = series(n)
    pi2 = 1.0 - elasmu
    pi3 = (1.0 + prstp) ** TSTEP
    util_scale = TSTEP * scale1 * 200.0 ** pi2 * pi3
    b11 = 1.0 - b12
    b21 = b12 * mateq / mueq
    b22 = 1.0 - b21 - b23
    b32 = b23 * mueq / mleq
    b33 = 1.0 - b32
    cost1 = [pbt[t] * sigma[t] / expcost2 / 1000.0 for t in range(n)]
    out = []
    w = out.append
    w(f"# {title}")
    w("# Generated by tools/make_params.py from the DICE-2016R constants")
    w("# (DICE2016R-091916ap.gms). Units: trillion 2010 USD per 5-year period,")
    w("# GtCO2 per period for emissions, GtCO2 for carbon reservoirs, degC.")
    w("# Spot checks against the GAMS source: pop0=7403, a0=5.115, k0=223,")
    w("# sig0=e0/(q0*(1-miu0))=%.10f, pback=550, fco22x=3.6813." % sig0)
    w("")
    w(f"t_max = {n}")
    w("")
    w("# utility: U = pi1 * c^pi2 / pi2, R = pi3^-t")
    w("# pi1 = 5 * scale1 * 200^pi2 * pi3 * population (population-weighted)")
    w("pi1 = " + vec([util_scale * p for p in pop]))
    w(f"pi2 = {fmt(pi2)}")
    w(f"pi3 = {fmt(pi3)}")
    w("")
    w("# production: Q = (1 - Lambda) * pi4 * K^pi5 * pi6^pi7 / (1 + Omega)")
    w("# pi4 = 5 * TFP (per-period output), pi6 = population in billions")
    w("pi4 = " + vec([TSTEP * a for a in tfp]))
    w(f"pi5 = {fmt(gama)}")
    w("pi6 = " + vec([p / 1000.0 for p in pop]))
    w(f"pi7 = {fmt(1.0 - gama)}")
    w("")
    w("# damages: Omega = pi8 * T + pi9 * T^2")
    w(f"pi8 = {fmt(a1)}")
    w(f"pi9 = {fmt(a2)}")
    w("")
    w("# abatement: Lambda = pi10 * mu^pi11, pi10 = pback(t) * sigma(t) / pi11 / 1000")
    w("pi10 = " + vec(cost1))
    w(f"pi11 = {fmt(expcost2)}")
    w("")
    w("# per-capita consumption c = C / pi12 (population, millions)")
    w("pi12 = " + vec(pop))
    w("")
    w("# capital: K(t) = I(t) - pi13 * K(t-1)")
    w("# Sign convention: pi13 is stored negative, -pi13 = (1 - dk)^5 is the")
    w("# fraction of capital carried into the next period.")
    w(f"pi13 = {fmt(-((1.0 - dk) ** TSTEP))}")
    w("")
    w("# industrial emissions: E_ind = pi14 * (1 - mu) * pi15 * K^pi16 * pi17^pi18")
    w("# pi14 = 5 * sigma(t) (GtCO2 per trillion USD, per period)")
    w(f"pi14 = grow({fmt(TSTEP * sig0)}, {fmt(TSTEP * gsigma1)}, "
      f"{fmt(1.0 - (1.0 + dsig) ** TSTEP)})")
    w("pi15 = " + vec(tfp))
    w(f"pi16 = {fmt(gama)}")
    w("pi17 = " + vec([p / 1000.0 for p in pop]))
    w(f"pi18 = {fmt(1.0 - gama)}")
    w("")
    w("# cumulative industrial emissions cap, GtCO2 (fosslim = 6000 GtC)")
    w(f"pi19 = {fmt(fosslim * CO2_PER_C)}")
    w("")
    w("# land emissions, GtCO2 per period: 5 * eland0 * (1 - deland)^(t-1)")
    w(f"pi20 = grow({fmt(TSTEP * eland0)}, {fmt(math.log(1.0 - deland))}, 0)")
    w("")
    w("# carbon cycle, dimensionless transfer coefficients")
    w(f"pi21 = {fmt(b11)}")
    w(f"pi22 = {fmt(b21)}")
    w(f"pi23 = {fmt(b12)}")
    w(f"pi24 = {fmt(b22)}")
    w(f"pi25 = {fmt(b32)}")
    w(f"pi26 = {fmt(b23)}")
    w(f"pi27 = {fmt(b33)}")
    w("carbon_conservation = 1")
    w("")
    w("# forcing: F = pi28 * log2(M_AT / pi29) + pi30(t)")
    w(f"pi28 = {fmt(fco22x)}")
    w(f"pi29 = {fmt(mateq * CO2_PER_C)}")
    w("pi30 = " + vec(forcoth))
    w("")
    w("# temperature")
    w(f"pi31 = {fmt(c1)}")
    w(f"pi32 = {fmt(fco22x / t2xco2)}")
    w(f"pi33 = {fmt(c3)}")
    w(f"pi34 = {fmt(c4)}")
    w("")
    w("# upper bound on the abatement rate")
    w("pi35 = " + vec([1.0 if t + 1 < 30 else limmiu for t in range(n)]))
    w("")
    w("# initial states (2010 USD trillions, GtCO2, degC)")
    w(f"K0 = {fmt(k0)}")
    w(f"M_AT0 = {fmt(mat0 * CO2_PER_C)}")
    w(f"M_UP0 = {fmt(mu0 * CO2_PER_C)}")
    w(f"M_LO0 = {fmt(ml0 * CO2_PER_C)}")
    w(f"T_AT0 = {fmt(tatm0)}")
    w(f"T_LO0 = {fmt(tocean0)}")
    w("")
    w("# marginal abatement cost: c1(t) * mu^c2, USD/tCO2")
    w("c1 = " + vec(pbt))
    w(f"c2 = {fmt(expcost2 - 1.0)}")
    w("")
    w("# trillion USD per GtCO2 -> USD per tCO2")
    w("unit_scale = 1000")
    return "\n".join(out) + "\n"


def main():
    outdir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "data"
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "dice2016.params").write_text(render(NT, "DICE-2016R calibration, 100 five-year periods (2015-2510)"))
    (outdir / "desk.params").write_text(render(20, "DICE-2016R calibration truncated to 20 periods (2015-2110)"))


if __name__ == "__main__":
    main()
