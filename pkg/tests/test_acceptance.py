"""Acceptance criteria, one test per criterion.

Each test records a PASS/FAIL line; the lines are printed at the end of a
pytest run and also when this file is executed directly.
"""

import io
import json
import math
import sys
import time
from contextlib import redirect_stdout
from fractions import Fraction

import numpy as np
import pytest

from zerogap import eigen, field
from zerogap.cli import run_command
from zerogap.exact import monomial_region_integral
from zerogap.functional import (
    PUBLISHED_COEFFICIENTS,
    PUBLISHED_NU,
    AmplifierConfig,
    assemble,
    assemble_c0,
    hall_conjecture_ratio,
)
from zerogap.oracle import mc_estimate, operator_identity_check, wirtinger_ratio

RESULTS: list[str] = []


def report(number: int, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'}  criterion {number:2d}: {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def test_criterion_01_published_value():
    buf = io.StringIO()
    start = time.perf_counter()
    with redirect_stdout(buf):
        code = run_command(["reproduce"])
    elapsed = time.perf_counter() - start
    rec = json.loads(buf.getvalue())
    h = rec["h"]
    ok = code == 0 and abs(h - 1.00016) <= 5e-5 and rec["kappa_input"] == 2.866 and elapsed <= 60
    report(1, ok, f"reproduce h = {h:.10f} (target 1.00016 +- 5e-5), kappa_input = "
                  f"{rec['kappa_input']}, {elapsed:.1f} s")


def test_criterion_02_prior_bound():
    res = eigen.optimize(assemble(AmplifierConfig(0, 1, 0)), (0.0, 4.0))
    ok = abs(res.nu - 1.0) <= 1e-3 and abs(res.kappa - math.sqrt(6)) <= 1e-6
    report(2, ok, f"theta=0 d=0: nu* = {res.nu:.9f}, kappa = {res.kappa:.12f} (sqrt 6 = "
                  f"{math.sqrt(6):.12f})")


def test_criterion_03_optimizer_dominance():
    res = eigen.optimize(assemble(AmplifierConfig(Fraction(1, 4), 1, 4)), (0.0, 4.0))
    report(3, res.kappa >= 2.866, f"theta=1/4 r=1 d=4: kappa* = {res.kappa:.9f} at nu* = {res.nu:.6f}")


def test_criterion_04_exact_identity():
    bad = []
    count = 0
    for theta in (Fraction(0), Fraction(1, 8), Fraction(1, 4)):
        for r in (1, 2):
            for d in range(7):
                gf = assemble(AmplifierConfig(theta, r, d))
                count += 1
                if gf.K2 != gf.C0 or not all(isinstance(v, Fraction) for row in gf.K2 for v in row):
                    bad.append((theta, r, d))
    report(4, not bad, f"K2 == C0 exactly in {count - len(bad)}/{count} configurations")


def test_criterion_05_oracle_equivalence():
    cfg = AmplifierConfig(Fraction(1, 4), 1, 4)
    gf = assemble(cfg)
    rng = np.random.default_rng(20240601)
    worst = 0.0
    ok = True
    for k in range(3):
        b = rng.normal(size=5)
        for target, exact, kw in (("c0", gf.c0(b), {}), ("c1", gf.c1(b, PUBLISHED_NU), {"nu": PUBLISHED_NU})):
            est = mc_estimate(target, cfg, b, 1_000_000, seed=100 + k, **kw)
            z = abs(est.mean - exact) / est.stderr
            worst = max(worst, z)
            ok &= est.agrees_with(exact)
    report(5, ok, f"3 random b, c0 and c1(1.2773) at n=1e6: worst |z| = {worst:.2f} (limit 3)")


def test_criterion_06_operator_identity():
    trivial = operator_identity_check(AmplifierConfig(0, 1, 0), [1.0], 1.0, 1e-2, 10_000_000, seed=0)
    published = operator_identity_check(AmplifierConfig.published(), PUBLISHED_COEFFICIENTS, PUBLISHED_NU, 1e-2,
                                    10_000_000, seed=0)
    ok = trivial.residual <= 1e-2 and published.residual <= 1e-2
    report(6, ok, f"n=1e7 step=1e-2: residual {trivial.residual:.2e} (theta=0), "
                  f"{published.residual:.2e} (published config, 3 stderr = "
                  f"{3 * published.fd_stderr / abs(published.exact):.1e})")


def test_criterion_07_closed_form_anchors():
    gf = assemble(AmplifierConfig(0, 1, 0))
    F = Fraction
    ok = (
        gf.C0 == ((F(1, 120),),)
        and (gf.K2[0][0], gf.K1[0][0], gf.K0[0][0]) == (F(1, 120), F(-2, 120), F(7, 6) / 120)
        and monomial_region_integral((0, 0, 0, 0, 0)) == F(1, 20)
        and assemble_c0(AmplifierConfig(F(1, 4), 1, 0)) == ((F(2083, 322560),),)
    )
    report(7, ok, "c0 = 1/120, c1 = (nu^2 - 2nu + 7/6)/120, vol = 1/20, 2083/322560 exact")


def test_criterion_08_eigen_contract(monkeypatch):
    residuals = []
    original = eigen.rayleigh_max

    def recording(C0, C1):
        lam, b = original(C0, C1)
        residuals.append(eigen.eigen_residual(eigen.sym_matrix(C0), eigen.sym_matrix(C1), lam, b))
        return lam, b

    monkeypatch.setattr(eigen, "rayleigh_max", recording)
    gf = assemble(AmplifierConfig(Fraction(1, 4), 1, 4))
    res = eigen.optimize(gf, (0.0, 4.0))
    C0, C1 = gf.as_float("C0"), gf.c1_matrix(res.nu)
    lam = res.kappa**2
    rng = np.random.default_rng(8)
    v = rng.normal(size=(1_000_000, 5))
    q = np.einsum("ij,jk,ik->i", v, C0, v) / np.einsum("ij,jk,ik->i", v, C1, v)
    ok = max(residuals) <= 1e-10 and q.max() <= lam * (1 + 1e-12)
    report(8, ok, f"{len(residuals)} solves, max residual {max(residuals):.1e}; best random "
                  f"quotient {q.max():.9f} <= lambda_max {lam:.9f}")


def test_criterion_09_field_constants():
    targets = {
        -4: math.pi / 4,
        -3: math.pi / (3 * math.sqrt(3)),
        5: 2 / math.sqrt(5) * math.log((1 + math.sqrt(5)) / 2),
    }
    lerr = max(abs(field.dirichlet_L1(D) - v) for D, v in targets.items())
    Ds = [D for D in range(-100, 101) if D not in (0, 1) and D % 4 in (0, 1)
          and field.is_fundamental_discriminant(D)]
    worst = 0.0
    for D in Ds:
        for r in (1, 2):
            a = field.arithmetic_factor(D, r, 100_000)
            b = field.arithmetic_factor(D, r, 200_000)
            worst = max(worst, abs(b - a) / abs(b))
    ok = lerr <= 1e-8 and worst < 1e-6
    report(9, ok, f"max |L(1) error| = {lerr:.1e}; A_r relative change 1e5 -> 2e5 over "
                  f"{len(Ds)} discriminants, r<=2: {worst:.1e}")


def test_criterion_10_wirtinger():
    a, b = 0.0, math.pi
    x = np.linspace(a, b, 10_000)
    f = np.sin(math.pi * (x - a) / (b - a))
    f[-1] = 0.0
    eq = abs(wirtinger_ratio(f, a, b) / ((b - a) / math.pi) ** 2 - 1)
    rng = np.random.default_rng(10)
    xs = np.linspace(0, 1, 4001)
    k = np.arange(1, 9)
    excess = -np.inf
    for _ in range(100):
        c = rng.normal(size=8) / k**rng.uniform(0.5, 2)
        g = np.sin(np.pi * np.outer(xs, k)) @ c
        g[0] = g[-1] = 0.0
        excess = max(excess, wirtinger_ratio(g, 0, 1) - 1 / math.pi**2)
    ok = eq <= 1e-6 and excess <= 1e-6
    report(10, ok, f"sine eigenfunction |ratio - 1| = {eq:.1e}; worst excess over bound "
                   f"on 100 random functions = {excess:.1e}")


def test_criterion_11_conjectural_ratio():
    vals = [hall_conjecture_ratio(k) for k in (1, 2, 3)]
    ok = vals == [Fraction(3, 4), Fraction(15, 64), Fraction(35, 324)]
    report(11, ok, "ratios " + ", ".join(str(v) for v in vals))


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
