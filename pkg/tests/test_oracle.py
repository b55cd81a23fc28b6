"""Sampling, Monte Carlo oracles, the operator identity and the Wirtinger check."""

import math

import numpy as np
import pytest

from zerogap import sampling
from zerogap.functional import PUBLISHED_COEFFICIENTS, AmplifierConfig
from zerogap.oracle import mc_estimate, operator_identity_check, wirtinger_ratio
from zerogap.sampling import acceptance_rate, in_region, sample_region, sample_region_batch, substream

TRIVIAL = AmplifierConfig(0, 1, 0)


# --- sampling ------------------------------------------------------------------------


def test_sample_region_points_are_valid():
    rng = substream(1, 0)
    for _ in range(200):
        p = sample_region(rng)
        assert all(0 <= v <= 1 for v in p)
        assert p.x + p.x1 + p.x2 <= 1 and p.x + p.x3 + p.x4 <= 1
    pts = sample_region_batch(substream(1, 1), 10_000)
    assert pts.shape == (10_000, 5)
    assert in_region(pts).all()


def test_sampling_is_deterministic():
    a = [sample_region(substream(99, 0)) for _ in range(1)]
    rng1, rng2 = substream(99, 0), substream(99, 0)
    first = [sample_region(rng1) for _ in range(100)]
    second = [sample_region(rng2) for _ in range(100)]
    assert first == second
    assert first[0] == a[0]
    assert np.array_equal(sample_region_batch(substream(5, 2), 100), sample_region_batch(substream(5, 2), 100))


def test_acceptance_rate():
    p, err = acceptance_rate(10_000_000, seed=0)
    assert abs(p - 1 / 20) <= 3 * err


def test_thread_count_does_not_change_results():
    f = lambda p: p[:, 0] * p[:, 3] ** 2  # noqa: E731
    one = sampling.estimate(f, 300_000, seed=17, threads=1)
    four = sampling.estimate(f, 300_000, seed=17, threads=4)
    assert one == four


def test_stderr_scaling():
    a = mc_estimate("c0", TRIVIAL, [1.0], 100_000, seed=1)
    b = mc_estimate("c0", TRIVIAL, [1.0], 400_000, seed=1)
    assert a.stderr / b.stderr == pytest.approx(2.0, rel=0.2)


# --- Monte Carlo targets ----------------------------------------------------------------


def test_trivial_targets():
    c0 = mc_estimate("c0", TRIVIAL, [1.0], 1_000_000, seed=2)
    assert c0.agrees_with(1 / 120)
    c1 = mc_estimate("c1", TRIVIAL, [1.0], 1_000_000, seed=2, nu=1.0)
    assert c1.agrees_with(1 / 720)


def test_zero_shift_reproduces_c0_bitwise():
    cfg = AmplifierConfig.published()
    a = mc_estimate("c0", cfg, PUBLISHED_COEFFICIENTS, 200_000, seed=6)
    b = mc_estimate("shifted", cfg, PUBLISHED_COEFFICIENTS, 200_000, seed=6, shifts=(0,) * 6)
    assert a.mean == pytest.approx(b.mean, rel=1e-15)
    assert a.stderr == pytest.approx(b.stderr, rel=1e-12)


def test_quadratic_forms_match_oracle(published_functional):
    cfg = AmplifierConfig.published()
    rng = np.random.default_rng(31)
    b = rng.normal(size=5)
    assert mc_estimate("c0", cfg, b, 1_000_000, seed=7).agrees_with(published_functional.c0(b))
    assert mc_estimate("c1", cfg, b, 1_000_000, seed=7, nu=0.4).agrees_with(published_functional.c1(b, 0.4))


def test_mc_estimate_errors():
    with pytest.raises(ValueError):
        mc_estimate("c0", TRIVIAL, [1.0], 999, seed=0)
    with pytest.raises(ValueError):
        mc_estimate("c0", TRIVIAL, [0.0], 1000, seed=0)
    with pytest.raises(ValueError):
        mc_estimate("c1", TRIVIAL, [1.0], 1000, seed=0)
    with pytest.raises(ValueError):
        mc_estimate("shifted", TRIVIAL, [1.0], 1000, seed=0, shifts=(1, 2))
    with pytest.raises(ValueError):
        mc_estimate("c7", TRIVIAL, [1.0], 1000, seed=0)


# --- operator identity ----------------------------------------------------------------


def test_phi_derivatives_closed_form():
    # (nu + d1 + d2)^2 on phi(w1) phi(w2) at 0 with phi(0)=1, phi'=-1/2, phi''=1/3
    for nu in (0.0, 1.0, 2.0):
        val = nu**2 + 2 * nu * 2 * (-0.5) + 2 * (1 / 3) + 2 * 0.25
        assert val == pytest.approx(nu * nu - 2 * nu + 7 / 6, abs=1e-15)


@pytest.mark.parametrize("nu", [0.0, 1.0, 2.0])
def test_operator_identity_trivial(nu):
    chk = operator_identity_check(TRIVIAL, [1.0], nu, fd_step=1e-2, n=1_000_000, seed=0)
    assert chk.exact == pytest.approx((nu * nu - 2 * nu + 7 / 6) / 120, rel=1e-14)
    assert chk.residual <= 1e-2


def test_operator_identity_step_domain():
    with pytest.raises(ValueError):
        operator_identity_check(TRIVIAL, [1.0], 1.0, fd_step=0.5, n=1000)


# --- Wirtinger --------------------------------------------------------------------------


def test_wirtinger_equality_case():
    a, b = 0.0, math.pi
    x = np.linspace(a, b, 10_000)
    f = np.sin(math.pi * (x - a) / (b - a))
    f[-1] = 0.0
    assert wirtinger_ratio(f, a, b) / ((b - a) / math.pi) ** 2 == pytest.approx(1.0, abs=1e-6)


def test_wirtinger_second_mode():
    x = np.linspace(0, 1, 10_001)
    f = np.sin(2 * math.pi * x)
    f[-1] = 0.0
    assert wirtinger_ratio(f, 0, 1) == pytest.approx(1 / (4 * math.pi**2), abs=1e-6)


def test_wirtinger_parabola():
    x = np.linspace(0, 1, 10_001)
    r = wirtinger_ratio(x * (1 - x), 0, 1)
    assert r == pytest.approx(0.1, abs=1e-6)
    assert r <= 1 / math.pi**2


def test_wirtinger_random_sine_series():
    rng = np.random.default_rng(0)
    x = np.linspace(0, 1, 4001)
    k = np.arange(1, 7)
    for _ in range(100):
        c = rng.normal(size=6) / k
        f = np.sin(np.pi * np.outer(x, k)) @ c
        f[0] = f[-1] = 0.0
        exact = np.sum(c**2) / np.sum((c * k * np.pi) ** 2)
        r = wirtinger_ratio(f, 0, 1)
        assert r == pytest.approx(exact, rel=1e-5)
        assert r <= 1 / math.pi**2 + 1e-6


def test_wirtinger_preconditions():
    with pytest.raises(ValueError):
        wirtinger_ratio(np.zeros(10), 0, 1)
    with pytest.raises(ValueError):
        wirtinger_ratio(np.ones(2000), 0, 1)
