"""Independent Monte Carlo and quadrature checks of the exact computations."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.integrate import simpson

from . import sampling
from .functional import (
    AmplifierConfig,
    assemble,
    base_integrand,
    c1_integrand,
    phi,
    shift_exponent_terms,
    shifted_integrand,
)
from .sampling import McEstimate

MIN_SAMPLES = 1000
TARGETS = ("c0", "c1", "shifted")


def mc_estimate(
    target: str,
    config: AmplifierConfig,
    b: Sequence[float],
    n: int,
    seed: int,
    nu: float | None = None,
    shifts: Sequence[float] | None = None,
    threads: int = 1,
) -> McEstimate:
    """Monte Carlo estimate of c0, c1(nu) or the shifted c(A, B)."""
    if n < MIN_SAMPLES:
        raise ValueError(f"need at least {MIN_SAMPLES} samples")
    b = tuple(float(v) for v in b)
    if not any(b):
        raise ValueError("coefficient vector must be non-zero")
    if target == "c0":
        fn = lambda p: base_integrand(p, config, b)  # noqa: E731
    elif target == "c1":
        if nu is None:
            raise ValueError("target c1 needs nu")
        fn = lambda p: c1_integrand(p, config, b, nu)  # noqa: E731
    elif target == "shifted":
        if shifts is None or len(shifts) != 6:
            raise ValueError("target shifted needs six shifts")
        fn = lambda p: shifted_integrand(p, config, b, shifts)  # noqa: E731
    else:
        raise ValueError(f"unknown target {target!r}; expected one of {TARGETS}")
    return sampling.estimate(fn, n, seed, threads)


def mc_monomial(exponents: Sequence[int], n: int, seed: int, threads: int = 1) -> McEstimate:
    e = np.asarray(exponents)
    return sampling.estimate(lambda p: np.prod(p**e, axis=1), n, seed, threads)


def _fd_stencil(h: float):
    """Shift vectors and weights for (nu + sum dA)(nu + sum dB) at the origin.

    Returned as three groups so the nu-dependent weights can be applied later:
    the centre, first derivatives (6 directions), mixed (A_i, B_j) pairs.
    """
    eye = np.eye(6)
    centre = [(np.zeros(6), 1.0)]
    first = []
    for k in range(6):
        first.append((h * eye[k], 1 / (2 * h)))
        first.append((-h * eye[k], -1 / (2 * h)))
    mixed = []
    for i, j in itertools.product(range(3), range(3, 6)):
        for si, sj in itertools.product((1, -1), repeat=2):
            mixed.append((h * (si * eye[i] + sj * eye[j]), si * sj / (4 * h * h)))
    return centre, first, mixed


@dataclass(frozen=True)
class OperatorCheck:
    residual: float
    fd_value: float
    fd_stderr: float
    exact: float
    certified: bool


def operator_identity_check(
    config: AmplifierConfig,
    b: Sequence[float],
    nu: float,
    fd_step: float = 1e-2,
    n: int = 10_000_000,
    seed: int = 0,
    threads: int = 1,
    tolerance: float = 1e-2,
) -> OperatorCheck:
    """Compare ``(nu + sum_i d/dA_i)(nu + sum_j d/dB_j) c(A, B)`` at the origin,
    by central differences on common random numbers, with exact ``c1(nu)``.

    ``certified`` is False when three standard errors exceed ``tolerance``
    relative to ``c1``; the residual is still reported.
    """
    if not 1e-3 <= fd_step <= 1e-1:
        raise ValueError("fd_step must lie in [1e-3, 1e-1]")
    b = tuple(float(v) for v in b)
    th = float(config.theta)
    centre, first, mixed = _fd_stencil(fd_step)
    shifts = np.array([s for s, _ in centre + first + mixed])
    weights = np.array(
        [nu * nu * w for _, w in centre] + [nu * w for _, w in first] + [w for _, w in mixed]
    )

    steps = np.rint(shifts / fd_step).astype(int)  # entries in {-1, 0, 1}

    def integrand(pts):
        base = base_integrand(pts, config, b)
        lin, w1, w2 = shift_exponent_terms(pts, th)
        # every stencil point moves at most two shifts by +-h, so the exponential
        # factorises over directions and phi only sees multiples -2h..2h
        up = np.exp(-th * fd_step * lin)
        factor = {1: up, -1: 1 / up}
        phi1 = {m: phi(m * fd_step * w1) for m in range(-2, 3)}
        phi2 = {m: phi(m * fd_step * w2) for m in range(-2, 3)}
        total = np.zeros(len(pts))
        for st, wt in zip(steps, weights):
            term = wt * phi1[st[0] + st[3]] * phi2[st[1] + st[4]]
            for k in np.flatnonzero(st):
                term = term * factor[st[k]][:, k]
            total += term
        return base * total

    est = sampling.estimate(integrand, n, seed, threads)
    exact = assemble(AmplifierConfig(config.theta, config.r, len(b) - 1)).c1(b, nu)
    residual = abs(est.mean - exact) / abs(exact)
    return OperatorCheck(
        residual=residual,
        fd_value=est.mean,
        fd_stderr=est.stderr,
        exact=exact,
        certified=3 * est.stderr <= tolerance * abs(exact),
    )


def wirtinger_ratio(f_samples: Sequence[float], a: float, b: float) -> float:
    """``int |f|^2 / int |f'|^2`` for samples of f on a uniform grid over [a, b].

    Simpson's rule for both integrals, second-order central differences for f'.
    Wirtinger's inequality bounds the result by ``((b - a) / pi)^2``.
    """
    f = np.asarray(f_samples, dtype=float)
    if f.size < 1000:
        raise ValueError("need at least 1000 grid points")
    if not b > a:
        raise ValueError("need a < b")
    scale = max(np.max(np.abs(f)), 1e-300)
    if abs(f[0]) > 1e-9 * scale or abs(f[-1]) > 1e-9 * scale:
        raise ValueError("f must vanish at both endpoints")
    dx = (b - a) / (f.size - 1)
    df = np.gradient(f, dx, edge_order=2)
    return float(simpson(f * f, dx=dx) / simpson(df * df, dx=dx))
