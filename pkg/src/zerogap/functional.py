"""Mean-square functionals c0 and c1(nu) as exact quadratic forms in the
amplifier coefficients, and the decision quantity h = c0 / (kappa^2 c1).

Both functionals are integrals over the region R (see :mod:`zerogap.exact`)
of the weight ``x^(2r^2-1) (x1 x2 x3 x4)^(r-1) P(1-x-x1-x2) P(1-x-x3-x4)``
times ``B C`` with ``B = 1 - theta(x1+x3)``, ``C = 1 - theta(x2+x4)``; c1
carries the extra factor ``(nu - theta S - t1 B - t2 C)^2`` averaged over
``t1, t2 in [0, 1]``, where ``S = x+x1+x2+x3+x4``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import sampling
from .exact import (
    DEFAULT_MAX_DEGREE,
    X,
    X1,
    X2,
    X3,
    X4,
    SparsePoly,
    expand_product,
    integrate_product,
)
from .field import density_stats

MAX_THETA = Fraction(1, 4)

PUBLISHED_THETA = Fraction(1, 4)
PUBLISHED_R = 1
PUBLISHED_NU = 1.2773
PUBLISHED_KAPPA = 2.866
PUBLISHED_COEFFICIENTS = (1.0, -10.8998, 28.9444, -22.1343, 0.6148)

Matrix = tuple[tuple[Fraction, ...], ...]


class NumericalContractError(ArithmeticError):
    """A result violated a mathematical guarantee (e.g. c1 <= 0)."""


def parse_rational(text: str | Fraction | int) -> Fraction:
    """Parse ``"1/4"``, ``"0.25"`` or ``"3"`` exactly (no binary rounding)."""
    if isinstance(text, (Fraction, int)):
        return Fraction(text)
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational number: {text!r}") from exc


@dataclass(frozen=True)
class AmplifierConfig:
    theta: Fraction
    r: int
    degree: int
    coefficients: tuple[float, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "theta", parse_rational(self.theta))
        if not 0 <= self.theta <= MAX_THETA:
            raise ValueError("theta must be in [0, 1/4]")
        if self.r < 1:
            raise ValueError("r must be a positive integer")
        if self.degree < 0:
            raise ValueError("degree must be non-negative")
        if self.coefficients is not None:
            coeffs = tuple(float(c) for c in self.coefficients)
            if len(coeffs) != self.degree + 1:
                raise ValueError(
                    f"expected {self.degree + 1} coefficients, got {len(coeffs)}"
                )
            if not any(coeffs):
                raise ValueError("coefficient vector must be non-zero")
            object.__setattr__(self, "coefficients", coeffs)

    @classmethod
    def published(cls) -> "AmplifierConfig":
        return cls(PUBLISHED_THETA, PUBLISHED_R, len(PUBLISHED_COEFFICIENTS) - 1, PUBLISHED_COEFFICIENTS)


@dataclass(frozen=True)
class GapFunctional:
    C0: Matrix
    K2: Matrix
    K1: Matrix
    K0: Matrix
    config: AmplifierConfig

    @property
    def size(self) -> int:
        return len(self.C0)

    def as_float(self, name: str) -> np.ndarray:
        return np.array([[float(v) for v in row] for row in getattr(self, name)])

    def c1_matrix(self, nu: float) -> np.ndarray:
        return nu * nu * self.as_float("K2") + nu * self.as_float("K1") + self.as_float("K0")

    def c0(self, b: Sequence[float]) -> float:
        return quadratic_form(self.C0, b)

    def c1(self, b: Sequence[float], nu: float) -> float:
        return (
            nu * nu * quadratic_form(self.K2, b)
            + nu * quadratic_form(self.K1, b)
            + quadratic_form(self.K0, b)
        )


@dataclass(frozen=True)
class BoundResult:
    kappa: float
    nu: float
    coefficients: tuple[float, ...]
    h: float | None
    c0_value: float
    c1_value: float
    kappa_input: float | None = None
    theta: Fraction = field(default=PUBLISHED_THETA)
    r: int = 1

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1


def quadratic_form(M: Matrix | np.ndarray, b: Sequence[float]) -> float:
    """``b^T M b`` in double precision with compensated summation."""
    b = [float(v) for v in b]
    return math.fsum(
        float(M[i][j]) * b[i] * b[j] for i in range(len(b)) for j in range(len(b))
    )


# --- exact assembly ---------------------------------------------------------


def core_weight(r: int, max_degree: int = DEFAULT_MAX_DEGREE) -> SparsePoly:
    """``x^(2r^2-1) (x1 x2 x3 x4)^(r-1)``."""
    m = (2 * r * r - 1, r - 1, r - 1, r - 1, r - 1)
    return SparsePoly({m: 1}, max_degree)


def _pieces(theta: Fraction):
    B = 1 - theta * (X1 + X3)
    C = 1 - theta * (X2 + X4)
    S = X + X1 + X2 + X3 + X4
    return B, C, S


def t_average_square(A, B, C):
    """``int_0^1 int_0^1 (A - B t1 - C t2)^2 dt1 dt2`` in closed form."""
    return A * A - A * (B + C) + B * B / 3 + C * C / 3 + B * C / 2


def c1_weights(theta: Fraction) -> tuple[SparsePoly, SparsePoly, SparsePoly]:
    """Coefficients of nu^2, nu^1, nu^0 in ``B C * t_average_square(nu - theta S, B, C)``."""
    B, C, S = _pieces(theta)
    BC = B * C
    tS = theta * S
    w2 = BC
    w1 = BC * (-2 * tS - B - C)
    w0 = BC * (tS * tS + tS * (B + C) + B * B / 3 + C * C / 3 + B * C / 2)
    return w2, w1, w0


def _p_powers(d: int, max_degree: int) -> tuple[list[SparsePoly], list[SparsePoly]]:
    left = SparsePoly.linear(1, (-1, -1, -1, 0, 0), max_degree)
    right = SparsePoly.linear(1, (-1, 0, 0, -1, -1), max_degree)
    return [left**i for i in range(d + 1)], [right**j for j in range(d + 1)]


def _gram(weight: SparsePoly, r: int, d: int, max_degree: int) -> Matrix:
    F, G = _p_powers(d, max_degree)
    base = expand_product([weight, core_weight(r, max_degree)], max_degree)
    H = [base * f for f in F]
    return tuple(tuple(integrate_product(H[i], G[j]) for j in range(d + 1)) for i in range(d + 1))


@lru_cache(maxsize=64)
def _assemble_c0(theta: Fraction, r: int, d: int, max_degree: int) -> Matrix:
    B, C, _ = _pieces(theta)
    return _gram(B * C, r, d, max_degree)


@lru_cache(maxsize=64)
def _assemble_c1(theta: Fraction, r: int, d: int, max_degree: int) -> tuple[Matrix, Matrix, Matrix]:
    w2, w1, w0 = c1_weights(theta)
    return tuple(_gram(w, r, d, max_degree) for w in (w2, w1, w0))  # type: ignore[return-value]


def assemble_c0(config: AmplifierConfig, max_degree: int = DEFAULT_MAX_DEGREE) -> Matrix:
    """Exact matrix ``C0`` with ``c0(b) = b^T C0 b``."""
    return _assemble_c0(config.theta, config.r, config.degree, max_degree)


def assemble_c1(
    config: AmplifierConfig, max_degree: int = DEFAULT_MAX_DEGREE
) -> tuple[Matrix, Matrix, Matrix]:
    """Exact ``(K2, K1, K0)`` with ``c1(nu, b) = b^T (nu^2 K2 + nu K1 + K0) b``."""
    return _assemble_c1(config.theta, config.r, config.degree, max_degree)


def assemble(config: AmplifierConfig, max_degree: int = DEFAULT_MAX_DEGREE) -> GapFunctional:
    K2, K1, K0 = assemble_c1(config, max_degree)
    return GapFunctional(assemble_c0(config, max_degree), K2, K1, K0, config)


def evaluate_h(
    functional: GapFunctional, b: Sequence[float], nu: float, kappa: float | None = None
) -> BoundResult:
    b = tuple(float(v) for v in b)
    nu = float(nu)
    if len(b) != functional.size:
        raise ValueError(f"expected {functional.size} coefficients, got {len(b)}")
    if not any(b):
        raise ValueError("coefficient vector must be non-zero")
    c0 = functional.c0(b)
    c1 = functional.c1(b, nu)
    if not c1 > 0:
        raise NumericalContractError(f"c1 = {c1!r} is not positive")
    h = None if kappa is None else c0 / (kappa * kappa * c1)
    cfg = functional.config
    return BoundResult(
        kappa=math.sqrt(c0 / c1),
        nu=nu,
        coefficients=b,
        h=h,
        c0_value=c0,
        c1_value=c1,
        kappa_input=kappa,
        theta=cfg.theta,
        r=cfg.r,
    )


# --- floating-point integrands (Monte Carlo side) ---------------------------


def poly_eval(b: Sequence[float], z: np.ndarray) -> np.ndarray:
    return np.polynomial.polynomial.polyval(z, np.asarray(b, dtype=float))


def phi(w: np.ndarray) -> np.ndarray:
    """``(1 - e^-w) / w`` with ``phi(0) = 1``."""
    w = np.asarray(w, dtype=float)
    small = np.abs(w) < 1e-6
    safe = np.where(small, 1.0, w)
    return np.where(small, 1 - w / 2 + w * w / 6, -np.expm1(-safe) / safe)


def base_integrand(pts: np.ndarray, config: AmplifierConfig, b: Sequence[float]) -> np.ndarray:
    """``B C x^(2r^2-1) (x1x2x3x4)^(r-1) P(.) P(.)`` at points of shape (m, 5)."""
    x, x1, x2, x3, x4 = pts.T
    th = float(config.theta)
    r = config.r
    weight = x ** (2 * r * r - 1) * (x1 * x2 * x3 * x4) ** (r - 1)
    B = 1 - th * (x1 + x3)
    C = 1 - th * (x2 + x4)
    return B * C * weight * poly_eval(b, 1 - x - x1 - x2) * poly_eval(b, 1 - x - x3 - x4)


def c1_integrand(pts: np.ndarray, config: AmplifierConfig, b: Sequence[float], nu: float) -> np.ndarray:
    x, x1, x2, x3, x4 = pts.T
    th = float(config.theta)
    B = 1 - th * (x1 + x3)
    C = 1 - th * (x2 + x4)
    A = nu - th * (x + x1 + x2 + x3 + x4)
    return base_integrand(pts, config, b) * t_average_square(A, B, C)


def shift_exponent_terms(pts: np.ndarray, theta: float):
    """Linear coefficients of the shifted integrand's exponent.

    Returns ``(lin, w1, w2)``: ``lin`` has shape (m, 6) so that
    ``-theta * lin @ (A1, A2, A3, B1, B2, B3)`` is the y-power exponent, and
    ``w1 = B``, ``w2 = C`` scale ``A1+B1`` and ``A2+B2`` inside phi.
    """
    x, x1, x2, x3, x4 = pts.T
    lin = np.stack(
        [x3, x4, x + x1 + x2, x1, x2, x + x3 + x4],
        axis=1,
    )
    return lin, 1 - theta * (x1 + x3), 1 - theta * (x2 + x4)


def shifted_integrand(
    pts: np.ndarray,
    config: AmplifierConfig,
    b: Sequence[float],
    shifts: Sequence[float],
) -> np.ndarray:
    A1, A2, A3, B1, B2, B3 = (float(s) for s in shifts)
    th = float(config.theta)
    lin, w1, w2 = shift_exponent_terms(pts, th)
    expo = -th * (lin @ np.array([A1, A2, A3, B1, B2, B3]))
    return (
        base_integrand(pts, config, b)
        * np.exp(expo)
        * phi((A1 + B1) * w1)
        * phi((A2 + B2) * w2)
    )


def shifted_c(
    config: AmplifierConfig,
    b: Sequence[float],
    shifts: Sequence[float],
    n: int,
    seed: int,
    threads: int = 1,
) -> sampling.McEstimate:
    """Monte Carlo value of the shifted functional c(A, B).

    Shifts are dimensionless: ``A_i = alpha_i * L``, ``B_i = beta_i * L``.
    """
    if len(shifts) != 6:
        raise ValueError("need six shifts (A1, A2, A3, B1, B2, B3)")
    return sampling.estimate(lambda p: shifted_integrand(p, config, b, shifts), n, seed, threads)


# --- closed forms -----------------------------------------------------------


def hall_conjecture_ratio(k: int) -> Fraction:
    """``(4k^2 - 1) / (4k^4)``: the ratio obtained from ``zeta^k`` moments."""
    if k < 1:
        raise ValueError("k must be a positive integer")
    return Fraction(4 * k * k - 1, 4 * k**4)


def mean_square_main_term(
    T: float, D: int, config: AmplifierConfig, b: Sequence[float], A_value: float
) -> float:
    """Leading term of ``int_T^2T |f(t)|^2 dt`` (sharp window)."""
    if not any(b):
        raise ValueError("coefficient vector must be non-zero")
    _, _, L = density_stats(T, D)
    r = config.r
    c0 = quadratic_form(assemble_c0(AmplifierConfig(config.theta, r, len(b) - 1)), b)
    log_y = float(config.theta) * L
    norm = math.factorial(2 * r * r - 1) * math.factorial(r - 1) ** 4
    return c0 * A_value * log_y ** (2 * r * r + 4 * r) * L**2 * T / norm
