"""Maximisation of kappa(nu, b) = sqrt(c0(b) / c1(nu, b)).

For fixed nu this is a Rayleigh quotient of the pencil (C0, C1(nu)), solved
globally by Cholesky reduction and a cyclic Jacobi eigensolver.  The outer
search over nu is a coarse grid followed by golden-section refinement.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.linalg import solve_triangular

from .functional import (
    AmplifierConfig,
    BoundResult,
    GapFunctional,
    NumericalContractError,
    assemble,
    evaluate_h,
)

log = logging.getLogger(__name__)

MAX_ORDER = 64
RESIDUAL_TOL = 1e-10
GRID_STEP = 0.05
INV_PHI = (math.sqrt(5) - 1) / 2


class NotPositiveDefiniteError(NumericalContractError):
    pass


class ConvergenceError(NumericalContractError):
    pass


def sym_matrix(a) -> np.ndarray:
    """Float image of a symmetric matrix; rejects asymmetric input."""
    m = np.array([[float(v) for v in row] for row in a], dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("matrix must be square")
    if m.shape[0] > MAX_ORDER:
        raise ValueError(f"order {m.shape[0]} exceeds {MAX_ORDER}")
    scale = np.max(np.abs(m)) if m.size else 0.0
    if not np.allclose(m, m.T, rtol=0, atol=1e-13 * max(scale, 1e-300)):
        raise ValueError("matrix is not symmetric")
    return (m + m.T) / 2


def jacobi_eigh(a: np.ndarray, tol: float = 1e-15, max_sweeps: int = 100):
    """Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.

    Returns ``(w, V)`` with ascending eigenvalues and orthonormal columns.
    """
    a = np.array(a, dtype=float)
    n = a.shape[0]
    v = np.eye(n)
    if n == 1:
        return a.diagonal().copy(), v
    norm = np.linalg.norm(a)
    for _ in range(max_sweeps):
        off = math.sqrt(max(np.sum(a * a) - np.sum(np.diag(a) ** 2), 0.0))
        if off <= tol * norm:
            break
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                # below rounding level of the diagonal: drop it
                if abs(apq) <= 1e-18 * (abs(a[p, p]) + abs(a[q, q])) or abs(apq) < 1e-300:
                    a[p, q] = a[q, p] = 0.0
                    continue
                rotated = True
                tau = (a[q, q] - a[p, p]) / (2 * apq)
                if abs(tau) > 1e150:
                    t = 1 / (2 * tau)
                else:
                    t = math.copysign(1.0, tau) / (abs(tau) + math.sqrt(1 + tau * tau))
                c = 1 / math.sqrt(1 + t * t)
                s = t * c
                # A <- J^T A J on rows/cols p, q
                ap = a[:, p].copy()
                aq = a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                ap = a[p, :].copy()
                aq = a[q, :].copy()
                a[p, :] = c * ap - s * aq
                a[q, :] = s * ap + c * aq
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
        if not rotated:
            break
    else:
        raise ConvergenceError("Jacobi iteration did not converge")
    w = np.diag(a).copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def eigen_residual(C0: np.ndarray, C1: np.ndarray, lam: float, b: np.ndarray) -> float:
    """``||C0 b - lam C1 b|| / (||C0||_F ||b||)``."""
    return float(
        np.linalg.norm(C0 @ b - lam * (C1 @ b)) / (np.linalg.norm(C0) * np.linalg.norm(b))
    )


def rayleigh_max(C0, C1) -> tuple[float, np.ndarray]:
    """Largest ``lam`` with ``C0 b = lam C1 b`` and its unit eigenvector."""
    A = sym_matrix(C0)
    M = sym_matrix(C1)
    try:
        L = np.linalg.cholesky(M)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError("C1 is not positive definite") from exc
    # reduced matrix L^-1 A L^-T
    tmp = solve_triangular(L, A, lower=True)
    reduced = solve_triangular(L, tmp.T, lower=True)
    reduced = (reduced + reduced.T) / 2
    w, V = jacobi_eigh(reduced)
    lam = float(w[-1])
    b = solve_triangular(L.T, V[:, -1], lower=False)
    # one step of inverse iteration polishes the back-transformed vector
    shifted = A - lam * M
    try:
        polished = np.linalg.solve(shifted - 1e-14 * np.linalg.norm(A) * np.eye(len(A)), M @ b)
        if np.all(np.isfinite(polished)) and np.linalg.norm(polished) > 0:
            polished /= np.linalg.norm(polished)
            if polished @ b < 0:
                polished = -polished
            q = float(polished @ A @ polished / (polished @ M @ polished))
            if eigen_residual(A, M, q, polished) < eigen_residual(A, M, lam, b / np.linalg.norm(b)):
                lam, b = q, polished
    except np.linalg.LinAlgError:
        pass
    b = b / np.linalg.norm(b)
    res = eigen_residual(A, M, lam, b)
    if res > RESIDUAL_TOL:
        raise NumericalContractError(f"generalized eigen-residual {res:.3g} exceeds {RESIDUAL_TOL}")
    return lam, b


def normalize_coefficients(b: np.ndarray) -> np.ndarray:
    """Scale so the constant term is 1 (largest entry if b0 is negligible)."""
    b = np.asarray(b, dtype=float)
    if abs(b[0]) >= 1e-8 * np.max(np.abs(b)):
        return b / b[0]
    return b / b[np.argmax(np.abs(b))]


def kappa_of_nu(functional: GapFunctional, nu: float) -> tuple[float, np.ndarray]:
    lam, b = rayleigh_max(functional.as_float("C0"), functional.c1_matrix(nu))
    return math.sqrt(max(lam, 0.0)), normalize_coefficients(b)


def golden_section_max(f: Callable[[float], float], a: float, b: float, tol: float):
    """Maximiser of a unimodal ``f`` on ``[a, b]`` to within ``tol``."""
    a, b = min(a, b), max(a, b)
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    return (c, fc) if fc >= fd else (d, fd)


def nu_grid(nu_range: tuple[float, float], step: float = GRID_STEP) -> np.ndarray:
    lo, hi = nu_range
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi < lo:
        raise ValueError("nu_range must be a finite interval")
    count = int(math.floor((hi - lo) / step + 1e-9))
    grid = lo + step * np.arange(count + 1)
    if grid[-1] < hi - 1e-12:
        grid = np.append(grid, hi)
    return grid


def kappa_curve(functional: GapFunctional, nus: Iterable[float]) -> list[tuple[float, float]]:
    return [(float(nu), kappa_of_nu(functional, float(nu))[0]) for nu in nus]


def optimize(
    functional: GapFunctional,
    nu_range: tuple[float, float] = (0.0, 4.0),
    nu_tol: float = 1e-7,
    kappa_target: float | None = None,
) -> BoundResult:
    """Best ``(kappa, nu, b)`` over ``nu`` in ``nu_range`` and all ``b``."""
    if nu_tol <= 0:
        raise ValueError("nu_tol must be positive")
    grid = nu_grid(nu_range)
    curve = [kappa_of_nu(functional, nu)[0] for nu in grid]
    k = int(np.argmax(curve))
    lo = grid[max(k - 1, 0)]
    hi = grid[min(k + 1, len(grid) - 1)]
    nu_best, kappa_best = float(grid[k]), curve[k]
    if hi > lo:
        nu_star, kappa_star = golden_section_max(
            lambda nu: kappa_of_nu(functional, nu)[0], lo, hi, nu_tol
        )
        if kappa_star >= kappa_best:
            nu_best, kappa_best = nu_star, kappa_star
    _, b = kappa_of_nu(functional, nu_best)
    result = evaluate_h(functional, b, nu_best, kappa_target)
    log.debug("optimize %s: nu*=%.6f kappa=%.9f", functional.config, nu_best, result.kappa)
    return result


@dataclass(frozen=True)
class ScanRow:
    theta: Fraction | str
    r: int
    degree: int
    result: BoundResult | None
    error: str | None = None


def scan(
    theta_list: Sequence,
    r_list: Sequence[int],
    degree_list: Sequence[int],
    nu_range: tuple[float, float] = (0.0, 4.0),
    nu_tol: float = 1e-7,
    progress: Callable[[str], None] | None = None,
) -> list[ScanRow]:
    """One optimize call per (theta, r, degree), in input order.

    Failing rows keep their error message; the scan continues.
    """
    if not (theta_list and r_list and degree_list):
        raise ValueError("scan lists must be non-empty")
    rows = []
    for theta in theta_list:
        for r in r_list:
            for d in degree_list:
                try:
                    cfg = AmplifierConfig(theta, r, d)
                    row = ScanRow(cfg.theta, r, d, optimize(assemble(cfg), nu_range, nu_tol))
                except (ArithmeticError, ValueError) as exc:
                    row = ScanRow(str(theta), r, d, None, str(exc))
                rows.append(row)
                if progress:
                    status = f"kappa={row.result.kappa:.9f}" if row.result else f"error: {row.error}"
                    progress(f"theta={row.theta} r={r} d={d} {status}")
    return rows
