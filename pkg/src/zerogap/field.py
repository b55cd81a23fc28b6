"""Constants attached to a quadratic field of discriminant D.

The Kronecker character, its modulus, special values L(s, chi_D) at s = 1, 2,
the local coefficients of zeta_K(s)^r, the arithmetic factor A_r and the
main terms of the zero-counting function.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import zeta as hurwitz_zeta

__all__ = [
    "InvalidDiscriminantError",
    "FieldParams",
    "LocalFactorClass",
    "is_fundamental_discriminant",
    "field_params",
    "kronecker_chi",
    "character_table",
    "modulus_q",
    "classify_prime",
    "local_coefficient",
    "dirichlet_L",
    "dirichlet_L1",
    "primes_up_to",
    "arithmetic_factor",
    "density_stats",
]


class InvalidDiscriminantError(ValueError):
    pass


class LocalFactorClass(enum.Enum):
    SPLIT = "split"
    INERT = "inert"
    RAMIFIED = "ramified"


def _squarefree(n: int) -> bool:
    n = abs(n)
    p = 2
    while p * p <= n:
        if n % (p * p) == 0:
            return False
        p += 1
    return True


def is_fundamental_discriminant(D: int) -> bool:
    if D in (0, 1):
        return False
    if D % 4 == 1:
        return _squarefree(D)
    if D % 4 == 0:
        m = D // 4
        return m % 4 in (2, 3) and _squarefree(m)
    return False


def _validate(D: int) -> None:
    if D in (0, 1) or D % 4 not in (0, 1):
        raise InvalidDiscriminantError(f"{D} is not a quadratic discriminant")
    if not is_fundamental_discriminant(D):
        warnings.warn(f"D={D} is not a fundamental discriminant", stacklevel=3)


@dataclass(frozen=True)
class FieldParams:
    D: int
    q: int
    sign: str  # "real" or "imaginary"


def field_params(D: int) -> FieldParams:
    _validate(D)
    return FieldParams(D=D, q=modulus_q(D), sign="real" if D > 0 else "imaginary")


def modulus_q(D: int) -> int:
    """Modulus of chi_D: ``4|D|`` when ``D = 2 (mod 4)``, else ``|D|``.

    The first branch cannot occur for a fundamental discriminant; such D
    trigger a warning but are still accepted.
    """
    if D == 0:
        raise InvalidDiscriminantError("D must be non-zero")
    if not is_fundamental_discriminant(D):
        warnings.warn(f"D={D} is not a fundamental discriminant", stacklevel=2)
    return 4 * abs(D) if D % 4 == 2 else abs(D)


def _jacobi(a: int, n: int) -> int:
    # Jacobi symbol (a/n) for odd n > 0
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def _kronecker(D: int, n: int) -> int:
    if n == 0:
        return 1 if abs(D) == 1 else 0
    result = 1
    if n < 0:
        n = -n
        if D < 0:
            result = -result
    v = (n & -n).bit_length() - 1
    n >>= v
    if v:
        if D % 2 == 0:
            return 0
        if v % 2 and D % 8 in (3, 5):
            result = -result
    return result * _jacobi(D, n)


def kronecker_chi(D: int, n: int) -> int:
    """Kronecker symbol ``(D/n)`` for a quadratic discriminant D and n >= 1."""
    _validate(D)
    if n < 1:
        raise ValueError("n must be a positive integer")
    return _kronecker(D, n)


@lru_cache(maxsize=256)
def character_table(D: int) -> np.ndarray:
    """``chi_D(n)`` for ``n = 0, ..., q-1`` as an int8 array."""
    _validate(D)
    q = abs(D)
    table = np.array([_kronecker(D, n) for n in range(q)], dtype=np.int8)
    table.flags.writeable = False
    return table


def classify_prime(D: int, p: int) -> LocalFactorClass:
    c = kronecker_chi(D, p)
    if c == 1:
        return LocalFactorClass.SPLIT
    if c == -1:
        return LocalFactorClass.INERT
    return LocalFactorClass.RAMIFIED


def local_coefficient(cls: LocalFactorClass | str, r: int, m: int) -> int:
    """Coefficient ``a_r(p^m)`` of zeta_K(s)^r at a prime p of the given class."""
    cls = LocalFactorClass(cls)
    if r < 1 or m < 0:
        raise ValueError("need r >= 1 and m >= 0")
    if cls is LocalFactorClass.SPLIT:
        return math.comb(m + 2 * r - 1, 2 * r - 1)
    if cls is LocalFactorClass.INERT:
        return 0 if m % 2 else math.comb(m // 2 + r - 1, r - 1)
    return math.comb(m + r - 1, r - 1)


def dirichlet_L(D: int, s: int = 1, tolerance: float = 1e-12, max_order: int = 60) -> float:
    """``L(s, chi_D)`` for integer ``s >= 1``.

    Sums ``K`` full periods directly.  Since chi_D sums to zero over a period,
    the remaining tail expands as
    ``sum_{m>=1} binom(-s, m) mu_m q^(-s-m) zeta(s+m, K)`` with character
    moments ``mu_m = sum_a chi(a) a^m``; the series is cut once the bound on
    its next term, ``|binom(-s, m)| q^(1-s) zeta(s+m, K)``, drops below
    ``tolerance``.
    """
    if s < 1:
        raise ValueError("s must be >= 1")
    chi = character_table(D).astype(float)
    q = len(chi)
    a = np.arange(q, dtype=float)
    periods = max(256, int(4e6 // q))
    periods = min(periods, 4096)
    n = np.arange(1, periods * q, dtype=float)
    head = float(np.sum(np.tile(chi, periods)[1:] / n**s))
    scaled = a / q
    tail = 0.0
    for m in range(1, max_order + 1):
        binom = math.comb(s + m - 1, m) * (-1) ** m
        moment = float(np.sum(chi * scaled**m))  # mu_m / q^m
        tail += binom * moment * q ** (-s) * float(hurwitz_zeta(s + m, periods))
        bound = math.comb(s + m, m + 1) * q ** (1 - s) * float(hurwitz_zeta(s + m + 1, periods))
        if bound < tolerance:
            return head + tail
    raise ArithmeticError(f"L({s}, chi_{D}) did not reach tolerance {tolerance}")


def dirichlet_L1(D: int, tolerance: float = 1e-12) -> float:
    return dirichlet_L(D, 1, tolerance)


def primes_up_to(n: int) -> np.ndarray:
    """Primes ``<= n`` by the sieve of Eratosthenes."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.flatnonzero(sieve).astype(np.int64)


def _second_order_exponents(r: int) -> tuple[int, int]:
    # exponents (a, b) with split/inert local factors = (1-1/p^2)^a (1-chi/p^2)^b (1 + O(p^-3))
    return r * r * (2 * r * r - 2 * r + 1), 2 * r**3 * (r - 1)


def _local_sums(cls: LocalFactorClass, r: int, p: np.ndarray) -> np.ndarray:
    """``sum_m a_r(p^m)^2 / p^m`` for an array of primes of one class."""
    x = 1.0 / p.astype(float)
    total = np.ones_like(x)
    power = np.ones_like(x)
    for m in range(1, 10_000):
        power = power * x
        c = local_coefficient(cls, r, m)
        if c == 0:
            continue
        term = float(c) ** 2 * power
        total += term
        # coefficients grow polynomially, so the tail is dominated by a
        # geometric series once m is past the peak
        if m > 4 * r and np.all(term < 1e-18 * total):
            return total
    raise ArithmeticError("local m-sum did not converge")


def arithmetic_factor(D: int, r: int, prime_cut: int, accelerate: bool = True) -> float:
    """Arithmetic factor ``A_r = prod_p (1-1/p)^(2r^2) sum_m a_r(p^m)^2 / p^m``.

    The product converges only conditionally, so ``L(1, chi_D)^(2r^2)`` is
    factored out and each local factor multiplied by ``(1 - chi_D(p)/p)^(2r^2)``,
    leaving factors ``1 + O(p^-2)``.  With ``accelerate`` the remaining
    ``p^-2`` terms are factored out as well, through ``zeta(2)`` and
    ``L(2, chi_D)``, so the truncated product over ``p <= prime_cut`` has an
    ``O(1/prime_cut^2)`` tail.
    """
    if prime_cut < 0:
        raise ValueError("prime_cut must be >= 0")
    if r < 1:
        raise ValueError("r must be >= 1")
    _validate(D)
    k = 2 * r * r
    log_a = k * math.log(dirichlet_L(D, 1))
    ea, eb = _second_order_exponents(r) if accelerate else (0, 0)
    if accelerate:
        log_a -= ea * math.log(math.pi**2 / 6)
        if eb:
            log_a -= eb * math.log(dirichlet_L(D, 2))

    primes = primes_up_to(prime_cut)
    if primes.size:
        table = character_table(D)
        chi = table[primes % len(table)].astype(float)
        logs = np.zeros(primes.size)
        inv = 1.0 / primes.astype(float)
        for value, cls in ((1, LocalFactorClass.SPLIT), (-1, LocalFactorClass.INERT), (0, LocalFactorClass.RAMIFIED)):
            sel = chi == value
            if np.any(sel):
                logs[sel] = np.log(_local_sums(cls, r, primes[sel]))
        logs += k * np.log1p(-inv) + k * np.log1p(-chi * inv)
        if accelerate:
            logs -= ea * np.log1p(-inv * inv) + eb * np.log1p(-chi * inv * inv)
        # ascending prime order, compensated summation
        log_a += math.fsum(logs.tolist())
    return math.exp(log_a)


def density_stats(T: float, D: int) -> tuple[float, float, float]:
    """``(T L/pi - T/pi, pi/log(sqrt|D| T), L)`` with ``L = log(sqrt|D| T / 4 pi^2)``."""
    if T < 2:
        raise ValueError("T must be >= 2")
    if D == 0:
        raise InvalidDiscriminantError("D must be non-zero")
    scaled = math.sqrt(abs(D)) * T
    L = math.log(scaled / (4 * math.pi**2))
    count = T * L / math.pi - T / math.pi
    gap = math.pi / math.log(scaled)
    return count, gap, L
