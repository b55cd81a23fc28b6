"""Exact rational polynomials in five variables and their integrals over the region

    R = {0 <= x, x1, x2, x3, x4 <= 1,  x + x1 + x2 <= 1,  x + x3 + x4 <= 1}.

Variables are ordered ``(x, x1, x2, x3, x4)``.  Coefficients are
:class:`fractions.Fraction`; nothing in this module touches floating point.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import factorial, lcm
from numbers import Rational
from typing import Iterable, Iterator, Mapping, Sequence

NVARS = 5
VARIABLE_NAMES = ("x", "x1", "x2", "x3", "x4")
DEFAULT_MAX_DEGREE = 64

Monomial = tuple[int, int, int, int, int]


class DegreeGuardError(ValueError):
    """A polynomial exceeded the configured maximum total degree."""


def _grlex_key(m: Monomial) -> tuple[int, Monomial]:
    return (sum(m), m)


def _check_monomial(m: Sequence[int]) -> Monomial:
    if len(m) != NVARS:
        raise ValueError(f"monomial needs {NVARS} exponents, got {len(m)}")
    if any(e < 0 for e in m):
        raise ValueError(f"negative exponent in {tuple(m)}")
    return tuple(int(e) for e in m)  # type: ignore[return-value]


class SparsePoly:
    """Immutable sparse polynomial with exact rational coefficients.

    Zero coefficients are never stored, so two polynomials are equal exactly
    when their term maps are equal.
    """

    __slots__ = ("_terms", "max_degree", "_hash")

    def __init__(
        self,
        terms: Mapping[Sequence[int], Rational | int] | None = None,
        max_degree: int = DEFAULT_MAX_DEGREE,
    ):
        clean: dict[Monomial, Fraction] = {}
        for m, c in (terms or {}).items():
            m = _check_monomial(m)
            c = Fraction(c)
            if c:
                clean[m] = clean.get(m, Fraction(0)) + c
                if not clean[m]:
                    del clean[m]
        self._terms = clean
        self.max_degree = max_degree
        self._hash = None
        if clean and self.degree() > max_degree:
            raise DegreeGuardError(
                f"total degree {self.degree()} exceeds guard {max_degree}"
            )

    @classmethod
    def _raw(cls, terms: dict[Monomial, Fraction], max_degree: int) -> "SparsePoly":
        # trusted constructor: terms already clean
        p = object.__new__(cls)
        p._terms = terms
        p.max_degree = max_degree
        p._hash = None
        return p

    # constructors -------------------------------------------------------

    @classmethod
    def constant(cls, c: Rational | int, max_degree: int = DEFAULT_MAX_DEGREE) -> "SparsePoly":
        return cls({(0,) * NVARS: c}, max_degree)

    @classmethod
    def variable(cls, index: int, max_degree: int = DEFAULT_MAX_DEGREE) -> "SparsePoly":
        m = [0] * NVARS
        m[index] = 1
        return cls({tuple(m): 1}, max_degree)

    @classmethod
    def linear(
        cls,
        const: Rational | int,
        coeffs: Sequence[Rational | int],
        max_degree: int = DEFAULT_MAX_DEGREE,
    ) -> "SparsePoly":
        """``const + sum(coeffs[k] * var_k)``."""
        terms: dict[tuple, Rational | int] = {(0,) * NVARS: const}
        for k, a in enumerate(coeffs):
            m = [0] * NVARS
            m[k] = 1
            terms[tuple(m)] = a
        return cls(terms, max_degree)

    # inspection ---------------------------------------------------------

    def terms(self) -> list[tuple[Monomial, Fraction]]:
        """Terms in graded-lexicographic order."""
        return sorted(self._terms.items(), key=lambda kv: _grlex_key(kv[0]))

    def as_dict(self) -> dict[Monomial, Fraction]:
        return dict(self._terms)

    def __iter__(self) -> Iterator[tuple[Monomial, Fraction]]:
        return iter(self.terms())

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def degree(self) -> int:
        return max((sum(m) for m in self._terms), default=0)

    def coefficient(self, m: Sequence[int]) -> Fraction:
        return self._terms.get(tuple(m), Fraction(0))

    def evaluate(self, point: Sequence[Rational | float]):
        """Evaluate at a point; exact if the point is rational."""
        total = 0
        for m, c in self._terms.items():
            term = c
            for v, e in zip(point, m):
                if e:
                    term = term * v**e
            total = total + term
        return total

    # ring operations ----------------------------------------------------

    def _coerce(self, other) -> "SparsePoly":
        if isinstance(other, SparsePoly):
            return other
        if isinstance(other, (int, Rational)):
            return SparsePoly.constant(other, self.max_degree)
        return NotImplemented

    def __add__(self, other) -> "SparsePoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self._terms)
        for m, c in other._terms.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return SparsePoly._raw(out, min(self.max_degree, other.max_degree))

    __radd__ = __add__

    def __neg__(self) -> "SparsePoly":
        return SparsePoly._raw({m: -c for m, c in self._terms.items()}, self.max_degree)

    def __sub__(self, other) -> "SparsePoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "SparsePoly":
        return (-self) + other

    def __mul__(self, other) -> "SparsePoly":
        if isinstance(other, (int, Rational)) and not isinstance(other, SparsePoly):
            c = Fraction(other)
            if not c:
                return SparsePoly._raw({}, self.max_degree)
            return SparsePoly._raw({m: c * v for m, v in self._terms.items()}, self.max_degree)
        if not isinstance(other, SparsePoly):
            return NotImplemented
        guard = min(self.max_degree, other.max_degree)
        if self._terms and other._terms and self.degree() + other.degree() > guard:
            raise DegreeGuardError(
                f"product degree {self.degree() + other.degree()} exceeds guard {guard}"
            )
        out: dict[Monomial, Fraction] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = (m1[0] + m2[0], m1[1] + m2[1], m1[2] + m2[2], m1[3] + m2[3], m1[4] + m2[4])
                out[m] = out.get(m, 0) + c1 * c2
        return SparsePoly._raw({m: c for m, c in out.items() if c}, guard)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "SparsePoly":
        if isinstance(other, SparsePoly) or not isinstance(other, (int, Rational)):
            return NotImplemented
        return self * (1 / Fraction(other))

    def __pow__(self, n: int) -> "SparsePoly":
        if n < 0:
            raise ValueError("negative power")
        result = SparsePoly.constant(1, self.max_degree)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def permute(self, perm: Sequence[int]) -> "SparsePoly":
        """Rename variable ``k`` to ``perm[k]``."""
        out = {}
        for m, c in self._terms.items():
            new = [0] * NVARS
            for k, e in enumerate(m):
                new[perm[k]] = e
            out[tuple(new)] = c
        return SparsePoly._raw(out, self.max_degree)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Rational)) and not isinstance(other, SparsePoly):
            other = SparsePoly.constant(other)
        if not isinstance(other, SparsePoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __repr__(self) -> str:
        if not self._terms:
            return "SparsePoly(0)"
        parts = []
        for m, c in self.terms():
            mono = "*".join(
                name if e == 1 else f"{name}^{e}"
                for name, e in zip(VARIABLE_NAMES, m)
                if e
            )
            parts.append(f"{c}*{mono}" if mono else str(c))
        return "SparsePoly(" + " + ".join(parts) + ")"


X, X1, X2, X3, X4 = (SparsePoly.variable(k) for k in range(NVARS))

# (x1, x2) <-> (x3, x4): maps the first constraint triangle onto the second.
SWAP_TRIANGLES = (0, 3, 4, 1, 2)


@lru_cache(maxsize=None)
def monomial_region_integral(exponents: Sequence[int]) -> Fraction:
    """Exact integral of ``x^a x1^b x2^c x3^d x4^e`` over the region R.

    Integrating (x1, x2) and (x3, x4) over triangles of side ``1 - x`` gives
    Dirichlet factors, after which the x-integral is a Beta function.
    """
    a, b, c, d, e = _check_monomial(tuple(exponents))
    left = Fraction(factorial(b) * factorial(c), factorial(b + c + 2))
    right = Fraction(factorial(d) * factorial(e), factorial(d + e + 2))
    k = b + c + d + e + 4
    outer = Fraction(factorial(a) * factorial(k), factorial(a + k + 1))
    return left * right * outer


@lru_cache(maxsize=None)
def _scaled_integral(m: Monomial, scale_degree: int) -> int:
    # monomial_region_integral(m) * _integral_scale(scale_degree), an integer
    val = monomial_region_integral(m) * _integral_scale(scale_degree)
    assert val.denominator == 1
    return val.numerator


@lru_cache(maxsize=None)
def _integral_scale(n: int) -> int:
    # (n+2)!^2 (n+5)! clears every denominator for total degree <= n
    return factorial(n + 2) ** 2 * factorial(n + 5)


def _integrate_terms(terms: Iterable[tuple[Monomial, Fraction]], deg: int) -> Fraction:
    terms = list(terms)
    if not terms:
        return Fraction(0)
    den = lcm(*(c.denominator for _, c in terms))
    total = 0
    for m, c in terms:
        total += (c.numerator * (den // c.denominator)) * _scaled_integral(m, deg)
    return Fraction(total, den * _integral_scale(deg))


def integrate_polynomial(p: SparsePoly) -> Fraction:
    """Exact integral of ``p`` over R (linear extension of the monomial formula)."""
    return _integrate_terms(p._terms.items(), p.degree())


def integrate_product(p: SparsePoly, q: SparsePoly) -> Fraction:
    """Exact integral of ``p * q`` over R without materialising the product."""
    if not p or not q:
        return Fraction(0)
    deg = p.degree() + q.degree()
    if deg > min(p.max_degree, q.max_degree):
        raise DegreeGuardError(f"product degree {deg} exceeds guard")
    pden = lcm(*(c.denominator for c in p._terms.values()))
    qden = lcm(*(c.denominator for c in q._terms.values()))
    pint = [(m, c.numerator * (pden // c.denominator)) for m, c in p._terms.items()]
    qint = [(m, c.numerator * (qden // c.denominator)) for m, c in q._terms.items()]
    total = 0
    for m1, c1 in pint:
        acc = 0
        for m2, c2 in qint:
            m = (m1[0] + m2[0], m1[1] + m2[1], m1[2] + m2[2], m1[3] + m2[3], m1[4] + m2[4])
            acc += c2 * _scaled_integral(m, deg)
        total += c1 * acc
    return Fraction(total, pden * qden * _integral_scale(deg))


def expand_product(
    factors: Iterable[SparsePoly], max_degree: int = DEFAULT_MAX_DEGREE
) -> SparsePoly:
    """Exact product of ``factors``; the empty product is 1.

    Raises :class:`DegreeGuardError` when the running degree passes ``max_degree``.
    """
    result = SparsePoly.constant(1, max_degree)
    for f in factors:
        if not isinstance(f, SparsePoly):
            f = SparsePoly.constant(f, max_degree)
        result = result * SparsePoly._raw(f._terms, max_degree)
    return result
