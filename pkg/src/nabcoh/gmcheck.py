"""Laurent-polynomial 1-cocycles of the multiplicative group with coefficients in a Q-algebra.

A cochain is ``f(t) = sum a_n t^n`` with ``a_n`` in A.  For the character
``t -> t^d`` the cocycle condition reads::

    f(t (x) t) = f(t (x) 1) + (t^d (x) 1) f(1 (x) t)

and, expanded in the basis ``t^m (x) t^n``, compares
``sum a_n t^n (x) t^n`` with ``sum a_n t^n (x) 1 + sum a_n t^d (x) t^n``.
Coboundaries are exactly ``a (t^d - 1)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Mapping

from .exactla import AlgebraElement, CoefficientAlgebra, Elimination, InputError, builtin_algebra


@dataclass(frozen=True)
class LaurentPoly:
    """``sum_{n=-D}^{D} a_n t^n`` with coefficients in ``algebra``; zero coefficients are dropped."""

    algebra: CoefficientAlgebra
    bound: int
    coeffs: tuple  # sorted ((n, AlgebraElement), ...)

    @classmethod
    def build(cls, algebra: CoefficientAlgebra | str, bound: int,
              coeffs: Mapping[int, Any] | None = None) -> "LaurentPoly":
        """``coeffs`` maps exponents to algebra elements, coordinate sequences or rationals."""
        A = builtin_algebra(algebra) if isinstance(algebra, str) else algebra
        if bound < 0:
            raise InputError("degree bound must be >= 0")
        out = []
        for n, c in sorted((coeffs or {}).items()):
            if abs(n) > bound:
                raise InputError(f"exponent {n} exceeds the degree bound {bound}")
            el = _as_element(A, c)
            if not el.is_zero():
                out.append((n, el))
        return cls(A, bound, tuple(out))

    def coefficient(self, n: int) -> AlgebraElement:
        for m, c in self.coeffs:
            if m == n:
                return c
        return self.algebra.zero()

    def is_zero(self) -> bool:
        return not self.coeffs

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        return " + ".join(f"({', '.join(str(x) for x in c.coords)})*t^{n}" for n, c in self.coeffs)


def _as_element(A: CoefficientAlgebra, c: Any) -> AlgebraElement:
    if isinstance(c, AlgebraElement):
        if c.algebra != A:
            raise InputError("coefficient belongs to a different algebra")
        return c
    if isinstance(c, (list, tuple)):
        return A.element(c)
    return A.scalar(Fraction(c))


def coboundary(a: AlgebraElement | Any, d: int, bound: int | None = None,
               algebra: CoefficientAlgebra | str | None = None) -> LaurentPoly:
    """``a (t^d - 1)``."""
    if isinstance(a, AlgebraElement):
        A = a.algebra
    else:
        A = builtin_algebra(algebra or "rationals") if not isinstance(algebra, CoefficientAlgebra) else algebra
        a = _as_element(A, a)
    D = abs(d) if bound is None else bound
    if d == 0:
        return LaurentPoly.build(A, D, {})
    return LaurentPoly.build(A, D, {d: a, 0: -a})


def _sides(f: LaurentPoly, d: int) -> tuple[dict, dict, list]:
    """Coefficients of both sides keyed by (m, n), plus the order in which keys are checked.

    Keys of the left side (the diagonal, ascending) come first, then the
    remaining keys of the right side in ascending order.
    """
    zero = f.algebra.zero()
    lhs: dict = {}
    rhs: dict = {}
    for n, a in f.coeffs:
        lhs[(n, n)] = lhs.get((n, n), zero) + a
        rhs[(n, 0)] = rhs.get((n, 0), zero) + a
        rhs[(d, n)] = rhs.get((d, n), zero) + a
    order = sorted(lhs) + sorted(k for k in rhs if k not in lhs)
    return lhs, rhs, order


@dataclass(frozen=True)
class CocycleCheck:
    holds: bool
    mismatch: tuple | None  # (m, n) of the first differing coefficient

    def __bool__(self) -> bool:
        return self.holds


def is_cocycle(f: LaurentPoly, d: int) -> CocycleCheck:
    lhs, rhs, order = _sides(f, d)
    zero = f.algebra.zero()
    for key in order:
        if not (lhs.get(key, zero) - rhs.get(key, zero)).is_zero():
            return CocycleCheck(False, key)
    return CocycleCheck(True, None)


@dataclass(frozen=True)
class CoboundaryReduction:
    """``f = a (t^d - 1)``; for d = 0 only f = 0 is possible and ``a`` is None."""

    a: AlgebraElement | None
    zero: bool


def reduce_to_coboundary(f: LaurentPoly, d: int) -> CoboundaryReduction:
    check = is_cocycle(f, d)
    if not check:
        raise InputError(f"not a cocycle for d={d}: coefficients differ at t^{check.mismatch[0]} (x) t^{check.mismatch[1]}")
    if d == 0:
        if not f.is_zero():
            raise AssertionError("nonzero cocycle for the trivial character")
        return CoboundaryReduction(None, True)
    a = f.coefficient(d)
    if coboundary(a, d, f.bound) != f:
        raise AssertionError("cocycle is not of coboundary form")
    return CoboundaryReduction(a, a.is_zero())


@dataclass(frozen=True)
class VanishingReport:
    d: int
    bound: int
    algebra: str
    cocycle_dimension: int  # over Q
    coboundary_dimension: int  # over Q
    verified: bool


def _condition_rows(d: int, D: int) -> list[list[Fraction]]:
    """Rational rows of the cocycle condition in the unknowns a_{-D}..a_D (one A-coordinate)."""
    keys: dict = {}
    width = 2 * D + 1

    def add(key: tuple, n: int, c: int) -> None:
        row = keys.setdefault(key, [Fraction(0)] * width)
        row[n + D] += c

    for n in range(-D, D + 1):
        add((n, n), n, 1)
        add((n, 0), n, -1)
        add((d, n), n, -1)
    return [keys[k] for k in sorted(keys) if any(keys[k])]


def h1_vanishing_check(d: int, bound: int, algebra: CoefficientAlgebra | str = "rationals") -> VanishingReport:
    """Solve the cocycle condition over A (by restriction of scalars) and compare with the coboundaries.

    The condition has integer coefficients, so over A it splits into one
    copy of the rational system per A-coordinate.
    """
    if bound < abs(d):
        raise InputError("degree bound must be at least |d|")
    A = builtin_algebra(algebra) if isinstance(algebra, str) else algebra
    name = algebra if isinstance(algebra, str) else "custom"
    k = A.dimension
    width = 2 * bound + 1
    base = _condition_rows(d, bound)
    rows = []
    for c in range(k):
        for r in base:
            big = [Fraction(0)] * (width * k)
            for n, x in enumerate(r):
                big[n * k + c] = x
            rows.append(big)
    cocycles = Elimination(rows, width * k).kernel()
    cob = []
    if d != 0:
        for c in range(k):
            e = A.basis_element(c)
            f = coboundary(e, d, bound)
            vec = [Fraction(0)] * (width * k)
            for n, a in f.coeffs:
                for cc, x in enumerate(a.coords):
                    vec[(n + bound) * k + cc] = x
            cob.append(vec)
    cob_rank = Elimination(cob, width * k).rank if cob else 0
    in_kernel = all(sum(x * y for x, y in zip(r, v)) == 0 for r in rows for v in cob)
    verified = in_kernel and cob_rank == len(cocycles)
    return VanishingReport(d, bound, name, len(cocycles), cob_rank, verified)
