"""Exact dense linear algebra over Q and over finite-dimensional commutative Q-algebras.

Everything downstream (cochain complexes, section varieties, the tower solver)
reduces to the kernels in this module.  Scalars are :class:`fractions.Fraction`;
no floating point is used anywhere.

Pivoting rule: columns are scanned left to right and the pivot row is the first
remaining row with a nonzero entry in that column.  Free variables are set to
zero in particular solutions.  Kernel vectors have a 1 in their free column.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Any, Iterable, Sequence

Vector = list  # list[Fraction]


class InputError(ValueError):
    """Raised when an operation receives structurally invalid input."""


def rational(value: Any) -> Fraction:
    """Parse an exact rational from an int, Fraction or a ``"p/q"`` string.

    Floats and decimal strings are rejected: the exactness policy requires
    ``"1/2"`` rather than ``"0.5"``.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise InputError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if "." in text or "e" in text.lower() or not text:
            raise InputError(f"coefficient {value!r} is not an exact rational; write it as p/q, e.g. \"1/2\"")
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"cannot parse rational {value!r}") from exc
    raise InputError(f"not a rational: {value!r}; floats are not accepted, write a string p/q such as \"1/2\"")


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class Matrix:
    rows: int
    cols: int
    data: tuple  # tuple of row tuples

    def __post_init__(self) -> None:
        if len(self.data) != self.rows or any(len(r) != self.cols for r in self.data):
            raise InputError("matrix entry count does not match rows x cols")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Any]], cols: int | None = None) -> "Matrix":
        data = tuple(tuple(rational(x) for x in r) for r in rows)
        if cols is None:
            cols = len(data[0]) if data else 0
        return cls(len(data), cols, data)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[Any]], rows: int) -> "Matrix":
        cols = [[rational(x) for x in c] for c in columns]
        data = tuple(tuple(c[i] for c in cols) for i in range(rows))
        return cls(rows, len(cols), data)

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls(n, n, tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)))

    @classmethod
    def zero(cls, rows: int, cols: int) -> "Matrix":
        return cls(rows, cols, tuple(tuple(Fraction(0) for _ in range(cols)) for _ in range(rows)))

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        return self.data[i][j]

    def column(self, j: int) -> Vector:
        return [r[j] for r in self.data]

    def columns(self) -> list[Vector]:
        return [self.column(j) for j in range(self.cols)]

    def apply(self, v: Sequence[Fraction]) -> Vector:
        if len(v) != self.cols:
            raise InputError("vector length does not match matrix columns")
        return [sum((a * b for a, b in zip(r, v) if a and b), Fraction(0)) for r in self.data]

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise InputError("matrix shapes do not compose")
        ocols = other.columns()
        return Matrix(self.rows, other.cols,
                      tuple(tuple(sum((a * b for a, b in zip(r, c) if a and b), Fraction(0)) for c in ocols)
                            for r in self.data))

    def transpose(self) -> "Matrix":
        return Matrix(self.cols, self.rows, tuple(tuple(self.data[i][j] for i in range(self.rows))
                                                  for j in range(self.cols)))

    def is_identity(self) -> bool:
        return self.rows == self.cols and all(self.data[i][j] == (i == j)
                                              for i in range(self.rows) for j in range(self.cols))


def _as_rows(M: Matrix | Sequence[Sequence[Any]]) -> tuple[list[list[Fraction]], int]:
    if isinstance(M, Matrix):
        return [list(r) for r in M.data], M.cols
    rows = [[rational(x) for x in r] for r in M]
    return rows, (len(rows[0]) if rows else 0)


class Elimination:
    """Reduced row echelon form of ``M`` together with the row transform ``T``.

    ``T @ M == R``.  The transform is what lets :meth:`solve` handle right-hand
    sides whose entries are not rationals (polynomials, algebra coordinates);
    anything supporting ``+`` and multiplication by a Fraction works.
    """

    def __init__(self, M: Matrix | Sequence[Sequence[Any]], cols: int | None = None):
        rows, ncols = _as_rows(M)
        if cols is not None:
            ncols = cols
        n = len(rows)
        T = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
        pivots: list[int] = []
        r = 0
        for c in range(ncols):
            if r == n:
                break
            p = next((i for i in range(r, n) if rows[i][c] != 0), None)
            if p is None:
                continue
            if p != r:
                rows[p], rows[r] = rows[r], rows[p]
                T[p], T[r] = T[r], T[p]
            inv = 1 / rows[r][c]
            if inv != 1:
                rows[r] = [x * inv for x in rows[r]]
                T[r] = [x * inv for x in T[r]]
            for i in range(n):
                f = rows[i][c]
                if i != r and f != 0:
                    ri, rr = rows[i], rows[r]
                    rows[i] = [a - f * b if b else a for a, b in zip(ri, rr)]
                    ti, tr = T[i], T[r]
                    T[i] = [a - f * b if b else a for a, b in zip(ti, tr)]
            pivots.append(c)
            r += 1
        self.nrows = n
        self.ncols = ncols
        self.reduced = rows
        self.transform = T
        self.pivots = tuple(pivots)
        self.rank = len(pivots)

    @property
    def free_columns(self) -> list[int]:
        ps = set(self.pivots)
        return [c for c in range(self.ncols) if c not in ps]

    def kernel(self) -> list[Vector]:
        basis = []
        for f in self.free_columns:
            v = [Fraction(0)] * self.ncols
            v[f] = Fraction(1)
            for r, p in enumerate(self.pivots):
                v[p] = -self.reduced[r][f]
            basis.append(v)
        return basis

    def transformed(self, b: Sequence[Any]) -> list[Any]:
        if len(b) != self.nrows:
            raise InputError(f"right-hand side has length {len(b)}, expected {self.nrows}")
        return [lincomb(row, b) for row in self.transform]

    def residuals(self, b: Sequence[Any]) -> list[Any]:
        """Entries of ``T b`` on the zero rows of R; the system is consistent iff all vanish."""
        return self.transformed(b)[self.rank:]

    def particular(self, b: Sequence[Any], zero: Any = Fraction(0)) -> list[Any]:
        tb = self.transformed(b)
        x = [zero] * self.ncols
        for r, p in enumerate(self.pivots):
            x[p] = tb[r]
        return x

    def solve(self, b: Sequence[Any]) -> Vector | None:
        tb = self.transformed(b)
        if any(not is_zero(v) for v in tb[self.rank:]):
            return None
        x = [Fraction(0)] * self.ncols
        for r, p in enumerate(self.pivots):
            x[p] = tb[r]
        return x


def is_zero(value: Any) -> bool:
    if isinstance(value, (int, Fraction)):
        return value == 0
    return value.is_zero()


def lincomb(coeffs: Sequence[Fraction], values: Sequence[Any]) -> Any:
    """``sum(c * v)`` that skips zero coefficients and works for non-rational values."""
    total: Any = None
    for c, v in zip(coeffs, values):
        if c == 0:
            continue
        term = v if c == 1 else v * c
        total = term if total is None else total + term
    if total is None:
        first = values[0] if len(values) else Fraction(0)
        return Fraction(0) if isinstance(first, (int, Fraction)) else first * Fraction(0)
    return total


def solve_affine(M: Matrix | Sequence[Sequence[Any]], b: Sequence[Any],
                 cols: int | None = None) -> tuple[Vector, list[Vector]] | None:
    """Solve ``M x = b`` exactly.

    Returns ``None`` when the system is inconsistent, otherwise a particular
    solution (free variables zero) and a kernel basis of ``M``.
    """
    E = Elimination(M, cols)
    b = [rational(x) for x in b]
    x = E.solve(b)
    if x is None:
        return None
    return x, E.kernel()


def kernel_image(M: Matrix | Sequence[Sequence[Any]], cols: int | None = None
                 ) -> tuple[list[Vector], list[Vector], int]:
    rows, ncols = _as_rows(M)
    if cols is not None:
        ncols = cols
    E = Elimination(rows, ncols)
    image = [[r[p] for r in rows] for p in E.pivots]
    return E.kernel(), image, E.rank


def rank(vectors: Sequence[Sequence[Fraction]], dim: int) -> int:
    """Rank of a list of vectors of length ``dim``."""
    if not vectors:
        return 0
    return Elimination([list(v) for v in vectors], dim).rank


def row_space_basis(vectors: Sequence[Sequence[Fraction]], dim: int) -> list[Vector]:
    """RREF basis of the span of ``vectors`` (rows of the reduced matrix)."""
    if not vectors:
        return []
    E = Elimination([list(v) for v in vectors], dim)
    return [list(E.reduced[r]) for r in range(E.rank)]


def quotient_basis(dim: int, subspace: Sequence[Sequence[Any]]) -> list[Vector]:
    """Standard basis vectors completing ``subspace`` to a basis of Q^dim.

    The subspace is row reduced; the returned vectors are the unit vectors of
    its non-pivot coordinates, in increasing order.
    """
    for v in subspace:
        if len(v) != dim:
            raise InputError("subspace vector has wrong length")
    pivots = set(Elimination([[rational(x) for x in v] for v in subspace], dim).pivots) if subspace else set()
    out = []
    for i in range(dim):
        if i not in pivots:
            e = [Fraction(0)] * dim
            e[i] = Fraction(1)
            out.append(e)
    return out


def coordinates_in(basis: Sequence[Sequence[Fraction]], v: Sequence[Fraction]) -> Vector | None:
    """Coordinates of ``v`` with respect to linearly independent ``basis``, or None."""
    dim = len(v)
    if not basis:
        return [] if all(x == 0 for x in v) else None
    M = [[basis[k][i] for k in range(len(basis))] for i in range(dim)]
    return Elimination(M, len(basis)).solve(list(v))


# -- coefficient algebras -----------------------------------------------------

@dataclass(frozen=True)
class CoefficientAlgebra:
    """A finite-dimensional commutative associative unital Q-algebra.

    ``table[i][j]`` holds the coordinates of ``e_i * e_j``.
    """

    names: tuple
    table: tuple
    unit: tuple

    def __post_init__(self) -> None:
        n = len(self.names)
        if n < 1:
            raise InputError("coefficient algebra must have positive dimension")
        if len(self.table) != n or any(len(r) != n or any(len(v) != n for v in r) for r in self.table):
            raise InputError("multiplication table has the wrong shape")
        if len(self.unit) != n:
            raise InputError("unit has the wrong length")
        for i, j in product(range(n), repeat=2):
            if self.table[i][j] != self.table[j][i]:
                raise InputError(f"multiplication is not commutative on ({self.names[i]}, {self.names[j]})")
        for i, j, k in product(range(n), repeat=3):
            left = self._mul(self.table[i][j], _unit_vec(k, n))
            right = self._mul(_unit_vec(i, n), self.table[j][k])
            if left != right:
                raise InputError(
                    f"multiplication is not associative on ({self.names[i]}, {self.names[j]}, {self.names[k]})")
        for i in range(n):
            if self._mul(self.unit, _unit_vec(i, n)) != _unit_vec(i, n):
                raise InputError("declared unit does not act as the identity")

    @classmethod
    def build(cls, names: Sequence[str], products: dict, unit: Sequence[Any]) -> "CoefficientAlgebra":
        """Build from ``{(a, b): {c: coeff}}``; unlisted products are zero."""
        names = tuple(names)
        n = len(names)
        idx = {nm: i for i, nm in enumerate(names)}
        table = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
        for (a, b), value in products.items():
            vec = [Fraction(0)] * n
            for c, coeff in value.items():
                vec[idx[c]] += rational(coeff)
            table[idx[a]][idx[b]] = vec
            table[idx[b]][idx[a]] = list(vec)
        return cls(names, tuple(tuple(tuple(v) for v in r) for r in table), tuple(rational(x) for x in unit))

    @property
    def dimension(self) -> int:
        return len(self.names)

    def _mul(self, a: Sequence[Any], b: Sequence[Any]) -> tuple:
        n = self.dimension
        out: list[Any] = [None] * n
        for i in range(n):
            if is_zero(a[i]):
                continue
            for j in range(n):
                if is_zero(b[j]):
                    continue
                ab = a[i] * b[j]
                for k, c in enumerate(self.table[i][j]):
                    if c:
                        term = ab * c
                        out[k] = term if out[k] is None else out[k] + term
        zero = _zero_like(a[0] if n else Fraction(0))
        return tuple(zero if v is None else v for v in out)

    def element(self, coords: Sequence[Any]) -> "AlgebraElement":
        if len(coords) != self.dimension:
            raise InputError("coordinate length does not match algebra dimension")
        return AlgebraElement(self, tuple(rational(c) if isinstance(c, (int, str)) else c for c in coords))

    def one(self) -> "AlgebraElement":
        return AlgebraElement(self, self.unit)

    def zero(self) -> "AlgebraElement":
        return AlgebraElement(self, tuple(Fraction(0) for _ in self.names))

    def scalar(self, q: Any) -> "AlgebraElement":
        return AlgebraElement(self, tuple(u * q for u in self.unit))

    def basis_element(self, i: int) -> "AlgebraElement":
        return AlgebraElement(self, _unit_vec(i, self.dimension))


def _unit_vec(i: int, n: int) -> tuple:
    return tuple(Fraction(int(k == i)) for k in range(n))


def _zero_like(x: Any) -> Any:
    if isinstance(x, (int, Fraction)):
        return Fraction(0)
    return x * Fraction(0)


@dataclass(frozen=True)
class AlgebraElement:
    algebra: CoefficientAlgebra
    coords: tuple

    def _check(self, other: "AlgebraElement") -> None:
        if self.algebra is not other.algebra and self.algebra != other.algebra:
            raise InputError("elements belong to different coefficient algebras")

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check(other)
        return AlgebraElement(self.algebra, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check(other)
        return AlgebraElement(self.algebra, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "AlgebraElement":
        return AlgebraElement(self.algebra, tuple(-a for a in self.coords))

    def __mul__(self, other: Any) -> "AlgebraElement":
        if isinstance(other, AlgebraElement):
            return algebra_mul(self, other)
        return AlgebraElement(self.algebra, tuple(a * other for a in self.coords))

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return all(is_zero(c) for c in self.coords)


def algebra_mul(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    a._check(b)
    return AlgebraElement(a.algebra, a.algebra._mul(a.coords, b.coords))


def builtin_algebra(name: str) -> CoefficientAlgebra:
    """Named test algebras: ``rationals``, ``dual`` (Q[e]/e^2), ``split`` (QxQ), ``truncated`` (Q[t]/t^3)."""
    if name == "rationals":
        return CoefficientAlgebra.build(["1"], {("1", "1"): {"1": 1}}, [1])
    if name == "dual":
        return CoefficientAlgebra.build(["1", "e"], {("1", "1"): {"1": 1}, ("1", "e"): {"e": 1}}, [1, 0])
    if name == "split":
        return CoefficientAlgebra.build(["p", "q"], {("p", "p"): {"p": 1}, ("q", "q"): {"q": 1}}, [1, 1])
    if name == "truncated":
        return CoefficientAlgebra.build(
            ["1", "t", "t2"],
            {("1", "1"): {"1": 1}, ("1", "t"): {"t": 1}, ("1", "t2"): {"t2": 1}, ("t", "t"): {"t2": 1}},
            [1, 0, 0])
    raise InputError(f"unknown algebra {name!r}; choose rationals, dual, split or truncated")


BUILTIN_ALGEBRAS = ("rationals", "dual", "split", "truncated")


def vec_add(a: Iterable[Fraction], b: Iterable[Fraction]) -> Vector:
    return [x + y for x, y in zip(a, b)]


def vec_scale(c: Fraction, a: Iterable[Fraction]) -> Vector:
    return [c * x for x in a]
