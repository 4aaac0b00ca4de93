"""Graded vector spaces, weight-homogeneous maps, truncations and finite group actions."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .exactla import Elimination, InputError, Matrix, Vector

GROUP_ELEMENT_CAP = 1024


@dataclass(frozen=True)
class GradedVectorSpace:
    """Ordered basis of named, integer-weighted elements.

    The basis order is fixed and defines coordinates everywhere downstream.
    """

    names: tuple
    weights: tuple
    index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        if len(self.names) != len(self.weights):
            raise InputError("names and weights differ in length")
        seen: dict = {}
        for i, nm in enumerate(self.names):
            if nm in seen:
                raise InputError(f"duplicate basis name {nm!r}")
            seen[nm] = i
        object.__setattr__(self, "index", seen)

    @classmethod
    def of(cls, *pairs: tuple[str, int]) -> "GradedVectorSpace":
        return cls(tuple(p[0] for p in pairs), tuple(int(p[1]) for p in pairs))

    @property
    def dim(self) -> int:
        return len(self.names)

    def weight(self, name_or_index: str | int) -> int:
        i = name_or_index if isinstance(name_or_index, int) else self.index[name_or_index]
        return self.weights[i]

    def weight_set(self) -> list[int]:
        return sorted(set(self.weights), reverse=True)

    def indices_of_weight(self, m: int) -> list[int]:
        return [i for i, w in enumerate(self.weights) if w == m]

    def unit(self, name_or_index: str | int) -> Vector:
        i = name_or_index if isinstance(name_or_index, int) else self.index[name_or_index]
        v = [Fraction(0)] * self.dim
        v[i] = Fraction(1)
        return v

    def vector(self, combo: dict) -> Vector:
        """Dense coordinates of ``{name: coefficient}``."""
        v = [Fraction(0)] * self.dim
        for nm, c in combo.items():
            if nm not in self.index:
                raise InputError(f"unknown basis element {nm!r}")
            v[self.index[nm]] += Fraction(c)
        return v

    def sub(self, indices: Sequence[int]) -> "GradedVectorSpace":
        return GradedVectorSpace(tuple(self.names[i] for i in indices), tuple(self.weights[i] for i in indices))


def graded_component(V: GradedVectorSpace, m: int) -> list[str]:
    """Basis elements of weight ``m``, in basis order."""
    return [V.names[i] for i in V.indices_of_weight(m)]


@dataclass(frozen=True)
class GradedMap:
    """Linear map shifting weight by ``shift``; ``matrix[i][j]`` = coefficient of target_i in image of source_j."""

    source: GradedVectorSpace
    target: GradedVectorSpace
    shift: int
    matrix: Matrix

    def __post_init__(self) -> None:
        M = self.matrix
        if M.rows != self.target.dim or M.cols != self.source.dim:
            raise InputError("matrix shape does not match source/target dimensions")
        for j in range(M.cols):
            for i in range(M.rows):
                if M[i, j] != 0 and self.target.weights[i] != self.source.weights[j] + self.shift:
                    raise InputError(
                        f"map is not homogeneous of shift {self.shift}: "
                        f"{self.source.names[j]} -> {self.target.names[i]}")

    def __call__(self, v: Sequence[Fraction]) -> Vector:
        return self.matrix.apply(v)

    def compose(self, inner: "GradedMap") -> "GradedMap":
        """``self o inner``; shifts add."""
        if inner.target != self.source:
            raise InputError("maps do not compose")
        return GradedMap(inner.source, self.target, self.shift + inner.shift, self.matrix @ inner.matrix)


@dataclass(frozen=True)
class WeightTruncation:
    """Quotient of ``original`` by W_{-N-1}: the basis elements of weight >= -N survive."""

    original: GradedVectorSpace
    cutoff: int
    quotient: GradedVectorSpace
    kept: tuple
    projection: GradedMap


def truncate(V: GradedVectorSpace, N: int) -> WeightTruncation:
    if N < 1:
        raise InputError("truncation cutoff must be >= 1")
    kept = tuple(i for i, w in enumerate(V.weights) if w >= -N)
    Q = V.sub(kept)
    rows = [[Fraction(int(j == k)) for j in range(V.dim)] for k in kept]
    P = GradedMap(V, Q, 0, Matrix(len(kept), V.dim, tuple(tuple(r) for r in rows)))
    return WeightTruncation(V, N, Q, kept, P)


def exterior_basis(V: GradedVectorSpace, j: int) -> list[tuple[tuple, int]]:
    """Strictly increasing index tuples of length ``j`` with their summed weights."""
    if j < 0:
        raise InputError("exterior degree must be >= 0")
    return [(t, sum(V.weights[i] for i in t)) for t in combinations(range(V.dim), j)]


def _mat_key(M: Matrix) -> tuple:
    return M.data


def close_group(generators: Sequence[Matrix], cap: int = GROUP_ELEMENT_CAP) -> list[Matrix]:
    """All products of the generators, identity first, by breadth-first search."""
    if not generators:
        return []
    n = generators[0].rows
    ident = Matrix.identity(n)
    seen = {_mat_key(ident): ident}
    order = [ident]
    queue = deque([ident])
    while queue:
        g = queue.popleft()
        for s in generators:
            h = s @ g
            k = _mat_key(h)
            if k not in seen:
                if len(seen) >= cap:
                    raise InputError(f"group generated by the action exceeds {cap} elements")
                seen[k] = h
                order.append(h)
                queue.append(h)
    return order


def mat_inverse(M: Matrix) -> Matrix:
    n = M.rows
    E = Elimination(M)
    if E.rank != n:
        raise InputError("matrix is not invertible")
    return Matrix(n, n, tuple(tuple(r) for r in E.transform))


@dataclass(frozen=True)
class FiniteGroupAction:
    """A finite group acting on ``space`` by weight-preserving linear maps.

    Generators come with declared orders; ``elements`` is the breadth-first
    closure (capped at 1024 elements), identity first.
    """

    space: GradedVectorSpace
    generators: tuple  # tuple of Matrix
    orders: tuple
    elements: tuple = field(init=False, compare=False)

    def __post_init__(self) -> None:
        for g, k in zip(self.generators, self.orders):
            GradedMap(self.space, self.space, 0, g)
            if k < 1:
                raise InputError("generator order must be positive")
            power = Matrix.identity(self.space.dim)
            for _ in range(k):
                power = g @ power
            if not power.is_identity():
                raise InputError(f"generator does not have declared order {k}")
            mat_inverse(g)
        els = close_group(list(self.generators)) or [Matrix.identity(self.space.dim)]
        object.__setattr__(self, "elements", tuple(els))

    @classmethod
    def trivial(cls, space: GradedVectorSpace) -> "FiniteGroupAction":
        return cls(space, (), ())

    @property
    def order(self) -> int:
        return len(self.elements)

    def block(self, indices: Sequence[int]) -> list[Matrix]:
        """Each group element restricted to the coordinate block ``indices`` (must be invariant)."""
        out = []
        idx = list(indices)
        others = [i for i in range(self.space.dim) if i not in set(idx)]
        for g in self.elements:
            for j in idx:
                for i in others:
                    if g[i, j] != 0:
                        raise InputError("group element does not preserve the requested block")
            out.append(Matrix(len(idx), len(idx), tuple(tuple(g[i, j] for j in idx) for i in idx)))
        return out

    def quotient_block(self, indices: Sequence[int]) -> list[Matrix]:
        """Induced action on the quotient by the complement of ``indices`` (complement must be invariant)."""
        idx = list(indices)
        return [Matrix(len(idx), len(idx), tuple(tuple(g[i, j] for j in idx) for i in idx)) for g in self.elements]


def _elements(action: "FiniteGroupAction | Sequence[Matrix]") -> Sequence[Matrix]:
    return action.elements if isinstance(action, FiniteGroupAction) else action


def reynolds_project(action: "FiniteGroupAction | Sequence[Matrix]", v: Sequence[Fraction]) -> Vector:
    """Average of the orbit of ``v``: (1/|G|) sum_g g v.

    ``action`` is a :class:`FiniteGroupAction` or an already closed list of element matrices.
    """
    elements = _elements(action)
    if not elements:
        return list(v)
    total = [Fraction(0)] * len(v)
    for g in elements:
        gv = g.apply(v)
        total = [a + b for a, b in zip(total, gv)]
    n = len(elements)
    return [x / n for x in total]


def invariant_subspace(action: "FiniteGroupAction | Sequence[Matrix]", dim: int | None = None) -> list[Vector]:
    """Basis of vectors fixed by every group element: kernel of the stacked (g - id)."""
    if isinstance(action, FiniteGroupAction):
        generators: Sequence[Matrix] = action.generators
        dim = action.space.dim
    else:
        generators = action
    assert dim is not None
    rows: list[list[Fraction]] = []
    for g in generators:
        for i in range(dim):
            rows.append([g[i, j] - (1 if i == j else 0) for j in range(dim)])
    if not rows:
        return [[Fraction(int(i == j)) for j in range(dim)] for i in range(dim)]
    return Elimination(rows, dim).kernel()
