"""Graded Lie algebras with exact structure constants, graded modules, and free Lie truncations."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from math import factorial
from typing import Iterable, Sequence

from .exactla import Elimination, InputError, Matrix, Vector, quotient_basis, row_space_basis
from .graded import GradedVectorSpace

Sparse = dict  # {basis index: Fraction}


def _clean(d: dict) -> dict:
    return {k: v for k, v in d.items() if v != 0}


@dataclass
class Check:
    name: str
    passed: bool
    witness: tuple | None = None
    detail: str = ""


@dataclass
class ValidationReport:
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def add(self, name: str, witness: tuple | None = None, detail: str = "") -> None:
        self.checks.append(Check(name, witness is None, witness, detail))

    def extend(self, other: "ValidationReport", prefix: str = "") -> None:
        for c in other.checks:
            self.checks.append(Check(prefix + c.name, c.passed, c.witness, c.detail))


class GradedLieAlgebra:
    """A graded Lie algebra given by structure constants on a named basis.

    ``table`` maps index pairs ``(a, b)`` to sparse combinations.  A pair
    may be listed in either order (or both; conflicting entries are reported
    by :func:`validate_lie`).  Unlisted pairs bracket to zero.
    """

    def __init__(self, space: GradedVectorSpace, table: dict, grading: int | None = None):
        self.space = space
        self.raw = {k: _clean({i: Fraction(c) for i, c in v.items()}) for k, v in table.items()}
        self.grading = grading
        full: dict = {}
        for (a, b), val in self.raw.items():
            if (a, b) not in full:
                full[(a, b)] = val
            if (b, a) not in self.raw and (b, a) not in full:
                full[(b, a)] = {k: -c for k, c in val.items()}
        self.full = {k: v for k, v in full.items() if v}

    @classmethod
    def build(cls, basis: Sequence[tuple[str, int]], brackets: dict | None = None,
              grading: str | None = None) -> "GradedLieAlgebra":
        """Construct from ``[(name, weight)]`` and ``{(a, b): {c: coeff}}`` by name.

        When ``grading`` names an element, its brackets ``[h0, v] = wt(v) v`` are
        filled in automatically unless given explicitly.
        """
        V = GradedVectorSpace.of(*basis)
        table: dict = {}
        for (a, b), val in (brackets or {}).items():
            table[(V.index[a], V.index[b])] = {V.index[c]: Fraction(x) for c, x in val.items()}
        g = None
        if grading is not None:
            g = V.index[grading]
            for i in range(V.dim):
                if i != g and (g, i) not in table and (i, g) not in table and V.weights[i] != 0:
                    table[(g, i)] = {i: Fraction(V.weights[i])}
        return cls(V, table, g)

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def names(self) -> tuple:
        return self.space.names

    @property
    def weights(self) -> tuple:
        return self.space.weights

    def bracket_basis(self, a: int, b: int) -> Sparse:
        return self.full.get((a, b), {})

    def bracket(self, u: Sequence, v: Sequence) -> list:
        """Bilinear extension of the table; entries may be any ring-like values."""
        out: list = [None] * self.dim
        nz_u = [(i, x) for i, x in enumerate(u) if not _is_zero(x)]
        nz_v = [(j, y) for j, y in enumerate(v) if not _is_zero(y)]
        for i, x in nz_u:
            for j, y in nz_v:
                val = self.full.get((i, j))
                if not val:
                    continue
                xy = x * y
                for k, c in val.items():
                    t = xy * c
                    out[k] = t if out[k] is None else out[k] + t
        zero = _zero_of(u, v)
        return [zero if x is None else x for x in out]

    def ad(self, u: Sequence[Fraction]) -> Matrix:
        cols = [self.bracket(u, self.space.unit(j)) for j in range(self.dim)]
        return Matrix.from_columns(cols, self.dim)

    def ad_basis(self, a: int) -> Matrix:
        return self.ad(self.space.unit(a))

    @cached_property
    def structure_by_target(self) -> dict:
        """``l -> [(p, q, c)]`` with p < q and ``[p, q]`` having l-coefficient c."""
        inv: dict = {}
        for (p, q), val in self.full.items():
            if p < q:
                for l, c in val.items():
                    inv.setdefault(l, []).append((p, q, c))
        return inv

    def element(self, combo: dict) -> Vector:
        return self.space.vector(combo)

    def negative_indices(self) -> list[int]:
        return [i for i, w in enumerate(self.weights) if w < 0]

    def subalgebra(self, indices: Sequence[int]) -> "GradedLieAlgebra":
        """Restriction to the span of ``indices``; raises if not closed under the bracket."""
        idx = list(indices)
        pos = {i: k for k, i in enumerate(idx)}
        table = {}
        for a in idx:
            for b in idx:
                val = self.full.get((a, b))
                if not val:
                    continue
                if any(k not in pos for k in val):
                    raise InputError("span is not closed under the bracket")
                table[(pos[a], pos[b])] = {pos[k]: c for k, c in val.items()}
        g = pos.get(self.grading) if self.grading is not None else None
        return GradedLieAlgebra(self.space.sub(idx), table, g)

    def quotient(self, keep: Sequence[int]) -> "GradedLieAlgebra":
        """Bracket on the kept basis elements with components outside ``keep`` dropped.

        This is the quotient algebra when the span of the dropped elements is an ideal.
        """
        idx = list(keep)
        pos = {i: k for k, i in enumerate(idx)}
        table = {}
        for a in idx:
            for b in idx:
                val = self.full.get((a, b))
                if not val:
                    continue
                red = {pos[k]: c for k, c in val.items() if k in pos}
                if red:
                    table[(pos[a], pos[b])] = red
        g = pos.get(self.grading) if self.grading is not None else None
        return GradedLieAlgebra(self.space.sub(idx), table, g)

    def __repr__(self) -> str:
        return f"GradedLieAlgebra({list(zip(self.names, self.weights))})"


def _is_zero(x) -> bool:
    if isinstance(x, (int, Fraction)):
        return x == 0
    return x.is_zero()


def _zero_of(*vecs) -> object:
    for v in vecs:
        for x in v:
            if not isinstance(x, (int, Fraction)):
                return x * Fraction(0)
    return Fraction(0)


def validate_lie(L: GradedLieAlgebra) -> ValidationReport:
    """Antisymmetry, Jacobi, weight additivity and the grading-element axiom.

    Failures carry the offending basis tuple (by name).
    """
    rep = ValidationReport()
    nm = L.names
    wt = L.weights

    bad = None
    for (a, b), val in sorted(L.raw.items()):
        if a == b and val:
            bad = (nm[a], nm[b])
            break
        other = L.raw.get((b, a))
        if other is not None and a < b and _clean({k: val.get(k, 0) + other.get(k, 0)
                                                   for k in set(val) | set(other)}):
            bad = (nm[a], nm[b])
            break
    rep.add("antisymmetry", bad)

    bad = None
    for (a, b), val in sorted(L.full.items()):
        for k in val:
            if wt[k] != wt[a] + wt[b]:
                bad = (nm[a], nm[b], nm[k])
                break
        if bad:
            break
    rep.add("weight additivity", bad)

    bad = None
    for a, b, c in combinations(range(L.dim), 3):
        if _jacobi_defect(L, a, b, c):
            bad = (nm[a], nm[b], nm[c])
            break
    rep.add("jacobi", bad)

    if L.grading is not None:
        h = L.grading
        bad = None
        if wt[h] != 0:
            bad = (nm[h],)
        for v in range(L.dim):
            if bad:
                break
            expect = {v: Fraction(wt[v])} if wt[v] else {}
            if _clean(dict(L.bracket_basis(h, v))) != expect:
                bad = (nm[h], nm[v])
        rep.add("grading element", bad)
    return rep


def _jacobi_defect(L: GradedLieAlgebra, a: int, b: int, c: int) -> bool:
    total: dict = {}
    for x, y, z in ((a, b, c), (b, c, a), (c, a, b)):
        for k, s in L.bracket_basis(y, z).items():
            for l, t in L.bracket_basis(x, k).items():
                total[l] = total.get(l, 0) + s * t
    return bool(_clean(total))


def bracket(L: GradedLieAlgebra, u: Sequence, v: Sequence) -> list:
    return L.bracket(u, v)


# -- modules -------------------------------------------------------------------

class LieModule:
    """A graded module over ``algebra``; ``action[(x, v)]`` is the sparse image x . v."""

    def __init__(self, algebra: GradedLieAlgebra, space: GradedVectorSpace, action: dict):
        self.algebra = algebra
        self.space = space
        self.action = {k: _clean({i: Fraction(c) for i, c in val.items()}) for k, val in action.items()}
        self.action = {k: v for k, v in self.action.items() if v}

    @classmethod
    def adjoint(cls, L: GradedLieAlgebra) -> "LieModule":
        return cls(L, L.space, dict(L.full))

    @classmethod
    def trivial(cls, L: GradedLieAlgebra, V: GradedVectorSpace) -> "LieModule":
        """Negative part acts by zero; the grading element (if any) acts by weight."""
        action = {}
        if L.grading is not None:
            for v in range(V.dim):
                if V.weights[v]:
                    action[(L.grading, v)] = {v: Fraction(V.weights[v])}
        return cls(L, V, action)

    @classmethod
    def ideal(cls, L: GradedLieAlgebra, indices: Sequence[int]) -> "LieModule":
        """``L`` acting on an ideal spanned by basis elements, by the bracket."""
        idx = list(indices)
        pos = {i: k for k, i in enumerate(idx)}
        action = {}
        for x in range(L.dim):
            for i in idx:
                val = L.bracket_basis(x, i)
                if any(k not in pos for k in val):
                    raise InputError("span is not an ideal")
                if val:
                    action[(x, pos[i])] = {pos[k]: c for k, c in val.items()}
        return cls(L, L.space.sub(idx), action)

    def act_basis(self, x: int, v: int) -> Sparse:
        return self.action.get((x, v), {})

    def act(self, x: Sequence[Fraction], v: Sequence[Fraction]) -> Vector:
        out = [Fraction(0)] * self.space.dim
        for i, a in enumerate(x):
            if not a:
                continue
            for j, b in enumerate(v):
                if not b:
                    continue
                for k, c in self.act_basis(i, j).items():
                    out[k] += a * b * c
        return out


def validate_module(M: LieModule) -> ValidationReport:
    rep = ValidationReport()
    L, V = M.algebra, M.space
    bad = None
    for (x, v), val in sorted(M.action.items()):
        for w in val:
            if V.weights[w] != L.weights[x] + V.weights[v]:
                bad = (L.names[x], V.names[v], V.names[w])
                break
        if bad:
            break
    rep.add("weight additivity", bad)

    bad = None
    for x, y in combinations(range(L.dim), 2):
        for v in range(V.dim):
            lhs: dict = {}
            for k, c in L.bracket_basis(x, y).items():
                for w, d in M.act_basis(k, v).items():
                    lhs[w] = lhs.get(w, 0) + c * d
            for a, b, s in ((x, y, 1), (y, x, -1)):
                for k, c in M.act_basis(b, v).items():
                    for w, d in M.act_basis(a, k).items():
                        lhs[w] = lhs.get(w, 0) - s * c * d
            if _clean(lhs):
                bad = (L.names[x], L.names[y], V.names[v])
                break
        if bad:
            break
    rep.add("bracket compatibility", bad)

    if L.grading is not None:
        bad = None
        for v in range(V.dim):
            expect = {v: Fraction(V.weights[v])} if V.weights[v] else {}
            if M.act_basis(L.grading, v) != expect:
                bad = (L.names[L.grading], V.names[v])
                break
        rep.add("grading element", bad)
    return rep


# -- lower central series ---------------------------------------------------------

@dataclass
class LowerCentralSeries:
    u: GradedLieAlgebra
    terms: list  # RREF bases in u-coordinates, terms[0] = u
    h1_representatives: list  # unit vectors in u-coordinates
    h1_names: list
    h1_weights: list

    @property
    def h1_dimension(self) -> int:
        return len(self.h1_representatives)


def lower_central_series(L: GradedLieAlgebra) -> LowerCentralSeries:
    """Series of the negative part u: L^1 = u, L^{k+1} = [u, L^k] until stable; H1 = u/[u,u]."""
    u = L.subalgebra(L.negative_indices())
    n = u.dim
    current = [u.space.unit(i) for i in range(n)]
    terms = [current]
    while True:
        nxt = [u.bracket(u.space.unit(i), v) for i in range(n) for v in current]
        nxt = row_space_basis([v for v in nxt if any(v)], n)
        if len(nxt) == len(current):
            break
        terms.append(nxt)
        current = nxt
        if not nxt:
            break
    derived = terms[1] if len(terms) > 1 else terms[0]
    reps = quotient_basis(n, derived)
    idx = [r.index(1) for r in reps]
    return LowerCentralSeries(u, terms, reps, [u.names[i] for i in idx], [u.weights[i] for i in idx])


# -- free Lie algebras ------------------------------------------------------------

def lyndon_words(k: int, max_len: int) -> list[tuple]:
    """Lyndon words over {0..k-1} of length <= max_len, in lexicographic order (Duval)."""
    if k <= 0 or max_len <= 0:
        return []
    out = []
    w = [-1]
    while w:
        w[-1] += 1
        out.append(tuple(w))
        m = len(w)
        while len(w) < max_len:
            w.append(w[len(w) - m])
        while w and w[-1] == k - 1:
            w.pop()
    return out


def is_lyndon(w: Sequence[int]) -> bool:
    """Strictly smaller than every proper rotation."""
    w = tuple(w)
    return len(w) > 0 and all(w < w[i:] + w[:i] for i in range(1, len(w)))


def standard_factorization(w: tuple) -> tuple[tuple, tuple]:
    """(u, v) with v the longest proper Lyndon suffix of w."""
    for i in range(1, len(w)):
        if is_lyndon(w[i:]):
            return w[:i], w[i:]
    raise InputError("single letters have no standard factorization")


def _assoc_bracket(p: dict, q: dict) -> dict:
    out: dict = {}
    for a, x in p.items():
        for b, y in q.items():
            out[a + b] = out.get(a + b, 0) + x * y
            out[b + a] = out.get(b + a, 0) - x * y
    return _clean(out)


@dataclass
class FreeLieTruncation:
    """Free Lie algebra on weighted generators modulo elements of weight < -D.

    Basis: Lyndon words over the generators (declaration order), weight >= -D,
    sorted by decreasing weight then lexicographically.
    """

    generators: tuple  # ((name, weight), ...)
    depth: int
    words: tuple
    grading_element: str | None = None

    @property
    def names(self) -> list[str]:
        return [self.bracketing(w) for w in self.words]

    def word_weight(self, w: Sequence[int]) -> int:
        return sum(self.generators[a][1] for a in w)

    def dimensions(self) -> dict[int, int]:
        dims: dict = {}
        for w in self.words:
            m = self.word_weight(w)
            dims[m] = dims.get(m, 0) + 1
        return {m: dims.get(m, 0) for m in range(-1, -self.depth - 1, -1)}

    def bracketing(self, w: tuple) -> str:
        if len(w) == 1:
            return self.generators[w[0]][0]
        u, v = standard_factorization(w)
        return f"[{self.bracketing(u)},{self.bracketing(v)}]"

    def tree(self, w: tuple):
        """Nested pair structure of the standard bracketing (leaves are generator indices)."""
        if len(w) == 1:
            return w[0]
        u, v = standard_factorization(w)
        return (self.tree(u), self.tree(v))

    @cached_property
    def _expansions(self) -> dict:
        exp: dict = {}
        for w in sorted(self.words, key=len):
            if len(w) == 1:
                exp[w] = {w: 1}
            else:
                u, v = standard_factorization(w)
                exp[w] = _assoc_bracket(exp[u], exp[v])
        return exp

    def expand(self, w: tuple) -> dict:
        """The standard bracketing as a noncommutative polynomial {word: coeff}."""
        return self._expansions[w]

    def decompose(self, poly: dict) -> dict:
        """Coordinates of a Lie polynomial in the Lyndon basis (leading word is the lex-smallest)."""
        pos = {w: i for i, w in enumerate(self.words)}
        rest = dict(_clean(poly))
        out: dict = {}
        while rest:
            w = min(rest)
            if w not in pos:
                raise InputError(f"not a Lie element in range: leading word {w}")
            c = Fraction(rest[w])
            out[pos[w]] = c
            for word, x in self.expand(w).items():
                rest[word] = rest.get(word, 0) - c * x
            rest = _clean(rest)
        return out

    @cached_property
    def algebra(self) -> GradedLieAlgebra:
        basis = [(self.bracketing(w), self.word_weight(w)) for w in self.words]
        table: dict = {}
        n = len(self.words)
        for i in range(n):
            for j in range(i + 1, n):
                if self.word_weight(self.words[i]) + self.word_weight(self.words[j]) < -self.depth:
                    continue
                p = _assoc_bracket(self.expand(self.words[i]), self.expand(self.words[j]))
                if p:
                    table[(i, j)] = self.decompose(p)
        if self.grading_element is not None:
            basis = [(self.grading_element, 0)] + basis
            table = {(i + 1, j + 1): {k + 1: c for k, c in v.items()} for (i, j), v in table.items()}
            for i in range(1, len(basis)):
                table[(0, i)] = {i: Fraction(basis[i][1])}
        V = GradedVectorSpace.of(*basis)
        return GradedLieAlgebra(V, table, 0 if self.grading_element is not None else None)


def free_lie_basis(generators: Sequence[tuple[str, int]], depth: int,
                   grading_element: str | None = None) -> FreeLieTruncation:
    gens = tuple((str(n), int(w)) for n, w in generators)
    if depth < 1:
        raise InputError("depth must be >= 1")
    for n, w in gens:
        if w >= 0:
            raise InputError(f"generator {n!r} has non-negative weight {w}")
    max_len = depth // min(-w for _, w in gens) if gens else 0
    words = [w for w in lyndon_words(len(gens), max_len)
             if sum(gens[a][1] for a in w) >= -depth]
    words.sort(key=lambda w: (-sum(gens[a][1] for a in w), w))
    return FreeLieTruncation(gens, depth, tuple(words), grading_element)


def brute_force_lyndon_dimensions(weights: Sequence[int], depth: int) -> dict[int, int]:
    """Enumerate every word, keep those smaller than all rotations, count by weight."""
    from itertools import product

    dims = {m: 0 for m in range(-1, -depth - 1, -1)}
    k = len(weights)
    if k == 0:
        return dims
    max_len = depth // min(-w for w in weights)
    for n in range(1, max_len + 1):
        for w in product(range(k), repeat=n):
            m = sum(weights[a] for a in w)
            if m < -depth:
                continue
            if all(w < w[i:] + w[:i] for i in range(1, n)):
                dims[m] += 1
    return dims


# -- exponentials -------------------------------------------------------------------

def exp_ad(L: GradedLieAlgebra, u: Sequence[Fraction]) -> Matrix:
    """exp(ad u) = sum_k (ad u)^k / k!  for u with only negative-weight components."""
    for i, x in enumerate(u):
        if x and L.weights[i] >= 0:
            raise InputError(f"exp_ad needs negative weights; {L.names[i]} has weight {L.weights[i]}")
    n = L.dim
    A = L.ad(list(u))
    result = [list(r) for r in Matrix.identity(n).data]
    power = Matrix.identity(n)
    k = 0
    while True:
        k += 1
        power = A @ power
        if all(x == 0 for r in power.data for x in r):
            break
        f = Fraction(1, factorial(k))
        for i in range(n):
            for j in range(n):
                if power[i, j]:
                    result[i][j] += power[i, j] * f
        if k > n + 1:
            raise InputError("ad u is not nilpotent")
    return Matrix(n, n, tuple(tuple(r) for r in result))


def is_lie_automorphism(L: GradedLieAlgebra, M: Matrix) -> bool:
    for a in range(L.dim):
        for b in range(a + 1, L.dim):
            lhs = M.apply(L.bracket(L.space.unit(a), L.space.unit(b)))
            rhs = L.bracket(M.column(a), M.column(b))
            if lhs != rhs:
                return False
    return True


def span_dimension(vectors: Iterable[Sequence[Fraction]], dim: int) -> int:
    vs = [list(v) for v in vectors]
    return Elimination(vs, dim).rank if vs else 0
