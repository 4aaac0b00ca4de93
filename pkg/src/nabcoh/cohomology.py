"""Chevalley-Eilenberg cochains split by weight, their differential, and cohomology.

Sign convention for the differential of a j-cochain c::

    dc(x_0, ..., x_j) = sum_i (-1)^i x_i . c(..., ^x_i, ...)
                      + sum_{i<k} (-1)^(i+k) c([x_i, x_k], ..., ^x_i, ..., ^x_k, ...)

A cochain of weight m sends a wedge of basis elements of total weight w into
the module component of weight w + m.  Cochains are stored densely over the
(degree, weight) slice only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .exactla import Elimination, InputError, Matrix, Vector, coordinates_in, quotient_basis
from .graded import FiniteGroupAction, GradedVectorSpace, invariant_subspace, mat_inverse
from .lie import GradedLieAlgebra, LieModule, lower_central_series


class ModuleAction:
    """A finite group acting compatibly on a Lie algebra and on a module over it.

    Stored as matched pairs ``(g_L, g_V)``; ``generators`` and ``elements``
    (closed group, identity first) are both kept.
    """

    def __init__(self, generators: Sequence[tuple[Matrix, Matrix]], elements: Sequence[tuple[Matrix, Matrix]]):
        self.generators = list(generators)
        self.elements = list(elements)

    @classmethod
    def from_generators(cls, L: GradedLieAlgebra, V: GradedVectorSpace,
                        generators: Sequence[tuple[Matrix, Matrix]], orders: Sequence[int]) -> "ModuleAction":
        nL = L.dim
        names = tuple(f"L:{n}" for n in L.names) + tuple(f"V:{n}" for n in V.names)
        space = GradedVectorSpace(names, tuple(L.weights) + tuple(V.weights))
        blocks = []
        for gL, gV in generators:
            n = space.dim
            rows = [[Fraction(0)] * n for _ in range(n)]
            for i in range(nL):
                for j in range(nL):
                    rows[i][j] = gL[i, j]
            for i in range(V.dim):
                for j in range(V.dim):
                    rows[nL + i][nL + j] = gV[i, j]
            blocks.append(Matrix(n, n, tuple(tuple(r) for r in rows)))
        act = FiniteGroupAction(space, tuple(blocks), tuple(orders))
        split = [(_block(g, 0, nL), _block(g, nL, space.dim)) for g in act.elements]
        return cls(list(generators), split)

    @classmethod
    def from_total(cls, action: FiniteGroupAction, alg_indices: Sequence[int],
                   mod_indices: Sequence[int]) -> "ModuleAction":
        """Restrict an action on an ambient space to an algebra block and a module block.

        The algebra block may be a quotient (its complement need only be invariant);
        the module block must be invariant.
        """
        gens = []
        elem_L = action.quotient_block(alg_indices)
        elem_V = action.block(mod_indices)
        els = list(zip(elem_L, elem_V))
        gen_keys = {g.data for g in action.generators}
        gens = [els[k] for k, g in enumerate(action.elements) if g.data in gen_keys]
        return cls(gens, els)

    @property
    def order(self) -> int:
        return len(self.elements)


def _block(g: Matrix, lo: int, hi: int) -> Matrix:
    return Matrix(hi - lo, hi - lo, tuple(tuple(g[i, j] for j in range(lo, hi)) for i in range(lo, hi)))


def _det(rows: list[list[Fraction]]) -> Fraction:
    n = len(rows)
    if n == 0:
        return Fraction(1)
    m = [list(r) for r in rows]
    det = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if m[r][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            m[p], m[c] = m[c], m[p]
            det = -det
        det *= m[c][c]
        inv = 1 / m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] * inv
            if f:
                m[r] = [a - f * b for a, b in zip(m[r], m[c])]
    return det


@dataclass
class Slice:
    """Coordinates of C^j_(m): pairs (wedge index tuple, module basis index)."""

    degree: int
    weight: int
    basis: list
    index: dict

    @property
    def dim(self) -> int:
        return len(self.basis)


@dataclass(frozen=True)
class Cochain:
    module: LieModule = field(compare=False)
    degree: int
    weight: int
    coords: tuple

    @property
    def complex(self) -> "CEComplex":
        return complex_for(self.module)

    def value(self, wedge: Sequence[int]) -> Vector:
        """c(x_{t_0}, ..., x_{t_{j-1}}) for an index tuple in any order."""
        order = sorted(range(len(wedge)), key=lambda k: wedge[k])
        t = tuple(wedge[k] for k in order)
        if len(set(t)) != len(t):
            return [Fraction(0)] * self.module.space.dim
        sign = _perm_sign(order)
        sl = self.complex.slice(self.degree, self.weight)
        out = [Fraction(0)] * self.module.space.dim
        for v in range(self.module.space.dim):
            k = sl.index.get((t, v))
            if k is not None and self.coords[k]:
                out[v] = sign * self.coords[k]
        return out

    def is_zero(self) -> bool:
        return not any(self.coords)

    def __add__(self, other: "Cochain") -> "Cochain":
        return Cochain(self.module, self.degree, self.weight, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "Cochain") -> "Cochain":
        return Cochain(self.module, self.degree, self.weight, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __mul__(self, c: Fraction) -> "Cochain":
        return Cochain(self.module, self.degree, self.weight, tuple(a * c for a in self.coords))

    __rmul__ = __mul__

    def __neg__(self) -> "Cochain":
        return self * -1

    def terms(self) -> list[tuple[tuple, str, Fraction]]:
        """Nonzero entries as (wedge names, module element name, coefficient)."""
        sl = self.complex.slice(self.degree, self.weight)
        L, V = self.module.algebra, self.module.space
        return [(tuple(L.names[i] for i in t), V.names[v], c)
                for (t, v), c in zip(sl.basis, self.coords) if c]


def _perm_sign(order: Sequence[int]) -> int:
    sign = 1
    seen = list(order)
    for i in range(len(seen)):
        for j in range(i + 1, len(seen)):
            if seen[i] > seen[j]:
                sign = -sign
    return sign


def complex_for(module: LieModule) -> "CEComplex":
    """The (lazily built, cached on the module) complex C^bullet(L, V)."""
    cx = module.__dict__.get("_ce_complex")
    if cx is None:
        cx = CEComplex(module)
        module.__dict__["_ce_complex"] = cx
    return cx


class CEComplex:
    """Slices and differential matrices of C^bullet(L, V), built lazily."""

    def __init__(self, module: LieModule):
        self.module = module
        self.L = module.algebra
        self.V = module.space
        self._slices: dict = {}
        self._diffs: dict = {}
        self._act_by_x: dict = {}
        for (x, v), val in module.action.items():
            self._act_by_x.setdefault(v, []).append((x, val))

    def slice(self, j: int, m: int) -> Slice:
        key = (j, m)
        sl = self._slices.get(key)
        if sl is None:
            basis = []
            Lw, Vw = self.L.weights, self.V.weights
            for t in combinations(range(self.L.dim), j):
                wt = sum(Lw[i] for i in t)
                for v in range(self.V.dim):
                    if Vw[v] == wt + m:
                        basis.append((t, v))
            sl = Slice(j, m, basis, {b: k for k, b in enumerate(basis)})
            self._slices[key] = sl
        return sl

    def _push(self, t: tuple, v: int) -> dict:
        """d of the basis cochain (t, v) as {(S, w): coeff}."""
        out: dict = {}
        tset = set(t)
        # x_i . c(...): S = t + {x}
        for x, val in self._act_by_x.get(v, ()):
            if x in tset:
                continue
            S = tuple(sorted(t + (x,)))
            sgn = -1 if S.index(x) % 2 else 1
            for w, c in val.items():
                out[(S, w)] = out.get((S, w), 0) + sgn * c
        # c([x_i, x_k], ...): the bracket supplies the slot t[pos]
        inv = self.L.structure_by_target
        for pos, l in enumerate(t):
            rest = t[:pos] + t[pos + 1:]
            rset = set(rest)
            s0 = -1 if pos % 2 else 1
            for p, q, c in inv.get(l, ()):
                if p in rset or q in rset:
                    continue
                S = tuple(sorted(rest + (p, q)))
                i, k = S.index(p), S.index(q)
                sgn = s0 * (-1 if (i + k) % 2 else 1)
                key = (S, v)
                out[key] = out.get(key, 0) + sgn * c
        return {k: c for k, c in out.items() if c}

    def differential(self, j: int, m: int) -> list[dict]:
        """Sparse columns of d: C^j_(m) -> C^{j+1}_(m) (column k = image of basis k)."""
        key = (j, m)
        cols = self._diffs.get(key)
        if cols is None:
            src = self.slice(j, m)
            tgt = self.slice(j + 1, m)
            cols = []
            for (t, v) in src.basis:
                col = {}
                for kk, c in self._push(t, v).items():
                    r = tgt.index.get(kk)
                    if r is None:
                        raise InputError("differential leaves its weight slice; validate the module first")
                    col[r] = col.get(r, 0) + c
                cols.append({r: c for r, c in col.items() if c})
            self._diffs[key] = cols
        return cols

    def differential_matrix(self, j: int, m: int) -> list[list[Fraction]]:
        cols = self.differential(j, m)
        nrows = self.slice(j + 1, m).dim
        M = [[Fraction(0)] * len(cols) for _ in range(nrows)]
        for k, col in enumerate(cols):
            for r, c in col.items():
                M[r][k] = Fraction(c)
        return M

    def apply_d(self, j: int, m: int, coords: Sequence[Fraction]) -> list[Fraction]:
        out = [Fraction(0)] * self.slice(j + 1, m).dim
        for k, col in enumerate(self.differential(j, m)):
            x = coords[k]
            if x:
                for r, c in col.items():
                    out[r] += x * c
        return out

    def group_matrix(self, j: int, m: int, gL: Matrix, gV: Matrix) -> Matrix:
        """Action (g.c)(xs) = g_V c(g_L^{-1} xs) on C^j_(m)."""
        sl = self.slice(j, m)
        inv = mat_inverse(gL)
        n = sl.dim
        rows = [[Fraction(0)] * n for _ in range(n)]
        for k, (t, v) in enumerate(sl.basis):
            for r, (S, w) in enumerate(sl.basis):
                gv = gV[w, v]
                if not gv:
                    continue
                d = _det([[inv[a, b] for b in S] for a in t])
                if d:
                    rows[r][k] += gv * d
        return Matrix(n, n, tuple(tuple(r) for r in rows))

    def invariant_basis(self, j: int, m: int, action: ModuleAction | None) -> list[Vector]:
        n = self.slice(j, m).dim
        if action is None:
            return [[Fraction(int(i == k)) for i in range(n)] for k in range(n)]
        gens = [self.group_matrix(j, m, gL, gV) for gL, gV in action.generators]
        return invariant_subspace(gens, n)

    def cochain(self, j: int, m: int, coords: Sequence[Fraction]) -> Cochain:
        return Cochain(self.module, j, m, tuple(Fraction(c) for c in coords))

    def cochain_from_values(self, j: int, m: int, values: dict) -> Cochain:
        """Build from ``{(name, ...): {module name: coeff}}`` (wedge given in any order)."""
        sl = self.slice(j, m)
        coords = [Fraction(0)] * sl.dim
        for names, val in values.items():
            idx = [self.L.space.index[nm] for nm in names]
            order = sorted(range(len(idx)), key=lambda k: idx[k])
            t = tuple(idx[k] for k in order)
            sign = _perm_sign(order)
            for vn, c in val.items():
                k = sl.index.get((t, self.V.index[vn]))
                if k is None:
                    raise InputError(f"entry {names}->{vn} is outside the weight {m} slice")
                coords[k] += sign * Fraction(c)
        return self.cochain(j, m, coords)


def ce_differential(c: Cochain) -> Cochain:
    cx = c.complex
    return cx.cochain(c.degree + 1, c.weight, cx.apply_d(c.degree, c.weight, c.coords))


def _span_of_columns(cols: list[list[Fraction]], dim: int) -> list[Vector]:
    if not cols:
        return []
    E = Elimination([list(c) for c in cols], dim)
    return [list(E.reduced[r]) for r in range(E.rank)]


@dataclass
class CohomologyResult:
    module: LieModule
    degree: int
    weight: int
    dimension: int
    representatives: list  # Cochains spanning a complement of B in Z
    cocycle_basis: list  # coordinate vectors
    coboundary_basis: list
    invariant: bool = False
    character_dimension: int | None = None

    def class_coordinates(self, z: Cochain) -> list[Fraction] | None:
        """Coordinates of the class of cocycle ``z`` against ``representatives``.

        ``None`` if ``z`` is not in the cocycle span of this computation.
        """
        cols = [list(r.coords) for r in self.representatives] + self.coboundary_basis
        k = len(self.representatives)
        if not cols:
            return [] if z.is_zero() else None
        x = coordinates_in(cols, list(z.coords))
        if x is None:
            return None
        return x[:k]


def _kernel_in(basis: list[Vector], cx: CEComplex, j: int, m: int) -> list[Vector]:
    """Kernel of d restricted to span(basis), as ambient coordinate vectors."""
    if not basis:
        return []
    images = [cx.apply_d(j, m, b) for b in basis]
    nrows = cx.slice(j + 1, m).dim
    M = [[images[k][r] for k in range(len(basis))] for r in range(nrows)]
    ker = Elimination(M, len(basis)).kernel() if nrows else [
        [Fraction(int(i == k)) for i in range(len(basis))] for k in range(len(basis))]
    dim = cx.slice(j, m).dim
    return [[sum((y[k] * basis[k][i] for k in range(len(basis)) if y[k]), Fraction(0)) for i in range(dim)]
            for y in ker]


def cohomology(module: LieModule, j: int, m: int, action: ModuleAction | None = None) -> CohomologyResult:
    """H^j_(m)(L, V); with ``action``, the invariant part computed on the invariant subcomplex.

    With an action, ``character_dimension`` holds the invariant dimension
    computed the other way: average trace of the group on H^j_(m).
    """
    cx = complex_for(module)
    dim = cx.slice(j, m).dim
    inv_j = cx.invariant_basis(j, m, action)
    Z = _kernel_in(inv_j, cx, j, m)
    if j > 0:
        inv_prev = cx.invariant_basis(j - 1, m, action)
        B = _span_of_columns([cx.apply_d(j - 1, m, b) for b in inv_prev], dim)
    else:
        B = []
    reps = _complement(Z, B, dim)
    result = CohomologyResult(module, j, m, len(reps), [cx.cochain(j, m, r) for r in reps], Z, B,
                              invariant=action is not None)
    if action is not None:
        result.character_dimension = _character_dimension(module, j, m, action)
    return result


def _complement(Z: list[Vector], B: list[Vector], dim: int) -> list[Vector]:
    """Representatives of Z/B via the deterministic quotient rule in Z-coordinates."""
    if not Z:
        return []
    Bz = []
    for b in B:
        y = coordinates_in(Z, b)
        if y is None:
            raise InputError("coboundaries are not cocycles (d o d != 0)")
        Bz.append(y)
    qs = quotient_basis(len(Z), Bz)
    return [[sum((q[k] * Z[k][i] for k in range(len(Z)) if q[k]), Fraction(0)) for i in range(dim)] for q in qs]


def _character_dimension(module: LieModule, j: int, m: int, action: ModuleAction) -> int:
    cx = complex_for(module)
    full = cohomology(module, j, m)
    reps = [list(r.coords) for r in full.representatives]
    if not reps:
        return 0
    total = Fraction(0)
    cols = reps + full.coboundary_basis
    for gL, gV in action.elements:
        G = cx.group_matrix(j, m, gL, gV)
        for k, r in enumerate(reps):
            x = coordinates_in(cols, G.apply(r))
            if x is None:
                raise InputError("group action does not preserve cocycles")
            total += x[k]
    val = total / len(action.elements)
    if val.denominator != 1:
        raise InputError("character average is not an integer; action is inconsistent")
    return int(val)


def is_coboundary(z: Cochain, action: ModuleAction | None = None) -> Cochain | None:
    """A primitive v with dv = z in the same weight (invariant if ``action``), or None."""
    cx = z.complex
    if any(cx.apply_d(z.degree, z.weight, z.coords)):
        raise InputError("input cochain is not a cocycle")
    j, m = z.degree, z.weight
    if j == 0:
        raise InputError("degree-0 cochains have no primitives")
    basis = cx.invariant_basis(j - 1, m, action)
    if z.is_zero():
        return cx.cochain(j - 1, m, [0] * cx.slice(j - 1, m).dim)
    if not basis:
        return None
    images = [cx.apply_d(j - 1, m, b) for b in basis]
    nrows = len(z.coords)
    M = [[images[k][r] for k in range(len(basis))] for r in range(nrows)]
    y = Elimination(M, len(basis)).solve(list(z.coords))
    if y is None:
        return None
    dim = cx.slice(j - 1, m).dim
    v = [sum((y[k] * basis[k][i] for k in range(len(basis)) if y[k]), Fraction(0)) for i in range(dim)]
    return cx.cochain(j - 1, m, v)


@dataclass
class HomIdentification:
    cohomology_dimension: int
    hom_dimension: int
    cocycles: list  # Cochain representatives of H^1_(0)^R
    hom_basis: list  # matrices (V.dim x h1_dim) as row lists
    images: list  # restriction of each cocycle to the H1 representatives
    h1_names: list

    @property
    def matched(self) -> bool:
        return self.cohomology_dimension == self.hom_dimension


def hom_identification(module: LieModule, action: ModuleAction | None = None) -> HomIdentification:
    """Compare H^1_(0)(g, V)^R with graded equivariant Hom(H_1(u), V), computed independently."""
    L, V = module.algebra, module.space
    if any(w == 0 for w in V.weights):
        raise InputError("module has weight-0 elements; the identification needs V^R = 0")
    for (x, v), val in module.action.items():
        if L.weights[x] < 0 and val:
            raise InputError("the negative part acts nontrivially; V must be a module for the reductive quotient")
    coh = cohomology(module, 1, 0, action)

    lcs = lower_central_series(L)
    u_idx = L.negative_indices()
    derived = lcs.terms[1] if len(lcs.terms) > 1 else lcs.terms[0]
    reps = lcs.h1_representatives
    h = len(reps)
    rep_idx = [u_idx[r.index(1)] for r in reps]
    # equivariance: g_V phi = phi gbar on H1
    unknowns = [(a, b) for a in range(V.dim) for b in range(h) if V.weights[a] == L.weights[rep_idx[b]]]
    rows: list[list[Fraction]] = []
    if action is not None:
        cols = reps + derived
        for gL, gV in action.generators:
            gbar = []
            for b in range(h):
                img = [gL[i, rep_idx[b]] for i in u_idx]
                x = coordinates_in(cols, img)
                if x is None:
                    raise InputError("group does not preserve the negative part")
                gbar.append(x[:h])
            for a in range(V.dim):
                for b in range(h):
                    row = [Fraction(0)] * len(unknowns)
                    for k, (a2, b2) in enumerate(unknowns):
                        if b2 == b:
                            row[k] += gV[a, a2]
                        if a2 == a:
                            row[k] -= gbar[b][b2]
                    if any(row):
                        rows.append(row)
    if unknowns:
        ker = Elimination(rows, len(unknowns)).kernel() if rows else [
            [Fraction(int(i == k)) for i in range(len(unknowns))] for k in range(len(unknowns))]
    else:
        ker = []
    hom_basis = []
    for y in ker:
        M = [[Fraction(0)] * h for _ in range(V.dim)]
        for k, (a, b) in enumerate(unknowns):
            M[a][b] = y[k]
        hom_basis.append(M)
    images = []
    for c in coh.representatives:
        img = [[Fraction(0)] * h for _ in range(V.dim)]
        for b in range(h):
            val = c.value((rep_idx[b],))
            for a in range(V.dim):
                img[a][b] = val[a]
        images.append(img)
    return HomIdentification(coh.dimension, len(hom_basis), coh.representatives, hom_basis, images,
                             [L.names[i] for i in rep_idx])
