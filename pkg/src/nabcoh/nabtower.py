"""Graded sections of negatively weighted extensions, computed stage by stage.

An extension is a graded Lie algebra ``ghat`` with a grading element and a
partition of its basis into quotient elements (spanning a complement that
maps isomorphically to ``g``) and kernel elements (spanning the ideal ``n``).
Sections are stored by their defect against the canonical splitting given
by that partition: ``s(a) = a + f(a)`` with ``f: g -> n`` weight preserving.

The variety of graded sections is cut out by the homomorphism condition on
each pair of basis elements of ``g``.
Constraints of weight -N are affine-linear in the weight -N coordinates once
the coordinates of weight > -N are fixed; :func:`run_tower` solves them in
that order, carrying earlier parameters symbolically.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

from .cohomology import (CohomologyResult, Cochain, ModuleAction, ce_differential, cohomology, complex_for,
                         is_coboundary)
from .exactla import (AlgebraElement, CoefficientAlgebra, Elimination, InputError, Matrix, Vector,
                      builtin_algebra, coordinates_in, is_zero)
from .graded import FiniteGroupAction, invariant_subspace, mat_inverse
from .lie import (FreeLieTruncation, GradedLieAlgebra, LieModule, ValidationReport, exp_ad, free_lie_basis,
                  is_lie_automorphism, validate_lie)
from .polynomial import Poly, natural_key


class GradedExtension:
    """``0 -> n -> ghat -> g -> 0`` given by a basis partition of ``ghat``."""

    def __init__(self, total: GradedLieAlgebra, kernel: Sequence[int],
                 action: FiniteGroupAction | None = None, name: str = ""):
        self.total = total
        self.kernel = tuple(sorted(set(kernel)))
        kset = set(self.kernel)
        self.quotient_idx = tuple(i for i in range(total.dim) if i not in kset)
        self.g = total.quotient(self.quotient_idx)
        self.n_space = total.space.sub(self.kernel)
        self.action = action
        self.name = name
        self._n_pos = {k: p for p, k in enumerate(self.kernel)}
        self._g_pos = {k: p for p, k in enumerate(self.quotient_idx)}

    @classmethod
    def build(cls, basis: Sequence[tuple[str, int, str]], brackets: dict | None = None,
              grading: str = "h0", group: Sequence[tuple[dict, int]] | None = None,
              name: str = "") -> "GradedExtension":
        """``basis`` entries are ``(name, weight, "quotient" | "kernel")``.

        ``group`` is a list of ``(images, order)`` where ``images`` maps each
        basis name to ``{name: coeff}`` (unlisted elements are fixed).
        """
        total = GradedLieAlgebra.build([(b[0], b[1]) for b in basis], brackets, grading)
        kernel = [i for i, b in enumerate(basis) if b[2] == "kernel"]
        action = None
        if group:
            V = total.space
            gens, orders = [], []
            for images, order in group:
                cols = []
                for j, nm in enumerate(V.names):
                    cols.append(V.vector(images[nm]) if nm in images else V.unit(j))
                gens.append(Matrix.from_columns(cols, V.dim))
                orders.append(order)
            action = FiniteGroupAction(V, tuple(gens), tuple(orders))
        return cls(total, kernel, action, name)

    @property
    def h0(self) -> int:
        return self.total.grading

    @property
    def depth(self) -> int:
        return max((-w for w in self.n_space.weights), default=0)

    def n_weights(self) -> list[int]:
        return sorted(set(self.n_space.weights), reverse=True)

    def embed_n(self, vec: Sequence) -> list:
        out: list = [Fraction(0)] * self.total.dim
        for p, k in enumerate(self.kernel):
            out[k] = vec[p]
        return out

    def n_part(self, v: Sequence) -> list:
        return [v[k] for k in self.kernel]

    def g_part(self, v: Sequence) -> list:
        return [v[k] for k in self.quotient_idx]

    def lift(self, a: int) -> Vector:
        """Canonical splitting applied to the g basis element ``a``."""
        return self.total.space.unit(self.quotient_idx[a])

    def g_action(self) -> list[Matrix]:
        return self.action.quotient_block(self.quotient_idx) if self.action else []

    def n_action(self) -> list[Matrix]:
        return self.action.block(self.kernel) if self.action else []

    def __repr__(self) -> str:
        return f"GradedExtension({self.name or self.total.names})"


def validate_extension(E: GradedExtension) -> ValidationReport:
    rep = ValidationReport()
    rep.extend(validate_lie(E.total), "lie: ")
    T = E.total
    nm, wt = T.names, T.weights
    rep.add("grading element present", None if E.h0 is not None else ("<none>",))
    rep.add("grading element unmarked", (nm[E.h0],) if E.h0 is not None and E.h0 in E.kernel else None)
    bad = next(((nm[k],) for k in E.kernel if wt[k] >= 0), None)
    rep.add("kernel weights negative", bad)
    bad = next(((nm[i],) for i in E.quotient_idx if i != E.h0 and wt[i] >= 0), None)
    rep.add("quotient weights negative", bad)
    bad = None
    kset = set(E.kernel)
    for x in range(T.dim):
        for k in E.kernel:
            if any(i not in kset for i in T.bracket_basis(x, k)):
                bad = (nm[x], nm[k])
                break
        if bad:
            break
    rep.add("kernel is an ideal", bad)
    if E.action is not None:
        bad = None
        for g in E.action.elements:
            for j in range(T.dim):
                for i in range(T.dim):
                    if g[i, j] and ((i in kset) != (j in kset)):
                        bad = (nm[j], nm[i])
                        break
                if bad:
                    break
            if bad:
                break
        rep.add("group preserves the kernel marking", bad)
        bad = None
        if E.h0 is not None:
            for g in E.action.generators:
                if g.column(E.h0) != T.space.unit(E.h0):
                    bad = (nm[E.h0],)
        rep.add("group fixes the grading element", bad)
        bad = None
        for k, g in enumerate(E.action.generators):
            if not is_lie_automorphism(T, g):
                bad = (f"generator {k}",)
                break
        rep.add("group acts by automorphisms", bad)
    return rep


def _require_valid(E: GradedExtension) -> None:
    rep = validate_extension(E)
    if not rep.passed:
        c = rep.failures()[0]
        raise InputError(f"extension fails validation: {c.name} at {c.witness}")


# -- stages ---------------------------------------------------------------------

@dataclass
class TowerStage:
    """``ghat / W_{-N-1} n`` with its central slice ``z = Gr_{-N} n`` as a g-module."""

    extension: GradedExtension
    index: int
    kept: tuple  # total indices surviving the truncation
    z_total: tuple  # total indices spanning z
    module: LieModule
    action: ModuleAction | None

    @property
    def z_dim(self) -> int:
        return len(self.z_total)


def tower_stage(E: GradedExtension, N: int) -> TowerStage:
    cache = E.__dict__.setdefault("_stages", {})
    if N in cache:
        return cache[N]
    if N < 1:
        raise InputError("stage index must be >= 1")
    T = E.total
    kept = tuple(i for i in range(T.dim) if i not in set(E.kernel) or T.weights[i] >= -N)
    z_total = tuple(k for k in E.kernel if T.weights[k] == -N)
    zpos = {k: p for p, k in enumerate(z_total)}
    action = {}
    for a, qa in enumerate(E.quotient_idx):
        for p, k in enumerate(z_total):
            val = {zpos[i]: c for i, c in T.bracket_basis(qa, k).items() if i in zpos}
            if val:
                action[(a, p)] = val
    module = LieModule(E.g, T.space.sub(z_total), action)
    mact = ModuleAction.from_total(E.action, E.quotient_idx, z_total) if E.action else None
    stage = TowerStage(E, N, kept, z_total, module, mact)
    cache[N] = stage
    return stage


# -- sections ---------------------------------------------------------------------

@dataclass(frozen=True)
class SectionCandidate:
    """Graded linear section stored as its defect: ``defect[a]`` = n-coordinates of s(a) - a."""

    extension: GradedExtension = field(compare=False, repr=False)
    defect: tuple

    @classmethod
    def canonical(cls, E: GradedExtension) -> "SectionCandidate":
        return cls(E, tuple(tuple(Fraction(0) for _ in E.kernel) for _ in E.quotient_idx))

    @classmethod
    def from_images(cls, E: GradedExtension, images: dict) -> "SectionCandidate":
        """From ``{g name: {ghat name: coeff}}``; unlisted g elements map to their lift."""
        rows = []
        for a, qa in enumerate(E.quotient_idx):
            nmq = E.total.names[qa]
            if nmq in images:
                v = E.total.space.vector(images[nmq])
                if E.g_part(v) != E.g.space.unit(a):
                    raise InputError(f"image of {nmq} does not project to {nmq}")
                rows.append(tuple(E.n_part(v)))
            else:
                rows.append(tuple(Fraction(0) for _ in E.kernel))
        s = cls(E, tuple(rows))
        s.check_graded()
        return s

    def check_graded(self) -> None:
        E = self.extension
        for a, row in enumerate(self.defect):
            w = E.g.weights[a]
            for p, c in enumerate(row):
                if c and E.n_space.weights[p] != w:
                    raise InputError(f"section is not weight preserving at {E.g.names[a]}")

    def image(self, a: int) -> Vector:
        E = self.extension
        v = E.lift(a)
        for p, c in enumerate(self.defect[a]):
            if c:
                v[E.kernel[p]] += c
        return v

    def images(self) -> list[Vector]:
        return [self.image(a) for a in range(len(self.defect))]

    def truncated(self, N: int) -> "SectionCandidate":
        """Drop the kernel components of weight < -N (a section of ghat / W_{-N-1} n)."""
        E = self.extension
        w = E.n_space.weights
        return SectionCandidate(E, tuple(tuple(c if w[p] >= -N else Fraction(0) for p, c in enumerate(r))
                                         for r in self.defect))

    def with_map(self, f: Sequence[Sequence[Fraction]], sign: int = 1) -> "SectionCandidate":
        """Add a map g -> n given as rows per g element."""
        return SectionCandidate(self.extension, tuple(tuple(a + sign * b for a, b in zip(r, fr))
                                                      for r, fr in zip(self.defect, f)))

    def homomorphism_defects(self, N: int | None = None) -> list[tuple[int, int, Vector]]:
        """Nonzero n-parts of s([a,b]) - [s a, s b] (kept down to weight -N)."""
        E = self.extension
        T = E.total
        imgs = self.images()
        out = []
        for a in range(len(imgs)):
            for b in range(a + 1, len(imgs)):
                lhs = [Fraction(0)] * T.dim
                for k, c in E.g.bracket_basis(a, b).items():
                    lhs = [x + c * y for x, y in zip(lhs, imgs[k])]
                rhs = T.bracket(imgs[a], imgs[b])
                diff = [x - y for x, y in zip(lhs, rhs)]
                diff = [c if (N is None or T.weights[i] >= -N) else Fraction(0) for i, c in enumerate(diff)]
                if any(diff):
                    out.append((a, b, diff))
        return out

    def is_homomorphism(self, N: int | None = None) -> bool:
        return not self.homomorphism_defects(N)

    def coordinates(self, variety: "SectionVariety") -> list[Fraction]:
        flat = [c for r in self.defect for c in r]
        basis = [[c for r in co.map for c in r] for co in variety.coordinates]
        x = coordinates_in(basis, flat)
        if x is None:
            raise InputError("section is not an invariant graded section (no coordinates)")
        return x

    def assignment(self, variety: "SectionVariety") -> list[tuple[str, Fraction]]:
        vals = self.coordinates(variety)
        return sorted(((co.name, v) for co, v in zip(variety.coordinates, vals)), key=lambda t: natural_key(t[0]))

    def to_lie_section(self) -> "LieSection":
        return LieSection(self.extension, tuple(tuple(v) for v in self.images()))


@dataclass(frozen=True)
class LieSection:
    """A linear section g -> ghat given by full images (not necessarily graded)."""

    extension: GradedExtension = field(compare=False, repr=False)
    images: tuple  # images[a] = total coordinates of s(a)

    @classmethod
    def from_images(cls, E: GradedExtension, images: dict) -> "LieSection":
        rows = []
        for a, qa in enumerate(E.quotient_idx):
            nmq = E.total.names[qa]
            rows.append(tuple(E.total.space.vector(images[nmq]) if nmq in images else E.lift(a)))
        return cls(E, tuple(rows))

    def is_section(self) -> bool:
        E = self.extension
        return all(E.g_part(v) == E.g.space.unit(a) for a, v in enumerate(self.images))

    def is_homomorphism(self) -> bool:
        E = self.extension
        T = E.total
        for a in range(len(self.images)):
            for b in range(a + 1, len(self.images)):
                lhs = [Fraction(0)] * T.dim
                for k, c in E.g.bracket_basis(a, b).items():
                    lhs = [x + c * y for x, y in zip(lhs, self.images[k])]
                if lhs != T.bracket(list(self.images[a]), list(self.images[b])):
                    return False
        return True

    def is_filtration_preserving(self) -> bool:
        E = self.extension
        wt = E.total.weights
        return all(not c or wt[i] <= E.g.weights[a] for a, v in enumerate(self.images) for i, c in enumerate(v))

    def is_graded(self) -> bool:
        E = self.extension
        wt = E.total.weights
        return all(not c or wt[i] == E.g.weights[a] for a, v in enumerate(self.images) for i, c in enumerate(v))

    def to_candidate(self) -> SectionCandidate:
        if not self.is_graded():
            raise InputError("section is not graded")
        E = self.extension
        return SectionCandidate(E, tuple(tuple(E.n_part(v)) for v in self.images))


# -- the section variety ---------------------------------------------------------------

@dataclass
class Coordinate:
    name: str
    weight: int
    map: tuple  # rows per g element, n-coordinates


@dataclass
class Constraint:
    pair: tuple  # (g name, g name)
    target: str  # kernel element name
    weight: int
    poly: Poly


@dataclass
class SectionVariety:
    extension: GradedExtension
    coordinates: list
    constraints: list

    def coordinate_names(self) -> list[str]:
        return [c.name for c in self.coordinates]

    def at_weight(self, w: int) -> tuple[list[int], list[Constraint]]:
        cs = [i for i, c in enumerate(self.coordinates) if c.weight == w]
        return cs, [c for c in self.constraints if c.weight == w]

    def section(self, values: Sequence[Fraction]) -> SectionCandidate:
        E = self.extension
        rows = [[Fraction(0)] * len(E.kernel) for _ in E.quotient_idx]
        for co, v in zip(self.coordinates, values):
            if v:
                for a, r in enumerate(co.map):
                    for p, c in enumerate(r):
                        if c:
                            rows[a][p] += v * c
        return SectionCandidate(E, tuple(tuple(r) for r in rows))

    def satisfied(self, values: dict, one: Any = Fraction(1), max_stage: int | None = None) -> bool:
        """Do the coordinate values (rationals or algebra elements) satisfy every constraint?"""
        for c in self.constraints:
            if max_stage is not None and c.weight < -max_stage:
                continue
            if not is_zero(evaluate_poly(c.poly, values, one)):
                return False
        return True


def invariant_map_basis(E: GradedExtension, w: int) -> list[tuple]:
    """Basis of R-invariant maps g_w -> n_w, each as rows per g element."""
    ga = [a for a in range(E.g.dim) if E.g.weights[a] == w and a != E.g.grading]
    na = [p for p in range(len(E.kernel)) if E.n_space.weights[p] == w]
    pairs = [(a, p) for a in ga for p in na]
    if not pairs:
        return []
    gens = []
    if E.action is not None:
        Gg = E.action.quotient_block(E.quotient_idx)
        Gn = E.action.block(E.kernel)
        gen_keys = {g.data for g in E.action.generators}
        for k, g in enumerate(E.action.elements):
            if g.data not in gen_keys:
                continue
            ginv = mat_inverse(Gg[k])
            n = len(pairs)
            rows = [[Fraction(0)] * n for _ in range(n)]
            # (g.f)(x) = g_n f(g^{-1} x)
            for col, (a, p) in enumerate(pairs):
                for row, (b, q) in enumerate(pairs):
                    rows[row][col] += Gn[k][q, p] * ginv[a, b]
            gens.append(Matrix(n, n, tuple(tuple(r) for r in rows)))
    basis = invariant_subspace(gens, len(pairs))
    out = []
    for vec in basis:
        rows = [[Fraction(0)] * len(E.kernel) for _ in range(E.g.dim)]
        for (a, p), c in zip(pairs, vec):
            rows[a][p] = c
        out.append(tuple(tuple(r) for r in rows))
    return out


def section_images(E: GradedExtension, coords: Sequence[Coordinate], values: Sequence, one: Any, zero: Any) -> list:
    """Images s(a) as total vectors with entries in the value ring."""
    imgs = []
    for a in range(E.g.dim):
        v = [zero] * E.total.dim
        v[E.quotient_idx[a]] = one
        for co, val in zip(coords, values):
            row = co.map[a]
            for p, c in enumerate(row):
                if c:
                    k = E.kernel[p]
                    v[k] = v[k] + val * c
        imgs.append(v)
    return imgs


def section_variety(E: GradedExtension) -> SectionVariety:
    _require_valid(E)
    coords: list[Coordinate] = []
    for w in E.n_weights():
        for m in invariant_map_basis(E, w):
            coords.append(Coordinate(f"c{len(coords) + 1}", w, m))
    vals = [Poly.var(c.name) for c in coords]
    imgs = section_images(E, coords, vals, Poly.const(1), Poly())
    T = E.total
    constraints = []
    for a in range(E.g.dim):
        for b in range(a + 1, E.g.dim):
            lhs = [Poly() for _ in range(T.dim)]
            for k, c in E.g.bracket_basis(a, b).items():
                lhs = [x + y * c for x, y in zip(lhs, imgs[k])]
            rhs = T.bracket(imgs[a], imgs[b])
            for p, kk in enumerate(E.kernel):
                poly = lhs[kk] - rhs[kk]
                if not poly.is_zero():
                    constraints.append(Constraint((E.g.names[a], E.g.names[b]), T.names[kk],
                                                  T.weights[kk], poly))
    return SectionVariety(E, coords, constraints)


def evaluate_poly(p: Poly, values: dict, one: Any = Fraction(1)) -> Any:
    """Evaluate with coordinate values in any commutative ring whose unit is ``one``."""
    total: Any = None
    for mono, c in p.terms.items():
        term: Any = None
        for v, e in mono:
            for _ in range(e):
                term = values[v] if term is None else term * values[v]
        term = one * c if term is None else term * c
        total = term if total is None else total + term
    return one * 0 if total is None else total


# -- obstruction and lifting ----------------------------------------------------------

def _perturbation_check(E: GradedExtension, stage: TowerStage, phi: Sequence[Sequence[Fraction]]) -> None:
    T = E.total
    for p, k in enumerate(stage.z_total):
        for j, c in enumerate(phi[p]):
            if c and T.weights[j] != T.weights[k]:
                raise InputError("splitting perturbation is not weight preserving")
            if c and (j in stage.z_total or j not in stage.kept):
                raise InputError("splitting perturbation must be defined on ghat / z")


def bracket_defect(sigma: SectionCandidate, N: int, perturbation: Sequence[Sequence[Fraction]] | None = None,
                   check: bool = True) -> Cochain:
    """Homomorphism defect of t, the lift of sigma through the linear splitting: bracket of images minus image of bracket.

    ``perturbation`` (rows per z element, columns per ghat element) replaces the
    splitting r of ghat -> ghat/z by r + perturbation.
    """
    E = sigma.extension
    stage = tower_stage(E, N)
    T = E.total
    prev = sigma.truncated(N - 1)
    if check and not prev.is_homomorphism(N - 1):
        a, b, _ = prev.homomorphism_defects(N - 1)[0]
        raise InputError(f"section is not a homomorphism of the previous stage at ({E.g.names[a]}, {E.g.names[b]})")
    imgs = prev.images()
    if perturbation is not None:
        _perturbation_check(E, stage, perturbation)
        new = []
        for v in imgs:
            w = list(v)
            for p, k in enumerate(stage.z_total):
                w[k] += sum((c * v[j] for j, c in enumerate(perturbation[p]) if c and v[j]), Fraction(0))
            new.append(w)
        imgs = new
    kept = set(stage.kept)
    cx = complex_for(stage.module)
    sl = cx.slice(2, 0)
    coords = []
    cache: dict = {}
    for (t, zp) in sl.basis:
        a, b = t
        if (a, b) not in cache:
            lhs = T.bracket(imgs[a], imgs[b])
            rhs = [Fraction(0)] * T.dim
            for k, c in E.g.bracket_basis(a, b).items():
                rhs = [x + c * y for x, y in zip(rhs, imgs[k])]
            diff = [x - y for x, y in zip(lhs, rhs)]
            if check and any(diff[i] for i in range(T.dim) if i in kept and i not in set(stage.z_total)
                             and T.weights[i] >= -N):
                raise InputError("lifted section fails outside z; previous stage is inconsistent")
            cache[(a, b)] = diff
        coords.append(cache[(a, b)][stage.z_total[zp]])
    h = cx.cochain(2, 0, coords)
    if check:
        if not ce_differential(h).is_zero():
            raise AssertionError("bracket defect is not a cocycle")
        if stage.action is not None:
            for gL, gV in stage.action.generators:
                if cx.group_matrix(2, 0, gL, gV).apply(list(h.coords)) != list(h.coords):
                    raise AssertionError("bracket defect is not invariant")
    return h


@dataclass
class ObstructionClass:
    stage: int
    defect: Cochain
    cohomology: CohomologyResult
    coordinates: list
    is_zero: bool
    primitive: Cochain | None


def obstruction(sigma: SectionCandidate, N: int, perturbation=None) -> ObstructionClass:
    stage = tower_stage(sigma.extension, N)
    h = bracket_defect(sigma, N, perturbation)
    coh = cohomology(stage.module, 2, 0, stage.action)
    coords = coh.class_coordinates(h)
    if coords is None:
        raise AssertionError("defect not in the invariant cocycle span")
    v = is_coboundary(h, stage.action)
    zero = v is not None
    if zero != all(c == 0 for c in coords):
        raise AssertionError("class coordinates disagree with the coboundary solve")
    return ObstructionClass(N, h, coh, coords, zero, v)


@dataclass
class LiftResult:
    obstruction: ObstructionClass
    section: SectionCandidate | None
    torsor_basis: list  # maps g -> n (rows per g element), spanning Z^1_(0)(g, z)^R

    @property
    def lifted(self) -> bool:
        return self.section is not None

    @property
    def torsor_dimension(self) -> int:
        return len(self.torsor_basis)

    def lift(self, params: Sequence[Fraction]) -> SectionCandidate:
        s = self.section
        for c, f in zip(params, self.torsor_basis):
            if c:
                s = s.with_map([[c * x for x in r] for r in f])
        return s


def _cochain_to_map(E: GradedExtension, stage: TowerStage, c: Cochain) -> tuple:
    zpos = {k: p for p, k in enumerate(E.kernel)}
    rows = [[Fraction(0)] * len(E.kernel) for _ in range(E.g.dim)]
    for a in range(E.g.dim):
        val = c.value((a,))
        for p, x in enumerate(val):
            if x:
                rows[a][zpos[stage.z_total[p]]] = x
    return tuple(tuple(r) for r in rows)


def torsor_basis(E: GradedExtension, N: int) -> list[tuple]:
    """Basis of invariant weight-0 1-cocycles g -> z as maps into n."""
    stage = tower_stage(E, N)
    coh = cohomology(stage.module, 1, 0, stage.action)
    if coh.coboundary_basis:
        raise AssertionError("weight-0 1-coboundaries must vanish for negative z")
    cx = complex_for(stage.module)
    return [_cochain_to_map(E, stage, cx.cochain(1, 0, z)) for z in coh.cocycle_basis]


def lift_section(sigma: SectionCandidate, N: int) -> LiftResult:
    """Either the nonzero obstruction, or one lift s = t - v (dv = h) and the torsor basis."""
    E = sigma.extension
    stage = tower_stage(E, N)
    ob = obstruction(sigma, N)
    basis = torsor_basis(E, N)
    if not ob.is_zero:
        return LiftResult(ob, None, basis)
    f = _cochain_to_map(E, stage, ob.primitive)
    s = sigma.truncated(N - 1).with_map(f, sign=-1)
    if not s.is_homomorphism(N):
        raise AssertionError("lift is not a homomorphism at the new stage")
    return LiftResult(ob, s, basis)


def direct_stage_solve(variety: SectionVariety, sigma: SectionCandidate, N: int
                       ) -> tuple[list[Fraction], list[list[Fraction]]] | None:
    """Solve the weight -N constraints for the weight -N coordinates, with sigma fixing the rest.

    Independent of the cochain machinery: substitution into the constraint
    polynomials, then one exact affine solve.
    """
    E = variety.extension
    values = sigma.truncated(N - 1).coordinates(variety)
    stage_idx, rows = variety.at_weight(-N)
    names = [variety.coordinates[i].name for i in stage_idx]
    fixed = {c.name: v for c, v in zip(variety.coordinates, values) if c.weight > -N}
    M, b = [], []
    for con in rows:
        lin = [Fraction(0)] * len(names)
        const = Poly()
        for mono, c in con.poly.terms.items():
            vs = [v for v, _ in mono]
            hit = [v for v in vs if v in names]
            if hit:
                if len(mono) != 1 or mono[0][1] != 1:
                    raise AssertionError("stage constraint is not affine in its own coordinates")
                lin[names.index(hit[0])] += c
            else:
                const = const + Poly({mono: c})
        M.append(lin)
        b.append(-const.evaluate(fixed))
    del E
    if not M:
        return [Fraction(0)] * len(names), [[Fraction(int(i == k)) for i in range(len(names))]
                                            for k in range(len(names))]
    E2 = Elimination(M, len(names))
    x = E2.solve(b)
    if x is None:
        return None
    return x, E2.kernel()


# -- the tower --------------------------------------------------------------------

@dataclass
class StageReport:
    index: int
    status: str  # trivial | unobstructed | conditional | obstructed
    kernel_dimension: int
    coordinates: list
    constraints: int
    torsor_dimension: int
    new_parameters: list
    conditions: list
    cumulative_coordinates: int
    cumulative_constraints: int


@dataclass
class TowerReport:
    extension: GradedExtension
    algebra: CoefficientAlgebra
    algebra_name: str
    max_stage: int
    variety: SectionVariety
    stages: list
    parameters: list
    values: dict  # coordinate name -> AlgebraElement with Poly coordinates
    empty_from: int | None

    @property
    def conditions(self) -> list[Poly]:
        return [c for s in self.stages for c in s.conditions]

    @property
    def is_empty(self) -> bool:
        return self.empty_from is not None

    @property
    def free_parameters(self) -> int:
        return len(self.parameters)

    def point(self, params: dict | Sequence) -> dict:
        """Coordinate values (algebra elements) at a parameter assignment."""
        if not isinstance(params, dict):
            params = dict(zip(self.parameters, params))
        A = self.algebra
        return {name: AlgebraElement(A, tuple(Fraction(p.evaluate(params)) for p in el.coords))
                for name, el in self.values.items()}

    def rational_point(self, params: dict | Sequence) -> list[Fraction]:
        if self.algebra.dimension != 1:
            raise InputError("rational points need the base algebra")
        pt = self.point(params)
        return [pt[c.name].coords[0] for c in self.variety.coordinates]


def run_tower(E: GradedExtension, max_stage: int | None = None,
              algebra: CoefficientAlgebra | str = "rationals") -> TowerReport:
    """Solve the section variety stage by stage over a coefficient algebra.

    Stage N coordinates are affine in the constraints of weight -N.  Over an
    algebra A the solve is done componentwise (restriction of scalars; the
    constraint matrix has rational entries).  Residual equations are the
    obstruction components; a nonzero constant residual means the variety
    is empty from that stage.
    """
    A = builtin_algebra(algebra) if isinstance(algebra, str) else algebra
    name = algebra if isinstance(algebra, str) else "custom"
    variety = section_variety(E)
    depth = E.depth
    if max_stage is None:
        max_stage = depth
    if max_stage < 0 or max_stage > depth:
        raise InputError(f"max stage {max_stage} exceeds the kernel depth {depth}")
    dA = A.dimension
    one = AlgebraElement(A, tuple(Poly.const(u) for u in A.unit))
    values: dict = {}
    params: list[str] = []
    stages: list[StageReport] = []
    empty_from = None
    cum_c = cum_k = 0
    for N in range(1, max_stage + 1):
        stage = tower_stage(E, N)
        idx, rows = variety.at_weight(-N)
        names = [variety.coordinates[i].name for i in idx]
        cum_c += len(names)
        cum_k += len(rows)
        if not stage.z_dim:
            stages.append(StageReport(N, "trivial", 0, [], 0, 0, [], [], cum_c, cum_k))
            continue
        torsor = len(torsor_basis(E, N))
        M, rest = [], []
        for con in rows:
            lin = [Fraction(0)] * len(names)
            rem: dict = {}
            for mono, c in con.poly.terms.items():
                if any(v in names for v, _ in mono):
                    if len(mono) != 1 or mono[0][1] != 1:
                        raise AssertionError("stage constraint is not affine in its own coordinates")
                    lin[names.index(mono[0][0])] += c
                else:
                    rem[mono] = c
            M.append(lin)
            rest.append(evaluate_poly(Poly(rem), values, one))
        new_params: list[str] = []
        conds: list[Poly] = []
        if names:
            E2 = Elimination(M, len(names)) if M else None
            kernel = E2.kernel() if E2 else [[Fraction(int(i == k)) for i in range(len(names))]
                                             for k in range(len(names))]
            if len(kernel) != torsor:
                raise AssertionError("torsor dimension disagrees with the stage kernel")
            comps = [[Poly() for _ in range(dA)] for _ in names]
            for k in range(dA):
                if E2:
                    rhs = [-r.coords[k] for r in rest]
                    conds.extend(p for p in E2.residuals(rhs) if not p.is_zero())
                    part = E2.particular(rhs, Poly())
                else:
                    part = [Poly() for _ in names]
                for i in range(len(names)):
                    comps[i][k] = comps[i][k] + part[i]
                for vec in kernel:
                    pname = f"p{len(params) + 1}"
                    params.append(pname)
                    new_params.append(pname)
                    pv = Poly.var(pname)
                    for i, c in enumerate(vec):
                        if c:
                            comps[i][k] = comps[i][k] + pv * c
            for i, nm in enumerate(names):
                values[nm] = AlgebraElement(A, tuple(comps[i]))
        else:
            for r in rest:
                conds.extend(p for p in r.coords if not p.is_zero())
        if any(c.is_constant() for c in conds):
            status = "obstructed"
        elif conds:
            status = "conditional"
        else:
            status = "unobstructed"
        stages.append(StageReport(N, status, stage.z_dim, names, len(rows), torsor, new_params,
                                  _dedupe(conds), cum_c, cum_k))
        if status == "obstructed":
            empty_from = N
            break
    for co in variety.coordinates:
        values.setdefault(co.name, AlgebraElement(A, tuple(Poly() for _ in range(dA))))
    report = TowerReport(E, A, name, max_stage, variety, stages, params, values, empty_from)
    if empty_from is None and not report.conditions:
        _verify_symbolically(report)
    return report


def _dedupe(polys: list[Poly]) -> list[Poly]:
    out: list[Poly] = []
    for p in polys:
        if p not in out and (-p) not in out:
            out.append(p)
    return out


def _verify_symbolically(report: TowerReport) -> None:
    A = report.algebra
    one = AlgebraElement(A, tuple(Poly.const(u) for u in A.unit))
    for con in report.variety.constraints:
        if con.weight < -report.max_stage:
            continue
        val = evaluate_poly(con.poly, report.values, one)
        if not val.is_zero():
            raise AssertionError(f"tower parametrization violates constraint {con.pair} -> {con.target}")


@dataclass
class PointsReport:
    tower: TowerReport
    rational_dimension: int  # number of free rational parameters
    empty: bool
    conditional: bool
    verified_samples: int


def evaluate_points(E: GradedExtension, algebra: CoefficientAlgebra | str = "rationals",
                    samples: int = 4, seed: int = 0) -> PointsReport:
    """A-points of the section variety, with sampled points substituted back into every constraint."""
    report = run_tower(E, None, algebra)
    checked = 0
    if not report.is_empty and not report.conditions:
        rng = random.Random(seed)
        one = report.algebra.one()
        for _ in range(samples):
            pt = report.point({p: Fraction(rng.randint(-5, 5), rng.randint(1, 3)) for p in report.parameters})
            if not report.variety.satisfied(pt, one):
                raise AssertionError("sampled point fails the constraints")
            checked += 1
    return PointsReport(report, report.free_parameters, report.is_empty, bool(report.conditions), checked)


# -- conjugation and normal form ---------------------------------------------------

def conjugate_section(u: Sequence[Fraction], s: LieSection | SectionCandidate) -> LieSection:
    """exp(ad u) o s for u in n."""
    if isinstance(s, SectionCandidate):
        s = s.to_lie_section()
    E = s.extension
    kset = set(E.kernel)
    if any(c and i not in kset for i, c in enumerate(u)):
        raise InputError("conjugating element must lie in the kernel")
    X = exp_ad(E.total, list(u))
    return LieSection(E, tuple(tuple(X.apply(list(v))) for v in s.images))


def _solve_grading(E: GradedExtension, target: Sequence[Fraction]) -> list[Fraction]:
    """The unique u in n with exp(ad u)(target) = h0, built weight by weight."""
    T = E.total
    h0 = T.space.unit(E.h0)
    u = [Fraction(0)] * T.dim
    for k in range(1, E.depth + 1):
        cur = exp_ad(T, u).apply(list(target)) if any(u) else list(target)
        for i in E.kernel:
            if T.weights[i] == -k and cur[i]:
                # [u_k, h0] = k u_k cancels the weight -k failure
                u[i] -= cur[i] / k
    final = exp_ad(T, u).apply(list(target)) if any(u) else list(target)
    if final != h0:
        raise AssertionError("grading element could not be normalized")
    return u


@dataclass
class Normalization:
    conjugator: list  # u in n (total coordinates)
    section: SectionCandidate
    stabilizer_trivial: bool


def normalize_section(s: LieSection, E: GradedExtension | None = None) -> Normalization:
    """Conjugate a filtration-preserving Lie section to the unique graded one."""
    E = E or s.extension
    if not s.is_section():
        raise InputError("not a section of ghat -> g")
    if not s.is_homomorphism():
        raise InputError("not a Lie algebra homomorphism")
    if not s.is_filtration_preserving():
        raise InputError("section does not preserve the weight filtration")
    a0 = E.g.grading
    u = _solve_grading(E, s.images[a0])
    s2 = conjugate_section(u, s)
    if not s2.is_graded():
        raise AssertionError("conjugated section is not graded")
    cand = s2.to_candidate()
    stab = _solve_grading(E, s2.images[a0])
    return Normalization(u, cand, not any(stab) and not centralizer_basis(E))


def centralizer_basis(E: GradedExtension) -> list[Vector]:
    """Kernel of ad(h0) on n; empty because n has no weight-0 part."""
    T = E.total
    ad = T.ad_basis(E.h0)
    rows = [[ad[i, k] for k in E.kernel] for i in range(T.dim)]
    if not E.kernel:
        return []
    return Elimination(rows, len(E.kernel)).kernel()


# -- free-Lie presentation route ----------------------------------------------------

def section_from_generator_lifts(E: GradedExtension, free: FreeLieTruncation,
                                 lifts: dict) -> SectionCandidate | None:
    """Extend generator lifts to the free Lie algebra and descend to g, if the relations hold.

    ``g``'s negative part must be the free truncation ``free`` (same basis names
    and order after the grading element).  ``lifts`` maps generator names to
    n-coordinate vectors (weight preserving).  Returns None when some Lyndon
    bracket of weight below the truncation does not vanish in ghat.
    """
    T = E.total
    gnames = [T.names[i] for i in E.quotient_idx if i != E.h0]
    if gnames != free.names:
        raise InputError("quotient basis does not match the free truncation")
    deepest = max(-w for w in T.weights)
    big = free_lie_basis(free.generators, max(deepest, free.depth))
    cache: dict = {}

    def image(tree) -> Vector:
        key = tree
        if key in cache:
            return cache[key]
        if isinstance(tree, int):
            gname = free.generators[tree][0]
            v = T.space.unit(gname)
            for p, c in enumerate(lifts.get(gname, ())):
                if c:
                    v[E.kernel[p]] += c
        else:
            v = T.bracket(image(tree[0]), image(tree[1]))
        cache[key] = v
        return v

    for w in big.words:
        if big.word_weight(w) < -free.depth and any(image(big.tree(w))):
            return None
    rows = []
    for a, qa in enumerate(E.quotient_idx):
        if qa == E.h0:
            rows.append(tuple(Fraction(0) for _ in E.kernel))
            continue
        w = free.words[gnames.index(T.names[qa])]
        v = image(free.tree(w))
        if E.g_part(v) != E.g.space.unit(a):
            return None
        rows.append(tuple(E.n_part(v)))
    return SectionCandidate(E, tuple(rows))
