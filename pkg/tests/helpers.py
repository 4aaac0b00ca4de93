"""Random graded nilpotent algebras, modules and extensions for property tests.

Algebras are grown from abelian generators by iterated central extensions.
Each step picks a weight-0 2-cocycle of the current negative part with
values in one new element, so Jacobi holds by construction.  With
``signs`` every basis element carries a sign and the cocycles are drawn
from the sign-invariant ones, so the diagonal sign matrix is an
automorphism of order 2.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from nabcoh.cohomology import ModuleAction, cohomology
from nabcoh.exactla import Matrix
from nabcoh.graded import GradedVectorSpace
from nabcoh.lie import GradedLieAlgebra, LieModule
from nabcoh.lie import free_lie_basis
from nabcoh.nabtower import GradedExtension, SectionCandidate, lift_section, tower_stage


@dataclass
class RandomAlgebra:
    names: list
    weights: list
    signs: list
    steps: list  # 0 for generators, k for the element added at step k
    brackets: dict = field(default_factory=dict)  # {(a, b): {c: coeff}} by name

    def with_grading(self) -> GradedLieAlgebra:
        return GradedLieAlgebra.build([("h0", 0)] + list(zip(self.names, self.weights)), self.brackets, "h0")

    def sign_matrix(self, with_h0: bool = True) -> Matrix:
        diag = ([1] if with_h0 else []) + self.signs
        n = len(diag)
        return Matrix(n, n, tuple(tuple(Fraction(diag[i] if i == j else 0) for j in range(n)) for i in range(n)))

    @property
    def twisted(self) -> bool:
        return any(s == -1 for s in self.signs)


def _diag(signs: list) -> Matrix:
    n = len(signs)
    return Matrix(n, n, tuple(tuple(Fraction(signs[i] if i == j else 0) for j in range(n)) for i in range(n)))


def random_algebra(rng: random.Random, max_dim: int = 7, min_weight: int = -6, signs: bool = False,
                   split_prob: float = 0.2, zero_prob: float = 0.1, start: RandomAlgebra | None = None,
                   max_steps: int | None = None) -> RandomAlgebra:
    """Negative part only (no grading element); at most ``max_dim`` basis elements.

    ``start`` replaces the random abelian generators by a given algebra.
    """
    if start is not None:
        names, weights, sg, steps = list(start.names), list(start.weights), list(start.signs), list(start.steps)
        brackets = {k: dict(v) for k, v in start.brackets.items()}
    else:
        names, weights, sg, steps = [], [], [], []
        brackets = {}
        for i in range(rng.randint(1, 3)):
            names.append(f"x{i + 1}")
            weights.append(rng.choice([-1, -1, -1, -2]) if min_weight <= -2 else -1)
            sg.append(rng.choice([1, -1]) if signs else 1)
            steps.append(0)
    k = max(steps, default=0)
    for _ in range(rng.randint(1, max_steps or max_dim)):
        if len(names) >= max_dim:
            break
        k += 1
        L = GradedLieAlgebra.build(list(zip(names, weights)), brackets)
        w = rng.randint(min_weight, -1)
        esign = rng.choice([1, -1]) if signs else 1
        V = GradedVectorSpace(("e",), (w,))
        M = LieModule(L, V, {})
        act = None
        if signs:
            act = ModuleAction.from_generators(L, V, [(_diag(sg), _diag([esign]))], [2])
        pool = []
        if rng.random() >= zero_prob:
            res = cohomology(M, 2, 0, act)
            pool = res.coboundary_basis if (rng.random() < split_prob and res.coboundary_basis) \
                else res.cocycle_basis
        coeffs = [0] * (len(pool[0]) if pool else 0)
        for vec in pool:
            c = rng.randint(-2, 2)
            coeffs = [a + c * b for a, b in zip(coeffs, vec)]
        new = f"e{k}"
        while new in names:
            new += "'"
        if pool:
            sl = M.__dict__["_ce_complex"].slice(2, 0)
            for ((a, b), _), c in zip(sl.basis, coeffs):
                if c:
                    brackets.setdefault((names[a], names[b]), {})[new] = Fraction(c)
        names.append(new)
        weights.append(w)
        sg.append(esign)
        steps.append(k)
    return RandomAlgebra(names, weights, sg, steps, brackets)


def random_extension(rng: random.Random, max_dim: int = 7, depth: int = 4, signs: bool = False,
                     **kw) -> GradedExtension:
    """Kernel = the elements added at or after a random step (an ideal by construction)."""
    while True:
        A = random_algebra(rng, max_dim=max_dim, min_weight=-depth, signs=signs, **kw)
        if max(A.steps) >= 1:
            break
    cut = rng.randint(1, max(A.steps))
    basis = [("h0", 0, "quotient")] + [(n, w, "kernel" if s >= cut else "quotient")
                                        for n, w, s in zip(A.names, A.weights, A.steps)]
    group = None
    if A.twisted:
        group = [({n: {n: s} for n, s in zip(A.names, A.signs) if s == -1}, 2)]
    return GradedExtension.build(basis, A.brackets, "h0", group)


def random_module(rng: random.Random, L: GradedLieAlgebra, A: RandomAlgebra) -> LieModule:
    """Adjoint, an ideal, or a trivial module with h0 acting by weight."""
    kind = rng.choice(["adjoint", "ideal", "trivial"])
    if kind == "adjoint":
        return LieModule.adjoint(L)
    if kind == "ideal":
        cut = rng.randint(1, max(A.steps)) if max(A.steps) else 0
        idx = [i + 1 for i, s in enumerate(A.steps) if s >= cut] or [i + 1 for i in range(len(A.names))]
        return LieModule.ideal(L, idx)
    k = rng.randint(1, 3)
    V = GradedVectorSpace.of(*[(f"v{i}", rng.randint(-6, -1)) for i in range(k)])
    return LieModule.trivial(L, V)


def section_chain(E: GradedExtension, rng: random.Random):
    """Walk the tower with random lifts; yields (N, sigma, lift result) for every stage with nonzero slice."""
    sigma = SectionCandidate.canonical(E)
    for N in range(1, E.depth + 1):
        if not tower_stage(E, N).z_dim:
            continue
        res = lift_section(sigma, N)
        yield N, sigma, res
        if not res.lifted:
            return
        sigma = res.lift([Fraction(rng.randint(-3, 3), rng.randint(1, 2)) for _ in res.torsor_basis])


def free_start(generators, depth: int) -> tuple:
    """A free truncation packaged as a starting point for :func:`random_algebra`."""
    F = free_lie_basis(generators, depth)
    L = F.algebra
    brackets = {}
    for (a, b), val in L.raw.items():
        brackets[(L.names[a], L.names[b])] = {L.names[c]: x for c, x in val.items()}
    return F, RandomAlgebra(list(L.names), list(L.weights), [1] * L.dim, [0] * L.dim, brackets)
