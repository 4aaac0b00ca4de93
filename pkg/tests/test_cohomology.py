import random
from fractions import Fraction as F
from itertools import combinations

import pytest

from helpers import random_algebra, random_module
from nabcoh.cohomology import (ModuleAction, ce_differential, cohomology, complex_for, hom_identification,
                               is_coboundary)
from nabcoh.exactla import InputError, Matrix
from nabcoh.graded import GradedVectorSpace
from nabcoh.lie import GradedLieAlgebra, LieModule


def h2_g():
    return GradedLieAlgebra.build([("h0", 0), ("x", -1), ("y", -1)], {}, "h0")


def z_line(L):
    return LieModule.trivial(L, GradedVectorSpace.of(("z", -2)))


def naive_d(c, S):
    """d c evaluated on the index tuple S straight from the defining formula."""
    M = c.module
    L = M.algebra
    out = [F(0)] * M.space.dim
    for i, x in enumerate(S):
        val = c.value(S[:i] + S[i + 1:])
        xv = M.act(L.space.unit(x), val)
        out = [a + (-1) ** i * b for a, b in zip(out, xv)]
    for i in range(len(S)):
        for k in range(i + 1, len(S)):
            rest = S[:i] + S[i + 1:k] + S[k + 1:]
            for l, coeff in L.bracket_basis(S[i], S[k]).items():
                val = c.value((l,) + rest)
                out = [a + (-1) ** (i + k) * coeff * b for a, b in zip(out, val)]
    return out


def test_zero_cochain_differential():
    M = z_line(h2_g())
    c = complex_for(M).cochain(1, 0, [0] * complex_for(M).slice(1, 0).dim)
    assert ce_differential(c).is_zero()


def test_degree_zero_differential():
    M = z_line(h2_g())
    cx = complex_for(M)
    v = cx.cochain_from_values(0, -2, {(): {"z": 1}})
    dv = ce_differential(v)
    assert dv.value((0,)) == [-2]
    assert dv.value((1,)) == [0]


def test_h2_cohomology():
    M = z_line(h2_g())
    assert cohomology(M, 1, 0).dimension == 0
    res = cohomology(M, 2, 0)
    assert res.dimension == 1
    assert res.representatives[0].terms() == [(("x", "y"), "z", 1)]
    assert ce_differential(res.representatives[0]).is_zero()


def test_l1_cohomology():
    L = GradedLieAlgebra.build([("h0", 0), ("x", -1)], {}, "h0")
    M = LieModule.trivial(L, GradedVectorSpace.of(("m", -1)))
    res = cohomology(M, 1, 0)
    assert res.dimension == 1
    assert res.representatives[0].terms() == [(("x",), "m", 1)]


def test_is_coboundary_cases():
    M = z_line(h2_g())
    cx = complex_for(M)
    zero = cx.cochain(2, 0, [0] * cx.slice(2, 0).dim)
    assert is_coboundary(zero).is_zero()
    omega = cx.cochain_from_values(2, 0, {("x", "y"): {"z": 1}})
    assert is_coboundary(omega) is None
    assert cx.cochain_from_values(2, 0, {("y", "x"): {"z": 1}}) == -omega
    # a 1-cochain that is not a cocycle
    L = GradedLieAlgebra.build([("h0", 0), ("x", -1), ("y", -1), ("w", -2)], {("x", "y"): {"w": 1}}, "h0")
    N = z_line(L)
    c = complex_for(N).cochain_from_values(1, 0, {("w",): {"z": 1}})
    with pytest.raises(InputError):
        is_coboundary(c)
    assert is_coboundary(ce_differential(c)) == c


def test_hom_identification_examples():
    L1 = GradedLieAlgebra.build([("h0", 0), ("x", -1)], {}, "h0")
    r = hom_identification(LieModule.trivial(L1, GradedVectorSpace.of(("m", -1))))
    assert (r.cohomology_dimension, r.hom_dimension) == (1, 1)
    r = hom_identification(z_line(h2_g()))
    assert (r.cohomology_dimension, r.hom_dimension) == (0, 0)
    ab = GradedLieAlgebra.build([("h0", 0), ("x", -1), ("w", -2)], {}, "h0")
    r = hom_identification(LieModule.trivial(ab, GradedVectorSpace.of(("w", -2))))
    assert (r.cohomology_dimension, r.hom_dimension) == (1, 1)
    assert r.images == [[[0, 1]]]
    with pytest.raises(InputError, match="weight-0"):
        hom_identification(LieModule.trivial(ab, GradedVectorSpace.of(("v", 0))))


def test_differential_matches_defining_formula():
    rng = random.Random(21)
    checked = 0
    for _ in range(25):
        A = random_algebra(rng, max_dim=5)
        L = A.with_grading()
        M = random_module(rng, L, A)
        cx = complex_for(M)
        for j in range(3):
            weights = {sum(L.weights[i] for i in t) for t in combinations(range(L.dim), j)}
            for m in {wv - wt for wt in weights for wv in M.space.weights}:
                n = cx.slice(j, m).dim
                if not n:
                    continue
                c = cx.cochain(j, m, [F(rng.randint(-3, 3)) for _ in range(n)])
                dc = ce_differential(c)
                for S, _ in cx.slice(j + 1, m).basis[:12]:
                    assert dc.value(S) == naive_d(c, S)
                    checked += 1
    assert checked > 100


def sign_action(A, L, V, vsigns):
    gL = A.sign_matrix()
    n = V.dim
    gV = Matrix(n, n, tuple(tuple(F(vsigns[i] if i == j else 0) for j in range(n)) for i in range(n)))
    return ModuleAction.from_generators(L, V, [(gL, gV)], [2])


def test_group_commutes_with_d_and_routes_agree():
    rng = random.Random(4)
    compared = 0
    for _ in range(30):
        A = random_algebra(rng, max_dim=5, signs=True)
        L = A.with_grading()
        M = LieModule.adjoint(L)
        act = sign_action(A, L, M.space, [1] + A.signs)
        cx = complex_for(M)
        for j in range(3):
            n = cx.slice(j, 0).dim
            if not n:
                continue
            c = [F(rng.randint(-3, 3)) for _ in range(n)]
            for gL, gV in act.generators:
                G0 = cx.group_matrix(j, 0, gL, gV)
                G1 = cx.group_matrix(j + 1, 0, gL, gV)
                assert G1.apply(cx.apply_d(j, 0, c)) == cx.apply_d(j, 0, G0.apply(c))
            res = cohomology(M, j, 0, act)
            assert res.dimension == res.character_dimension
            compared += 1
    assert compared > 30
