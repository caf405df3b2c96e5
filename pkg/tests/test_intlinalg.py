import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from vabepi.intlinalg import (
    AffineLattice,
    IntMatrix,
    ModulePresentation,
    abelian_invariants,
    affine_image,
    determinant,
    hermite_rows,
    intersect_affine,
    inverse_unimodular,
    max_free_quotient,
    smith_normal_form,
    solve_linear,
)

small = st.integers(-9, 9)


@st.composite
def matrices(draw, max_dim=4):
    r = draw(st.integers(0, max_dim))
    c = draw(st.integers(0, max_dim))
    return IntMatrix([[draw(small) for _ in range(c)] for _ in range(r)], r, c)


def det_oracle(M):
    # Leibniz expansion, independent of the Bareiss code
    n = M.rows
    total = 0
    for p in itertools.permutations(range(n)):
        sign = 1
        for i in range(n):
            for j in range(i + 1, n):
                if p[i] > p[j]:
                    sign = -sign
        prod = 1
        for i in range(n):
            prod *= M[i, p[i]]
        total += sign * prod
    return total


def minors_gcd(M, k):
    from math import gcd
    g = 0
    for rows in itertools.combinations(range(M.rows), k):
        for cols in itertools.combinations(range(M.cols), k):
            g = gcd(g, det_oracle(M.submatrix(rows, cols)))
    return g


@given(matrices())
def test_determinant_matches_leibniz(M):
    if M.rows == M.cols:
        assert determinant(M) == det_oracle(M)


@given(matrices())
def test_snf_certificate(M):
    s = smith_normal_form(M)
    assert s.U @ M @ s.V == s.D
    assert abs(determinant(s.U)) == 1 and abs(determinant(s.V)) == 1
    f = s.invariant_factors
    assert len(f) == min(M.rows, M.cols)
    assert all(x >= 0 for x in f)
    # divisibility chain, zeros trailing
    for a, b in zip(f, f[1:]):
        assert (b % a == 0) if a else b == 0
    for i in range(s.D.rows):
        for j in range(s.D.cols):
            if i != j:
                assert s.D[i, j] == 0


@settings(max_examples=60)
@given(matrices(max_dim=3))
def test_invariant_factors_equal_minor_ratios(M):
    # d_1 ... d_k = gcd of k x k minors
    f = smith_normal_form(M).invariant_factors
    prod = 1
    for k in range(1, min(M.rows, M.cols) + 1):
        prod *= f[k - 1]
        assert minors_gcd(M, k) == prod


def test_snf_edge_shapes():
    assert smith_normal_form(IntMatrix.zeros(0, 3)).invariant_factors == ()
    assert smith_normal_form(IntMatrix.zeros(2, 2)).invariant_factors == (0, 0)
    assert smith_normal_form(IntMatrix([[2, 4], [6, 8]])).invariant_factors == (2, 4)
    assert smith_normal_form(IntMatrix([[0, 0], [0, -3]])).invariant_factors == (3, 0)


def test_abelian_invariants_klein():
    assert abelian_invariants(IntMatrix([[2], [0]])) == (1, (2,))


@given(matrices())
def test_inverse_unimodular(M):
    U = smith_normal_form(M).U
    assert U @ inverse_unimodular(U) == IntMatrix.identity(U.rows)


def box_solutions(A, b, box):
    return {x for x in itertools.product(range(-box, box + 1), repeat=A.cols) if A @ x == tuple(b)}


@settings(max_examples=80)
@given(st.integers(1, 3), st.integers(1, 3), st.data())
def test_solve_linear_against_box(r, c, data):
    A = IntMatrix([[data.draw(st.integers(-3, 3)) for _ in range(c)] for _ in range(r)], r, c)
    b = [data.draw(st.integers(-4, 4)) for _ in range(r)]
    L = solve_linear(A, b)
    box = 3
    sols = box_solutions(A, b, box)
    for x in sols:
        assert x in L
    if L.is_empty:
        assert not sols
    else:
        assert A @ L.offset == tuple(b)
        for v in L.basis:
            assert not any(A @ v)
        # every lattice point in the box is a solution
        for x in itertools.product(range(-box, box + 1), repeat=c):
            if x in L:
                assert x in sols


@settings(max_examples=80)
@given(st.data())
def test_intersection_against_box(data):
    dim = data.draw(st.integers(1, 2))
    vec = st.lists(st.integers(-3, 3), min_size=dim, max_size=dim)
    L1 = AffineLattice(dim, tuple(map(tuple, data.draw(st.lists(vec, max_size=2)))), tuple(data.draw(vec)))
    L2 = AffineLattice(dim, tuple(map(tuple, data.draw(st.lists(vec, max_size=2)))), tuple(data.draw(vec)))
    I = intersect_affine(L1, L2)
    for x in itertools.product(range(-8, 9), repeat=dim):
        assert (x in I) == (x in L1 and x in L2)


def test_affine_lattice_canonical():
    a = AffineLattice(2, ((2, 0), (0, 2), (2, 2)), (3, 5))
    b = AffineLattice(2, ((0, 2), (2, 0)), (1, 1))
    assert a == b
    assert AffineLattice.empty(2).is_empty
    assert AffineLattice.full(3).rank == 3
    assert (0, 0) not in AffineLattice.empty(2)


def test_affine_image():
    L = AffineLattice(2, ((1, 0),), (0, 1))
    M = IntMatrix([[2, 0], [0, 3]])
    K = affine_image(M, (1, 0), L)
    assert (1, 3) in K and (3, 3) in K and (2, 3) not in K


def test_max_free_quotient():
    f, proj = max_free_quotient(ModulePresentation(IntMatrix([[2], [0]])))
    assert f == 1
    # the torsion generator dies, the free one survives
    assert proj @ (2, 0) == (0,)
    assert abs((proj @ (0, 1))[0]) == 1


def test_hermite_rows_normalised():
    H = hermite_rows([(4, 6), (2, 2)], 2)
    assert H == hermite_rows([(2, 2), (0, 2)], 2)


def test_json_roundtrip():
    M = IntMatrix([[10 ** 30, -1], [0, 7]])
    assert IntMatrix.from_json(M.to_json()) == M


def test_random_bigint_snf():
    rng = random.Random(3)
    M = IntMatrix([[rng.randint(-10 ** 12, 10 ** 12) for _ in range(4)] for _ in range(4)])
    s = smith_normal_form(M)
    assert s.U @ M @ s.V == s.D
    prod = 1
    for x in s.invariant_factors:
        prod *= x
    assert prod == abs(determinant(M))
