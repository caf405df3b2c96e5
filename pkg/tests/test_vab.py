import itertools

import pytest
from hypothesis import given, settings, strategies as st

from vabepi.finite_groups import FiniteGroup, count_epis, enumerate_epis, make_hom
from vabepi.intlinalg import IntMatrix, abelian_invariants, smith_normal_form
from vabepi.rewriting import kernel_generators, schreier_transversal
from vabepi.vab import (
    ExtElement,
    VabData,
    WordProblemConfig,
    assemble_homlike_system,
    ext_eval_word,
    ext_inverse,
    ext_multiply,
    extension_presentation,
    images_from_homlike,
    kernel_restriction_map,
    vab_structure,
    verify_vab,
    word_eval_affine,
    word_problem,
)
from vabepi.words import Word, abelianization_matrix, parse_presentation, parse_word, symmetrize

Z2 = FiniteGroup.cyclic(2)


def infinite_cyclic_over_z2():
    # Z as an extension of Z/2 by 2Z: the generator squares to the lattice generator
    return VabData(Z2, 1, (IntMatrix.identity(1), IntMatrix.identity(1)), (((0,), (0,)), ((0,), (1,))))


def dinf_data():
    return VabData.split(Z2, 1, [IntMatrix.identity(1), IntMatrix([[-1]])])


def zdinf_data():
    # Z x Dinf, split with action diag(1, -1)
    return VabData.split(Z2, 2, [IntMatrix.identity(2), IntMatrix([[1, 0], [0, -1]])])


DATA = [infinite_cyclic_over_z2(), dinf_data(), zdinf_data()]


def test_fixture_data_valid():
    for L in DATA:
        assert verify_vab(L)


def test_verify_rejects_broken_cocycle():
    L = infinite_cyclic_over_z2()
    bad = VabData(L.F, 1, L.action, (((0,), (0,)), ((1,), (1,))))
    assert not verify_vab(bad)
    bad_action = VabData.split(Z2, 1, [IntMatrix.identity(1), IntMatrix([[2]])])
    assert not verify_vab(bad_action)


def elements(L, r=1):
    for v in itertools.product(range(-r, r + 1), repeat=L.d):
        for g in range(L.F.order):
            yield ExtElement(v, g)


@pytest.mark.parametrize("L", DATA, ids=["Z", "Dinf", "ZxDinf"])
def test_group_law(L):
    xs = list(elements(L))
    for x in xs:
        assert ext_multiply(L, x, L.identity) == x == ext_multiply(L, L.identity, x)
        assert ext_multiply(L, x, ext_inverse(L, x)) == L.identity
        assert ext_multiply(L, ext_inverse(L, x), x) == L.identity
    for x, y, z in itertools.product(xs[:12], repeat=3):
        assert ext_multiply(L, ext_multiply(L, x, y), z) == ext_multiply(L, x, ext_multiply(L, y, z))


def test_json_roundtrip():
    for L in DATA:
        assert VabData.from_json(L.to_json()).to_json() == L.to_json()


@pytest.mark.parametrize("L, expected", list(zip(DATA, [(1, ()), (0, (2, 2)), (1, (2, 2))])), ids=["Z", "Dinf", "ZxDinf"])
def test_extension_presentation_abelianization(L, expected):
    assert abelian_invariants(abelianization_matrix(extension_presentation(L))) == expected


word_st = st.lists(st.tuples(st.sampled_from("ab"), st.sampled_from([1, -1])), max_size=8).map(
    lambda ls: Word(tuple(ls)))


@settings(max_examples=60, deadline=None)
@given(word_st, st.lists(st.integers(-3, 3), min_size=4, max_size=4), st.sampled_from([(1, 0), (0, 1), (1, 1)]))
def test_word_eval_affine_matches_group_law(w, f, imgs):
    L = zdinf_data()
    P = parse_presentation("gens: a, b\n")
    phi = make_hom(P, Z2, imgs)
    u = w * schreier_transversal(P, phi).coset_rep(w).inverse()
    M, c = word_eval_affine(u, phi, L)
    x = ext_eval_word(L, images_from_homlike(f, phi, L), u)
    assert x == ExtElement(tuple(a + b for a, b in zip(M @ f, c)), L.F.identity)


def test_homlike_system_against_box():
    L = dinf_data()
    P = symmetrize(parse_presentation("gens: a, b\nrel: a b a b^-1\n"))
    for phi in enumerate_epis(P, Z2):
        lat = assemble_homlike_system(P, phi, L)
        for f in itertools.product(range(-2, 3), repeat=P.rank):
            imgs = images_from_homlike(f, phi, L)
            ok = all(ext_eval_word(L, imgs, r) == L.identity for r in P.relators)
            assert ok == (f in lat)


def test_kernel_restriction_matches_evaluation():
    L = dinf_data()
    P = symmetrize(parse_presentation("gens: a, b\n"))
    phi = enumerate_epis(P, Z2)[0]
    T = kernel_generators(schreier_transversal(P, phi))
    M, c = kernel_restriction_map(phi, T, L)
    for f in [(1, -1, 0, 0), (2, -2, 1, -1), (0, 0, 3, -3)]:
        imgs = images_from_homlike(f, phi, L)
        got = [a + b for a, b in zip(M @ f, c)]
        want = [v for _, w in T for v in ext_eval_word(L, imgs, w).vec]
        assert got == want


@pytest.mark.parametrize("text, word, verdict", [
    ("gens: a, b\nrel: a b a^-1 b^-1\n", "b a b^-1 a^-1", "trivial"),
    ("gens: a, b\nrel: a b a^-1 b^-1\n", "a^2 b a^-2 b^-1", "trivial"),
    ("gens: a, b\nrel: a b a^-1 b^-1\n", "a", "nontrivial"),
    ("gens: a, b\n", "a b a^-1 b^-1", "nontrivial"),
    ("gens: s, t\nrel: s^2\nrel: t^2\n", "s t s t", "nontrivial"),
    ("gens: s, t\nrel: s^2\nrel: t^2\n", "s t t s", "trivial"),
    ("gens: a, b\nrel: a b a b^-1\n", "b^2 a b^-2 a^-1", "trivial"),
])
def test_word_problem(text, word, verdict):
    assert word_problem(parse_presentation(text), parse_word(word)) == verdict


def test_word_problem_inconclusive_with_tiny_bounds():
    # the Baumslag-Solitar relation needs several insertions; bounds of 1 cannot settle it
    P = parse_presentation("gens: a, b\nrel: b a b^-1 a^-2\n")
    w = parse_word("b a^2 b^-1 a^-4")
    assert word_problem(P, w, WordProblemConfig(max_relator_products=1, max_quotient_order=1)) == "inconclusive"


@pytest.mark.parametrize("name, order, d", [("z", 1, 1), ("dinf", 2, 1), ("klein", 2, 2), ("z2", 1, 2)])
def test_structure(pres, name, order, d):
    S = vab_structure(pres[name], max_order=8)
    assert S is not None
    L = S.data
    assert (L.F.order, L.d) == (order, d)
    assert verify_vab(L)
    P = pres[name]
    # generator images respect the relators, and words round-trip through coordinates
    for r in P.relators:
        assert S.element_of(r) == L.identity
    for x in elements(L):
        assert S.element_of(S.word_for(x)) == x


def test_dinf_action(pres):
    L = vab_structure(pres["dinf"], max_order=8).data
    g = 1 - L.F.identity
    assert L.C(g).tolist() == [[-1]]


def test_klein_action(pres):
    L = vab_structure(pres["klein"], max_order=8).data
    g = 1 - L.F.identity
    M = L.C(g)
    # conjugate to diag(1, -1) rather than the swap: trace 0, and M - I has SNF (2, 0), not (1, 0)
    assert M.entries[0][0] + M.entries[1][1] == 0
    assert smith_normal_form(M + (-IntMatrix.identity(2))).invariant_factors == (2, 0)


def test_free_group_not_found(pres):
    assert vab_structure(pres["f2"], max_order=4, wp_config=WordProblemConfig(200, 6)) is None


def test_epi_counts_of_extension_match(pres):
    # profinite fingerprint: the extracted extension has the same finite quotients
    L = vab_structure(pres["klein"], max_order=8).data
    E = extension_presentation(L)
    for G in (Z2, FiniteGroup.cyclic(4), FiniteGroup.symmetric(3)):
        assert count_epis(E, G) == count_epis(pres["klein"], G)
