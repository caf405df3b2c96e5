"""Acceptance criteria, each timed against its runtime budget.

Every test prints one ``ACCEPTANCE <n> PASS|FAIL`` line.  Run directly with
``python tests/test_acceptance.py`` for the summary alone.
"""

import itertools
import json
import random
import time

import numpy as np
import pytest

from conftest import load_pres
from vabepi.colgen import CgInstance, decide_unimodular_point_1d
from vabepi.decision import decide_epi_product, decide_epi_virtually_cyclic, verify_answer_json
from vabepi.finite_groups import FiniteGroup, count_epis, enumerate_epis, enumerate_finite_groups
from vabepi.intlinalg import IntMatrix, abelian_invariants, determinant, smith_normal_form
from vabepi.rewriting import kernel_presentation
from vabepi.vab import ExtElement, VabData, ext_inverse, ext_multiply, vab_structure, verify_vab
from vabepi.words import Presentation, Word, abelianization_matrix, symmetrize

RESULTS: dict[int, str] = {}


def report(n, title, ok, elapsed, limit, detail=""):
    status = "PASS" if ok and elapsed < limit else "FAIL"
    line = f"ACCEPTANCE {n} {status}  {title}  ({elapsed:.2f}s / limit {limit:.0f}s){'  ' + detail if detail else ''}"
    RESULTS[n] = line
    print(line)
    return status == "PASS"


@pytest.fixture
def say(capsys):
    def emit(*args, **kw):
        with capsys.disabled():
            return report(*args, **kw)
    return emit


# 1 ------------------------------------------------------------------------------------

def check_snf():
    rng = random.Random(20240101)
    bad = 0
    for _ in range(1000):
        r, c = rng.randint(1, 5), rng.randint(1, 5)
        A = IntMatrix([[rng.randint(-9, 9) for _ in range(c)] for _ in range(r)], r, c)
        s = smith_normal_form(A)
        f = s.invariant_factors
        ok = (s.U @ A @ s.V == s.D and abs(determinant(s.U)) == 1 and abs(determinant(s.V)) == 1
              and all(x >= 0 for x in f)
              and all((b % a == 0) if a else b == 0 for a, b in zip(f, f[1:]))
              and all(s.D[i, j] == (f[i] if i == j else 0) for i in range(r) for j in range(c)))
        bad += not ok
    return bad == 0, f"{bad} failures"


def test_snf_suite(say):
    t = time.perf_counter()
    ok, detail = check_snf()
    assert say(1, "SNF suite", ok, time.perf_counter() - t, 10, detail)


# 2 ------------------------------------------------------------------------------------

def box_oracle(inst, box=20):
    """Vectorised exhaustive search over coefficients in [-box, box]."""
    k = len(inst.X)
    if k == 0:
        return np.gcd.reduce(np.abs(np.array(inst.b, dtype=np.int64))) == 1
    grid = np.stack(np.meshgrid(*[np.arange(-box, box + 1)] * k, indexing="ij"), -1).reshape(-1, k)
    pts = grid @ np.array(inst.X, dtype=np.int64) + np.array(inst.b, dtype=np.int64)
    return bool((np.gcd.reduce(np.abs(pts), axis=1) == 1).any())


def check_colgen():
    rng = random.Random(7)
    unsound = missed = yes = 0
    for _ in range(1000):
        N = rng.randint(1, 4)
        k = rng.randint(0, 3)
        X = [[rng.randint(-6, 6) for _ in range(N)] for _ in range(k)]
        b = [rng.randint(-6, 6) for _ in range(N)]
        # bias some instances towards sparse/degenerate shapes
        if rng.random() < 0.3:
            b = [x * rng.choice([2, 3]) for x in b]
            X = [[v * rng.choice([1, 2, 3]) for v in x] for x in X]
        inst = CgInstance.make(X, b)
        res = decide_unimodular_point_1d(inst)
        if res is not None:
            yes += 1
            if np.gcd.reduce(np.abs(np.array(res.point, dtype=object))) != 1 or inst.point(res.coefficients) != res.point:
                unsound += 1
        elif box_oracle(inst):
            missed += 1
    return unsound == 0 and missed == 0, f"{yes} yes, {unsound} bad witnesses, {missed} missed"


def test_column_generation(say):
    t = time.perf_counter()
    ok, detail = check_colgen()
    assert say(2, "column generation vs box oracle", ok, time.perf_counter() - t, 60, detail)


# 3 ------------------------------------------------------------------------------------

def check_rank_formula():
    failures = []
    checked = 0
    for k, m in [(2, 2), (2, 3), (2, 6), (3, 2)]:
        P = symmetrize(Presentation(tuple("abc"[:k])))
        for phi in enumerate_epis(P, FiniteGroup.cyclic(m)):
            kp = kernel_presentation(P, phi)
            got = abelian_invariants(abelianization_matrix(kp.presentation))
            checked += 1
            if got != (m * (k - 1) + 1, ()):
                failures.append((k, m, phi.images, got))
    return not failures, f"{checked} epimorphisms, {len(failures)} failures"


def test_rank_formula(say):
    t = time.perf_counter()
    ok, detail = check_rank_formula()
    assert say(3, "Reidemeister-Schreier rank formula", ok, time.perf_counter() - t, 30, detail)


# 4 ------------------------------------------------------------------------------------

def random_presentation(rng):
    gens = tuple("abc"[:rng.randint(1, 3)])
    rels = []
    for _ in range(rng.randint(0, 3)):
        rels.append(Word(tuple((rng.choice(gens), rng.choice((1, -1))) for _ in range(rng.randint(1, 6)))))
    return Presentation(gens, tuple(r for r in rels if r))


def check_symmetrize():
    rng = random.Random(11)
    groups = list(enumerate_finite_groups(8))
    mismatches = 0
    for _ in range(20):
        P = random_presentation(rng)
        S = symmetrize(P)
        # symmetrize adds one unit factor per generator; the abelian group is unchanged
        if abelian_invariants(abelianization_matrix(P)) != abelian_invariants(abelianization_matrix(S)):
            mismatches += 1
        for G in groups:
            if count_epis(P, G) != count_epis(S, G):
                mismatches += 1
    return mismatches == 0, f"{len(groups)} target groups, {mismatches} mismatches"


def test_symmetrization_fidelity(say):
    t = time.perf_counter()
    ok, detail = check_symmetrize()
    assert say(4, "symmetrization fidelity", ok, time.perf_counter() - t, 300, detail)


# 5 ------------------------------------------------------------------------------------

def check_klein_action(M):
    I = IntMatrix.identity(2)
    return (M @ M == I and determinant(M) == -1
            and smith_normal_form(M + (-I)).invariant_factors == (2, 0))


def check_vab_fixture(name):
    S = vab_structure(load_pres(name), max_order=8)
    if S is None:
        return False
    L = S.data
    if not verify_vab(L):
        return False
    g = [x for x in range(L.F.order) if x != L.F.identity]
    if name == "dinf":
        return L.F.order == 2 and L.d == 1 and L.C(g[0]).tolist() == [[-1]]
    if name == "klein":
        return L.F.order == 2 and L.d == 2 and check_klein_action(L.C(g[0]))
    return L.F.order == 1 and L.d == 1


@pytest.mark.parametrize("name", ["dinf", "klein", "z"])
def test_vab_fixtures(say, name):
    t = time.perf_counter()
    ok = check_vab_fixture(name)
    assert say(5, f"vab_structure fixture {name}", ok, time.perf_counter() - t, 120)


# 6 ------------------------------------------------------------------------------------

def check_product():
    Z2 = FiniteGroup.cyclic(2)
    cases = [("z2", 1, Z2, "yes"), ("klein", 1, Z2, "yes"), ("z", 1, Z2, "no"), ("z2", 3, FiniteGroup.trivial(), "no")]
    wrong = []
    for name, d, F, want in cases:
        P = load_pres(name)
        ans = decide_epi_product(P, d, F)
        if ans.verdict != want:
            wrong.append(name)
        elif ans.yes:
            verify_answer_json(P, json.loads(json.dumps(ans.to_json())))
    return not wrong, f"wrong: {wrong}" if wrong else "4/4 verdicts"


def test_product_end_to_end(say):
    t = time.perf_counter()
    ok, detail = check_product()
    assert say(6, "product decision end to end", ok, time.perf_counter() - t, 60, detail)


# 7 ------------------------------------------------------------------------------------

def check_vz():
    cases = [("klein", "dinf", "yes"), ("f2", "dinf", "yes"), ("z2", "dinf", "no"), ("z", "z", "yes")]
    wrong = []
    for name, target, want in cases:
        P = load_pres(name)
        ans = decide_epi_virtually_cyclic(P, load_pres(target))
        if ans.verdict != want:
            wrong.append(name)
        elif ans.yes:
            verify_answer_json(P, json.loads(json.dumps(ans.to_json())))
    return not wrong, f"wrong: {wrong}" if wrong else "4/4 verdicts"


def test_virtually_cyclic_end_to_end(say):
    t = time.perf_counter()
    ok, detail = check_vz()
    assert say(7, "virtually cyclic decision end to end", ok, time.perf_counter() - t, 300, detail)


# 8 ------------------------------------------------------------------------------------

def vab_fixtures():
    out = [vab_structure(load_pres(n), max_order=8).data for n in ("dinf", "klein", "z", "z2")]
    Z2 = FiniteGroup.cyclic(2)
    out.append(VabData(Z2, 1, (IntMatrix.identity(1),) * 2, (((0,), (0,)), ((0,), (1,)))))
    return out


def check_group_law(fixtures):
    failures = 0
    for L in fixtures:
        xs = [ExtElement(v, g) for v in itertools.product((-1, 0, 1), repeat=L.d) for g in range(L.F.order)]
        e = L.identity
        for x in xs:
            if ext_multiply(L, x, e) != x or ext_multiply(L, e, x) != x:
                failures += 1
            xi = ext_inverse(L, x)
            if ext_multiply(L, x, xi) != e or ext_multiply(L, xi, x) != e:
                failures += 1
        for x, y, z in itertools.product(xs, repeat=3):
            if ext_multiply(L, ext_multiply(L, x, y), z) != ext_multiply(L, x, ext_multiply(L, y, z)):
                failures += 1
    return failures == 0, f"{len(fixtures)} fixtures, {failures} failures"


def test_extension_group_law(say):
    fixtures = vab_fixtures()
    t = time.perf_counter()
    ok, detail = check_group_law(fixtures)
    assert say(8, "extension group law", ok, time.perf_counter() - t, 10, detail)


if __name__ == "__main__":
    checks = [
        (1, "SNF suite", check_snf, 10),
        (2, "column generation vs box oracle", check_colgen, 60),
        (3, "Reidemeister-Schreier rank formula", check_rank_formula, 30),
        (4, "symmetrization fidelity", check_symmetrize, 300),
        (5, "vab_structure fixtures", lambda: (all(check_vab_fixture(n) for n in ("dinf", "klein", "z")), ""), 360),
        (6, "product decision end to end", check_product, 60),
        (7, "virtually cyclic decision end to end", check_vz, 300),
    ]
    for n, title, fn, limit in checks:
        t = time.perf_counter()
        ok, detail = fn()
        report(n, title, ok, time.perf_counter() - t, limit, detail)
    fx = vab_fixtures()
    t = time.perf_counter()
    ok, detail = check_group_law(fx)
    report(8, "extension group law", ok, time.perf_counter() - t, 10, detail)
