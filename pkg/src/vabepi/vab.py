"""Virtually abelian groups as extensions of Z^d by a finite group.

A :class:`VabData` holds a finite group ``F``, an action ``C: F -> GL_d(Z)``
and a normalized 2-cocycle ``c``.  The associated group has underlying set
``Z^d x F`` with product ``(x, y)(x', y') = (x + C(y) x' + c[y|y'], y y')``;
the pair ``(x, y)`` corresponds to ``x * sigma(y)`` for the section
``sigma(y) = (0, y)``.
"""

from __future__ import annotations

import heapq
import itertools
import logging
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .finite_groups import FiniteGroup, FiniteHom, enumerate_finite_groups, hom_images, iter_epis
from . import _accel
from .intlinalg import (
    AffineLattice,
    IntMatrix,
    Vector,
    abelian_invariants,
    affine_image,
    determinant,
    intersect_affine,
    inverse_unimodular,
    smith_normal_form,
    solve_linear,
)
from .rewriting import SchreierTransversal, reidemeister_schreier, rewrite_in_kernel, expand
from .words import EMPTY, Presentation, Word, abelianization_matrix, commutator, exponent_vector, letter

log = logging.getLogger(__name__)


def _add(u: Sequence[int], v: Sequence[int]) -> Vector:
    return tuple(a + b for a, b in zip(u, v))


def _neg(u: Sequence[int]) -> Vector:
    return tuple(-a for a in u)


@dataclass(frozen=True)
class ExtElement:
    vec: Vector
    fin: int


@dataclass(frozen=True)
class VabData:
    F: FiniteGroup
    d: int
    action: tuple[IntMatrix, ...]
    cocycle: tuple[tuple[Vector, ...], ...]

    @classmethod
    def split(cls, F: FiniteGroup, d: int, action: Sequence[IntMatrix] | None = None) -> "VabData":
        """Semidirect product data (zero cocycle); trivial action by default."""
        if action is None:
            action = [IntMatrix.identity(d)] * F.order
        zero = (0,) * d
        return cls(F, d, tuple(action), tuple(tuple(zero for _ in range(F.order)) for _ in range(F.order)))

    def C(self, g: int) -> IntMatrix:
        return self.action[g]

    def c(self, g: int, h: int) -> Vector:
        return self.cocycle[g][h]

    @property
    def identity(self) -> ExtElement:
        return ExtElement((0,) * self.d, self.F.identity)

    def sigma(self, y: int) -> ExtElement:
        return ExtElement((0,) * self.d, y)

    def to_json(self) -> dict:
        out = self.F.to_json()
        out["d"] = self.d
        out["action"] = [m.tolist() for m in self.action]
        out["cocycle"] = [[list(v) for v in row] for row in self.cocycle]
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "VabData":
        F = FiniteGroup.from_json(obj)
        d = int(obj["d"])
        action = tuple(IntMatrix(m, d, d) for m in obj["action"])
        cocycle = tuple(tuple(tuple(int(x) for x in v) for v in row) for row in obj["cocycle"])
        return cls(F, d, action, cocycle)


def ext_multiply(L: VabData, x: ExtElement, y: ExtElement) -> ExtElement:
    vec = _add(_add(x.vec, L.C(x.fin) @ y.vec), L.c(x.fin, y.fin))
    return ExtElement(vec, L.F.mul(x.fin, y.fin))


def ext_inverse(L: VabData, x: ExtElement) -> ExtElement:
    yi = L.F.inv(x.fin)
    v = _add(x.vec, L.c(x.fin, yi))
    return ExtElement(_neg(L.C(yi) @ v), yi)


def ext_product(L: VabData, xs) -> ExtElement:
    acc = L.identity
    for x in xs:
        acc = ext_multiply(L, acc, x)
    return acc


def ext_eval_word(L: VabData, images: dict[str, ExtElement], w: Word) -> ExtElement:
    acc = L.identity
    for s, e in w.letters:
        x = images[s]
        acc = ext_multiply(L, acc, x if e > 0 else ext_inverse(L, x))
    return acc


def verify_vab(L: VabData) -> bool:
    F, d = L.F, L.d
    n = F.order
    if len(L.action) != n or len(L.cocycle) != n or any(len(row) != n for row in L.cocycle):
        return False
    for m in L.action:
        if m.shape != (d, d) or abs(determinant(m)) != 1:
            return False
    if L.action[F.identity] != IntMatrix.identity(d):
        return False
    for g in range(n):
        for h in range(n):
            if L.C(g) @ L.C(h) != L.C(F.mul(g, h)):
                return False
            if len(L.c(g, h)) != d:
                return False
    if any(L.c(F.identity, F.identity)):
        return False
    for g1 in range(n):
        for g2 in range(n):
            g12 = F.mul(g1, g2)
            c12 = L.c(g1, g2)
            for g3 in range(n):
                lhs = L.C(g1) @ L.c(g2, g3)
                val = _add(_add(lhs, _neg(L.c(g12, g3))), _add(L.c(g1, F.mul(g2, g3)), _neg(c12)))
                if any(val):
                    return False
    return True


# --- the hom-like linear system ----------------------------------------------------

def _check_compatible(phi: FiniteHom, L: VabData):
    if phi.codomain is not L.F and not np.array_equal(phi.codomain.table, L.F.table):
        raise ValueError("the homomorphism's codomain is not the finite group of the extension data")


def word_eval_affine(w: Word, phi: FiniteHom, L: VabData) -> tuple[IntMatrix, Vector]:
    """Affine map ``f -> M f + c0`` computing the vector part of ``psi_f(w)``.

    ``f`` is laid out as consecutive ``d``-blocks, one per generator of
    ``phi.domain`` in order.  ``psi_f`` sends ``s`` to ``sigma(phi(s)) * f(s)``.
    """
    _check_compatible(phi, L)
    if phi.evaluate(w) != L.F.identity:
        raise ValueError(f"word {w} does not lie in the kernel")
    P = phi.domain
    d, F = L.d, L.F
    pos = {s: i for i, s in enumerate(P.generators)}
    M = [[0] * (d * P.rank) for _ in range(d)]
    const = (0,) * d
    y = F.identity
    for s, e in w.letters:
        ys = phi.image(s)
        j0 = pos[s] * d
        if e > 0:
            # (v, y)(C(ys) x, ys): block += C(y ys)
            A = L.C(F.mul(y, ys))
            const = _add(const, L.c(y, ys))
            y_new = F.mul(y, ys)
            sign = 1
        else:
            yb = F.inv(ys)
            # inverse image is (-x - C(yb) c[ys|yb], yb)
            A = L.C(y)
            const = _add(const, _add(_neg(L.C(y) @ (L.C(yb) @ L.c(ys, yb))), L.c(y, yb)))
            y_new = F.mul(y, yb)
            sign = -1
        for r in range(d):
            for k in range(d):
                M[r][j0 + k] += sign * A[r, k]
        y = y_new
    return IntMatrix(M, d, d * P.rank), const


def relator_equation(r: Word, phi: FiniteHom, L: VabData) -> tuple[IntMatrix, Vector] | None:
    """Coefficients and right-hand side of the hom-like equation for a positive relator.

    For ``r = s_1 ... s_m`` and ``lam_j = sigma(phi(s_j))`` the equation is
    ``sum_j C(lam_1 ... lam_j) f(s_j) = -vec(lam_1 ... lam_m)``.  Returns None
    when ``phi(r) != e`` (no solutions).
    """
    if not r.is_positive():
        raise ValueError("hom-like equations are set up for positive relators")
    P, F, d = phi.domain, L.F, L.d
    pos = {s: i for i, s in enumerate(P.generators)}
    lam = [L.sigma(phi.image(s)) for s, _ in r.letters]
    total = ext_product(L, lam)
    if total.fin != F.identity:
        return None
    M = [[0] * (d * P.rank) for _ in range(d)]
    prefix = F.identity
    for (s, _), lj in zip(r.letters, lam):
        prefix = F.mul(prefix, lj.fin)
        A = L.C(prefix)
        j0 = pos[s] * d
        for a in range(d):
            for b in range(d):
                M[a][j0 + b] += A[a, b]
    return IntMatrix(M, d, d * P.rank), _neg(total.vec)


def assemble_homlike_system(P: Presentation, phi: FiniteHom, L: VabData) -> AffineLattice:
    """All hom-like maps ``S -> Z^d`` for ``phi``, as a lattice in ``Z^(|S| d)``."""
    _check_compatible(phi, L)
    if phi.domain != P:
        raise ValueError("homomorphism is defined on a different presentation")
    nv = L.d * P.rank
    rows: list[list[int]] = []
    rhs: list[int] = []
    for r in P.relators:
        eq = relator_equation(r, phi, L)
        if eq is None:
            return AffineLattice.empty(nv)
        M, b = eq
        rows.extend(M.tolist())
        rhs.extend(b)
    return solve_linear(IntMatrix(rows, len(rows), nv), rhs)


def restrict_to_kernel(lat: AffineLattice, t: SchreierTransversal, T: Sequence[tuple[str, Word]],
                       L: VabData) -> AffineLattice:
    """Image of the hom-like lattice under ``f -> (psi_f(t))_{t in T}``."""
    M, c = kernel_restriction_map(t.hom, T, L)
    return affine_image(M, c, lat)


def kernel_restriction_map(phi: FiniteHom, T: Sequence[tuple[str, Word]], L: VabData) -> tuple[IntMatrix, Vector]:
    nv = L.d * phi.domain.rank
    rows: list[list[int]] = []
    const: list[int] = []
    for _, w in T:
        M, c = word_eval_affine(w, phi, L)
        rows.extend(M.tolist())
        const.extend(c)
    return IntMatrix(rows, len(rows), nv), tuple(const)


def images_from_homlike(f: Sequence[int], phi: FiniteHom, L: VabData) -> dict[str, ExtElement]:
    """Generator images ``s -> sigma(phi(s)) * f(s)``."""
    d = L.d
    out = {}
    for i, s in enumerate(phi.domain.generators):
        x = ExtElement(tuple(f[i * d:(i + 1) * d]), L.F.identity)
        out[s] = ext_multiply(L, L.sigma(phi.image(s)), x)
    return out


# --- word problem --------------------------------------------------------------------

@dataclass
class WordProblemConfig:
    max_relator_products: int = 100_000
    max_quotient_order: int = 12
    chunk: int = 2_000


class WordProblemSolver:
    """Semidecision of triviality in a finitely presented group.

    Triviality is proved by a best-first search over words obtained by
    inserting cyclic conjugates of relators (each insertion counts against
    ``max_relator_products``).  Nontriviality is proved by a homomorphism to a
    finite group (orders up to ``max_quotient_order``) or to the
    abelianization.  The two searches are interleaved.
    """

    def __init__(self, P: Presentation, config: WordProblemConfig | None = None):
        self.P = P
        self.config = config or WordProblemConfig()
        self._code = {}
        for i, g in enumerate(P.generators):
            self._code[(g, 1)] = i + 1
            self._code[(g, -1)] = -(i + 1)
        rots = set()
        for r in P.relators:
            for w in (r, r.inverse()):
                cyc = _cyclic_reduce(self._encode(w))
                for k in range(len(cyc)):
                    rots.add(cyc[k:] + cyc[:k])
        self._rotations = sorted(rots, key=lambda x: (len(x), x))
        self._max_rel = max((len(x) for x in self._rotations), default=0)
        self._hom_cache: list[tuple[FiniteGroup, np.ndarray]] | None = None
        self._ab = abelianization_matrix(P)

    def _encode(self, w: Word) -> tuple[int, ...]:
        return tuple(self._code[l] for l in w.letters)

    def _quotients(self) -> Iterator[tuple[FiniteGroup, np.ndarray]]:
        if self._hom_cache is not None:
            yield from self._hom_cache
            return
        cache = []
        for G in enumerate_finite_groups(self.config.max_quotient_order):
            if G.order == 1:
                continue
            imgs = hom_images(self.P, G)
            # drop the trivial hom, it proves nothing
            imgs = imgs[(imgs != G.identity).any(axis=1)] if imgs.shape[1] else imgs[:0]
            cache.append((G, imgs))
            yield G, imgs
        self._hom_cache = cache

    def _nontrivial_in(self, w: Word, G: FiniteGroup, imgs: np.ndarray) -> bool:
        if imgs.shape[0] == 0:
            return False
        idx = {g: i for i, g in enumerate(self.P.generators)}
        wg, we, wo = _accel.flatten_words([w.letters], idx)
        vals = np.asarray(_accel.eval_words(G.table, G.inverses, G.identity, imgs, wg, we, wo))
        return bool((vals[:, 0] != G.identity).any())

    def _trivial_search(self, w: Word) -> Iterator[bool]:
        """Yields False per chunk of work; yields True once the word is shown trivial."""
        start = _free_reduce_codes(self._encode(w))
        if not start:
            yield True
            return
        limit = len(start) + 2 * self._max_rel + 2
        seen = {start}
        heap = [(len(start), 0, start)]
        counter = 1
        budget = self.config.max_relator_products
        used = 0
        while heap and used < budget:
            _, _, u = heapq.heappop(heap)
            for i in range(len(u) + 1):
                for rel in self._rotations:
                    v = _free_reduce_codes(u[:i] + rel + u[i:])
                    used += 1
                    if not v:
                        yield True
                        return
                    if len(v) <= limit and v not in seen:
                        seen.add(v)
                        heapq.heappush(heap, (len(v), counter, v))
                        counter += 1
                    if used % self.config.chunk == 0:
                        yield False
                    if used >= budget:
                        break
                if used >= budget:
                    break

    def solve(self, w: Word) -> str:
        if not w:
            return "trivial"
        if not self.P.relators:
            return "nontrivial"  # free group, reduced word
        # abelianization quotient
        v = exponent_vector(w, self.P.generators)
        if any(v) and solve_linear(self._ab, v).is_empty:
            return "nontrivial"
        triv = self._trivial_search(w)
        quot = self._quotients()
        triv_live = quot_live = True
        while triv_live or quot_live:
            if triv_live:
                for step in triv:
                    if step:
                        return "trivial"
                    break
                else:
                    triv_live = False
            if quot_live:
                nxt = next(quot, None)
                if nxt is None:
                    quot_live = False
                elif self._nontrivial_in(w, *nxt):
                    return "nontrivial"
        return "inconclusive"


def _free_reduce_codes(seq) -> tuple[int, ...]:
    out: list[int] = []
    for x in seq:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def _cyclic_reduce(seq) -> tuple[int, ...]:
    s = list(_free_reduce_codes(seq))
    while len(s) >= 2 and s[0] == -s[-1]:
        s = s[1:-1]
    return tuple(s)


def word_problem(P: Presentation, w: Word, config: WordProblemConfig | None = None) -> str:
    """Return ``"trivial"``, ``"nontrivial"`` or ``"inconclusive"``."""
    return WordProblemSolver(P, config).solve(w)


# --- structure extraction ----------------------------------------------------------

@dataclass
class VabStructure:
    data: VabData
    phi: FiniteHom
    kernel_basis: list[Word]
    transversal: SchreierTransversal
    generator_images: dict[str, ExtElement]
    _coords: IntMatrix = field(repr=False, default=None)
    _rank: int = field(repr=False, default=0)
    _labels: tuple[str, ...] = field(repr=False, default=())

    def kernel_coordinates(self, w: Word) -> Vector:
        """Coordinates in the kernel basis of a word over the presentation's generators."""
        rw = rewrite_in_kernel(self.transversal, w)
        v = exponent_vector(rw, self._labels)
        return tuple((self._coords @ v)[self._rank:])

    def element_of(self, w: Word) -> ExtElement:
        return ext_eval_word(self.data, self.generator_images, w)

    def word_for(self, x: ExtElement) -> Word:
        """A word over the presentation's generators representing ``x``."""
        out = EMPTY
        for k, b in zip(x.vec, self.kernel_basis):
            out = out * (b ** k)
        return out * self.transversal.reps[x.fin]


@dataclass
class VabSearchReport:
    examined: list[str] = field(default_factory=list)
    diagnostics: list[str] = field(default_factory=list)
    inconclusive: bool = False


def _try_candidate(P: Presentation, phi: FiniteHom, solver: WordProblemSolver,
                   report: VabSearchReport) -> VabStructure | None:
    F = phi.codomain
    kp = reidemeister_schreier(P, phi)
    t = kp.transversal
    labels = kp.presentation.generators
    words = [kp.inclusion[l] for l in labels]
    tag = f"{F.name} images {list(phi.images)}"
    for i, j in itertools.combinations(range(len(words)), 2):
        verdict = solver.solve(commutator(words[i], words[j]))
        if verdict == "nontrivial":
            report.examined.append(f"{tag}: kernel not abelian")
            return None
        if verdict == "inconclusive":
            msg = f"{tag}: word problem inconclusive for [{labels[i]}, {labels[j]}]"
            report.diagnostics.append(msg)
            report.inconclusive = True
            log.info(msg)
            return None
    A = abelianization_matrix(kp.presentation)
    snf = smith_normal_form(A)
    if any(x > 1 for x in snf.invariant_factors):
        report.examined.append(f"{tag}: kernel has torsion")
        return None
    r = snf.rank
    n = len(labels)
    d = n - r
    U = snf.U
    Uinv = inverse_unimodular(U)
    basis_words = []
    for j in range(r, n):
        col = Uinv.column(j)
        w = EMPTY
        for lab, k in zip(labels, col):
            w = w * (letter(lab) ** k)
        basis_words.append(expand(t, w))

    def coords(w: Word) -> Vector:
        v = exponent_vector(rewrite_in_kernel(t, w), labels)
        return tuple((U @ v)[r:])

    reps = t.reps
    action = []
    for g in range(F.order):
        x = reps[g]
        cols = [coords(x * b * x.inverse()) for b in basis_words]
        action.append(IntMatrix.from_columns(cols, d) if d else IntMatrix.zeros(0, 0))
    cocycle = tuple(
        tuple(coords(reps[g] * reps[h] * reps[F.mul(g, h)].inverse()) for h in range(F.order))
        for g in range(F.order))
    data = VabData(F, d, tuple(action), cocycle)
    if not verify_vab(data):
        raise AssertionError(f"{tag}: extracted extension data fails the cocycle checks")
    gen_images = {s: ExtElement(coords(letter(s) * reps[phi.image(s)].inverse()), phi.image(s))
                  for s in P.generators}
    report.examined.append(f"{tag}: free abelian kernel of rank {d}")
    return VabStructure(data, phi, basis_words, t, gen_images, U, r, labels)


def vab_structure(P: Presentation, max_order: int = 24, wp_config: WordProblemConfig | None = None,
                  report: VabSearchReport | None = None) -> VabStructure | None:
    """Find ``F``, an epimorphism onto it with free abelian kernel, and the extension data.

    Returns None when no candidate up to ``max_order`` succeeds (``report``
    says whether word-problem bounds were hit).
    """
    report = report if report is not None else VabSearchReport()
    solver = WordProblemSolver(P, wp_config)
    for F in enumerate_finite_groups(max_order):
        for phi in iter_epis(P, F):
            found = _try_candidate(P, phi, solver, report)
            if found is not None:
                return found
    return None


def extension_presentation(L: VabData) -> Presentation:
    """A finite presentation of the extension group on generators ``b1..bd`` and ``f0..``."""
    F, d = L.F, L.d
    bs = [f"b{i + 1}" for i in range(d)]
    fs = [f"f{g}" for g in range(F.order)]

    def bvec(v):
        w = EMPTY
        for name, k in zip(bs, v):
            w = w * (letter(name) ** k)
        return w

    rels = [letter(fs[F.identity])]
    for i, j in itertools.combinations(range(d), 2):
        rels.append(commutator(letter(bs[i]), letter(bs[j])))
    for g in range(F.order):
        for j in range(d):
            rels.append(letter(fs[g]) * letter(bs[j]) * letter(fs[g]).inverse() * bvec(L.C(g).column(j)).inverse())
        for h in range(F.order):
            rels.append(letter(fs[g]) * letter(fs[h]) * (bvec(L.c(g, h)) * letter(fs[F.mul(g, h)])).inverse())
    rels = [r for r in rels if r]
    return Presentation(tuple(bs + fs), tuple(rels))
