"""Top-level decisions: epimorphisms onto Z^d x F and onto virtually cyclic groups."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any

from .colgen import CgInstance, column_unimodular_check, decide_epi_extension_free, decide_unimodular_point_1d
from .finite_groups import FiniteGroup, FiniteHom, generates, iter_epis, make_hom
from .intlinalg import IntMatrix, ModulePresentation, affine_image, solve_linear, vector_gcd
from .rewriting import kernel_generators, kernel_presentation, schreier_transversal
from .vab import (
    ExtElement,
    VabData,
    VabSearchReport,
    VabStructure,
    WordProblemConfig,
    assemble_homlike_system,
    ext_eval_word,
    images_from_homlike,
    kernel_restriction_map,
    vab_structure,
)
from .words import Presentation, Word, abelianization_matrix, exponent_vector, plus_name, symmetrize

log = logging.getLogger(__name__)


class WitnessError(AssertionError):
    """A witness failed independent re-verification (an internal bug)."""


class TargetStructureError(ValueError):
    pass


@dataclass
class Answer:
    verdict: str                                   # "yes" | "no" | "inconclusive"
    witness: dict[str, Any] | None = None
    trace: list[dict[str, Any]] = field(default_factory=list)
    target: dict[str, Any] | None = None

    @property
    def yes(self) -> bool:
        return self.verdict == "yes"

    def to_json(self) -> dict:
        out = {"verdict": self.verdict, "witness": self.witness, "trace": self.trace}
        if self.target is not None:
            out["target"] = self.target
        return out


@dataclass
class DecisionConfig:
    max_order: int = 24
    wp: WordProblemConfig = field(default_factory=WordProblemConfig)


# --- Z^d x F --------------------------------------------------------------------------

def _restrict_to_original(P: Presentation, Ps: Presentation, phi: FiniteHom) -> FiniteHom:
    return make_hom(P, phi.codomain, [phi.image(plus_name(s)) for s in P.generators])


def verify_product_witness(P: Presentation, d: int, F: FiniteGroup, images: dict[str, tuple[tuple[int, ...], int]]) -> None:
    """Raise :class:`WitnessError` unless ``images`` defines an epimorphism ``P -> Z^d x F``."""
    for r in P.relators:
        vec = [0] * d
        fin = F.identity
        for s, e in r.letters:
            v, y = images[s]
            vec = [a + e * b for a, b in zip(vec, v)]
            fin = F.mul(fin, y if e > 0 else F.inv(y))
        if any(vec) or fin != F.identity:
            raise WitnessError(f"relator {r} does not map to the identity")
    fin_images = [images[s][1] for s in P.generators]
    if not generates(F, fin_images):
        raise WitnessError("finite part of the image is a proper subgroup")
    # the image meets Z^d x {e} in the image of ker(phi)
    phi = make_hom(P, F, fin_images)
    t = schreier_transversal(P, phi)
    vecs = []
    for _, w in kernel_generators(t):
        v = [0] * d
        for s, e in w.letters:
            v = [a + e * b for a, b in zip(v, images[s][0])]
        vecs.append(v)
    if not column_unimodular_check(vecs, d):
        raise WitnessError("free part of the image is a proper sublattice")


def decide_epi_product(P: Presentation, d: int, F: FiniteGroup) -> Answer:
    """Decide whether ``P`` surjects onto ``Z^d x F``."""
    if d < 0:
        raise ValueError("d must be nonnegative")
    Ps = symmetrize(P)
    A2 = abelianization_matrix(Ps)
    trace: list[dict] = []
    for phi in iter_epis(Ps, F):
        kp = kernel_presentation(Ps, phi)
        A1 = abelianization_matrix(kp.presentation)
        kappa = IntMatrix.from_columns(
            [exponent_vector(kp.inclusion[g], Ps.generators) for g in kp.presentation.generators], Ps.rank)
        res = decide_epi_extension_free(ModulePresentation(A1), ModulePresentation(A2), kappa, d)
        entry = {"phi": _images_json(phi, P), "outcome": "extends" if res else "no free extension"}
        trace.append(entry)
        if res is None:
            continue
        images = {}
        for s in P.generators:
            j = Ps.index(plus_name(s))
            images[s] = (res.psi_tilde.column(j), phi.image(plus_name(s)))
        verify_product_witness(P, d, F, images)
        witness = {s: {"vec": list(v), "fin": F.elements[y]} for s, (v, y) in images.items()}
        return Answer("yes", witness, trace, {"d": d, "finite": F.to_json()})
    if not trace:
        trace.append({"phi": None, "outcome": "no epimorphism onto the finite group"})
    return Answer("no", None, trace, {"d": d, "finite": F.to_json()})


# --- virtually cyclic -------------------------------------------------------------------

def verify_ext_witness(P: Presentation, L: VabData, images: dict[str, ExtElement]) -> None:
    for r in P.relators:
        if ext_eval_word(L, images, r) != L.identity:
            raise WitnessError(f"relator {r} does not map to the identity")
    fin_images = [images[s].fin for s in P.generators]
    if not generates(L.F, fin_images):
        raise WitnessError("image does not surject onto the finite quotient")
    phi = make_hom(P, L.F, fin_images)
    t = schreier_transversal(P, phi)
    vecs = []
    for _, w in kernel_generators(t):
        x = ext_eval_word(L, images, w)
        assert x.fin == L.F.identity
        vecs.append(x.vec)
    if not column_unimodular_check(vecs, L.d):
        raise WitnessError("image does not contain the whole lattice part")


def _images_json(phi: FiniteHom, P: Presentation) -> dict[str, str]:
    return {s: phi.codomain.elements[phi.image(plus_name(s))] for s in P.generators}


def decide_epi_virtually_cyclic(P: Presentation, Q: Presentation, config: DecisionConfig | None = None,
                                structure: VabStructure | None = None) -> Answer:
    """Decide whether ``P`` surjects onto the virtually cyclic group presented by ``Q``."""
    config = config or DecisionConfig()
    if structure is None:
        report = VabSearchReport()
        structure = vab_structure(Q, config.max_order, config.wp, report)
        if structure is None:
            why = "word-problem bounds hit" if report.inconclusive else "no candidate up to max order"
            return Answer("inconclusive", None, [{"phi": None, "outcome": f"target structure not found: {why}",
                                                   "diagnostics": report.diagnostics}])
    L = structure.data
    if L.d != 1:
        raise TargetStructureError(f"target is virtually Z^{L.d}, not virtually cyclic")
    target = {"vab": L.to_json(), "generators": list(Q.generators)}
    Ps = symmetrize(P)
    trace: list[dict] = []
    for phi in iter_epis(Ps, L.F):
        entry = {"phi": _images_json(phi, P)}
        trace.append(entry)
        lat = assemble_homlike_system(Ps, phi, L)
        if lat.is_empty:
            entry["outcome"] = "no hom-like maps"
            continue
        t = schreier_transversal(Ps, phi)
        T = kernel_generators(t)
        M, c = kernel_restriction_map(phi, T, L)
        K = affine_image(M, c, lat)
        res = decide_unimodular_point_1d(CgInstance(K.dim, K.basis, K.offset))
        if res is None:
            entry["outcome"] = "no generating restriction"
            continue
        entry["outcome"] = "extends"
        f = _lift_to_homlike(lat, M, c, res.point)
        sym_images = images_from_homlike(f, phi, L)
        images = {s: sym_images[plus_name(s)] for s in P.generators}
        verify_ext_witness(P, L, images)
        witness = {s: {"vec": list(x.vec), "fin": L.F.elements[x.fin],
                       "word": str(structure.word_for(x))} for s, x in images.items()}
        return Answer("yes", witness, trace, target)
    if not trace:
        trace.append({"phi": None, "outcome": "no epimorphism onto the finite quotient"})
    return Answer("no", None, trace, target)


def _lift_to_homlike(lat, M: IntMatrix, c, point) -> tuple[int, ...]:
    """A hom-like ``f`` in ``lat`` whose kernel restriction is ``point``."""
    B = IntMatrix.from_columns(list(lat.basis), lat.dim) if lat.basis else IntMatrix.zeros(lat.dim, 0)
    rhs = [p - a - b for p, a, b in zip(point, c, M @ lat.offset)]
    sol = solve_linear(M @ B, rhs)
    if sol.is_empty:
        raise WitnessError("restriction point has no hom-like preimage")
    return lat.element(sol.offset)


# --- JSON re-verification -----------------------------------------------------------------

def verify_answer_json(P: Presentation, obj: dict) -> None:
    """Re-check a serialized yes answer against ``P``; raises on failure."""
    if obj.get("verdict") != "yes":
        return
    target = obj["target"]
    wit = obj["witness"]
    if "vab" in target:
        L = VabData.from_json(target["vab"])
        lab = {name: i for i, name in enumerate(L.F.elements)}
        images = {s: ExtElement(tuple(int(v) for v in wit[s]["vec"]), lab[wit[s]["fin"]]) for s in P.generators}
        verify_ext_witness(P, L, images)
    else:
        F = FiniteGroup.from_json(target["finite"])
        lab = {name: i for i, name in enumerate(F.elements)}
        d = int(target["d"])
        images = {s: (tuple(int(v) for v in wit[s]["vec"]), lab[wit[s]["fin"]]) for s in P.generators}
        verify_product_witness(P, d, F, images)
