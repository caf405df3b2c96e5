"""Schreier transversals and Reidemeister-Schreier rewriting for kernels of maps onto finite groups."""

from __future__ import annotations

from dataclasses import dataclass, field

from .finite_groups import FiniteHom
from .words import EMPTY, Presentation, Word, letter, minus_name, plus_name, symmetrize


class NotInKernelError(ValueError):
    pass


@dataclass(frozen=True)
class SchreierTransversal:
    """Coset representatives of ``ker(hom)`` as a prefix-closed set of positive words.

    ``reps[f]`` is the representative of the coset mapping to ``f``.  Kernel
    generators are ``reps[f] s reps[f*hom(s)]^-1``; freely trivial ones get no
    label.
    """

    hom: FiniteHom
    reps: dict[int, Word]
    labels: dict[tuple[int, str], str] = field(default_factory=dict)
    generator_words: dict[str, Word] = field(default_factory=dict)

    @property
    def presentation(self) -> Presentation:
        return self.hom.domain

    @property
    def group(self):
        return self.hom.codomain

    def coset_rep(self, w: Word) -> Word:
        return self.reps[self.hom.evaluate(w)]

    def step(self, f: int, s: str, e: int) -> int:
        G = self.group
        x = self.hom.image(s)
        if e < 0:
            x = G.inv(x)
        return G.mul(f, x)


def schreier_transversal(P: Presentation, phi: FiniteHom) -> SchreierTransversal:
    if phi.domain != P:
        raise ValueError("homomorphism is defined on a different presentation")
    if not phi.surjective:
        raise ValueError("schreier_transversal needs a surjective homomorphism")
    G = phi.codomain
    reps: dict[int, Word] = {G.identity: EMPTY}
    frontier = [G.identity]
    # breadth first over positive letters in generator order gives shortlex-minimal reps
    while frontier and len(reps) < G.order:
        nxt = []
        for f in frontier:
            for s in P.generators:
                g = G.mul(f, phi.image(s))
                if g not in reps:
                    reps[g] = reps[f] * letter(s)
                    nxt.append(g)
        frontier = nxt
    assert len(reps) == G.order
    t = SchreierTransversal(phi, reps)
    k = 0
    for f in sorted(reps):
        for s in P.generators:
            w = reps[f] * letter(s) * reps[G.mul(f, phi.image(s))].inverse()
            if w:
                k += 1
                t.labels[(f, s)] = f"t{k}"
                t.generator_words[f"t{k}"] = w
    return t


def kernel_generators(t: SchreierTransversal) -> list[tuple[str, Word]]:
    return list(t.generator_words.items())


def rewrite_in_kernel(t: SchreierTransversal, w: Word) -> Word:
    """Reidemeister rewriting of a kernel element into the kernel generator labels."""
    G = t.group
    f = G.identity
    out = []
    for s, e in w.letters:
        if e > 0:
            lab = t.labels.get((f, s))
            if lab is not None:
                out.append((lab, 1))
            f = t.step(f, s, 1)
        else:
            f = t.step(f, s, -1)
            lab = t.labels.get((f, s))
            if lab is not None:
                out.append((lab, -1))
    if f != G.identity:
        raise NotInKernelError(f"word {w} is not in the kernel")
    return Word(tuple(out))


def expand(t: SchreierTransversal, w: Word) -> Word:
    """Re-express a word in kernel labels as a word over the original generators."""
    out = EMPTY
    for lab, e in w.letters:
        g = t.generator_words[lab]
        out = out * (g if e > 0 else g.inverse())
    return out


@dataclass(frozen=True)
class KernelPresentation:
    presentation: Presentation
    inclusion: dict[str, Word]
    transversal: SchreierTransversal

    def inclusion_json(self) -> dict[str, str]:
        return {k: str(v) for k, v in self.inclusion.items()}


def reidemeister_schreier(P: Presentation, phi: FiniteHom) -> KernelPresentation:
    """Kernel presentation on the Schreier generators (not symmetrized)."""
    t = schreier_transversal(P, phi)
    rels: list[Word] = []
    seen = set()
    for f in sorted(t.reps):
        u = t.reps[f]
        for r in P.relators:
            rw = rewrite_in_kernel(t, u * r * u.inverse())
            if rw and rw not in seen:
                seen.add(rw)
                rels.append(rw)
    gens = tuple(t.generator_words)
    return KernelPresentation(Presentation(gens, tuple(rels)), dict(t.generator_words), t)


def kernel_presentation(P: Presentation, phi: FiniteHom) -> KernelPresentation:
    """Symmetric kernel presentation; the inclusion sends ``t_p``/``t_m`` to words over S."""
    raw = reidemeister_schreier(P, phi)
    sym = symmetrize(raw.presentation)
    inc: dict[str, Word] = {}
    for lab, w in raw.inclusion.items():
        inc[plus_name(lab)] = w
        inc[minus_name(lab)] = w.inverse()
    return KernelPresentation(sym, inc, raw.transversal)
