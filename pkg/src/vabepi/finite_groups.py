"""Finite groups given by Cayley tables, and homomorphisms into them."""

from __future__ import annotations

import itertools
import json
import logging
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import _accel
from .words import Presentation, Word

log = logging.getLogger(__name__)


class GroupAxiomError(ValueError):
    pass


class FiniteGroup:
    """A finite group as a multiplication table on indices ``0..order-1``.

    ``table[a, b]`` is the index of the product ``a * b``.  The group axioms
    are verified on construction.
    """

    def __init__(self, table, identity: int = 0, elements: Sequence[str] | None = None, name: str | None = None):
        t = np.asarray(table, dtype=np.int64)
        if t.ndim != 2 or t.shape[0] != t.shape[1] or t.shape[0] == 0:
            raise GroupAxiomError("table must be a nonempty square matrix")
        n = t.shape[0]
        if t.min() < 0 or t.max() >= n:
            raise GroupAxiomError("closure fails: table entries out of range")
        if not 0 <= identity < n:
            raise GroupAxiomError("identity index out of range")
        ar = np.arange(n)
        if not (np.array_equal(t[identity], ar) and np.array_equal(t[:, identity], ar)):
            raise GroupAxiomError(f"identity fails: element {identity} is not a two-sided identity")
        hits = np.argwhere(t == identity)
        inv = np.full(n, -1, dtype=np.int64)
        for a, b in hits:
            if t[b, a] == identity:
                inv[a] = b
        missing = np.nonzero(inv < 0)[0]
        if missing.size:
            raise GroupAxiomError(f"inverses fail: element {int(missing[0])} has no two-sided inverse")
        if not _accel.associative(t):
            raise GroupAxiomError("associativity fails")
        t.setflags(write=False)
        inv.setflags(write=False)
        self.table = t
        self.identity = int(identity)
        self.inverses = inv
        self.elements = tuple(elements) if elements is not None else tuple(str(i) for i in range(n))
        if len(self.elements) != n:
            raise ValueError("wrong number of element labels")
        self.name = name

    @property
    def order(self) -> int:
        return self.table.shape[0]

    def __len__(self) -> int:
        return self.order

    def __repr__(self) -> str:
        return f"FiniteGroup({self.name or 'order ' + str(self.order)})"

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def inv(self, a: int) -> int:
        return int(self.inverses[a])

    def prod(self, xs: Iterable[int]) -> int:
        acc = self.identity
        for x in xs:
            acc = int(self.table[acc, x])
        return acc

    def power(self, a: int, k: int) -> int:
        if k < 0:
            a, k = self.inv(a), -k
        acc = self.identity
        for _ in range(k):
            acc = int(self.table[acc, a])
        return acc

    @cached_property
    def element_orders(self) -> tuple[int, ...]:
        out = []
        for a in range(self.order):
            k, x = 1, a
            while x != self.identity:
                x = int(self.table[x, a])
                k += 1
            out.append(k)
        return tuple(out)

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))

    def generating_set(self) -> list[int]:
        """A small generating set, chosen greedily by decreasing element order."""
        gens: list[int] = []
        mask = np.zeros(self.order, dtype=bool)
        mask[self.identity] = True
        candidates = sorted(range(self.order), key=lambda a: (-self.element_orders[a], a))
        for a in candidates:
            if mask.all():
                break
            if not mask[a]:
                gens.append(a)
                mask = subgroup_mask(self, gens)
        return gens

    def invariant_key(self) -> tuple:
        """Cheap isomorphism invariant used to bucket candidates."""
        center = sum(1 for a in range(self.order) if np.array_equal(self.table[a], self.table[:, a]))
        squares = len({int(self.table[a, a]) for a in range(self.order)})
        comm = len({int(self.table[self.table[a, b], self.table[self.inverses[a], self.inverses[b]]])
                    for a in range(self.order) for b in range(self.order)})
        return (self.order, tuple(sorted(Counter(self.element_orders).items())), center, squares, comm)

    def to_json(self) -> dict:
        return {"elements": list(self.elements), "identity": self.identity,
                "table": self.table.tolist()}

    @classmethod
    def from_json(cls, obj) -> "FiniteGroup":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(obj["table"], int(obj.get("identity", 0)), obj.get("elements"), obj.get("name"))

    # constructors -------------------------------------------------------

    @classmethod
    def trivial(cls) -> "FiniteGroup":
        return cls([[0]], 0, ["e"], name="1")

    @classmethod
    def cyclic(cls, n: int) -> "FiniteGroup":
        ar = np.arange(n)
        return cls((ar[:, None] + ar[None, :]) % n, 0, [str(i) for i in range(n)], name=f"Z/{n}")

    @classmethod
    def from_permutations(cls, generators: Sequence[Sequence[int]], name: str | None = None) -> "FiniteGroup":
        """The permutation group generated by ``generators`` (images of 0..k-1)."""
        gens = [tuple(g) for g in generators]
        if not gens:
            return cls.trivial()
        deg = len(gens[0])
        ident = tuple(range(deg))
        elems = [ident]
        seen = {ident: 0}
        i = 0
        while i < len(elems):
            x = elems[i]
            for g in gens:
                y = tuple(g[x[k]] for k in range(deg))  # apply x then g
                if y not in seen:
                    seen[y] = len(elems)
                    elems.append(y)
            i += 1
        n = len(elems)
        table = np.empty((n, n), dtype=np.int64)
        for a, x in enumerate(elems):
            for b, y in enumerate(elems):
                # a*b means "apply a, then b"
                table[a, b] = seen[tuple(y[x[k]] for k in range(deg))]
        return cls(table, 0, [_perm_label(p) for p in elems], name=name)

    @classmethod
    def symmetric(cls, n: int) -> "FiniteGroup":
        if n <= 1:
            return cls.trivial()
        cyc = tuple(list(range(1, n)) + [0])
        tr = tuple([1, 0] + list(range(2, n)))
        return cls.from_permutations([tr, cyc], name=f"S{n}")

    @classmethod
    def dihedral(cls, n: int) -> "FiniteGroup":
        """Dihedral group of order ``2n``."""
        if n <= 2:
            g = direct_product(cls.cyclic(2), cls.cyclic(n)) if n == 2 else cls.cyclic(2)
            g.name = f"D{n}"
            return g
        rot = tuple((i + 1) % n for i in range(n))
        ref = tuple((-i) % n for i in range(n))
        return cls.from_permutations([rot, ref], name=f"D{n}")


def _perm_label(p: tuple[int, ...]) -> str:
    seen = set()
    cycles = []
    for i in range(len(p)):
        if i in seen or p[i] == i:
            continue
        cyc = [i]
        seen.add(i)
        j = p[i]
        while j != i:
            cyc.append(j)
            seen.add(j)
            j = p[j]
        cycles.append("(" + " ".join(str(k + 1) for k in cyc) + ")")
    return "".join(cycles) or "()"


def direct_product(G: FiniteGroup, H: FiniteGroup) -> FiniteGroup:
    n, m = G.order, H.order
    a = np.arange(n * m)
    gi, hi = a // m, a % m
    table = G.table[gi[:, None], gi[None, :]] * m + H.table[hi[:, None], hi[None, :]]
    labels = [f"({x},{y})" for x in G.elements for y in H.elements]
    return FiniteGroup(table, G.identity * m + H.identity, labels,
                       name=f"{G.name}x{H.name}" if G.name and H.name else None)


def subgroup_mask(G: FiniteGroup, T: Iterable[int]) -> np.ndarray:
    gens = np.asarray(sorted(set(int(t) for t in T)), dtype=np.int64)
    return np.asarray(_accel.closure_mask(G.table, G.inverses, gens, G.identity))


def subgroup_closure(G: FiniteGroup, T: Iterable[int]) -> frozenset[int]:
    """Elements of the subgroup generated by ``T``."""
    return frozenset(int(i) for i in np.nonzero(subgroup_mask(G, T))[0])


def generates(G: FiniteGroup, T: Iterable[int]) -> bool:
    return bool(subgroup_mask(G, T).all())


# --- homomorphisms from finitely presented groups --------------------------------

@dataclass(frozen=True)
class FiniteHom:
    """Generator images of a homomorphism from a presented group to ``codomain``."""

    domain: Presentation
    codomain: FiniteGroup
    images: tuple[int, ...]
    surjective: bool

    def __post_init__(self):
        if len(self.images) != self.domain.rank:
            raise ValueError("one image per generator required")
        for r in self.domain.relators:
            if self.evaluate(r) != self.codomain.identity:
                raise ValueError(f"relator {r} does not map to the identity")

    @property
    def image_map(self) -> dict[str, int]:
        return dict(zip(self.domain.generators, self.images))

    def image(self, name: str) -> int:
        return self.images[self.domain.index(name)]

    def evaluate(self, w: Word) -> int:
        G = self.codomain
        idx = {g: i for i, g in enumerate(self.domain.generators)}
        acc = G.identity
        for s, e in w.letters:
            x = self.images[idx[s]]
            if e < 0:
                x = int(G.inverses[x])
            acc = int(G.table[acc, x])
        return acc

    def to_json(self) -> dict:
        return {g: self.codomain.elements[i] for g, i in zip(self.domain.generators, self.images)}


def make_hom(P: Presentation, G: FiniteGroup, images: Sequence[int]) -> FiniteHom:
    imgs = tuple(int(i) for i in images)
    return FiniteHom(P, G, imgs, generates(G, imgs))


def _relator_arrays(P: Presentation):
    idx = {g: i for i, g in enumerate(P.generators)}
    wg, we, wo = _accel.flatten_words([r.letters for r in P.relators], idx)
    depth = np.array([max((idx[s] for s, _ in r.letters), default=-1) for r in P.relators], dtype=np.int64)
    return wg, we, wo, depth


def hom_images(P: Presentation, G: FiniteGroup) -> np.ndarray:
    """All generator-image tuples killing the relators, lexicographically ordered."""
    wg, we, wo, depth = _relator_arrays(P)
    return np.asarray(_accel.enumerate_hom_images(G.table, G.inverses, G.identity, P.rank, wg, we, wo, depth))


def enumerate_homs(P: Presentation, G: FiniteGroup) -> list[FiniteHom]:
    return [FiniteHom(P, G, tuple(int(x) for x in row), generates(G, row)) for row in hom_images(P, G)]


def iter_epis(P: Presentation, G: FiniteGroup) -> Iterator[FiniteHom]:
    for row in hom_images(P, G):
        if generates(G, row):
            yield FiniteHom(P, G, tuple(int(x) for x in row), True)


def enumerate_epis(P: Presentation, G: FiniteGroup) -> list[FiniteHom]:
    return list(iter_epis(P, G))


def count_epis(P: Presentation, G: FiniteGroup) -> int:
    return sum(1 for row in hom_images(P, G) if generates(G, row))


# --- isomorphisms ----------------------------------------------------------------

def _extend_from_generators(G: FiniteGroup, H: FiniteGroup, gens: Sequence[int], imgs: Sequence[int]):
    """Extend a generator assignment along the Cayley graph; None if it is not an isomorphism."""
    f = np.full(G.order, -1, dtype=np.int64)
    f[G.identity] = H.identity
    queue = [G.identity]
    used = np.zeros(H.order, dtype=bool)
    used[H.identity] = True
    head = 0
    while head < len(queue):
        x = queue[head]
        head += 1
        fx = f[x]
        for g, h in zip(gens, imgs):
            y = G.table[x, g]
            fy = H.table[fx, h]
            if f[y] < 0:
                if used[fy]:
                    return None
                f[y] = fy
                used[fy] = True
                queue.append(int(y))
            elif f[y] != fy:
                return None
    if head != G.order:
        return None
    return f


def isomorphisms(G: FiniteGroup, H: FiniteGroup, first_only: bool = False) -> Iterator[np.ndarray]:
    """Yield isomorphisms ``G -> H`` as index arrays."""
    if G.order != H.order:
        return
    if G.invariant_key() != H.invariant_key():
        return
    gens = G.generating_set()
    h_orders = H.element_orders
    choices = [[h for h in range(H.order) if h_orders[h] == G.element_orders[g]] for g in gens]
    for imgs in itertools.product(*choices):
        if len(set(imgs)) != len(imgs):
            continue
        f = _extend_from_generators(G, H, gens, imgs)
        if f is not None:
            yield f
            if first_only:
                return


def are_isomorphic(G: FiniteGroup, H: FiniteGroup) -> bool:
    return next(isomorphisms(G, H, first_only=True), None) is not None


def automorphisms(G: FiniteGroup) -> list[np.ndarray]:
    return list(isomorphisms(G, G))


# --- enumeration of isomorphism types --------------------------------------------

def _prime_divisors(n: int) -> list[int]:
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def _cyclic_extension(N: FiniteGroup, alpha: np.ndarray, a: int, p: int) -> FiniteGroup:
    """Group ``N <g>`` with ``g n g^-1 = alpha(n)`` and ``g^p = a``; element ``i*|N| + n`` is ``n g^i``."""
    m = N.order
    powers = [np.arange(m)]
    for _ in range(p - 1):
        powers.append(alpha[powers[-1]])
    idx = np.arange(m * p)
    gi, ni = idx // m, idx % m
    # (n1 g^i)(n2 g^j) = n1 alpha^i(n2) g^(i+j)
    conj = np.stack(powers)[gi[:, None], ni[None, :]]           # alpha^i(n2)
    prod_n = N.table[ni[:, None], conj]
    s = gi[:, None] + gi[None, :]
    wrap = s >= p
    prod_n = np.where(wrap, N.table[prod_n, a], prod_n)
    table = (s % p) * m + prod_n
    return FiniteGroup(table, N.identity, None)


_GROUP_CACHE: dict[int, list[FiniteGroup]] = {1: [FiniteGroup.trivial()]}


def _sort_key(G: FiniteGroup):
    return (not G.is_abelian(), -max(G.element_orders), G.invariant_key())


def groups_of_order(n: int) -> list[FiniteGroup]:
    """One representative per isomorphism type of groups of order ``n``.

    Groups are built as cyclic extensions of groups of order ``n/p`` by a
    normal subgroup of prime index ``p``.  Every solvable group arises this
    way, so the list is complete for all ``n < 60``.
    """
    if n in _GROUP_CACHE:
        return _GROUP_CACHE[n]
    if n >= 60:
        log.warning("groups of order %d: only solvable groups are produced", n)
    reps: list[FiniteGroup] = []
    buckets: dict[tuple, list[FiniteGroup]] = {}
    for p in _prime_divisors(n):
        for N in groups_of_order(n // p):
            m = N.order
            for alpha in automorphisms(N):
                alpha_p = np.arange(m)
                for _ in range(p):
                    alpha_p = alpha[alpha_p]
                for a in range(m):
                    if alpha[a] != a:
                        continue
                    # alpha^p must be conjugation by a
                    inner = N.table[N.table[a, np.arange(m)], N.inverses[a]]
                    if not np.array_equal(alpha_p, inner):
                        continue
                    G = _cyclic_extension(N, alpha, a, p)
                    key = G.invariant_key()
                    bucket = buckets.setdefault(key, [])
                    if any(are_isomorphic(G, H) for H in bucket):
                        continue
                    bucket.append(G)
                    reps.append(G)
    reps.sort(key=_sort_key)
    for i, G in enumerate(reps):
        G.name = f"G{n}_{i + 1}"
        G.elements = tuple(f"g{j}" for j in range(n))
    _GROUP_CACHE[n] = reps
    return reps


def enumerate_finite_groups(max_order: int) -> Iterator[FiniteGroup]:
    """Stream one group per isomorphism type, by ascending order."""
    if max_order < 1:
        raise ValueError("max_order must be at least 1")
    for n in range(1, max_order + 1):
        yield from groups_of_order(n)
