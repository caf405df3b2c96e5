"""Slow, obviously-correct reference implementations used by the tests."""

import itertools


def cayley_tables(n):
    """Every group table on 0..n-1 with identity 0 (Latin square + associativity backtracking)."""
    t = [[None] * n for _ in range(n)]
    for i in range(n):
        t[0][i] = i
        t[i][0] = i
    cells = [(i, j) for i in range(1, n) for j in range(1, n)]
    out = []

    def assoc_ok():
        for a in range(1, n):
            for b in range(1, n):
                ab = t[a][b]
                if ab is None:
                    continue
                for c in range(1, n):
                    bc = t[b][c]
                    if bc is None:
                        continue
                    lhs, rhs = t[ab][c], t[a][bc]
                    if lhs is not None and rhs is not None and lhs != rhs:
                        return False
        return True

    def rec(k):
        if k == len(cells):
            out.append(tuple(tuple(r) for r in t))
            return
        i, j = cells[k]
        used = {t[i][c] for c in range(n)} | {t[r][j] for r in range(n)}
        for v in range(n):
            if v not in used:
                t[i][j] = v
                if assoc_ok():
                    rec(k + 1)
                t[i][j] = None

    rec(0)
    return out


def canonical_table(T):
    """Lexicographically least relabelling fixing the identity."""
    n = len(T)
    best = None
    for p in itertools.permutations(range(1, n)):
        m = (0,) + p
        inv = [0] * n
        for i, x in enumerate(m):
            inv[x] = i
        R = tuple(tuple(m[T[inv[a]][inv[b]]] for b in range(n)) for a in range(n))
        if best is None or R < best:
            best = R
    return best


def isomorphism_classes(n):
    return {canonical_table(T) for T in cayley_tables(n)}


def closure(table, gens, identity=0):
    seen = {identity}
    frontier = [identity]
    while frontier:
        x = frontier.pop()
        for g in gens:
            y = int(table[x][g])
            if y not in seen:
                seen.add(y)
                frontier.append(y)
    return seen


def evaluate(table, inverses, identity, images, word, gens):
    acc = identity
    for s, e in word.letters:
        x = images[gens.index(s)]
        acc = int(table[acc][x if e > 0 else inverses[x]])
    return acc


def brute_homs(P, G):
    """All image tuples in lexicographic order, and the subset that are onto."""
    homs, epis = [], []
    for imgs in itertools.product(range(G.order), repeat=P.rank):
        if all(evaluate(G.table, G.inverses, G.identity, imgs, r, P.generators) == G.identity for r in P.relators):
            homs.append(imgs)
            if len(closure(G.table, imgs, G.identity)) == G.order:
                epis.append(imgs)
    return homs, epis


def gcd_list(v):
    from math import gcd
    g = 0
    for x in v:
        g = gcd(g, x)
    return g
