"""Hot finite-group kernels, compiled with numba when available.

Set ``VABEPI_DISABLE_NUMBA=1`` to force the vectorized numpy path.  Both
paths return identical results (same order); ``benchmarks/bench_kernels.py``
compares them.

Words are passed flat: ``word_gens`` holds generator indices, ``word_exps``
holds +1/-1, and ``word_offsets[k]:word_offsets[k+1]`` delimits word ``k``.
"""

from __future__ import annotations

import os

import numpy as np

_DISABLED = os.environ.get("VABEPI_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")

try:
    if _DISABLED:
        raise ImportError
    from numba import njit
    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

BACKEND = "numba" if HAVE_NUMBA else "numpy"


# --- numpy implementations ------------------------------------------------------

def _associative_np(table):
    n = table.shape[0]
    if n == 0:
        return True
    left = table[table, :]            # left[a, b, c] = (ab)c
    right = table[:, table]           # right[a, b, c] = a(bc)
    return bool(np.array_equal(left, right))


def _closure_np(table, inverses, gens, identity):
    n = table.shape[0]
    mask = np.zeros(n, dtype=np.bool_)
    mask[identity] = True
    gens = np.asarray(gens, dtype=np.int64)
    if gens.size == 0:
        return mask
    gens = np.unique(np.concatenate([gens, inverses[gens]]))
    frontier = np.array([identity], dtype=np.int64)
    while frontier.size:
        nxt = np.unique(table[np.ix_(frontier, gens)].ravel())
        nxt = nxt[~mask[nxt]]
        mask[nxt] = True
        frontier = nxt
    return mask


def _eval_words_np(table, inverses, identity, images, word_gens, word_exps, word_offsets):
    """Evaluate every word under every image row; returns (n_images, n_words)."""
    k = images.shape[0]
    nw = word_offsets.shape[0] - 1
    out = np.empty((k, nw), dtype=np.int64)
    for w in range(nw):
        acc = np.full(k, identity, dtype=np.int64)
        for pos in range(word_offsets[w], word_offsets[w + 1]):
            x = images[:, word_gens[pos]]
            if word_exps[pos] < 0:
                x = inverses[x]
            acc = table[acc, x]
        out[:, w] = acc
    return out


def _enumerate_homs_np(table, inverses, identity, n_gens, word_gens, word_exps, word_offsets, check_depth):
    """Breadth-first expansion of partial generator assignments, pruned by relators."""
    n = table.shape[0]
    partial = np.zeros((1, 0), dtype=np.int64)
    for depth in range(n_gens):
        m = partial.shape[0]
        if m == 0:
            break
        col = np.tile(np.arange(n, dtype=np.int64), m)
        partial = np.hstack([np.repeat(partial, n, axis=0), col[:, None]])
        ready = np.nonzero(check_depth == depth)[0]
        if ready.size == 0:
            continue
        full = np.zeros((partial.shape[0], n_gens), dtype=np.int64)
        full[:, :depth + 1] = partial
        keep = np.ones(partial.shape[0], dtype=np.bool_)
        for w in ready:
            vals = _eval_words_np(table, inverses, identity, full, word_gens, word_exps,
                                  word_offsets[w:w + 2])
            keep &= vals[:, 0] == identity
        partial = partial[keep]
    if n_gens == 0:
        return np.zeros((1, 0), dtype=np.int64)
    if partial.shape[1] != n_gens:
        return np.zeros((0, n_gens), dtype=np.int64)
    return partial


# --- numba implementations ------------------------------------------------------

def _associative_loop(table):
    n = table.shape[0]
    for a in range(n):
        for b in range(n):
            ab = table[a, b]
            for c in range(n):
                if table[ab, c] != table[a, table[b, c]]:
                    return False
    return True


def _closure_loop(table, inverses, gens, identity):
    n = table.shape[0]
    mask = np.zeros(n, dtype=np.bool_)
    mask[identity] = True
    m = gens.shape[0]
    allg = np.empty(2 * m, dtype=np.int64)
    for i in range(m):
        allg[i] = gens[i]
        allg[m + i] = inverses[gens[i]]
    queue = np.empty(n, dtype=np.int64)
    queue[0] = identity
    head = 0
    tail = 1
    while head < tail:
        x = queue[head]
        head += 1
        for i in range(2 * m):
            y = table[x, allg[i]]
            if not mask[y]:
                mask[y] = True
                queue[tail] = y
                tail += 1
    return mask


def _eval_words_loop(table, inverses, identity, images, word_gens, word_exps, word_offsets):
    k = images.shape[0]
    nw = word_offsets.shape[0] - 1
    out = np.empty((k, nw), dtype=np.int64)
    for i in range(k):
        for w in range(nw):
            acc = identity
            for pos in range(word_offsets[w], word_offsets[w + 1]):
                x = images[i, word_gens[pos]]
                if word_exps[pos] < 0:
                    x = inverses[x]
                acc = table[acc, x]
            out[i, w] = acc
    return out


def _enumerate_homs_loop(table, inverses, identity, n_gens, word_gens, word_exps, word_offsets, check_depth):
    """Depth-first backtracking over generator images in lexicographic order."""
    n = table.shape[0]
    if n_gens == 0:
        return np.zeros((1, 0), dtype=np.int64)
    cap = 64
    out = np.empty((cap, n_gens), dtype=np.int64)
    count = 0
    cur = np.zeros(n_gens, dtype=np.int64)
    nw = word_offsets.shape[0] - 1
    depth = 0
    cur[0] = -1
    while depth >= 0:
        cur[depth] += 1
        if cur[depth] >= n:
            depth -= 1
            continue
        ok = True
        for w in range(nw):
            if check_depth[w] != depth:
                continue
            acc = identity
            for pos in range(word_offsets[w], word_offsets[w + 1]):
                x = cur[word_gens[pos]]
                if word_exps[pos] < 0:
                    x = inverses[x]
                acc = table[acc, x]
            if acc != identity:
                ok = False
                break
        if not ok:
            continue
        if depth == n_gens - 1:
            if count == cap:
                bigger = np.empty((2 * cap, n_gens), dtype=np.int64)
                bigger[:cap] = out
                out = bigger
                cap *= 2
            out[count] = cur
            count += 1
        else:
            depth += 1
            cur[depth] = -1
    return out[:count].copy()


if HAVE_NUMBA:
    associative = njit(cache=True)(_associative_loop)
    closure_mask = njit(cache=True)(_closure_loop)
    eval_words = njit(cache=True)(_eval_words_loop)
    enumerate_hom_images = njit(cache=True)(_enumerate_homs_loop)
else:
    associative = _associative_np
    closure_mask = _closure_np
    eval_words = _eval_words_np
    enumerate_hom_images = _enumerate_homs_np

# always-available references, used by tests and the benchmark
numpy_kernels = {
    "associative": _associative_np,
    "closure_mask": _closure_np,
    "eval_words": _eval_words_np,
    "enumerate_hom_images": _enumerate_homs_np,
}
active_kernels = {
    "associative": associative,
    "closure_mask": closure_mask,
    "eval_words": eval_words,
    "enumerate_hom_images": enumerate_hom_images,
}


def flatten_words(words, gen_index):
    """Encode words (iterables of (name, exp)) into the flat kernel arrays."""
    gens: list[int] = []
    exps: list[int] = []
    offsets = [0]
    for w in words:
        for name, e in w:
            gens.append(gen_index[name])
            exps.append(e)
        offsets.append(len(gens))
    return (np.asarray(gens, dtype=np.int64), np.asarray(exps, dtype=np.int64),
            np.asarray(offsets, dtype=np.int64))
