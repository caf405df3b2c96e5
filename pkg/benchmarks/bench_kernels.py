"""Compare the numba-compiled kernels with the pure-numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5] [--quick]

Both paths are timed in the same process: the numpy versions are always
importable from ``vabepi._accel.numpy_kernels``.  With ``VABEPI_DISABLE_NUMBA=1``
only the numpy column is meaningful.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from vabepi import _accel
from vabepi.finite_groups import FiniteGroup, _relator_arrays, groups_of_order
from vabepi.words import parse_presentation, symmetrize


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def cases(quick: bool):
    G24 = groups_of_order(24)[-1]
    S4 = FiniteGroup.symmetric(4)
    yield "associative S4", "associative", (S4.table,)
    yield f"associative order-{G24.order}", "associative", (G24.table,)
    rng = np.random.default_rng(1)
    gens = rng.integers(0, S4.order, size=3).astype(np.int64)
    yield "closure S4", "closure_mask", (S4.table, S4.inverses, gens, S4.identity)
    pres = [("F2 -> S4", "gens: a, b\n", S4),
            ("Klein sym -> S4", "gens: a, b\nrel: a b a b^-1\n", S4)]
    if not quick:
        pres.append(("3-gen sym -> order 24", "gens: a, b, c\nrel: a b c\nrel: a^2 b^-1\n", G24))
    for label, text, G in pres:
        P = symmetrize(parse_presentation(text))
        wg, we, wo, depth = _relator_arrays(P)
        yield f"hom enumeration {label}", "enumerate_hom_images", (
            G.table, G.inverses, G.identity, P.rank, wg, we, wo, depth)
    images = rng.integers(0, S4.order, size=(20000 if not quick else 2000, 2)).astype(np.int64)
    P = parse_presentation("gens: a, b\nrel: a b a b^-1 a^3\nrel: b^4 a^-2\n")
    wg, we, wo, _ = _relator_arrays(P)
    yield "word evaluation S4", "eval_words", (S4.table, S4.inverses, S4.identity, images, wg, we, wo)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--quick", action="store_true", help="small inputs only")
    args = ap.parse_args(argv)
    print(f"active backend: {_accel.BACKEND}")
    rows = []
    for label, kernel, inputs in cases(args.quick):
        fast = _accel.active_kernels[kernel]
        slow = _accel.numpy_kernels[kernel]
        fast(*inputs)  # compile outside the timing
        tf, a = best_of(lambda: fast(*inputs), args.repeat)
        tn, b = best_of(lambda: slow(*inputs), args.repeat)
        same = np.array_equal(np.asarray(a), np.asarray(b))
        rows.append((label, tf, tn, same))
    print(f"{'case':38s} {_accel.BACKEND:>10s} {'numpy':>10s} {'ratio':>7s}  same")
    for label, tf, tn, same in rows:
        print(f"{label:38s} {tf * 1e3:9.3f}ms {tn * 1e3:9.3f}ms {tn / max(tf, 1e-9):7.1f}  {same}")
    return 0 if all(r[3] for r in rows) else 1


if __name__ == "__main__":
    raise SystemExit(main())
