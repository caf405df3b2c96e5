"""Column-generation decisions: unimodular points of lattice cosets, and free epimorphism extension."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import gcd
from typing import Sequence

from .intlinalg import (
    IntMatrix,
    ModulePresentation,
    Vector,
    as_matrix,
    inverse_unimodular,
    max_free_quotient,
    smith_normal_form,
    solve_linear,
    vector_gcd,
)


@dataclass(frozen=True)
class CgInstance:
    """The coset ``span_Z(X) + b`` in ``Z^N``."""

    N: int
    X: tuple[Vector, ...]
    b: Vector

    def __post_init__(self):
        object.__setattr__(self, "X", tuple(tuple(int(v) for v in x) for x in self.X))
        object.__setattr__(self, "b", tuple(int(v) for v in self.b))
        if len(self.b) != self.N or any(len(x) != self.N for x in self.X):
            raise ValueError("inconsistent dimensions in CgInstance")

    @classmethod
    def make(cls, X: Sequence[Sequence[int]], b: Sequence[int]) -> "CgInstance":
        return cls(len(b), tuple(tuple(x) for x in X), tuple(b))

    def point(self, coeffs: Sequence[int]) -> Vector:
        out = list(self.b)
        for c, x in zip(coeffs, self.X):
            out = [u + c * v for u, v in zip(out, x)]
        return tuple(out)

    def to_json(self) -> dict:
        return {"N": self.N, "X": [[str(v) for v in x] for x in self.X], "b": [str(v) for v in self.b]}

    @classmethod
    def from_json(cls, obj: dict) -> "CgInstance":
        b = [int(v) for v in obj["b"]]
        X = [[int(v) for v in x] for x in obj.get("X", [])]
        return cls(int(obj.get("N", len(b))), tuple(map(tuple, X)), tuple(b))


@dataclass(frozen=True)
class UnimodularPoint:
    """A point of the coset whose entries have gcd 1, with its coefficients on ``X``."""

    point: Vector
    coefficients: Vector


def gcd_shift_witness(alpha1: int, b1: int, rest: Sequence[int]) -> int:
    """Smallest ``|x|`` (positive first) with ``gcd(x*alpha1 + b1, *rest) == 1``."""
    if vector_gcd([alpha1, b1, *rest]) != 1 or not any(rest):
        raise ValueError("gcd_shift_witness needs gcd(alpha1, b1, rest) == 1 and a nonzero entry in rest")
    g_rest = vector_gcd(rest)
    for k in itertools.count():
        for x in ((0,) if k == 0 else (k, -k)):
            if gcd(x * alpha1 + b1, g_rest) == 1:
                return x
    raise AssertionError("unreachable")


def _solve_diagonal(alpha: list[int], b: list[int]) -> list[int] | None:
    """Find y with gcd(alpha_i y_i + b_i) == 1, or None.

    ``alpha`` is nonnegative with ``alpha_1 | alpha_2 | ...`` (zeros trailing).
    """
    N = len(b)
    y = [0] * N
    if N == 0:
        return None
    c = vector_gcd(b)
    if c == 1:
        return y
    a1 = alpha[0]
    if c == 0:
        if a1 == 1:
            y[0] = 1
            return y
        return None
    if gcd(a1, c) > 1:
        return None
    if any(b[1:]):
        y[0] = gcd_shift_witness(a1, b[0], b[1:])
        return y
    a2 = alpha[1] if N > 1 else 0
    if a2 == 0:
        # need |a1*x + b1| == 1, i.e. b1 = +-1 mod a1
        if a1 == 0:
            return None
        for target in (1, -1):
            if (target - b[0]) % a1 == 0:
                y[0] = (target - b[0]) // a1
                return y
        return None
    y[0] = gcd_shift_witness(a1, b[0], [a2])
    y[1] = 1
    return y


def decide_unimodular_point_1d(inst: CgInstance) -> UnimodularPoint | None:
    """Does ``span(X) + b`` contain a vector whose entries generate Z?"""
    N, k = inst.N, len(inst.X)
    B = IntMatrix.from_columns(list(inst.X), N) if k else IntMatrix.zeros(N, 0)
    snf = smith_normal_form(B)
    alpha = [snf.invariant_factors[i] if i < min(N, k) else 0 for i in range(N)]
    ub = list(snf.U @ inst.b)
    y = _solve_diagonal(alpha, ub)
    if y is None:
        return None
    # U p = D y' + U b with y' = V^-1 z; shifts only ever land on the first min(N, k) slots
    if any(y[k:]):
        raise AssertionError("nonzero shift on a zero column")
    z = snf.V @ [y[i] if i < N else 0 for i in range(k)]
    p = inst.point(z)
    if vector_gcd(p) != 1:
        raise AssertionError(f"witness {p} does not have entry gcd 1")
    return UnimodularPoint(p, z)


def brute_force_unimodular_oracle(inst: CgInstance, box: int) -> UnimodularPoint | None:
    """Exhaustive search over coefficients in ``[-box, box]``; None means unknown."""
    rng = range(-box, box + 1)
    for z in itertools.product(rng, repeat=len(inst.X)):
        p = inst.point(z)
        if vector_gcd(p) == 1:
            return UnimodularPoint(p, tuple(z))
    return None


# --- product (homogeneous) case -----------------------------------------------------

@dataclass(frozen=True)
class FreeExtensionWitness:
    """``psi_tilde`` on ``Z^n2`` (a ``d x n2`` matrix) and ``psi = psi_tilde @ kappa``."""

    psi: IntMatrix
    psi_tilde: IntMatrix


def _check_well_defined(A1: IntMatrix, A2: IntMatrix, kappa: IntMatrix) -> None:
    if kappa.rows != A2.rows or kappa.cols != A1.rows:
        raise ValueError(f"kappa must be {A2.rows}x{A1.rows}, got {kappa.rows}x{kappa.cols}")
    if A1.cols == 0:
        return
    image = kappa @ A1
    snf = smith_normal_form(A2)
    for j in range(image.cols):
        if not in_column_span(snf, image.column(j)):
            raise ValueError("kappa does not map relations of A1 into relations of A2")


def in_column_span(snf, v: Sequence[int]) -> bool:
    """Is ``v`` in the column span of the matrix whose Smith decomposition is ``snf``?"""
    uv = snf.U @ v
    f = snf.invariant_factors
    for i, x in enumerate(uv):
        di = f[i] if i < len(f) else 0
        if (di == 0 and x != 0) or (di != 0 and x % di):
            return False
    return True


def decide_epi_extension_free(A1: ModulePresentation, A2: ModulePresentation, kappa, d: int):
    """Is there an epimorphism ``M(A1) -> Z^d`` of the form ``psi_tilde o kappa``?

    Returns a :class:`FreeExtensionWitness` or None.
    """
    if d < 0:
        raise ValueError("d must be nonnegative")
    kappa = as_matrix(kappa)
    R1, R2 = A1.relation_matrix, A2.relation_matrix
    _check_well_defined(R1, R2, kappa)
    n1, n2 = R1.rows, R2.rows
    if d == 0:
        return FreeExtensionWitness(IntMatrix.zeros(0, n1), IntMatrix.zeros(0, n2))
    f2, proj2 = max_free_quotient(A2)
    # image of M(A1) in the free quotient of M(A2); the free part of M(A1) is implicit
    B = proj2 @ kappa
    snf = smith_normal_form(B)
    alphas = snf.invariant_factors
    r = 0
    while r < len(alphas) and alphas[r] == 1:
        r += 1
    if r < d:
        return None
    E = IntMatrix([[int(i == j) for j in range(f2)] for i in range(d)], d, f2)
    psi_tilde = E @ snf.U @ proj2
    psi = psi_tilde @ kappa
    # surjectivity of psi: its image has d unit invariant factors
    chk = smith_normal_form(psi)
    assert chk.invariant_factors[:d] == (1,) * d
    return FreeExtensionWitness(psi, psi_tilde)


def column_unimodular_check(vectors: Sequence[Sequence[int]], d: int) -> bool:
    """Do the given vectors generate ``Z^d``?"""
    if d == 0:
        return True
    if not vectors:
        return False
    M = IntMatrix.from_columns(list(vectors), d)
    f = smith_normal_form(M).invariant_factors
    return len(f) >= d and all(x == 1 for x in f[:d])


__all__ = [
    "CgInstance",
    "UnimodularPoint",
    "FreeExtensionWitness",
    "gcd_shift_witness",
    "decide_unimodular_point_1d",
    "brute_force_unimodular_oracle",
    "decide_epi_extension_free",
    "column_unimodular_check",
    "inverse_unimodular",
]
