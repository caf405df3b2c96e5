"""Exact integer linear algebra: Smith/Hermite forms, linear systems, affine lattices.

Everything works over Python ints, so there is no overflow.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from math import gcd
from typing import Iterable, Sequence

Vector = tuple[int, ...]


class IntMatrix:
    """Dense integer matrix; ``0 x n`` and ``n x 0`` shapes are allowed."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries: Iterable[Iterable[int]] = (), rows: int | None = None, cols: int | None = None):
        data = [[int(x) for x in row] for row in entries]
        if rows is None:
            rows = len(data)
        if cols is None:
            cols = len(data[0]) if data else 0
        if len(data) != rows or any(len(r) != cols for r in data):
            raise ValueError(f"inconsistent matrix dimensions, expected {rows}x{cols}")
        self.rows = rows
        self.cols = cols
        self.entries = data

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls([[0] * cols for _ in range(rows)], rows, cols)

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)], n, n)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], rows: int) -> "IntMatrix":
        return cls([[c[i] for c in columns] for i in range(rows)], rows, len(columns))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def row(self, i: int) -> Vector:
        return tuple(self.entries[i])

    def column(self, j: int) -> Vector:
        return tuple(r[j] for r in self.entries)

    def columns(self) -> list[Vector]:
        return [self.column(j) for j in range(self.cols)]

    def copy(self) -> "IntMatrix":
        return IntMatrix(self.entries, self.rows, self.cols)

    @property
    def T(self) -> "IntMatrix":
        return IntMatrix([[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)],
                         self.cols, self.rows)

    def __matmul__(self, other):
        if isinstance(other, IntMatrix):
            if self.cols != other.rows:
                raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
            ot = other.T.entries
            return IntMatrix([[sum(a * b for a, b in zip(r, c)) for c in ot] for r in self.entries],
                             self.rows, other.cols)
        vec = tuple(other)
        if len(vec) != self.cols:
            raise ValueError(f"shape mismatch {self.shape} @ vector of length {len(vec)}")
        return tuple(sum(a * b for a, b in zip(r, vec)) for r in self.entries)

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return IntMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)],
                         self.rows, self.cols)

    def __neg__(self) -> "IntMatrix":
        return IntMatrix([[-a for a in r] for r in self.entries], self.rows, self.cols)

    def __eq__(self, other) -> bool:
        return isinstance(other, IntMatrix) and self.shape == other.shape and self.entries == other.entries

    def __hash__(self):
        return hash((self.rows, self.cols, tuple(map(tuple, self.entries))))

    def __repr__(self) -> str:
        return f"IntMatrix({self.entries!r}, rows={self.rows}, cols={self.cols})"

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.entries]

    def hstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.rows != other.rows:
            raise ValueError("row mismatch")
        return IntMatrix([a + b for a, b in zip(self.entries, other.entries)], self.rows, self.cols + other.cols)

    def vstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.cols:
            raise ValueError("column mismatch")
        return IntMatrix(self.entries + other.entries, self.rows + other.rows, self.cols)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "IntMatrix":
        return IntMatrix([[self.entries[i][j] for j in cols] for i in rows], len(rows), len(cols))

    def to_json(self) -> dict:
        return {"rows": self.rows, "cols": self.cols,
                "entries": [[str(x) for x in r] for r in self.entries]}

    @classmethod
    def from_json(cls, obj: dict) -> "IntMatrix":
        return cls([[int(x) for x in r] for r in obj["entries"]], int(obj["rows"]), int(obj["cols"]))


def as_matrix(a) -> IntMatrix:
    if isinstance(a, IntMatrix):
        return a
    return IntMatrix(a)


def determinant(a: IntMatrix) -> int:
    """Fraction-free (Bareiss) determinant."""
    n = a.rows
    if n != a.cols:
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return 1
    m = [list(r) for r in a.entries]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


# --- Smith normal form -------------------------------------------------------

@dataclass(frozen=True)
class SmithDecomposition:
    """``U @ A @ V == D`` with unimodular ``U``, ``V``."""

    U: IntMatrix
    D: IntMatrix
    V: IntMatrix
    invariant_factors: tuple[int, ...]

    @property
    def rank(self) -> int:
        return sum(1 for x in self.invariant_factors if x != 0)


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with a*x + b*y == g >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


def smith_normal_form(A) -> SmithDecomposition:
    A = as_matrix(A)
    n, m = A.shape
    D = [list(r) for r in A.entries]
    U = [[int(i == j) for j in range(n)] for i in range(n)]
    V = [[int(i == j) for j in range(m)] for i in range(m)]

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in D:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def row_combine(i, j, a, b, c, d):
        # rows (i, j) <- (a*ri + b*rj, c*ri + d*rj); ad - bc = +-1
        for M in (D, U):
            ri, rj = M[i], M[j]
            M[i] = [a * x + b * y for x, y in zip(ri, rj)]
            M[j] = [c * x + d * y for x, y in zip(ri, rj)]

    def col_combine(i, j, a, b, c, d):
        for M in (D, V):
            for row in M:
                x, y = row[i], row[j]
                row[i] = a * x + b * y
                row[j] = c * x + d * y

    t = 0
    while t < min(n, m):
        # smallest nonzero pivot in the remaining block, lowest row then column
        best = None
        for i in range(t, n):
            for j in range(t, m):
                v = D[i][j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
        if best is None:
            break
        _, pi, pj = best
        if pi != t:
            swap_rows(t, pi)
        if pj != t:
            swap_cols(t, pj)
        while True:
            done = True
            for i in range(t + 1, n):
                if D[i][t]:
                    p, q = D[t][t], D[i][t]
                    if q % p == 0:
                        row_combine(t, i, 1, 0, -(q // p), 1)
                    else:
                        g, x, y = _ext_gcd(p, q)
                        row_combine(t, i, x, y, -(q // g), p // g)
                        done = False
            for j in range(t + 1, m):
                if D[t][j]:
                    p, q = D[t][t], D[t][j]
                    if q % p == 0:
                        col_combine(t, j, 1, 0, -(q // p), 1)
                    else:
                        g, x, y = _ext_gcd(p, q)
                        col_combine(t, j, x, y, -(q // g), p // g)
                        done = False
            if not done:
                continue
            # divisibility: fold any entry not divisible by the pivot into row t
            p = D[t][t]
            bad = None
            for i in range(t + 1, n):
                for j in range(t + 1, m):
                    if D[i][j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            row_combine(t, bad, 1, 1, 0, 1)
        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    factors = tuple(D[i][i] for i in range(min(n, m)))
    return SmithDecomposition(IntMatrix(U, n, n), IntMatrix(D, n, m), IntMatrix(V, m, m), factors)


def invariant_factors(A) -> tuple[int, ...]:
    return smith_normal_form(A).invariant_factors


def abelian_invariants(A) -> tuple[int, tuple[int, ...]]:
    """(free rank, nontrivial torsion factors) of the module presented by ``A``."""
    A = as_matrix(A)
    snf = smith_normal_form(A)
    torsion = tuple(x for x in snf.invariant_factors if x > 1)
    return A.rows - snf.rank, torsion


def inverse_unimodular(a: IntMatrix) -> IntMatrix:
    """Exact inverse of a unimodular matrix by Gauss-Jordan over Z."""
    n = a.rows
    M = [list(r) + [int(i == j) for j in range(n)] for i, r in enumerate(a.entries)]
    for c in range(n):
        # euclid down the column to get a unit pivot
        while True:
            nz = [i for i in range(c, n) if M[i][c]]
            if not nz:
                raise ValueError("matrix is singular")
            piv = min(nz, key=lambda i: abs(M[i][c]))
            M[c], M[piv] = M[piv], M[c]
            others = [i for i in range(c + 1, n) if M[i][c]]
            if not others:
                break
            for i in others:
                q = M[i][c] // M[c][c]
                M[i] = [x - q * y for x, y in zip(M[i], M[c])]
        if abs(M[c][c]) != 1:
            raise ValueError("matrix is not unimodular")
        if M[c][c] == -1:
            M[c] = [-x for x in M[c]]
    for c in range(n - 1, -1, -1):
        for i in range(c):
            q = M[i][c]
            if q:
                M[i] = [x - q * y for x, y in zip(M[i], M[c])]
    return IntMatrix([r[n:] for r in M], n, n)


# --- Hermite normal form and lattices ------------------------------------------

def hermite_rows(vectors: Iterable[Sequence[int]], dim: int) -> list[Vector]:
    """Row-style HNF basis of the lattice spanned by ``vectors``.

    Pivots strictly increase in column, pivot entries are positive, entries
    above a pivot lie in ``[0, pivot)``.
    """
    rows = [list(v) for v in vectors if any(v)]
    basis: list[list[int]] = []
    col = 0
    while rows and col < dim:
        nz = [r for r in rows if r[col]]
        zero = [r for r in rows if not r[col]]
        if not nz:
            col += 1
            continue
        while len(nz) > 1:
            nz.sort(key=lambda r: abs(r[col]))
            p = nz[0]
            rest = []
            for r in nz[1:]:
                q = r[col] // p[col]
                r = [x - q * y for x, y in zip(r, p)]
                if r[col]:
                    rest.append(r)
                elif any(r):
                    zero.append(r)
            nz = [p] + rest
        p = nz[0]
        if p[col] < 0:
            p = [-x for x in p]
        basis.append(p)
        rows = zero
        col += 1
    # reduce entries above pivots
    pivots = [next(j for j, x in enumerate(b) if x) for b in basis]
    for k in range(len(basis)):
        pc = pivots[k]
        for i in range(k):
            q = basis[i][pc] // basis[k][pc]
            if q:
                basis[i] = [x - q * y for x, y in zip(basis[i], basis[k])]
    return [tuple(b) for b in basis]


def reduce_mod_hermite(v: Sequence[int], basis: Sequence[Vector]) -> Vector:
    """Canonical representative of ``v`` modulo the row-HNF lattice ``basis``."""
    v = list(v)
    for b in basis:
        pc = next(j for j, x in enumerate(b) if x)
        q = v[pc] // b[pc]
        if q:
            v = [x - q * y for x, y in zip(v, b)]
    return tuple(v)


@dataclass(frozen=True)
class AffineLattice:
    """The set ``span_Z(basis) + offset`` in ``Z^dim``, or the empty set.

    Instances are always canonical: the basis is in row HNF and the offset is
    reduced against it, so ``==`` is set equality.
    """

    dim: int
    basis: tuple[Vector, ...] = ()
    offset: Vector | None = None

    def __post_init__(self):
        if self.offset is None:
            object.__setattr__(self, "basis", ())
            return
        if len(self.offset) != self.dim or any(len(b) != self.dim for b in self.basis):
            raise ValueError("dimension mismatch in AffineLattice")
        hb = tuple(hermite_rows(self.basis, self.dim))
        object.__setattr__(self, "basis", hb)
        object.__setattr__(self, "offset", reduce_mod_hermite(self.offset, hb))

    @classmethod
    def empty(cls, dim: int) -> "AffineLattice":
        return cls(dim, (), None)

    @classmethod
    def full(cls, dim: int) -> "AffineLattice":
        return cls(dim, tuple(tuple(int(i == j) for j in range(dim)) for i in range(dim)), (0,) * dim)

    @classmethod
    def point(cls, p: Sequence[int]) -> "AffineLattice":
        p = tuple(int(x) for x in p)
        return cls(len(p), (), p)

    @property
    def is_empty(self) -> bool:
        return self.offset is None

    @property
    def rank(self) -> int:
        return len(self.basis)

    def __contains__(self, v) -> bool:
        if self.offset is None:
            return False
        v = tuple(v)
        diff = [a - b for a, b in zip(v, self.offset)]
        return not any(reduce_mod_hermite(diff, self.basis))

    def element(self, coeffs: Sequence[int]) -> Vector:
        if self.offset is None:
            raise ValueError("empty lattice has no elements")
        out = list(self.offset)
        for c, b in zip(coeffs, self.basis):
            out = [x + c * y for x, y in zip(out, b)]
        return tuple(out)

    def to_json(self) -> dict:
        if self.offset is None:
            return {"dim": self.dim, "empty": True}
        return {"dim": self.dim, "basis": [[str(x) for x in b] for b in self.basis],
                "offset": [str(x) for x in self.offset]}


def solve_linear(A, b: Sequence[int]) -> AffineLattice:
    """All integer solutions of ``A x = b``."""
    A = as_matrix(A)
    b = tuple(int(x) for x in b)
    n, m = A.shape
    if len(b) != n:
        raise ValueError("right-hand side has the wrong length")
    snf = smith_normal_form(A)
    ub = snf.U @ b
    y = [0] * m
    r = snf.rank
    for i in range(n):
        di = snf.invariant_factors[i] if i < min(n, m) else 0
        if di == 0:
            if ub[i] != 0:
                return AffineLattice.empty(m)
        else:
            if ub[i] % di:
                return AffineLattice.empty(m)
            y[i] = ub[i] // di
    V = snf.V
    offset = V @ y
    basis = tuple(V.column(j) for j in range(r, m))
    out = AffineLattice(m, basis, offset)
    assert A @ out.offset == b
    return out


def intersect_affine(L1: AffineLattice, L2: AffineLattice) -> AffineLattice:
    if L1.dim != L2.dim:
        raise ValueError("ambient dimensions differ")
    N = L1.dim
    if L1.is_empty or L2.is_empty:
        return AffineLattice.empty(N)
    k1, k2 = L1.rank, L2.rank
    # X1 z1 - X2 z2 = b2 - b1
    cols = list(L1.basis) + [tuple(-x for x in v) for v in L2.basis]
    M = IntMatrix.from_columns(cols, N)
    rhs = tuple(a - b for a, b in zip(L2.offset, L1.offset))
    sol = solve_linear(M, rhs)
    if sol.is_empty:
        return AffineLattice.empty(N)
    X1 = IntMatrix.from_columns(list(L1.basis), N) if k1 else IntMatrix.zeros(N, 0)
    proj = X1.hstack(IntMatrix.zeros(N, k2))
    return affine_image(proj, L1.offset, sol)


def affine_image(M, c: Sequence[int], L: AffineLattice) -> AffineLattice:
    """Image of ``L`` under ``x -> M x + c``."""
    M = as_matrix(M)
    if M.cols != L.dim or len(c) != M.rows:
        raise ValueError("dimension mismatch in affine_image")
    if L.is_empty:
        return AffineLattice.empty(M.rows)
    off = tuple(a + b for a, b in zip(M @ L.offset, c))
    return AffineLattice(M.rows, tuple(M @ v for v in L.basis), off)


# --- module presentations --------------------------------------------------------

@dataclass(frozen=True)
class ModulePresentation:
    """``Z^n / A Z^m`` for an ``n x m`` relation matrix ``A``."""

    relation_matrix: IntMatrix

    @property
    def n(self) -> int:
        return self.relation_matrix.rows


def max_free_quotient(P: ModulePresentation) -> tuple[int, IntMatrix]:
    """Rank of the maximal free quotient and a projection ``Z^n -> Z^rank`` realizing it."""
    A = P.relation_matrix
    snf = smith_normal_form(A)
    r = snf.rank
    proj = snf.U.submatrix(range(r, A.rows), range(A.rows))
    return A.rows - r, proj


def vector_gcd(v: Iterable[int]) -> int:
    g = 0
    for x in v:
        g = gcd(g, x)
    return g


def matrix_to_json(M: IntMatrix) -> str:
    return json.dumps(M.to_json())
