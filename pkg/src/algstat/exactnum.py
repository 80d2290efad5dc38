"""Exact arbitrary-precision arithmetic and integer/rational linear algebra.

Coefficients throughout the package are `BigRat` (gmpy2.mpq): always in
lowest terms, positive denominator, hashable and picklable.  Matrices here
are small and dense; Smith normal form, integer lattice kernels and exact
rational nullspaces are the primitives the toric and multigraded
implicitization code builds on.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from gmpy2 import mpq

BigRat = mpq


def rat(num, den=1) -> BigRat:
    """Exact rational from ints, strings or another rational."""
    return mpq(num, den)


def rat_to_str(q) -> str:
    """Render `q` in the `num//den` notation used by files and the CLI."""
    q = mpq(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}//{q.denominator}"


def rat_from_str(text: str) -> BigRat:
    """Parse `num//den` (or a plain integer, or `num/den`)."""
    text = text.strip()
    if "//" in text:
        num, den = text.split("//")
        return mpq(int(num), int(den))
    return mpq(text)


@dataclass(frozen=True)
class IntMatrix:
    """Dense integer matrix, row-major, immutable."""

    rows: int
    cols: int
    entries: tuple  # tuple of row tuples, arbitrary-precision ints

    def __post_init__(self):
        assert len(self.entries) == self.rows
        assert all(len(r) == self.cols for r in self.entries)

    @staticmethod
    def from_rows(rows: Sequence[Sequence[int]]) -> "IntMatrix":
        rows = tuple(tuple(int(x) for x in row) for row in rows)
        n_rows = len(rows)
        n_cols = len(rows[0]) if rows else 0
        return IntMatrix(n_rows, n_cols, rows)

    @staticmethod
    def identity(n: int) -> "IntMatrix":
        return IntMatrix(n, n, tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)))

    @staticmethod
    def zero(rows: int, cols: int) -> "IntMatrix":
        return IntMatrix(rows, cols, tuple(tuple(0 for _ in range(cols)) for _ in range(rows)))

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def row(self, i) -> tuple:
        return self.entries[i]

    def col(self, j) -> tuple:
        return tuple(r[j] for r in self.entries)

    def transpose(self) -> "IntMatrix":
        return IntMatrix(self.cols, self.rows, tuple(zip(*self.entries)) if self.entries else ())

    def mul(self, other: "IntMatrix") -> "IntMatrix":
        assert self.cols == other.rows
        bt = list(zip(*other.entries)) if other.entries else []
        prod = tuple(
            tuple(sum(a * b for a, b in zip(row, col)) for col in bt)
            for row in self.entries
        )
        return IntMatrix(self.rows, other.cols, prod)

    def mul_vec(self, v: Sequence[int]) -> tuple:
        assert self.cols == len(v)
        return tuple(sum(a * b for a, b in zip(row, v)) for row in self.entries)

    def det(self) -> int:
        """Exact determinant by fraction-free (Bareiss) elimination."""
        assert self.rows == self.cols
        n = self.rows
        if n == 0:
            return 1
        m = [list(r) for r in self.entries]
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
                m[i][k] = 0
            prev = m[k][k]
        return sign * m[n - 1][n - 1]

    def inverse_unimodular(self) -> "IntMatrix":
        """Exact integer inverse; requires |det| = 1."""
        d = self.det()
        if d not in (1, -1):
            raise ValueError(f"matrix is not unimodular (det={d})")
        n = self.rows
        aug = [[mpq(x) for x in row] + [mpq(1 if i == j else 0) for j in range(n)]
               for i, row in enumerate(self.entries)]
        _rref_in_place(aug)
        inv = []
        for i in range(n):
            row = aug[i][n:]
            assert all(x.denominator == 1 for x in row)
            inv.append(tuple(int(x) for x in row))
        return IntMatrix(n, n, tuple(inv))


@dataclass(frozen=True)
class SNFResult:
    """U·A·V = S with S diagonal, d1 | d2 | ... | d_rank > 0, U and V unimodular."""

    S: IntMatrix
    U: IntMatrix
    V: IntMatrix
    rank: int

    def diagonal(self) -> tuple:
        return tuple(self.S[i, i] for i in range(min(self.S.rows, self.S.cols)))


def _pick_pivot(m, t, n_rows, n_cols):
    """Smallest-absolute-value nonzero entry of m[t:, t:], ties row-then-column."""
    best = None
    for i in range(t, n_rows):
        for j in range(t, n_cols):
            x = m[i][j]
            if x != 0 and (best is None or abs(x) < best[0]):
                best = (abs(x), i, j)
    return best


def smith_normal_form(A: IntMatrix) -> SNFResult:
    """Smith normal form with unimodular transforms, deterministic pivoting."""
    n_rows, n_cols = A.rows, A.cols
    m = [list(r) for r in A.entries]
    u = [[1 if i == j else 0 for j in range(n_rows)] for i in range(n_rows)]
    v = [[1 if i == j else 0 for j in range(n_cols)] for i in range(n_cols)]
    t = 0
    limit = min(n_rows, n_cols)
    while t < limit:
        picked = _pick_pivot(m, t, n_rows, n_cols)
        if picked is None:
            break
        while True:
            _, pi, pj = _pick_pivot(m, t, n_rows, n_cols)
            if pi != t:
                m[t], m[pi] = m[pi], m[t]
                u[t], u[pi] = u[pi], u[t]
            if pj != t:
                for row in m:
                    row[t], row[pj] = row[pj], row[t]
                for row in v:
                    row[t], row[pj] = row[pj], row[t]
            pivot = m[t][t]
            dirty = False
            for i in range(t + 1, n_rows):
                if m[i][t] != 0:
                    q = m[i][t] // pivot
                    if q != 0:
                        for j in range(t, n_cols):
                            m[i][j] -= q * m[t][j]
                        for j in range(n_rows):
                            u[i][j] -= q * u[t][j]
                    if m[i][t] != 0:
                        dirty = True
            for j in range(t + 1, n_cols):
                if m[t][j] != 0:
                    q = m[t][j] // pivot
                    if q != 0:
                        for i in range(n_rows):
                            m[i][j] -= q * m[i][t]
                        for i in range(n_cols):
                            v[i][j] -= q * v[i][t]
                    if m[t][j] != 0:
                        dirty = True
            if not dirty:
                # divisibility fix: fold in any entry the pivot does not divide
                bad = None
                for i in range(t + 1, n_rows):
                    for j in range(t + 1, n_cols):
                        if m[i][j] % pivot != 0:
                            bad = i
                            break
                    if bad is not None:
                        break
                if bad is None:
                    break
                for j in range(n_cols):
                    m[t][j] += m[bad][j]
                for j in range(n_rows):
                    u[t][j] += u[bad][j]
        if m[t][t] < 0:
            m[t] = [-x for x in m[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    rank = sum(1 for i in range(limit) if m[i][i] != 0)
    return SNFResult(
        S=IntMatrix.from_rows(m) if m else IntMatrix(0, n_cols, ()),
        U=IntMatrix.from_rows(u) if u else IntMatrix(0, 0, ()),
        V=IntMatrix.from_rows(v) if v else IntMatrix(0, 0, ()),
        rank=rank,
    )


def lattice_kernel(A: IntMatrix) -> list:
    """Basis of the integer kernel {v : A·v = 0}, from the SNF column transform.

    The basis vectors are the columns of V past the rank; they span the
    kernel as a full-rank sublattice (in fact saturated: V is unimodular).
    """
    if A.cols == 0:
        return []
    if A.rows == 0:
        return [tuple(1 if i == j else 0 for i in range(A.cols)) for j in range(A.cols)]
    snf = smith_normal_form(A)
    return [snf.V.col(j) for j in range(snf.rank, A.cols)]


def _rref_in_place(m) -> list:
    """Reduce list-of-lists of mpq to RREF; returns pivot column indices."""
    n_rows = len(m)
    n_cols = len(m[0]) if n_rows else 0
    pivots = []
    r = 0
    for c in range(n_cols):
        pv = None
        for i in range(r, n_rows):
            if m[i][c] != 0:
                pv = i
                break
        if pv is None:
            continue
        if pv != r:
            m[r], m[pv] = m[pv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(n_rows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == n_rows:
            break
    return pivots


def rref(M: Sequence[Sequence]) -> tuple:
    """(rref rows, pivot columns) of a rational matrix; rows of mpq tuples."""
    m = [[mpq(x) for x in row] for row in M]
    pivots = _rref_in_place(m)
    return [tuple(row) for row in m[: len(pivots)]], pivots


def rational_inverse(M: Sequence[Sequence]) -> list:
    """Exact inverse of a square rational matrix; raises on singular input."""
    n = len(M)
    aug = [[mpq(x) for x in row] + [mpq(1 if i == j else 0) for j in range(n)]
           for i, row in enumerate(M)]
    pivots = _rref_in_place(aug)
    if len(pivots) != n:
        raise ValueError("matrix is singular")
    return [tuple(row[n:]) for row in aug]


def rational_nullspace(M: Sequence[Sequence]) -> list:
    """Canonical basis of the right nullspace of a rational matrix.

    Basis vectors carry 1 in their free coordinate and are emitted with
    free columns ascending, so the result is deterministic.
    """
    if not M:
        return []
    n_cols = len(M[0])
    reduced, pivots = rref(M)
    pivot_set = set(pivots)
    basis = []
    for free in range(n_cols):
        if free in pivot_set:
            continue
        v = [mpq(0)] * n_cols
        v[free] = mpq(1)
        for r, pc in enumerate(pivots):
            v[pc] = -reduced[r][free]
        basis.append(tuple(v))
    return basis
