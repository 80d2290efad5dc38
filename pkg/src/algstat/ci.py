"""Conditional-independence statements and Gaussian CI ideals.

A Gaussian random vector satisfies A _||_ B | C exactly when the submatrix
of the covariance on rows A+C and columns B+C has rank at most #C, so the
CI ideal is generated by its (#C+1)-minors.  Rows are arranged A-block
then C-block (each ascending), columns B-block then C-block; this fixes
the generator signs.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass

from .errors import IndexOutOfRange, ParseError, UnsupportedGraphKind
from .graphcore import DIRECTED, UNDIRECTED, Graph, minimal_d_separators, minimal_separators
from .groebner import Ideal
from .polyring import MultiPoly, PolyRing, ring_new


@dataclass(frozen=True)
class CIStmt:
    """A _||_ B | C with disjoint vertex sets, canonicalized so A <= B."""

    A: tuple
    B: tuple
    C: tuple

    def __str__(self):
        def side(s):
            if len(s) == 1:
                return str(s[0])
            return "{" + ", ".join(map(str, s)) + "}"

        cs = "{" + ", ".join(map(str, self.C)) + "}"
        return f"[{side(self.A)} _||_ {side(self.B)} | {cs}]"


def ci_stmt(A, B, C=()) -> CIStmt:
    A = tuple(sorted(set(A)))
    B = tuple(sorted(set(B)))
    C = tuple(sorted(set(C)))
    if not A or not B:
        raise ValueError("A and B must be nonempty")
    if set(A) & set(B) or set(A) & set(C) or set(B) & set(C):
        raise ValueError("A, B, C must be pairwise disjoint")
    if B < A:
        A, B = B, A
    return CIStmt(A, B, C)


_STMT_RE = re.compile(
    r"^\[\s*(?P<a>[^_|]+?)\s*_\|\|_\s*(?P<b>[^|]+?)\s*\|\s*\{(?P<c>[^}]*)\}\s*\]$"
)


def parse_ci_stmt(text: str) -> CIStmt:
    m = _STMT_RE.match(text.strip())
    if not m:
        raise ParseError(f"malformed CI statement {text!r}")

    def ints(block):
        block = block.strip().strip("{}")
        if not block.strip():
            return ()
        return tuple(int(x) for x in block.split(","))

    return ci_stmt(ints(m.group("a")), ints(m.group("b")), ints(m.group("c")))


def global_markov(G: Graph) -> list:
    """Pairwise statements over inclusion-minimal separators.

    Undirected graphs use vertex separation, DAGs use d-separation; one
    statement per non-adjacent pair and minimal separator, sorted.
    """
    stmts = []
    if G.kind == UNDIRECTED:
        sep = lambda i, j: minimal_separators(G, i, j)
        adjacent = lambda i, j: G.has_edge(i, j)
    elif G.kind == DIRECTED:
        sep = lambda i, j: minimal_d_separators(G, i, j)
        adjacent = lambda i, j: G.has_edge(i, j) or G.has_edge(j, i)
    else:
        raise UnsupportedGraphKind(G.kind)
    for i, j in itertools.combinations(G.vertices(), 2):
        if adjacent(i, j):
            continue
        for C in sep(i, j):
            stmts.append(ci_stmt((i,), (j,), C))
    return sorted(set(stmts), key=lambda s: (s.A, s.B, s.C))


@dataclass(frozen=True)
class GaussianRing:
    """QQ[s[i,j] : 1 <= i <= j <= n] with the symmetric-matrix index view."""

    n: int
    ring: PolyRing

    def sigma(self, i: int, j: int) -> MultiPoly:
        if not (1 <= i <= self.n and 1 <= j <= self.n):
            raise IndexOutOfRange(f"sigma index ({i},{j}) outside 1..{self.n}")
        a, b = min(i, j), max(i, j)
        return self.ring.gen(self.ring.var_index(f"s[{a},{b}]"))


def gaussian_ring(n: int) -> GaussianRing:
    names = [f"s[{i},{j}]" for i in range(1, n + 1) for j in range(i, n + 1)]
    return GaussianRing(n, ring_new(names))


def _det(entries) -> MultiPoly:
    """Determinant of a square MultiPoly matrix by first-row expansion."""
    k = len(entries)
    if k == 0:
        raise ValueError("empty determinant")
    if k == 1:
        return entries[0][0]
    ring = entries[0][0].ring
    out = ring.zero()
    for pos in range(k):
        a = entries[0][pos]
        if a.is_zero():
            continue
        sub = [[row[c] for c in range(k) if c != pos] for row in entries[1:]]
        term = a * _det(sub)
        out = out + (term if pos % 2 == 0 else -term)
    return out


def ci_ideal(R: GaussianRing, stmts) -> Ideal:
    """Ideal of all (#C+1)-minors of sigma_{A+C, B+C} over the statements."""
    gens = []
    for st in stmts:
        for v in (*st.A, *st.B, *st.C):
            if v > R.n or v < 1:
                raise IndexOutOfRange(f"vertex {v} outside 1..{R.n}")
        rows = [*st.A, *st.C]
        cols = [*st.B, *st.C]
        size = len(st.C) + 1
        for rsel in itertools.combinations(range(len(rows)), size):
            for csel in itertools.combinations(range(len(cols)), size):
                entries = [
                    [R.sigma(rows[r], cols[c]) for c in csel] for r in rsel
                ]
                g = _det(entries)
                if not g.is_zero():
                    gens.append(g)
    return Ideal(R.ring, gens)
