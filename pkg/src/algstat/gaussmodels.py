"""Gaussian graphical models on undirected graphs (plain and colored) and DAGs.

The parametrization of an undirected model is the matrix inverse
K -> K^{-1} restricted to concentration matrices supported on the graph;
a coloring merges same-colored entries of K into one variable and changes
nothing else.  DAG models use the unipotent factorization
Sigma = (I-L)^{-T} W (I-L)^{-1}, which is polynomial.

Vanishing ideals: the default for DAGs saturates the conditional
independence ideal at the parent-set principal minors; undirected models
eliminate the concentration variables from the graph ideal of K*Sigma = I
(same prime ideal as the cleared-denominator graph of K^{-1}, but with
bilinear generators).
"""

from __future__ import annotations

from typing import Optional

from .ci import GaussianRing, _det, ci_ideal, gaussian_ring, global_markov
from .errors import CyclicGraph, MissingLabel, UnsupportedAlgorithm, UnsupportedGraphKind
from .graphcore import DIRECTED, UNDIRECTED, Graph, Labeling
from .groebner import Ideal, eliminate, saturate
from .polyring import MultiPoly, PolyRing, RingMap, ring_new

UNDIRECTED_KIND = "undirected"
DAG_KIND = "dag"


class GaussianModel:
    """Graph plus dispatch kind; rings and maps are computed once and cached."""

    def __init__(self, graph: Graph, labeling: Optional[Labeling] = None):
        if graph.kind == UNDIRECTED:
            self.kind = UNDIRECTED_KIND
        elif graph.kind == DIRECTED:
            if not graph.is_acyclic():
                raise CyclicGraph("Gaussian DAG models need an acyclic graph")
            self.kind = DAG_KIND
        else:
            raise UnsupportedGraphKind(graph.kind)
        self.graph = graph
        self.labeling = labeling
        self._cache: dict = {}

    def __eq__(self, other):
        if not isinstance(other, GaussianModel):
            return NotImplemented
        return (
            self.graph == other.graph
            and self.kind == other.kind
            and self.labeling == other.labeling
        )

    def __str__(self):
        G = self.graph
        kind = "an undirected graph" if self.kind == UNDIRECTED_KIND else "a DAG"
        prefix = "Colored " if self.is_colored else ""
        return (
            f"{prefix}Gaussian graphical model on {kind} "
            f"with {G.n} nodes and {len(G.edges)} edges"
        )

    # -- coloring

    @property
    def is_colored(self) -> bool:
        return self.labeling is not None and self.labeling.name == "color"

    def _colors(self) -> list:
        """Distinct colors, edges first then vertices, in first appearance order."""
        lab = self.labeling
        seen = []
        for e in self.graph.edges:
            c = lab.edge(e)
            if c is None:
                raise MissingLabel(f"edge {e} has no color")
            if c not in seen:
                seen.append(c)
        for v in self.graph.vertices():
            c = lab.vertex(v)
            if c is None:
                raise MissingLabel(f"vertex {v} has no color")
            if c not in seen:
                seen.append(c)
        return seen

    # -- rings

    def parameter_ring(self):
        """(ring, generator map): keys are vertices (int) and edges (tuple)."""
        if "parameter_ring" not in self._cache:
            G = self.graph
            if self.kind == UNDIRECTED_KIND:
                if self.is_colored:
                    colors = self._colors()
                    ring = ring_new([f"k[{c}]" for c in colors])
                    var_of = {c: ring.gen(i) for i, c in enumerate(colors)}
                    gen_map = {}
                    for e in G.edges:
                        gen_map[e] = var_of[self.labeling.edge(e)]
                    for v in G.vertices():
                        gen_map[v] = var_of[self.labeling.vertex(v)]
                else:
                    names = [f"k[{v}]" for v in G.vertices()]
                    names += [f"k[{u},{v}]" for u, v in G.edges]
                    ring = ring_new(names)
                    gen_map = {}
                    for i, v in enumerate(G.vertices()):
                        gen_map[v] = ring.gen(i)
                    for i, e in enumerate(G.edges):
                        gen_map[e] = ring.gen(G.n + i)
            else:
                names = [f"l[{u},{v}]" for u, v in G.edges]
                names += [f"w[{v}]" for v in G.vertices()]
                ring = ring_new(names)
                gen_map = {}
                for i, e in enumerate(G.edges):
                    gen_map[e] = ring.gen(i)
                for i, v in enumerate(G.vertices()):
                    gen_map[v] = ring.gen(len(G.edges) + i)
            self._cache["parameter_ring"] = (ring, gen_map)
        return self._cache["parameter_ring"]

    def model_ring(self) -> GaussianRing:
        if "model_ring" not in self._cache:
            self._cache["model_ring"] = gaussian_ring(self.graph.n)
        return self._cache["model_ring"]

    # -- parametrization

    def _concentration_matrix(self):
        """Symbolic K with the parameter-ring generators in its support."""
        ring, gen_map = self.parameter_ring()
        n = self.graph.n
        K = [[ring.zero() for _ in range(n)] for _ in range(n)]
        for v in self.graph.vertices():
            K[v - 1][v - 1] = gen_map[v]
        for (u, v) in self.graph.edges:
            K[u - 1][v - 1] = K[v - 1][u - 1] = gen_map[(u, v)]
        return K

    def parametrization(self) -> RingMap:
        if "parametrization" not in self._cache:
            ring, gen_map = self.parameter_ring()
            R = self.model_ring()
            n = self.graph.n
            if self.kind == UNDIRECTED_KIND:
                K = self._concentration_matrix()
                det, adj = _det_and_adjugate(K)
                images = tuple(
                    adj[i][j] for i in range(n) for j in range(i, n)
                )
                phi = RingMap(R.ring, ring, images, denominator=det)
            else:
                B = _unipotent_inverse(self.graph, gen_map)  # (I - L)^{-1}
                omega = [gen_map[v] for v in self.graph.vertices()]
                # Sigma = B^T W B
                sigma = [[ring.zero() for _ in range(n)] for _ in range(n)]
                for i in range(n):
                    for j in range(i, n):
                        acc = ring.zero()
                        for r in range(n):
                            if not B[r][i].is_zero() and not B[r][j].is_zero():
                                acc = acc + B[r][i] * omega[r] * B[r][j]
                        sigma[i][j] = acc
                images = tuple(sigma[i][j] for i in range(n) for j in range(i, n))
                phi = RingMap(R.ring, ring, images)
            self._cache["parametrization"] = phi
        return self._cache["parametrization"]

    # -- vanishing ideal

    def vanishing_ideal(self, algorithm: str = "default", degree_cap=None) -> Ideal:
        if algorithm == "default":
            algorithm = "saturate" if self.kind == DAG_KIND else "eliminate"
        if algorithm not in ("eliminate", "saturate"):
            raise UnsupportedAlgorithm(algorithm)
        if algorithm == "saturate" and self.kind != DAG_KIND:
            raise UnsupportedAlgorithm("saturate is only defined for DAG models")
        key = ("vanishing_ideal", algorithm)
        if key not in self._cache:
            if algorithm == "eliminate":
                result = self._vanishing_by_elimination(degree_cap)
            else:
                result = self._vanishing_by_saturation(degree_cap)
            self._cache[key] = result
        return self._cache[key]

    def _combined_ring(self):
        ring, _ = self.parameter_ring()
        R = self.model_ring()
        return ring_new(list(ring.variables) + list(R.ring.variables)), ring

    def _vanishing_by_elimination(self, degree_cap=None) -> Ideal:
        """Eliminate the parameters from the graph ideal of the parametrization.

        Undirected: entries of K*Sigma - I (K is a unit on the graph, so no
        saturation is needed).  DAG: off-diagonal entries of
        (I-L)^T Sigma (I-L), which equal the diagonal matrix W exactly on
        the model.
        """
        G = self.graph
        n = G.n
        big, param_ring = self._combined_ring()
        npar = param_ring.n

        def lift_param(p):
            return MultiPoly(big, {(*m, *(0,) * (big.n - npar)): c for m, c in p.terms.items()})

        svar = {}
        for i in range(1, n + 1):
            for j in range(i, n + 1):
                svar[(i, j)] = big.gen(npar + _tri_index(n, i, j))

        def S(i, j):
            a, b = min(i, j), max(i, j)
            return svar[(a, b)]

        gens = []
        if self.kind == UNDIRECTED_KIND:
            K = [[lift_param(p) for p in row] for row in self._concentration_matrix()]
            for i in range(n):
                for j in range(n):
                    acc = big.zero()
                    for l in range(n):
                        if not K[i][l].is_zero():
                            acc = acc + K[i][l] * S(l + 1, j + 1)
                    gens.append(acc - (1 if i == j else 0))
        else:
            ring, gen_map = self.parameter_ring()
            # M = (I-L)^T Sigma (I-L); off-diagonal entries vanish on the model
            L = [[big.zero()] * n for _ in range(n)]
            for (u, v) in G.edges:
                L[u - 1][v - 1] = lift_param(gen_map[(u, v)])
            one = big.one()
            zero = big.zero()
            for i in range(n):
                for j in range(i + 1, n):
                    # entry (i,j) of (I-L)^T S (I-L):
                    # sum_{a,b} (delta_ai - L[a][i]) S(a,b) (delta_bj - L[b][j])
                    acc = zero
                    for a in range(n):
                        left = (one if a == i else zero) - L[a][i]
                        if left.is_zero():
                            continue
                        for b in range(n):
                            right = (one if b == j else zero) - L[b][j]
                            if right.is_zero():
                                continue
                            acc = acc + left * S(a + 1, b + 1) * right
                    gens.append(acc)
        J = Ideal(big, gens)
        out = eliminate(J, list(param_ring.variables), degree_cap)
        return out

    def _vanishing_by_saturation(self, degree_cap=None) -> Ideal:
        R = self.model_ring()
        stmts = global_markov(self.graph)
        J = ci_ideal(R, stmts)
        sats = []
        seen = set()
        for v in self.graph.vertices():
            pa = self.graph.parents(v)
            if not pa:
                continue
            key = tuple(pa)
            if key in seen:
                continue
            seen.add(key)
            entries = [[R.sigma(a, b) for b in pa] for a in pa]
            sats.append(_det(entries))
        sats.sort(key=lambda f: (f.total_degree(), str(f)))
        out = J
        for f in sats:
            out = saturate(out, f, degree_cap)
        return out


def _tri_index(n: int, i: int, j: int) -> int:
    """Position of s[i,j] (i <= j) in row-major upper-triangle order."""
    return (i - 1) * (n + 1) - (i - 1) * i // 2 + (j - i)


def _det_and_adjugate(K):
    """Determinant and adjugate of a symbolic matrix, memoized minors."""
    n = len(K)
    ring = K[0][0].ring if n else None

    def minor(rows: tuple, cols: tuple):
        if not rows:
            return ring.one()
        key = (rows, cols)
        if key in memo:
            return memo[key]
        i = rows[0]
        acc = ring.zero()
        for pos, j in enumerate(cols):
            a = K[i][j]
            if a.is_zero():
                continue
            sub = minor(rows[1:], cols[:pos] + cols[pos + 1 :])
            term = a * sub
            acc = acc + (term if pos % 2 == 0 else -term)
        memo[key] = acc
        return acc

    memo: dict = {}
    full = tuple(range(n))
    det = minor(full, full)
    adj = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            rows = tuple(r for r in full if r != j)
            cols = tuple(c for c in full if c != i)
            cof = minor(rows, cols)
            adj[i][j] = cof if (i + j) % 2 == 0 else -cof
    return det, adj


def _unipotent_inverse(G: Graph, gen_map) -> list:
    """(I - L)^{-1} as a polynomial matrix; L is nilpotent on a DAG."""
    n = G.n
    ring = next(iter(gen_map.values())).ring
    L = [[ring.zero()] * n for _ in range(n)]
    for (u, v) in G.edges:
        L[u - 1][v - 1] = gen_map[(u, v)]
    B = [[ring.one() if i == j else ring.zero() for j in range(n)] for i in range(n)]
    power = [row[:] for row in L]
    for _ in range(n - 1):
        if all(p.is_zero() for row in power for p in row):
            break
        for i in range(n):
            for j in range(n):
                B[i][j] = B[i][j] + power[i][j]
        nxt = [[ring.zero()] * n for _ in range(n)]
        for i in range(n):
            for k in range(n):
                if power[i][k].is_zero():
                    continue
                for j in range(n):
                    if not L[k][j].is_zero():
                        nxt[i][j] = nxt[i][j] + power[i][k] * L[k][j]
        power = nxt
    return B


def gaussian_graphical_model(graph: Graph, lab: Optional[Labeling] = None) -> GaussianModel:
    return GaussianModel(graph, lab)
