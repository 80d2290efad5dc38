"""Graphs, separation tests, and rooted phylogenetic structure.

Vertices are 1-based integers.  Undirected edges are stored as (min, max)
pairs, directed edges as (source, target).  Phylogenetic networks are
validated DAGs of level 1: every biconnected component of the underlying
undirected graph contains at most one cycle.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .errors import (
    AdjacentPair,
    CyclicGraph,
    DuplicateEdge,
    MultipleRoots,
    NotLevelOne,
    OverlappingSets,
    SelfLoop,
    UnsupportedGraphKind,
)

UNDIRECTED = "undirected"
DIRECTED = "directed"


@dataclass(frozen=True)
class Graph:
    kind: str
    n: int
    edges: tuple  # sorted tuple of (u, v); undirected normalized to u < v

    def has_edge(self, u: int, v: int) -> bool:
        if self.kind == UNDIRECTED:
            u, v = min(u, v), max(u, v)
        return (u, v) in self._edge_set()

    def _edge_set(self) -> frozenset:
        return frozenset(self.edges)

    def neighbors(self, v: int) -> list:
        out = set()
        for a, b in self.edges:
            if a == v:
                out.add(b)
            elif b == v:
                out.add(a)
        return sorted(out)

    def children(self, v: int) -> list:
        return sorted(b for a, b in self.edges if a == v)

    def parents(self, v: int) -> list:
        return sorted(a for a, b in self.edges if b == v)

    def in_degree(self, v: int) -> int:
        return sum(1 for _, b in self.edges if b == v)

    def out_degree(self, v: int) -> int:
        return sum(1 for a, _ in self.edges if a == v)

    def vertices(self) -> range:
        return range(1, self.n + 1)

    def is_acyclic(self) -> bool:
        return self.topological_order() is not None

    def topological_order(self) -> Optional[list]:
        if self.kind != DIRECTED:
            raise UnsupportedGraphKind("topological order needs a directed graph")
        indeg = {v: 0 for v in self.vertices()}
        for _, b in self.edges:
            indeg[b] += 1
        queue = sorted(v for v, d in indeg.items() if d == 0)
        order = []
        indeg = dict(indeg)
        import heapq

        heapq.heapify(queue)
        while queue:
            v = heapq.heappop(queue)
            order.append(v)
            for w in self.children(v):
                indeg[w] -= 1
                if indeg[w] == 0:
                    heapq.heappush(queue, w)
        return order if len(order) == self.n else None

    def descendants(self, v: int) -> set:
        seen, stack = set(), [v]
        while stack:
            u = stack.pop()
            for w in self.children(u):
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return seen

    def ancestors_of_set(self, vs: Iterable[int]) -> set:
        seen = set(vs)
        stack = list(seen)
        while stack:
            u = stack.pop()
            for w in self.parents(u):
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return seen

    def underlying_undirected(self) -> "Graph":
        es = sorted({(min(a, b), max(a, b)) for a, b in self.edges})
        return Graph(UNDIRECTED, self.n, tuple(es))

    def __str__(self):
        es = "".join(f"({a}, {b})" for a, b in self.edges)
        return f"{self.kind.capitalize()} graph with {self.n} nodes and edges {es}"


def graph_from_edges(kind: str, edge_list: Sequence, n: Optional[int] = None) -> Graph:
    """Build a graph; vertex count defaults to the largest endpoint."""
    if kind not in (DIRECTED, UNDIRECTED):
        raise UnsupportedGraphKind(f"unknown graph kind {kind!r}")
    seen = set()
    edges = []
    top = 0
    for e in edge_list:
        u, v = int(e[0]), int(e[1])
        if u < 1 or v < 1:
            raise ValueError("vertices are 1-based")
        if u == v:
            raise SelfLoop(f"self-loop at vertex {u}")
        if kind == UNDIRECTED:
            u, v = min(u, v), max(u, v)
        if (u, v) in seen:
            raise DuplicateEdge(f"edge ({u}, {v}) repeated")
        seen.add((u, v))
        edges.append((u, v))
        top = max(top, u, v)
    if n is None:
        n = top
    elif n < top:
        raise ValueError("explicit vertex count below largest endpoint")
    return Graph(kind, n, tuple(sorted(edges)))


def _check_disjoint(*sets):
    for s1, s2 in itertools.combinations(sets, 2):
        if set(s1) & set(s2):
            raise OverlappingSets(f"sets {sorted(s1)} and {sorted(s2)} overlap")


def is_separated(G: Graph, A: Iterable[int], B: Iterable[int], C: Iterable[int]) -> bool:
    """True iff every path from A to B in the undirected graph meets C."""
    if G.kind != UNDIRECTED:
        raise UnsupportedGraphKind("is_separated needs an undirected graph")
    A, B, C = set(A), set(B), set(C)
    _check_disjoint(A, B, C)
    seen = set(A)
    stack = list(A)
    while stack:
        u = stack.pop()
        for w in G.neighbors(u):
            if w in C or w in seen:
                continue
            if w in B:
                return False
            seen.add(w)
            stack.append(w)
    return True


def minimal_separators(G: Graph, i: int, j: int) -> list:
    """All inclusion-minimal C separating non-adjacent i and j, sorted."""
    if G.has_edge(i, j):
        raise AdjacentPair(f"vertices {i} and {j} are adjacent")
    rest = [v for v in G.vertices() if v not in (i, j)]
    found: list = []
    for size in range(len(rest) + 1):
        for C in itertools.combinations(rest, size):
            cs = set(C)
            if any(set(prev) <= cs for prev in found):
                continue
            if is_separated(G, {i}, {j}, cs):
                found.append(tuple(sorted(C)))
    return sorted(found, key=lambda c: (len(c), c))


def d_separated(G: Graph, A: Iterable[int], B: Iterable[int], C: Iterable[int]) -> bool:
    """Whether C d-separates A and B, via the moral ancestral graph."""
    if G.kind != DIRECTED:
        raise UnsupportedGraphKind("d_separated needs a directed graph")
    if not G.is_acyclic():
        raise CyclicGraph("d-separation needs an acyclic graph")
    A, B, C = set(A), set(B), set(C)
    _check_disjoint(A, B, C)
    anc = G.ancestors_of_set(A | B | C)
    edges = {(min(a, b), max(a, b)) for a, b in G.edges if a in anc and b in anc}
    # moralize: marry co-parents of every vertex in the ancestral graph
    for v in anc:
        ps = [p for p in G.parents(v) if p in anc]
        for p1, p2 in itertools.combinations(sorted(ps), 2):
            edges.add((p1, p2))
    moral = Graph(UNDIRECTED, G.n, tuple(sorted(edges)))
    return is_separated(moral, A, B, C)


def minimal_d_separators(G: Graph, i: int, j: int) -> list:
    """Inclusion-minimal C with i d-separated from j given C."""
    if G.has_edge(i, j) or G.has_edge(j, i):
        raise AdjacentPair(f"vertices {i} and {j} are adjacent")
    rest = [v for v in G.vertices() if v not in (i, j)]
    found: list = []
    for size in range(len(rest) + 1):
        for C in itertools.combinations(rest, size):
            cs = set(C)
            if any(set(prev) <= cs for prev in found):
                continue
            if d_separated(G, {i}, {j}, cs):
                found.append(tuple(sorted(C)))
    return sorted(found, key=lambda c: (len(c), c))


@dataclass(frozen=True)
class Labeling:
    """Named vertex/edge labels; a total labeling named `color` drives
    colored Gaussian models."""

    name: str
    vertex_labels: tuple  # ((vertex, label), ...) sorted by vertex
    edge_labels: tuple  # (((u, v), label), ...) sorted by edge

    def vertex(self, v: int) -> Optional[str]:
        for u, lab in self.vertex_labels:
            if u == v:
                return lab
        return None

    def edge(self, e) -> Optional[str]:
        e = tuple(e)
        for f, lab in self.edge_labels:
            if f == e:
                return lab
        return None


def labeling(name: str, edge_labels: dict, vertex_labels: dict) -> Labeling:
    edges = tuple(
        sorted(((min(u, v), max(u, v)), lab) for (u, v), lab in edge_labels.items())
    )
    verts = tuple(sorted(vertex_labels.items()))
    return Labeling(name, verts, edges)


def graph_from_labeled_edges(
    kind: str, edge_labels: dict, vertex_labels: dict, name: str = "color"
):
    """Graph plus labeling, mirroring the labeled-edges constructor."""
    G = graph_from_edges(kind, list(edge_labels.keys()))
    return G, labeling(name, edge_labels, vertex_labels)


# ---------------------------------------------------------------------------
# phylogenetic structure


@dataclass(frozen=True)
class PhyloNetwork:
    graph: Graph
    root: int
    leaves: tuple
    hybrid_nodes: tuple
    hybrid_parent_edges: tuple  # ((hybrid, (edge, ...)), ...) edges ascending

    @property
    def is_tree(self) -> bool:
        return not self.hybrid_nodes

    def hybrid_edges_of(self, v: int) -> tuple:
        for h, es in self.hybrid_parent_edges:
            if h == v:
                return es
        raise KeyError(v)

    def __str__(self):
        es = "".join(f"({a}, {b})" for a, b in self.graph.edges)
        if self.is_tree:
            return f"Phylogenetic tree with {len(self.leaves)} leaves and edges {es}"
        hn = "{" + ", ".join(map(str, self.hybrid_nodes)) + "}"
        return f"Level-1 phylogenetic network with hybrid nodes {hn} and edges {es}"


def _biconnected_components(G: Graph) -> list:
    """Edge sets of biconnected components (standard low-link algorithm)."""
    adj = {v: G.neighbors(v) for v in G.vertices()}
    visited = {}
    low = {}
    comps = []
    stack: list = []
    counter = itertools.count()

    def dfs(root):
        work = [(root, None, iter(adj[root]))]
        visited[root] = low[root] = next(counter)
        while work:
            v, parent, it = work[-1]
            advanced = False
            for w in it:
                if w == parent:
                    continue
                edge = (min(v, w), max(v, w))
                if w not in visited:
                    stack.append(edge)
                    visited[w] = low[w] = next(counter)
                    work.append((w, v, iter(adj[w])))
                    advanced = True
                    break
                elif visited[w] < visited[v]:
                    stack.append(edge)
                    low[v] = min(low[v], visited[w])
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
                if low[v] >= visited[u]:
                    comp = []
                    edge = (min(u, v), max(u, v))
                    while stack:
                        comp.append(stack.pop())
                        if comp[-1] == edge:
                            break
                    comps.append(comp)

    for v in G.vertices():
        if v not in visited and adj[v]:
            dfs(v)
    return comps


def phylo_validate(G: Graph) -> PhyloNetwork:
    """Classify a directed graph as a rooted level-1 network (or tree)."""
    if G.kind != DIRECTED:
        raise UnsupportedGraphKind("phylogenetic networks are directed")
    if not G.is_acyclic():
        raise CyclicGraph("phylogenetic networks are acyclic")
    roots = [v for v in G.vertices() if G.in_degree(v) == 0]
    if len(roots) != 1:
        raise MultipleRoots(f"expected a unique root, found {roots}")
    root = roots[0]
    leaves = tuple(sorted(v for v in G.vertices() if G.out_degree(v) == 0))
    hybrids = tuple(sorted(v for v in G.vertices() if G.in_degree(v) >= 2))
    und = G.underlying_undirected()
    for comp in _biconnected_components(und):
        vs = {v for e in comp for v in e}
        if len(comp) > len(vs):
            raise NotLevelOne(
                f"biconnected component on {sorted(vs)} has more than one cycle"
            )
    hpe = tuple(
        (h, tuple(sorted((p, h) for p in G.parents(h)))) for h in hybrids
    )
    return PhyloNetwork(G, root, leaves, hybrids, hpe)


def displayed_trees(N: PhyloNetwork) -> list:
    """All trees obtained by keeping one parent edge per hybrid node.

    Returned as (tree, choice) pairs; the enumeration varies the last
    hybrid fastest and each hybrid's parent edges ascending, so the first
    tree keeps every hybrid's first parent edge.
    """
    if N.is_tree:
        return [(N, {})]
    hybrid_lists = [es for _, es in N.hybrid_parent_edges]
    out = []
    for combo in itertools.product(*hybrid_lists):
        choice = {h: kept for (h, _), kept in zip(N.hybrid_parent_edges, combo)}
        dropped = {
            e
            for (h, es) in N.hybrid_parent_edges
            for e in es
            if e != choice[h]
        }
        edges = tuple(e for e in N.graph.edges if e not in dropped)
        tree = phylo_validate(Graph(DIRECTED, N.graph.n, edges))
        out.append((tree, choice))
    return out
