"""Phylogenetic models on trees and level-1 networks.

Transition matrices are symbol templates instantiated per edge (edge
indices: pendant edges first, ordered by leaf, then interior edges
ascending).  Group-based models (Jukes-Cantor, Kimura 2/3) live over
Z/2 x Z/2 with labels 1..4 <-> bit pairs 00,01,10,11; their Fourier
parametrization is monomial on trees and a hybrid-weighted sum of
monomials on networks.

Coordinate conventions: probability coordinates collapse to orbits under
the state permutations preserving the template and root distribution;
Fourier coordinates range over group-sum-zero tuples modulo the template
preserving group automorphisms.  The transform between the two coordinate
systems is the character (Hadamard) matrix compressed to classes with
orbit-size weights; its rows reproduce the classical Jukes-Cantor change
of coordinates.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import reduce
from typing import Optional

from gmpy2 import mpq

from .errors import (
    InvalidTemplate,
    NoSuchEdge,
    NotGroupBased,
    NotHybridEdge,
    SymmetryViolation,
    UnsupportedAlgorithm,
)
from .exactnum import IntMatrix, lattice_kernel
from .graphcore import Graph, PhyloNetwork, displayed_trees, phylo_validate
from .groebner import Ideal, kernel_of_map, saturate_at_variables
from .polyring import MultiPoly, PolyRing, RingMap, ring_new

STATES = 4

# -- the group Z/2 x Z/2 on labels 1..4 (addition is xor on label-1)


def group_add(*labels) -> int:
    return reduce(lambda a, b: a ^ b, ((l - 1) for l in labels), 0) + 1


def char_value(h: int, g: int) -> int:
    """Character pairing (+-1) of two group labels."""
    return -1 if bin((h - 1) & (g - 1)).count("1") % 2 else 1


CHARACTER_MATRIX = tuple(
    tuple(char_value(i, j) for j in range(1, 5)) for i in range(1, 5)
)


def _char_tuple(h: tuple, g: tuple) -> int:
    v = 1
    for a, b in zip(h, g):
        v *= char_value(a, b)
    return v


def _group_automorphisms() -> list:
    """All linear bijections of Z/2 x Z/2 as label permutations (fix 1)."""
    return [(1, *p) for p in itertools.permutations((2, 3, 4))]


@dataclass(frozen=True)
class GroupStructure:
    """Fourier symbol per group label, e.g. (x, y, y, y) for Jukes-Cantor."""

    fourier_template: tuple

    @property
    def characters(self) -> tuple:
        return CHARACTER_MATRIX

    def preserved_automorphisms(self) -> list:
        out = []
        for p in _group_automorphisms():
            if all(
                self.fourier_template[p[i] - 1] == self.fourier_template[i]
                for i in range(4)
            ):
                out.append(p)
        return out


@dataclass(frozen=True)
class CoordClass:
    representative: tuple
    members: tuple


def _orbits(tuples, perms) -> list:
    seen, out = set(), []
    for t in sorted(tuples):
        if t in seen:
            continue
        orb = sorted({tuple(p[x - 1] for x in t) for p in perms})
        seen.update(orb)
        out.append(CoordClass(orb[0], tuple(orb)))
    return out


_GROUP_KINDS = {
    "JC": (("a", "b", "b", "b"), ("x", "y", "y", "y")),
    "K2": (("a", "b", "b", "c"), ("x", "y", "y", "z")),
    "K3": (("a", "b", "c", "d"), ("x", "y", "z", "t")),
}

UNIFORM_ROOT = tuple(mpq(1, 4) for _ in range(4))


class PhyloModel:
    """Network + substitution template (+ optional group structure)."""

    def __init__(
        self,
        network: PhyloNetwork,
        template,
        group: Optional[GroupStructure] = None,
        root_distribution=UNIFORM_ROOT,
        model_type: str = "custom",
    ):
        self.network = network
        self.template = tuple(tuple(str(s) for s in row) for row in template)
        self.states = len(self.template)
        if any(len(row) != self.states for row in self.template):
            raise InvalidTemplate("template must be square")
        if group is not None:
            if self.states != 4:
                raise InvalidTemplate("group-based models need 4 states")
            diffs = {}
            for i in range(4):
                for j in range(4):
                    d = group_add(i + 1, j + 1)
                    sym = self.template[i][j]
                    if diffs.setdefault(d, sym) != sym:
                        raise InvalidTemplate(
                            "template not constant on group-difference classes"
                        )
        self.group = group
        self.root_distribution = (
            tuple(mpq(x) for x in root_distribution)
            if root_distribution is not None
            else None
        )
        if self.root_distribution is not None and len(self.root_distribution) != self.states:
            raise InvalidTemplate("root distribution length must match states")
        self.model_type = model_type
        # pendant edges by leaf, then interior edges ascending
        leaves = set(network.leaves)
        pend = sorted((e for e in network.graph.edges if e[1] in leaves), key=lambda e: (e[1], e[0]))
        inner = sorted(e for e in network.graph.edges if e[1] not in leaves)
        self.edge_order = pend + inner
        self.edge_index = {e: i + 1 for i, e in enumerate(self.edge_order)}
        self._displayed = displayed_trees(network)
        self._cache: dict = {}

    def __eq__(self, other):
        if not isinstance(other, PhyloModel):
            return NotImplemented
        return (
            self.network == other.network
            and self.template == other.template
            and self.group == other.group
            and self.root_distribution == other.root_distribution
            and self.model_type == other.model_type
        )

    def __str__(self):
        N = self.network
        nedges = len(N.graph.edges)
        if N.is_tree:
            where = f"a tree with {len(N.leaves)} leaves and {nedges} edges"
        else:
            k = len(N.hybrid_nodes)
            where = (
                f"a level-1 network with {k} hybrid node{'s' if k > 1 else ''}, "
                f"{len(N.leaves)} leaves and {nedges} edges"
            )
        if self.is_group_based:
            four = ", ".join(f":{s}" for s in self.group.fourier_template)
            return (
                f"Group-based phylogenetic model ({self.model_type}) on {where} "
                f"with fourier parameters of the form [{four}]"
            )
        return f"Phylogenetic model ({self.model_type}) on {where}"

    # -- symbols

    @property
    def is_group_based(self) -> bool:
        return self.group is not None

    def _default_space(self) -> str:
        return "fourier" if self.is_group_based else "probability"

    def _space(self, space: Optional[str]) -> str:
        space = space or self._default_space()
        if space not in ("probability", "fourier"):
            raise UnsupportedAlgorithm(f"unknown coordinate space {space!r}")
        if space == "fourier" and not self.is_group_based:
            raise NotGroupBased("Fourier coordinates need a group-based model")
        return space

    def _symbols(self, space: str) -> list:
        if space == "fourier":
            src = self.group.fourier_template
        else:
            src = [s for row in self.template for s in row]
        out = []
        for s in src:
            if s in ("0", "1"):
                continue
            if s not in out:
                out.append(s)
        return out

    # -- rings

    def parameter_ring(self, space: Optional[str] = None):
        """(ring, name -> generator map) for the requested coordinate space."""
        space = self._space(space)
        key = ("parameter_ring", space)
        if key not in self._cache:
            names = []
            for hi, (h, es) in enumerate(self.network.hybrid_parent_edges, start=1):
                names += [f"l[{hi},{ci}]" for ci in range(1, len(es) + 1)]
            if space == "probability" and self.root_distribution is None:
                names += [f"pi[{i}]" for i in range(1, self.states + 1)]
            nedges = len(self.edge_order)
            for sym in self._symbols(space):
                names += [f"{sym}[{e}]" for e in range(1, nedges + 1)]
            ring = ring_new(names)
            gens = {name: ring.gen(i) for i, name in enumerate(ring.variables)}
            self._cache[key] = (ring, gens)
        return self._cache[key]

    def coordinate_classes(self, space: Optional[str] = None) -> list:
        space = self._space(space)
        key = ("classes", space)
        if key not in self._cache:
            n = len(self.network.leaves)
            if space == "probability":
                tuples = itertools.product(range(1, self.states + 1), repeat=n)
                perms = self._template_preserving_permutations()
            else:
                tuples = [
                    t
                    for t in itertools.product(range(1, 5), repeat=n)
                    if group_add(*t) == 1
                ]
                perms = self.group.preserved_automorphisms()
            self._cache[key] = _orbits(tuples, perms)
        return self._cache[key]

    def _template_preserving_permutations(self) -> list:
        out = []
        for p in itertools.permutations(range(1, self.states + 1)):
            if self.root_distribution is None:
                if p != tuple(range(1, self.states + 1)):
                    continue  # symbolic root: only the identity fixes it
            elif any(
                self.root_distribution[p[i] - 1] != self.root_distribution[i]
                for i in range(self.states)
            ):
                continue
            if all(
                self.template[p[i] - 1][p[j] - 1] == self.template[i][j]
                for i in range(self.states)
                for j in range(self.states)
            ):
                out.append(tuple(p))
        return out

    def model_ring(self, space: Optional[str] = None):
        """(ring, representative tuple -> variable map)."""
        space = self._space(space)
        key = ("model_ring", space)
        if key not in self._cache:
            classes = self.coordinate_classes(space)
            letter = "p" if space == "probability" else "q"
            names = [
                f"{letter}[{','.join(map(str, c.representative))}]" for c in classes
            ]
            ring = ring_new(names)
            var_map = {c.representative: ring.gen(i) for i, c in enumerate(classes)}
            self._cache[key] = (ring, var_map)
        return self._cache[key]

    # -- per-edge symbol lookups

    def _edge(self, e) -> int:
        e = tuple(e)
        if e not in self.edge_index:
            raise NoSuchEdge(f"{e} is not an edge of the network")
        return self.edge_index[e]

    def entry_transition_matrix(self, i: int, j: int, e) -> MultiPoly:
        idx = self._edge(e)
        ring, gens = self.parameter_ring("probability")
        sym = self.template[i - 1][j - 1]
        if sym == "0":
            return ring.zero()
        if sym == "1":
            return ring.one()
        return gens[f"{sym}[{idx}]"]

    def entry_fourier_parameter(self, i: int, e) -> MultiPoly:
        if not self.is_group_based:
            raise NotGroupBased("no Fourier parameters without a group")
        idx = self._edge(e)
        ring, gens = self.parameter_ring("fourier")
        sym = self.group.fourier_template[i - 1]
        return gens[f"{sym}[{idx}]"]

    def entry_hybrid_parameter(self, e) -> MultiPoly:
        e = tuple(e)
        space = self._default_space()
        ring, gens = self.parameter_ring(space)
        for hi, (h, es) in enumerate(self.network.hybrid_parent_edges, start=1):
            if e in es:
                ci = es.index(e) + 1
                return gens[f"l[{hi},{ci}]"]
        raise NotHybridEdge(f"{e} is not a hybrid parent edge")

    # -- parametrizations

    def _lambda_exponent(self, ring: PolyRing, choice: dict) -> tuple:
        expo = [0] * ring.n
        for hi, (h, es) in enumerate(self.network.hybrid_parent_edges, start=1):
            ci = es.index(choice[h]) + 1
            expo[ring.var_index(f"l[{hi},{ci}]")] += 1
        return tuple(expo)

    def probability_parametrization(self) -> RingMap:
        if "prob_param" not in self._cache:
            ring, _ = self.parameter_ring("probability")
            mring, var_map = self.model_ring("probability")
            classes = self.coordinate_classes("probability")
            images = {}
            for cls in classes:
                img = self._prob_image(ring, cls.representative)
                for member in cls.members[1:]:
                    if self._prob_image(ring, member) != img:
                        raise SymmetryViolation(
                            f"orbit of {cls.representative} has unequal images"
                        )
                images[cls.representative] = img
            phi = RingMap(
                mring,
                ring,
                tuple(images[c.representative] for c in classes),
            )
            self._cache["prob_param"] = phi
        return self._cache["prob_param"]

    def _prob_image(self, ring: PolyRing, leaf_states: tuple) -> MultiPoly:
        """Marginalize the Markov process over interior states."""
        N = self.network
        leaf_pos = {v: i for i, v in enumerate(N.leaves)}
        sym_pos = {}
        for sym in self._symbols("probability"):
            for e, idx in self.edge_index.items():
                sym_pos[(sym, idx)] = ring.var_index(f"{sym}[{idx}]")
        terms: dict = {}
        for tree, choice in self._displayed:
            lam = self._lambda_exponent(ring, choice)
            interior = [v for v in tree.graph.vertices() if v not in leaf_pos]
            edges = [(u, v, self.edge_index[(u, v)]) for (u, v) in tree.graph.edges]
            for assign in itertools.product(
                range(1, self.states + 1), repeat=len(interior)
            ):
                state = {v: s for v, s in zip(interior, assign)}
                for v, i in leaf_pos.items():
                    state[v] = leaf_states[i]
                expo = list(lam)
                coeff = mpq(1)
                dead = False
                for (u, v, idx) in edges:
                    sym = self.template[state[u] - 1][state[v] - 1]
                    if sym == "0":
                        dead = True
                        break
                    if sym == "1":
                        continue
                    expo[sym_pos[(sym, idx)]] += 1
                if dead:
                    continue
                if self.root_distribution is None:
                    expo[ring.var_index(f"pi[{state[N.root]}]")] += 1
                else:
                    coeff = self.root_distribution[state[N.root] - 1]
                    if coeff == 0:
                        continue
                key = tuple(expo)
                c = terms.get(key, 0) + coeff
                if c:
                    terms[key] = c
                else:
                    terms.pop(key, None)
        return MultiPoly(ring, terms)

    def fourier_parametrization(self) -> RingMap:
        if not self.is_group_based:
            raise NotGroupBased("Fourier parametrization needs a group-based model")
        if "fourier_param" not in self._cache:
            ring, _ = self.parameter_ring("fourier")
            mring, var_map = self.model_ring("fourier")
            classes = self.coordinate_classes("fourier")
            images = {}
            for cls in classes:
                img = self._fourier_image(ring, cls.representative)
                for member in cls.members[1:]:
                    if self._fourier_image(ring, member) != img:
                        raise SymmetryViolation(
                            f"orbit of {cls.representative} has unequal images"
                        )
                images[cls.representative] = img
            phi = RingMap(
                mring, ring, tuple(images[c.representative] for c in classes)
            )
            self._cache["fourier_param"] = phi
        return self._cache["fourier_param"]

    def _fourier_image(self, ring: PolyRing, g: tuple) -> MultiPoly:
        N = self.network
        leaf_pos = {v: i for i, v in enumerate(N.leaves)}
        terms: dict = {}
        for tree, choice in self._displayed:
            expo = list(self._lambda_exponent(ring, choice))
            for (u, v) in tree.graph.edges:
                idx = self.edge_index[(u, v)]
                below = (tree.graph.descendants(v) | {v}) & set(N.leaves)
                gamma = group_add(*(g[leaf_pos[w]] for w in below))
                sym = self.group.fourier_template[gamma - 1]
                expo[ring.var_index(f"{sym}[{idx}]")] += 1
            key = tuple(expo)
            terms[key] = terms.get(key, 0) + 1
        return MultiPoly(ring, {m: mpq(c) for m, c in terms.items() if c})

    def parametrization(self, space: Optional[str] = None) -> RingMap:
        space = self._space(space)
        if space == "fourier":
            return self.fourier_parametrization()
        return self.probability_parametrization()

    # -- coordinate change

    def coordinate_change(self) -> RingMap:
        """Linear map expressing Fourier class variables in probability ones."""
        if "coord_change" not in self._cache:
            self._build_coordinate_changes()
        return self._cache["coord_change"]

    def inverse_coordinate_change(self) -> RingMap:
        if "coord_change_inv" not in self._cache:
            self._build_coordinate_changes()
        return self._cache["coord_change_inv"]

    def _build_coordinate_changes(self):
        if not self.is_group_based:
            raise NotGroupBased("coordinate change needs a group-based model")
        n = len(self.network.leaves)
        qring, qvars = self.model_ring("fourier")
        pring, pvars = self.model_ring("probability")
        pcls = self.coordinate_classes("probability")
        qcls = self.coordinate_classes("fourier")
        if len(pcls) != len(qcls):
            raise SymmetryViolation(
                "probability and Fourier class counts differ; no square transform"
            )
        q_images = []
        for qc in qcls:
            terms = {}
            for pc in pcls:
                w = mpq(sum(_char_tuple(qc.representative, g) for g in pc.members), len(pc.members))
                if w:
                    var = pvars[pc.representative]
                    terms[next(iter(var.terms))] = w
            q_images.append(MultiPoly(pring, terms))
        p_images = []
        scale = mpq(1, 4**n)
        for pc in pcls:
            terms = {}
            for qc in qcls:
                w = (
                    mpq(len(pc.members))
                    * sum(_char_tuple(h, pc.representative) for h in qc.members)
                    * scale
                )
                if w:
                    var = qvars[qc.representative]
                    terms[next(iter(var.terms))] = w
            p_images.append(MultiPoly(qring, terms))
        self._cache["coord_change"] = RingMap(qring, pring, tuple(q_images))
        self._cache["coord_change_inv"] = RingMap(pring, qring, tuple(p_images))

    # -- vanishing ideals

    def vanishing_ideal(
        self,
        space: Optional[str] = None,
        algorithm: str = "default",
        max_degree: int = 3,
        workers: int = 1,
        degree_cap=None,
    ) -> Ideal:
        space = self._space(space)
        if algorithm == "default":
            if self.network.is_tree and self.is_group_based and space == "fourier":
                algorithm = "toric"
            elif not self.network.is_tree:
                algorithm = "multigraded"
            else:
                algorithm = "eliminate"
        key = ("vanishing", space, algorithm, max_degree if algorithm == "multigraded" else None)
        if key not in self._cache:
            if algorithm == "toric":
                if not (self.network.is_tree and self.is_group_based and space == "fourier"):
                    raise UnsupportedAlgorithm(
                        "toric algorithm needs a group-based tree model in Fourier space"
                    )
                result = self._toric_ideal()
            elif algorithm == "eliminate":
                result = kernel_of_map(self.parametrization(space), degree_cap)
            elif algorithm == "multigraded":
                from .implicit import components_of_kernel

                res = components_of_kernel(
                    max_degree, self.parametrization(space), workers=workers
                )
                ring = self.model_ring(space)[0]
                gens = [g for gens in res.sorted_components() for g in gens]
                result = Ideal(ring, gens, degree_bound=max_degree)
            else:
                raise UnsupportedAlgorithm(algorithm)
            self._cache[key] = result
        return self._cache[key]

    def _toric_ideal(self) -> Ideal:
        phi = self.fourier_parametrization()
        ring = phi.source
        nparams = phi.target.n
        cols = []
        for im in phi.images:
            if len(im.terms) != 1:
                raise UnsupportedAlgorithm("toric path needs a monomial map")
            (mono, coeff), = im.terms.items()
            if coeff != 1:
                raise UnsupportedAlgorithm("toric path needs coefficient-1 monomials")
            cols.append(mono)
        A = IntMatrix.from_rows(list(zip(*cols))) if cols else IntMatrix(0, 0, ())
        basis = lattice_kernel(A)
        gens = []
        for v in basis:
            plus = tuple(max(x, 0) for x in v)
            minus = tuple(max(-x, 0) for x in v)
            gens.append(MultiPoly(ring, {plus: mpq(1)}) - MultiPoly(ring, {minus: mpq(1)}))
        I = Ideal(ring, gens)
        return saturate_at_variables(I)


# -- constructors


def _as_network(N) -> PhyloNetwork:
    if isinstance(N, PhyloNetwork):
        return N
    if isinstance(N, Graph):
        return phylo_validate(N)
    raise TypeError("expected a Graph or PhyloNetwork")


def phylogenetic_model(N, template, root_distribution=UNIFORM_ROOT) -> PhyloModel:
    """Model with an explicit substitution template (no group structure)."""
    return PhyloModel(_as_network(N), template, root_distribution=root_distribution)


def _group_model(N, kind: str) -> PhyloModel:
    prob_f, four_f = _GROUP_KINDS[kind]
    template = [
        [prob_f[group_add(i, j) - 1] for j in range(1, 5)] for i in range(1, 5)
    ]
    return PhyloModel(
        _as_network(N),
        template,
        group=GroupStructure(four_f),
        model_type=kind,
    )


def jukes_cantor_model(N) -> PhyloModel:
    return _group_model(N, "JC")


def kimura2_model(N) -> PhyloModel:
    return _group_model(N, "K2")


def kimura3_model(N) -> PhyloModel:
    return _group_model(N, "K3")


def general_markov_model(N) -> PhyloModel:
    template = [
        [f"m{i}{j}" for j in range(1, STATES + 1)] for i in range(1, STATES + 1)
    ]
    return PhyloModel(
        _as_network(N),
        template,
        root_distribution=None,
        model_type="GM",
    )
