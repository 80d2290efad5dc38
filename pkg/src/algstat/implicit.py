"""Multigraded implicitization: kernel components of a polynomial map by
exact linear algebra, degree by degree.

The maximal grading makes every generator image homogeneous: the grading
group is Z^m modulo the lattice spanned by exponent differences within
each image.  A kernel element of total degree d is multihomogeneous, so
the degree-d kernel splits into small linear-algebra problems, one per
occupied multidegree; minimal generators are the quotient by monomial
shifts of lower-degree generators.

Components are independent tasks; with workers > 1 they are evaluated in
a process pool and merged in sorted order, so results are identical for
any worker count.
"""

from __future__ import annotations

import itertools
import logging
import multiprocessing
from dataclasses import dataclass
from typing import Optional

from gmpy2 import mpq

from .exactnum import IntMatrix, SNFResult, rational_nullspace, rref, smith_normal_form
from .polyring import MultiPoly, RingMap

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class GradingGroup:
    """Z^m / (relation lattice), elements normalized to torsion + free coords."""

    ambient_rank: int
    relation_lattice: IntMatrix
    snf: Optional[SNFResult]
    torsion: tuple  # invariant factors > 1
    free_idx: tuple  # SNF coordinate positions past the lattice rank
    torsion_idx: tuple  # SNF coordinate positions with invariant factor > 1

    @property
    def element_length(self) -> int:
        return len(self.torsion) + len(self.free_idx)

    def zero(self) -> tuple:
        return (0,) * self.element_length

    def add(self, a: tuple, b: tuple) -> tuple:
        """Elements are (free coords..., torsion residues...)."""
        k = len(self.free_idx)
        free = tuple(x + y for x, y in zip(a[:k], b[:k]))
        tor = tuple((x + y) % d for x, y, d in zip(a[k:], b[k:], self.torsion))
        return free + tor

    def element_of_exponent(self, expo) -> tuple:
        """Class of an exponent vector: coordinates along the SNF column basis."""
        if self.snf is None:
            return tuple(expo)
        V = self.snf.V
        coords = [
            sum(expo[j] * V[j, i] for j in range(self.ambient_rank))
            for i in range(self.ambient_rank)
        ]
        free = tuple(coords[i] for i in self.free_idx)
        tor = tuple(coords[i] % d for i, d in zip(self.torsion_idx, self.torsion))
        return free + tor

    @staticmethod
    def format_element(e: tuple) -> str:
        return "[" + " ".join(map(str, e)) + "]"


def maximal_grading(phi: RingMap):
    """(grading group, {source variable: degree}, zero-image variable list).

    The relation lattice is spanned by all exponent differences between
    monomials of the same image; each variable's degree is the class of
    any monomial of its image.
    """
    m = phi.target.n
    rows = []
    base_expo = {}
    zero_images = []
    for name, im in zip(phi.source.variables, phi.images):
        monos = sorted(im.terms)
        if not monos:
            zero_images.append(name)
            continue
        base_expo[name] = monos[0]
        for other in monos[1:]:
            rows.append(tuple(a - b for a, b in zip(other, monos[0])))
    if zero_images:
        log.warning("images of %s are zero; they get degree 0", zero_images)
    if rows:
        R = IntMatrix.from_rows(rows)
        snf = smith_normal_form(R)
        diag = snf.diagonal()
        torsion_idx = tuple(i for i in range(snf.rank) if diag[i] > 1)
        torsion = tuple(diag[i] for i in torsion_idx)
        free_idx = tuple(range(snf.rank, m))
        grading = GradingGroup(m, R, snf, torsion, free_idx, torsion_idx)
    else:
        grading = GradingGroup(
            m, IntMatrix(0, m, ()), None, (), tuple(range(m)), ()
        )
    degrees = {}
    for name in phi.source.variables:
        if name in base_expo:
            degrees[name] = grading.element_of_exponent(base_expo[name])
        else:
            degrees[name] = grading.zero()
    return grading, degrees, tuple(zero_images)


@dataclass
class GradedKernelResult:
    grading: GradingGroup
    degrees: dict  # source variable name -> group element
    components: dict  # group element -> list of MultiPoly (minimal generators)
    max_total_degree: int
    new_by_degree: dict  # total degree -> number of new minimal generators
    zero_image_vars: tuple = ()

    def sorted_components(self) -> list:
        return [self.components[b] for b in sorted(self.components)]

    def total_generators(self) -> int:
        return sum(len(v) for v in self.components.values())

    def generators(self) -> list:
        return [g for gens in self.sorted_components() for g in gens]


# -- worker machinery (fork-friendly module globals)

_W: dict = {}


def _init_worker(images_raw, n_params):
    _W["images"] = images_raw
    _W["n_params"] = n_params


def _expand_image(expo):
    """Expansion of phi(x^expo) as a raw term dict over the parameter ring."""
    images = _W["images"]
    acc = {(0,) * _W["n_params"]: mpq(1)}
    for i, e in enumerate(expo):
        for _ in range(e):
            img = images[i]
            nxt = {}
            for m1, c1 in acc.items():
                for m2, c2 in img.items():
                    mm = tuple(a + b for a, b in zip(m1, m2))
                    s = nxt.get(mm, 0) + c1 * c2
                    if s:
                        nxt[mm] = s
                    else:
                        del nxt[mm]
            acc = nxt
    return acc


def _component_task(payload):
    """Nullspace of one multidegree component, minus known shifts.

    Returns (key, [coefficient vectors]) with exact rational entries; the
    vectors are rows of a reduced echelon basis, so the output is
    determined by the input alone.
    """
    key, monos, shift_vectors = payload
    expansions = [_expand_image(m) for m in monos]
    param_monos = sorted({pm for exp in expansions for pm in exp})
    row_index = {pm: r for r, pm in enumerate(param_monos)}
    matrix = [[mpq(0)] * len(monos) for _ in param_monos]
    for j, exp in enumerate(expansions):
        for pm, c in exp.items():
            matrix[row_index[pm]][j] = c
    if not matrix:  # all images vanish: everything is in the kernel
        null = [
            tuple(mpq(1 if i == j else 0) for i in range(len(monos)))
            for j in range(len(monos))
        ]
    else:
        null = rational_nullspace(matrix)
    if not null:
        return key, []
    if shift_vectors:
        reduced_shifts, pivots = rref(shift_vectors)
        new_vectors = []
        for v in null:
            v = list(v)
            for row, pc in zip(reduced_shifts, pivots):
                f = v[pc]
                if f:
                    v = [a - f * b for a, b in zip(v, row)]
            if any(v):
                new_vectors.append(v)
        if not new_vectors:
            return key, []
        basis, _ = rref(new_vectors)
    else:
        basis = null
    out = []
    for v in basis:
        out.append([(j, (int(c.numerator), int(c.denominator))) for j, c in enumerate(v) if c])
    return key, out


def _monomials_of_degree(nvars: int, d: int):
    for combo in itertools.combinations_with_replacement(range(nvars), d):
        expo = [0] * nvars
        for i in combo:
            expo[i] += 1
        yield tuple(expo)


def _shift_index_for_degree(grading, var_degrees, nvars, known_list, deg):
    """Map multidegree -> [(generator, shift monomial)] for shifts landing in
    the degree-<=deg monomial space."""
    out: dict = {}
    for g, gb, gmax in known_list:
        for rem in range(0, deg - gmax + 1):
            if rem == 0:
                shifts = [(0,) * nvars]
            else:
                shifts = _monomials_of_degree(nvars, rem)
            for shift in shifts:
                sb = gb
                for i, e in enumerate(shift):
                    for _ in range(e):
                        sb = grading.add(sb, var_degrees[i])
                out.setdefault(sb, []).append((g, shift))
    return out


def _shift_vectors(monos, shifted) -> list:
    """Coordinate vectors of the shifted generators over the monomial list."""
    index = {m: k for k, m in enumerate(monos)}
    out = []
    for g, shift in shifted:
        vec = [mpq(0)] * len(monos)
        for m, c in g.terms.items():
            mm = tuple(a + s for a, s in zip(m, shift))
            vec[index[mm]] = c
        out.append(vec)
    return out


def graded_component(phi: RingMap, b: tuple, d: int, known=()) -> list:
    """Minimal kernel generators of multidegree b and total degree d.

    `known` are lower-degree kernel generators whose monomial shifts are
    quotiented out.
    """
    grading, degrees, _ = maximal_grading(phi)
    src = phi.source
    nvars = src.n
    var_degrees = [degrees[name] for name in src.variables]
    _init_worker([dict(im.terms) for im in phi.images], phi.target.n)
    monos = []
    for deg in range(1, d + 1):
        for expo in _monomials_of_degree(nvars, deg):
            mb = grading.zero()
            for i, e in enumerate(expo):
                for _ in range(e):
                    mb = grading.add(mb, var_degrees[i])
            if mb == b:
                monos.append(expo)
    if not monos:
        return []
    monos.sort()
    known_list = [
        (g,) + _poly_multidegree(g, grading, var_degrees) for g in known
    ]
    shift_index = _shift_index_for_degree(grading, var_degrees, nvars, known_list, d)
    shifts = _shift_vectors(monos, shift_index.get(b, []))
    _, vecs = _component_task((b, monos, shifts))
    return [
        MultiPoly(src, {monos[j]: mpq(num, den) for j, (num, den) in vec}).primitive()
        for vec in vecs
    ]


def components_of_kernel(
    d: int,
    phi: RingMap,
    workers: int = 1,
) -> GradedKernelResult:
    """All minimal kernel generators of total degree <= d, by multidegree."""
    if phi.is_rational:
        raise ValueError("components_of_kernel needs a polynomial map")
    grading, degrees, zero_vars = maximal_grading(phi)
    src = phi.source
    nvars = src.n
    var_degrees = [degrees[name] for name in src.variables]
    images_raw = [dict(im.terms) for im in phi.images]
    _init_worker(images_raw, phi.target.n)

    components: dict = {}
    new_by_degree: dict = {}
    known_list = []  # (generator, multidegree, max total degree)
    cumulative: dict = {}  # multidegree -> sorted monomial list seen so far

    pool = None
    if workers > 1:
        pool = multiprocessing.get_context("fork").Pool(
            workers, initializer=_init_worker, initargs=(images_raw, phi.target.n)
        )
    try:
        for deg in range(1, d + 1):
            touched = set()
            for expo in _monomials_of_degree(nvars, deg):
                b = grading.zero()
                for i, e in enumerate(expo):
                    for _ in range(e):
                        b = grading.add(b, var_degrees[i])
                cumulative.setdefault(b, []).append(expo)
                touched.add(b)
            # only components that gained monomials can gain kernel elements
            shift_index = _shift_index_for_degree(
                grading, var_degrees, nvars, known_list, deg
            )
            tasks = []
            for b in sorted(touched):
                monos = sorted(cumulative[b])
                cumulative[b] = monos
                tasks.append((b, monos, _shift_vectors(monos, shift_index.get(b, []))))
            if pool is not None:
                results = pool.map(_component_task, tasks, chunksize=1)
            else:
                results = [_component_task(t) for t in tasks]
            count = 0
            for (b, vecs), task in zip(results, tasks):
                if not vecs:
                    continue
                monos = task[1]
                gens = []
                for vec in vecs:
                    terms = {
                        monos[j]: mpq(num, den) for j, (num, den) in vec
                    }
                    gens.append(MultiPoly(src, terms).primitive())
                components.setdefault(b, []).extend(gens)
                for g in gens:
                    gb, gmax = _poly_multidegree(g, grading, var_degrees)
                    known_list.append((g, gb, gmax))
                count += len(gens)
            new_by_degree[deg] = count
    finally:
        if pool is not None:
            pool.close()
            pool.join()
    return GradedKernelResult(
        grading=grading,
        degrees=degrees,
        components=components,
        max_total_degree=d,
        new_by_degree=new_by_degree,
        zero_image_vars=zero_vars,
    )


def _poly_multidegree(g: MultiPoly, grading: GradingGroup, var_degrees):
    """(multidegree, max total degree) of a multihomogeneous polynomial."""
    expo = next(iter(g.terms))
    b = grading.zero()
    for i, e in enumerate(expo):
        for _ in range(e):
            b = grading.add(b, var_degrees[i])
    return (b, max(sum(m) for m in g.terms))
