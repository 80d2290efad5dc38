"""Buchberger engine: normal forms, reduced bases, elimination, saturation,
ideal equality and kernels of ring maps.

The pair queue uses the normal strategy (smallest lcm first) with the
Gebauer-Moeller product/chain criteria; without those the phylogenetic
examples do not finish.  Elimination is done with a two-block degrevlex
order, saturation by adjoining a Rabinowitsch variable.  All intermediate
polynomials are kept monic to bound coefficient growth.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Sequence

from gmpy2 import mpq

from .errors import DegreeBudgetExceeded, DuplicateName, RingMismatch, ZeroSaturand
from .polyring import (
    DEGREVLEX,
    MonomialOrder,
    MultiPoly,
    PolyRing,
    RingMap,
    apply_map,
    block_order,
    mono_div,
    mono_divides,
    mono_lcm,
    mono_mul,
    ring_new,
)

# ---------------------------------------------------------------------------
# raw-dict polynomial helpers (the engine works below the MultiPoly wrapper)


def _mask(m) -> int:
    """Support bitmask of an exponent tuple (used as a divisibility prefilter)."""
    b = 0
    for i, e in enumerate(m):
        if e:
            b |= 1 << i
    return b


def _divides(a, b) -> bool:
    for x, y in zip(a, b):
        if x > y:
            return False
    return True


def _reduce_full(p: dict, basis: list, keyf) -> dict:
    """Full normal form of term-dict p modulo [(lm, mask, deg, terms), ...] (monic)."""
    work = dict(p)
    out = {}
    while work:
        m = max(work, key=keyf)
        c = work.pop(m)
        mmask = _mask(m)
        mdeg = sum(m)
        for lm, lmask, ldeg, terms in basis:
            if ldeg <= mdeg and lmask & ~mmask == 0 and _divides(lm, m):
                shift = mono_div(m, lm)
                if any(shift):
                    for gm, gc in terms.items():
                        if gm == lm:
                            continue
                        mm = mono_mul(gm, shift)
                        s = work.get(mm, 0) - c * gc
                        if s:
                            work[mm] = s
                        else:
                            work.pop(mm, None)
                else:
                    for gm, gc in terms.items():
                        if gm == lm:
                            continue
                        s = work.get(gm, 0) - c * gc
                        if s:
                            work[gm] = s
                        else:
                            work.pop(gm, None)
                break
        else:
            out[m] = c
    return out


def _basis_entry(terms: dict, keyf) -> tuple:
    lm = max(terms, key=keyf)
    return (lm, _mask(lm), sum(lm), terms)


def _make_monic(terms: dict, keyf) -> dict:
    lm = max(terms, key=keyf)
    lc = terms[lm]
    if lc == 1:
        return terms
    inv = 1 / lc
    return {m: c * inv for m, c in terms.items()}


def _spair(gi: tuple, gj: tuple, keyf) -> dict:
    """S-polynomial of two monic basis entries."""
    lmi, ti = gi[0], gi[3]
    lmj, tj = gj[0], gj[3]
    L = mono_lcm(lmi, lmj)
    si = mono_div(L, lmi)
    sj = mono_div(L, lmj)
    out = {}
    for m, c in ti.items():
        mm = mono_mul(m, si)
        out[mm] = out.get(mm, 0) + c
    for m, c in tj.items():
        mm = mono_mul(m, sj)
        s = out.get(mm, 0) - c
        if s:
            out[mm] = s
        else:
            out.pop(mm, None)
    return {m: c for m, c in out.items() if c}


def _gm_update(G: list, pairs: dict, h: int):
    """Gebauer-Moeller pair update after appending basis entry h.

    pairs maps (i, j) to (lcm, mask, degree) of the leading monomials.
    """
    t, tmask, tdeg, _ = G[h]
    lcms = [mono_lcm(G[i][0], t) for i in range(h)]

    # chain criterion on surviving old pairs
    for ij in list(pairs):
        L, Lmask, Ldeg = pairs[ij]
        if tdeg <= Ldeg and tmask & ~Lmask == 0 and _divides(t, L):
            i, j = ij
            if lcms[i] != L and lcms[j] != L:
                del pairs[ij]

    # M criterion: keep only inclusion-minimal lcms.  Proper divisors sort
    # strictly earlier under (degree, tuple), so one pass suffices.
    infos = sorted(
        ((sum(L), L, i) for i, L in enumerate(lcms)),
        key=lambda x: (x[0], x[1]),
    )
    minimal = []  # (lcm, mask, deg, members)
    for di, li, i in infos:
        mi = _mask(li)
        dominated = False
        for lj, mj, dj, _ in minimal:
            if lj == li:
                continue
            if dj <= di and mj & ~mi == 0 and _divides(lj, li):
                dominated = True
                break
        if dominated:
            continue
        for entry in minimal:
            if entry[0] == li:
                entry[3].append(i)
                break
        else:
            minimal.append((li, mi, di, [i]))

    # F criterion (one pair per lcm) + product criterion (coprime pair
    # kills its whole class)
    for L, Lmask, Ldeg, members in minimal:
        if any(mono_mul(G[i][0], t) == L for i in members):
            continue
        pairs[(min(members), h)] = (L, Lmask, Ldeg)


def _buchberger_raw(seed: list, keyf, degree_cap=None) -> list:
    """Reduced Groebner basis of the term-dicts in `seed` under key `keyf`."""
    # inter-reduce the input
    gens = [g for g in seed if g]
    gens.sort(key=lambda g: keyf(max(g, key=keyf)))
    G = []  # basis entries (lm, mask, deg, terms)
    for g in gens:
        r = _reduce_full(g, G, keyf)
        if r:
            G.append(_basis_entry(_make_monic(r, keyf), keyf))
    if not G:
        return []

    pairs: dict = {}
    for h in range(len(G)):
        _gm_update(G, pairs, h)

    heap = [(L[2], keyf(L[0]), ij) for ij, L in pairs.items()]
    heapq.heapify(heap)
    alive = dict(pairs)

    while heap:
        _, _, ij = heapq.heappop(heap)
        if ij not in alive:
            continue
        del alive[ij]
        s = _spair(G[ij[0]], G[ij[1]], keyf)
        if not s:
            continue
        r = _reduce_full(s, G, keyf)
        if not r:
            continue
        if degree_cap is not None and max(sum(m) for m in r) > degree_cap:
            raise DegreeBudgetExceeded(
                f"basis element exceeds total degree cap {degree_cap}"
            )
        G.append(_basis_entry(_make_monic(r, keyf), keyf))
        h = len(G) - 1
        before = set(alive)
        _gm_update(G, alive, h)
        for ij2, L in alive.items():
            if ij2 not in before:
                heapq.heappush(heap, (L[2], keyf(L[0]), ij2))

    # minimal basis: drop elements whose lm is divisible by another lm
    order_idx = sorted(range(len(G)), key=lambda i: keyf(G[i][0]))
    kept = []
    for i in order_idx:
        lm, lmask, ldeg, _ = G[i]
        dominated = False
        for j in kept:
            jm = G[j][0]
            if jm != lm and G[j][2] <= ldeg and G[j][1] & ~lmask == 0 and _divides(jm, lm):
                dominated = True
                break
            if jm == lm:
                dominated = True
                break
        if not dominated:
            kept.append(i)
    # tail-reduce each survivor against the others
    reduced = []
    for i in kept:
        others = [G[j] for j in kept if j != i]
        r = _reduce_full(G[i][3], others, keyf)
        if r:
            reduced.append(_make_monic(r, keyf))
    reduced.sort(key=lambda g: keyf(max(g, key=keyf)))
    return reduced


# ---------------------------------------------------------------------------
# public layer


@dataclass
class Ideal:
    """Finite generating set in a ring, caching reduced Groebner bases."""

    ring: PolyRing
    gens: tuple
    degree_bound: Optional[int] = None  # set when a result is a truncation
    _gb_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __init__(self, ring: PolyRing, gens: Iterable[MultiPoly], degree_bound=None):
        self.ring = ring
        cleaned = []
        for g in gens:
            if g.ring != ring:
                raise RingMismatch("generator outside the ideal's ring")
            if not g.is_zero():
                cleaned.append(g)
        self.gens = tuple(cleaned)
        self.degree_bound = degree_bound
        self._gb_cache = {}

    def groebner_basis(self, order: MonomialOrder = DEGREVLEX, degree_cap=None) -> list:
        key = order
        if key not in self._gb_cache:
            keyf = order.key_func()
            raw = _buchberger_raw([dict(g.terms) for g in self.gens], keyf, degree_cap)
            self._gb_cache[key] = [MultiPoly(self.ring, g) for g in raw]
        return self._gb_cache[key]

    def contains(self, f: MultiPoly, order: MonomialOrder = DEGREVLEX) -> bool:
        return normal_form(f, self.groebner_basis(order), order).is_zero()

    def is_zero(self) -> bool:
        return not self.gens

    def __eq__(self, other):
        if not isinstance(other, Ideal):
            return NotImplemented
        return ideal_equal(self, other)


def normal_form(f: MultiPoly, G: Sequence[MultiPoly], order: MonomialOrder = DEGREVLEX) -> MultiPoly:
    """Remainder of f on division by G; no term divisible by any lt(G)."""
    keyf = order.key_func()
    basis = []
    for g in G:
        if g.ring != f.ring:
            raise RingMismatch("divisor outside the ring of f")
        if g.is_zero():
            continue
        basis.append(_basis_entry(_make_monic(dict(g.terms), keyf), keyf))
    return MultiPoly(f.ring, _reduce_full(dict(f.terms), basis, keyf))


def buchberger(I: Ideal, order: MonomialOrder = DEGREVLEX, degree_cap=None) -> list:
    """Reduced Groebner basis (monic, auto-reduced, sorted by leading monomial)."""
    return I.groebner_basis(order, degree_cap)


def _project_ring(ring: PolyRing, keep: list) -> PolyRing:
    return ring_new([ring.variables[i] for i in keep])


def eliminate(I: Ideal, elim_vars: Iterable, degree_cap=None) -> Ideal:
    """Generators of I intersected with the subring without `elim_vars`.

    `elim_vars` may be variable names or indices.  The result lives in the
    smaller ring (original variable order preserved).
    """
    elim_idx = set()
    for v in elim_vars:
        elim_idx.add(v if isinstance(v, int) else I.ring.var_index(v))
    n = I.ring.n
    elim = sorted(elim_idx)
    keep = [i for i in range(n) if i not in elim_idx]
    perm = elim + keep  # position p of the work ring holds original var perm[p]
    work_ring = ring_new([I.ring.variables[i] for i in perm])
    k = len(elim)

    def lift(f: MultiPoly) -> dict:
        return {tuple(m[i] for i in perm): c for m, c in f.terms.items()}

    keyf = block_order(k).key_func()
    raw = _buchberger_raw([lift(g) for g in I.gens], keyf, degree_cap)
    small_ring = _project_ring(I.ring, keep)
    out = []
    for g in raw:
        if all(all(e == 0 for e in m[:k]) for m in g):
            out.append(MultiPoly(small_ring, {m[k:]: c for m, c in g.items()}))
    result = Ideal(small_ring, out, degree_bound=I.degree_bound)
    # the subring part of a reduced block basis is itself the reduced
    # degrevlex basis of the elimination ideal (tail block is degrevlex)
    result._gb_cache[DEGREVLEX] = list(out)
    return result


def saturate(I: Ideal, f, degree_cap=None) -> Ideal:
    """I : f^infinity via one Rabinowitsch variable.

    `f` may be a single polynomial or a sequence (saturation at the
    product).
    """
    if isinstance(f, MultiPoly):
        fs = [f]
    else:
        fs = list(f)
    prod = I.ring.one()
    for g in fs:
        if g.ring != I.ring:
            raise RingMismatch("saturand outside the ideal's ring")
        prod = prod * g
    if prod.is_zero():
        raise ZeroSaturand("cannot saturate at zero")
    if prod.total_degree() == 0:
        return Ideal(I.ring, I.gens, degree_bound=I.degree_bound)

    tname = "t@sat"
    if tname in I.ring.variables:
        raise DuplicateName(f"ring already contains {tname}")
    big_ring = ring_new([tname, *I.ring.variables])

    def lift(p: MultiPoly) -> MultiPoly:
        return MultiPoly(big_ring, {(0, *m): c for m, c in p.terms.items()})

    t = big_ring.gen(0)
    gens = [lift(g) for g in I.gens]
    gens.append(t * lift(prod) - 1)
    J = Ideal(big_ring, gens)
    return eliminate(J, [tname], degree_cap)


def saturate_at_variables(I: Ideal, var_indices: Optional[Iterable] = None) -> Ideal:
    """Saturation at the product of (all, by default) ring variables.

    Requires every generator to be homogeneous in the standard grading;
    then the reduced degrevlex basis with a variable x cheapest turns
    I : x^inf into plain division by x (one pass per variable).
    """
    for g in I.gens:
        degs = {sum(m) for m in g.terms}
        if len(degs) > 1:
            raise ValueError("variable saturation requires homogeneous generators")
    n = I.ring.n
    idxs = list(var_indices) if var_indices is not None else list(range(n))
    current = [dict(g.terms) for g in I.gens]
    for v in idxs:
        perm = [i for i in range(n) if i != v] + [v]  # v revlex-cheapest
        inv = [0] * n
        for pos, orig in enumerate(perm):
            inv[orig] = pos
        keyf = DEGREVLEX.key_func()
        lifted = [{tuple(m[i] for i in perm): c for m, c in g.items()} for g in current]
        basis = _buchberger_raw(lifted, keyf)
        divided = []
        for g in basis:
            k = min(m[n - 1] for m in g)
            if k:
                g = {(*m[: n - 1], m[n - 1] - k): c for m, c in g.items()}
            divided.append({tuple(m[inv[i]] for i in range(n)): c for m, c in g.items()})
        current = divided
    return Ideal(I.ring, [MultiPoly(I.ring, g) for g in current])


def ideal_equal(I: Ideal, J: Ideal, order: MonomialOrder = DEGREVLEX) -> bool:
    """True iff the reduced Groebner bases under `order` coincide."""
    if I.ring != J.ring:
        raise RingMismatch("ideals live in different rings")
    return I.groebner_basis(order) == J.groebner_basis(order)


def kernel_of_map(phi: RingMap, degree_cap=None) -> Ideal:
    """Kernel of a (rational) ring map, by elimination on its graph ideal.

    Polynomial maps: eliminate the target variables from <x_i - phi(x_i)>.
    Rational maps: generators x_i*den - num_i together with t*den - 1,
    then eliminate the target variables and t.
    """
    src, tgt = phi.source, phi.target
    shared = set(src.variables) & set(tgt.variables)
    if shared:
        raise DuplicateName(f"source and target share variables {sorted(shared)}")
    tname = None
    names = list(tgt.variables)
    if phi.is_rational:
        tname = "t@rab"
        names.append(tname)
    names.extend(src.variables)
    big = ring_new(names)
    off = len(names) - src.n  # source vars sit at the tail

    def lift_target(p: MultiPoly) -> MultiPoly:
        pad = len(names) - tgt.n
        return MultiPoly(big, {(*m, *(0,) * pad): c for m, c in p.terms.items()})

    def src_gen(i: int) -> MultiPoly:
        return big.gen(off + i)

    gens = []
    if phi.is_rational:
        den = lift_target(phi.denominator)
        t = big.gen(tgt.n)
        for i, num in enumerate(phi.images):
            gens.append(src_gen(i) * den - lift_target(num))
        gens.append(t * den - 1)
        elim = list(tgt.variables) + [tname]
    else:
        for i, im in enumerate(phi.images):
            gens.append(src_gen(i) - lift_target(im))
        elim = list(tgt.variables)
    J = Ideal(big, gens)
    return eliminate(J, elim, degree_cap)
