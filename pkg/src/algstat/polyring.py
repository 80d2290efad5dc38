"""Sparse multivariate polynomials over exact rationals.

Monomials are exponent tuples (one slot per ring variable).  A polynomial
is a mapping monomial -> nonzero coefficient.  Variable display names may
carry index brackets (``s[1,2]``, ``q[2,3,4]``, ``k[Green]``); whitespace
inside names is normalized away so printed output can be parsed back.

The text grammar used by golden files and the CLI:

    term  ::=  [coef "*"] factor ("*" factor)*
    coef  ::=  int | int "//" int
    factor::=  varname ["^" int]

with terms joined by ``+`` / ``-``.  A coefficient juxtaposed to a
variable (``2p[1,1,2]``) is accepted on input.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence, Union

from gmpy2 import mpq

from .errors import DuplicateName, ParseError, RingMismatch
from .exactnum import rat_to_str

Monomial = tuple  # exponent vector, length == number of ring variables


def _normalize_name(name: str) -> str:
    return re.sub(r"\s+", "", name)


@dataclass(frozen=True)
class PolyRing:
    """Ordered, named variable list; polynomials reference their ring."""

    variables: tuple

    @property
    def n(self) -> int:
        return len(self.variables)

    @property
    def id(self) -> str:
        digest = hashlib.sha1("\x1f".join(self.variables).encode()).hexdigest()
        return f"ring-{digest[:12]}"

    def var_index(self, name: str) -> int:
        try:
            return self.variables.index(_normalize_name(name))
        except ValueError:
            raise ParseError(f"no variable {name!r} in ring {self.variables}")

    def gen(self, i: int) -> "MultiPoly":
        expo = tuple(1 if j == i else 0 for j in range(self.n))
        return MultiPoly(self, {expo: mpq(1)})

    def gens(self) -> list:
        return [self.gen(i) for i in range(self.n)]

    def zero(self) -> "MultiPoly":
        return MultiPoly(self, {})

    def one(self) -> "MultiPoly":
        return self.const(1)

    def const(self, c) -> "MultiPoly":
        c = mpq(c)
        if c == 0:
            return MultiPoly(self, {})
        return MultiPoly(self, {(0,) * self.n: c})


def ring_new(names: Iterable[str]) -> PolyRing:
    """Create a polynomial ring over QQ with the given ordered variables."""
    normed = tuple(_normalize_name(n) for n in names)
    if len(set(normed)) != len(normed):
        raise DuplicateName(f"duplicate variable names in {normed}")
    return PolyRing(normed)


# ---------------------------------------------------------------------------
# monomial orders


@dataclass(frozen=True)
class MonomialOrder:
    """lex, degrevlex, or a two-block elimination order.

    Block orders compare the leading `elim`-variable block first; inner
    orders default to degrevlex on both blocks.
    """

    kind: str = "degrevlex"
    elim: int = 0
    inner: tuple = ("degrevlex", "degrevlex")

    def key_func(self) -> Callable[[Monomial], tuple]:
        if self.kind == "lex":
            return lambda m: m
        if self.kind == "degrevlex":
            return _degrevlex_key
        if self.kind == "block":
            head = _base_key(self.inner[0])
            tail = _base_key(self.inner[1])
            k = self.elim
            return lambda m: (head(m[:k]), tail(m[k:]))
        raise ValueError(f"unknown order kind {self.kind!r}")


def _degrevlex_key(m: Monomial) -> tuple:
    return (sum(m), tuple(-e for e in reversed(m)))


def _base_key(kind: str) -> Callable[[Monomial], tuple]:
    if kind == "lex":
        return lambda m: m
    if kind == "degrevlex":
        return _degrevlex_key
    raise ValueError(f"unknown order kind {kind!r}")


DEGREVLEX = MonomialOrder()
LEX = MonomialOrder(kind="lex")


def block_order(elim: int, inner=("degrevlex", "degrevlex")) -> MonomialOrder:
    return MonomialOrder(kind="block", elim=elim, inner=tuple(inner))


def compare(order: MonomialOrder, m1: Monomial, m2: Monomial) -> int:
    """-1, 0 or 1 as m1 <, =, > m2 under the order."""
    if len(m1) != len(m2):
        raise RingMismatch("monomials of different lengths")
    k = order.key_func()
    a, b = k(m1), k(m2)
    return (a > b) - (a < b)


def mono_mul(m1: Monomial, m2: Monomial) -> Monomial:
    return tuple(a + b for a, b in zip(m1, m2))


def mono_divides(m1: Monomial, m2: Monomial) -> bool:
    return all(a <= b for a, b in zip(m1, m2))


def mono_div(m1: Monomial, m2: Monomial) -> Monomial:
    return tuple(a - b for a, b in zip(m1, m2))


def mono_lcm(m1: Monomial, m2: Monomial) -> Monomial:
    return tuple(max(a, b) for a, b in zip(m1, m2))


# ---------------------------------------------------------------------------
# polynomials


class MultiPoly:
    """Sparse polynomial; never stores zero coefficients.  Treat as immutable."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: PolyRing, terms: dict):
        self.ring = ring
        self.terms = terms

    # -- basics

    def is_zero(self) -> bool:
        return not self.terms

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(m) for m in self.terms)

    def constant_value(self):
        zero = (0,) * self.ring.n
        return self.terms.get(zero, mpq(0))

    def leading(self, key: Callable[[Monomial], tuple]):
        """(monomial, coefficient) maximal under the order key."""
        m = max(self.terms, key=key)
        return m, self.terms[m]

    def monic(self, key: Callable[[Monomial], tuple] = _degrevlex_key) -> "MultiPoly":
        if not self.terms:
            return self
        _, c = self.leading(key)
        if c == 1:
            return self
        inv = 1 / c
        return MultiPoly(self.ring, {m: cc * inv for m, cc in self.terms.items()})

    def primitive(self) -> "MultiPoly":
        """Integer-content-free scalar multiple with positive leading coefficient."""
        if not self.terms:
            return self
        from math import gcd

        den_lcm = 1
        for c in self.terms.values():
            den_lcm = den_lcm * int(c.denominator) // gcd(den_lcm, int(c.denominator))
        g = 0
        for c in self.terms.values():
            g = gcd(g, abs(int(c.numerator * (den_lcm // c.denominator))))
        scale = mpq(den_lcm, g)
        lead_c = self.terms[max(self.terms, key=_degrevlex_key)]
        if lead_c < 0:
            scale = -scale
        return self.scale(scale)

    def scale(self, c) -> "MultiPoly":
        c = mpq(c)
        if c == 0:
            return MultiPoly(self.ring, {})
        return MultiPoly(self.ring, {m: cc * c for m, cc in self.terms.items()})

    # -- arithmetic

    def _check(self, other: "MultiPoly"):
        if self.ring != other.ring:
            raise RingMismatch("polynomials from different rings")

    def __add__(self, other):
        if not isinstance(other, MultiPoly):
            other = self.ring.const(other)
        self._check(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return MultiPoly(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.ring, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, MultiPoly):
            other = self.ring.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            return self.scale(other)
        self._check(other)
        if len(self.terms) > len(other.terms):
            big, small = self.terms, other.terms
        else:
            big, small = other.terms, self.terms
        out = {}
        for m2, c2 in small.items():
            for m1, c1 in big.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                s = out.get(m, 0) + c1 * c2
                if s:
                    out[m] = s
                else:
                    del out[m]
        return MultiPoly(self.ring, out)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative exponent")
        result = self.ring.one()
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base if e > 1 else base
            e >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, MultiPoly):
            if isinstance(other, (int, type(mpq(0)))):
                return self == self.ring.const(other)
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        return hash((self.ring, frozenset(self.terms.items())))

    # -- evaluation

    def evaluate(self, values: Sequence) -> mpq:
        """Exact value at a full point (one rational per ring variable)."""
        assert len(values) == self.ring.n
        vals = [mpq(v) for v in values]
        total = mpq(0)
        for m, c in self.terms.items():
            t = c
            for e, v in zip(m, vals):
                if e:
                    t = t * v**e
            total += t
        return total

    # -- printing / parsing

    def sorted_terms(self, key: Callable[[Monomial], tuple] = _degrevlex_key) -> list:
        return sorted(self.terms.items(), key=lambda mc: key(mc[0]), reverse=True)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms():
            factors = []
            for i, e in enumerate(m):
                if e == 1:
                    factors.append(self.ring.variables[i])
                elif e > 1:
                    factors.append(f"{self.ring.variables[i]}^{e}")
            mono = "*".join(factors)
            if not mono:
                body = rat_to_str(abs(c))
            elif abs(c) == 1:
                body = mono
            else:
                body = f"{rat_to_str(abs(c))}*{mono}"
            sign = "-" if c < 0 else "+"
            parts.append((sign, body))
        first_sign, first_body = parts[0]
        out = (first_sign if first_sign == "-" else "") + first_body
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self):
        return f"MultiPoly({self})"


_NUM_RE = re.compile(r"\d+")


def parse_poly(ring: PolyRing, text: str) -> MultiPoly:
    """Parse the canonical text grammar back into a polynomial."""
    s = re.sub(r"\s+", "", text)
    if not s:
        raise ParseError("empty polynomial text")
    names = sorted(range(ring.n), key=lambda i: -len(ring.variables[i]))
    terms: dict = {}
    i = 0
    n = len(s)

    def match_var(pos):
        for idx in names:
            nm = ring.variables[idx]
            if s.startswith(nm, pos):
                return idx, pos + len(nm)
        return None, pos

    while i < n:
        sign = 1
        while i < n and s[i] in "+-":
            if s[i] == "-":
                sign = -sign
            i += 1
        if i >= n:
            raise ParseError(f"dangling sign in {text!r}")
        coeff = mpq(sign)
        expo = [0] * ring.n
        saw_factor = False
        expect_factor = True
        while i < n and expect_factor:
            if s[i].isdigit():
                m = _NUM_RE.match(s, i)
                num = int(m.group())
                i = m.end()
                if s.startswith("//", i):
                    i += 2
                    m = _NUM_RE.match(s, i)
                    if not m:
                        raise ParseError(f"malformed rational in {text!r}")
                    coeff *= mpq(num, int(m.group()))
                    i = m.end()
                else:
                    coeff *= num
                saw_factor = True
            else:
                vi, j = match_var(i)
                if vi is None:
                    raise ParseError(f"unexpected character {s[i]!r} at {i} in {text!r}")
                i = j
                e = 1
                if i < n and s[i] == "^":
                    m = _NUM_RE.match(s, i + 1)
                    if not m:
                        raise ParseError(f"malformed exponent in {text!r}")
                    e = int(m.group())
                    i = m.end()
                expo[vi] += e
                saw_factor = True
            if i < n and s[i] == "*":
                i += 1
                expect_factor = True
            elif i < n and (s[i].isdigit() or match_var(i)[0] is not None):
                expect_factor = True  # juxtaposition, e.g. 2p[1,1,2]
            else:
                expect_factor = False
        if not saw_factor:
            raise ParseError(f"empty term in {text!r}")
        key = tuple(expo)
        c = terms.get(key, 0) + coeff
        if c:
            terms[key] = c
        else:
            terms.pop(key, None)
    return MultiPoly(ring, terms)


# ---------------------------------------------------------------------------
# ring maps


@dataclass(frozen=True)
class RingMap:
    """Homomorphism given by generator images; rational maps share one denominator."""

    source: PolyRing
    target: PolyRing
    images: tuple
    denominator: Optional[MultiPoly] = None

    def __post_init__(self):
        if len(self.images) != self.source.n:
            raise RingMismatch("one image per source variable required")
        for im in self.images:
            if im.ring != self.target:
                raise RingMismatch("image lives outside the target ring")
        if self.denominator is not None and self.denominator.is_zero():
            raise RingMismatch("zero denominator")

    @property
    def is_rational(self) -> bool:
        return self.denominator is not None

    def image_of(self, name: str) -> MultiPoly:
        return self.images[self.source.var_index(name)]


def _substitute(phi: RingMap, f: MultiPoly, numerators, den: Optional[MultiPoly], k: int):
    out = phi.target.zero()
    pow_cache = [dict() for _ in range(len(numerators))]

    def power(i, e):
        cache = pow_cache[i]
        if e not in cache:
            cache[e] = numerators[i] ** e
        return cache[e]

    den_cache = {}

    def den_power(e):
        if e not in den_cache:
            den_cache[e] = den**e
        return den_cache[e]

    for m, c in f.terms.items():
        t = phi.target.const(c)
        for i, e in enumerate(m):
            if e:
                t = t * power(i, e)
        if den is not None:
            t = t * den_power(k - sum(m))
        out = out + t
    return out


def apply_map(phi: RingMap, f: MultiPoly):
    """Substitute generator images into f.

    Polynomial maps return a MultiPoly in the target ring; rational maps
    return ``(numerator, k)`` with the substituted value equal to
    numerator / denominator**k.
    """
    if f.ring != phi.source:
        raise RingMismatch("polynomial not in the map's source ring")
    if not phi.is_rational:
        return _substitute(phi, f, phi.images, None, 0)
    k = max(f.total_degree(), 0)
    num = _substitute(phi, f, phi.images, phi.denominator, k)
    return num, k


def identity_map(ring: PolyRing) -> RingMap:
    return RingMap(ring, ring, tuple(ring.gens()))
