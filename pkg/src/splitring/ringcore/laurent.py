"""Laurent embedding of the tower ring, membership, and exact division.

Substituting ``s' = p/s`` for every conjugate generator embeds the tower ring
into the Laurent polynomial ring in the S-generators with coefficients that
are polynomials in the T/U indeterminates.  Exact division is carried out in
that (factorial) Laurent ring; the quotient divides in the tower ring iff it
passes the membership test :func:`from_laurent`.
"""

from __future__ import annotations

from collections import defaultdict
from fractions import Fraction
from functools import lru_cache

from ..errors import NonMember, NotDivisible, TooManyTerms, ZeroDivisor, ZeroElement
from .element import ZERO, Element, Kind, max_terms, mul


def _lmono_mul(m1, m2):
    if not m1:
        return m2
    if not m2:
        return m1
    d = dict(m1)
    for v, e in m2:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(((v, e) for v, e in d.items() if e), key=lambda ve: ve[0].sortkey))


def _lorder(m):
    return (sum(e for _, e in m), tuple((v.sortkey, e) for v, e in reversed(m)))


def _dmul(a, b):
    out = defaultdict(Fraction)
    for m1, c1 in a.items():
        for m2, c2 in b.items():
            out[_lmono_mul(m1, m2)] += c1 * c2
    out = {m: c for m, c in out.items() if c}
    if len(out) > max_terms():
        raise TooManyTerms(f"Laurent expansion produced {len(out)} terms")
    return out


class LaurentElement:
    """Laurent polynomial: S-generators may carry negative exponents.

    S' generators never occur.  Terms are stored in descending graded
    lexicographic order.
    """

    __slots__ = ("terms", "_key")

    def __init__(self, d=None):
        items = [(m, Fraction(c)) for m, c in (d or {}).items() if c]
        for m, _ in items:
            for v, e in m:
                if v.kind == Kind.SCONJ:
                    raise ValueError("Laurent elements cannot contain S' generators")
                if e < 0 and v.kind != Kind.S:
                    raise ValueError(f"{v.key} may not carry a negative exponent")
        items.sort(key=lambda mc: _lorder(mc[0]), reverse=True)
        self.terms = tuple(items)
        self._key = None

    @classmethod
    def monomial(cls, v, e=1, c=1):
        return cls({((v, e),): Fraction(c)} if e else {(): Fraction(c)})

    @classmethod
    def constant(cls, c):
        return cls({(): Fraction(c)})

    def as_dict(self):
        return dict(self.terms)

    def is_zero(self):
        return not self.terms

    def __add__(self, other):
        other = _lcoerce(other)
        d = self.as_dict()
        for m, c in other.terms:
            d[m] = d.get(m, 0) + c
        return LaurentElement(d)

    __radd__ = __add__

    def __neg__(self):
        return LaurentElement({m: -c for m, c in self.terms})

    def __sub__(self, other):
        return self + (-_lcoerce(other))

    def __rsub__(self, other):
        return _lcoerce(other) - self

    def __mul__(self, other):
        other = _lcoerce(other)
        return LaurentElement(_dmul(self.as_dict(), other.as_dict()))

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            if len(self.terms) != 1:
                raise ValueError("only Laurent monomials have negative powers")
            (m, c), = self.terms
            if any(v.kind != Kind.S for v, _ in m):
                raise ValueError("only S-generators can be inverted")
            return LaurentElement({tuple((v, e * n) for v, e in m): Fraction(1) / c ** (-n)})
        out = LaurentElement.constant(1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, LaurentElement):
            return self.terms == other.terms
        return NotImplemented

    def __hash__(self):
        return hash(self.key)

    def exponents_of(self, s):
        return sorted({dict(m).get(s, 0) for m, _ in self.terms})

    @property
    def key(self):
        if self._key is None:
            if not self.terms:
                self._key = "{0}"
            else:
                parts = []
                for m, c in self.terms:
                    mono = "*".join(f"{v.key}^{e}" for v, e in m)
                    parts.append(f"{c}*{mono}" if m else f"{c}")
                self._key = "{" + " + ".join(parts) + "}"
        return self._key

    def pretty(self):
        if not self.terms:
            return "0"
        out = []
        for i, (m, c) in enumerate(self.terms):
            neg = c < 0
            a = -c if neg else c
            fs = [v.pretty() if e == 1 else f"{v.pretty()}^{e}" for v, e in m]
            body = "*".join(fs) if fs and a == 1 else ("*".join([str(a)] + fs))
            if i == 0:
                out.append("-" + body if neg else body)
            else:
                out.append((" - " if neg else " + ") + body)
        return "".join(out)

    def __repr__(self):
        return f"LaurentElement({self.key})"

    __str__ = pretty


def _lcoerce(x):
    if isinstance(x, LaurentElement):
        return x
    if isinstance(x, Element):
        return to_laurent(x)
    return LaurentElement.constant(x)


@lru_cache(maxsize=20000)
def _laurent_dict(e):
    total = defaultdict(Fraction)
    for m, c in e.terms:
        base = {}
        conj_factors = []
        for v, k in m:
            if v.kind == Kind.SCONJ:
                s = v.conj
                base[s] = base.get(s, 0) - k
                conj_factors.append((v.split_prime, k))
            else:
                base[v] = base.get(v, 0) + k
        poly = {tuple(sorted(((v, k) for v, k in base.items() if k), key=lambda ve: ve[0].sortkey)): c}
        for p, k in conj_factors:
            poly = _dmul(poly, _laurent_pow(p, k))
        for mm, cc in poly.items():
            total[mm] += cc
    out = {m: c for m, c in total.items() if c}
    if len(out) > max_terms():
        raise TooManyTerms(f"Laurent expansion produced {len(out)} terms")
    return out


@lru_cache(maxsize=4096)
def _laurent_pow(p, k):
    if k == 1:
        return _laurent_dict(p)
    half = _laurent_pow(p, k // 2)
    sq = _dmul(half, half)
    return _dmul(sq, _laurent_dict(p)) if k % 2 else sq


def to_laurent(e):
    """Image of ``e`` in the Laurent ring (``s'`` replaced by ``p/s``)."""
    return LaurentElement(_laurent_dict(e))


def _shift(d, atoms):
    """Dense exponent vectors, shifted so every coordinate has minimum 0."""
    idx = {v: i for i, v in enumerate(atoms)}
    n = len(atoms)
    dense = {}
    for m, c in d.items():
        vec = [0] * n
        for v, e in m:
            vec[idx[v]] = e
        dense[tuple(vec)] = c
    lows = [min(vec[i] for vec in dense) for i in range(n)]
    return {tuple(a - b for a, b in zip(vec, lows)): c for vec, c in dense.items()}, lows


def _dorder(vec):
    return (sum(vec), vec[::-1])


def exact_divide_dicts(a, b):
    """Exact quotient of two Laurent polynomials (as dicts), or None.

    Both sides are shifted into the ordinary polynomial ring so that the
    divisor has no monomial factor; there a single divisor is a Groebner
    basis, so leading-term elimination decides divisibility.
    """
    if not b:
        raise ZeroDivisor("division by zero")
    if not a:
        return {}
    atoms = sorted({v for m in a for v, _ in m} | {v for m in b for v, _ in m}, key=lambda v: v.sortkey)
    A, lows_a = _shift(a, atoms)
    B, lows_b = _shift(b, atoms)
    # leading and trailing terms of a product are products of leading/trailing terms
    lb = max(B, key=_dorder)
    tb = min(B, key=_dorder)
    ta = min(A, key=_dorder)
    if any(x < y for x, y in zip(ta, tb)) or sum(max(A, key=_dorder)) < sum(lb):
        return None
    cb = B[lb]
    rem = dict(A)
    quot = {}
    limit = max_terms()
    while rem:
        la = max(rem, key=_dorder)
        diff = tuple(x - y for x, y in zip(la, lb))
        if any(x < 0 for x in diff):
            return None
        c = rem[la] / cb
        quot[diff] = c
        if len(quot) > limit:
            raise TooManyTerms("quotient exceeded the term limit")
        for m, cm in B.items():
            key = tuple(x + y for x, y in zip(m, diff))
            val = rem.get(key, 0) - c * cm
            if val:
                rem[key] = val
            else:
                rem.pop(key, None)
    offs = [x - y for x, y in zip(lows_a, lows_b)]
    out = {}
    for vec, c in quot.items():
        m = tuple((atoms[i], e + o) for i, (e, o) in enumerate(zip(vec, offs)) if e + o)
        out[m] = c
    return out


def laurent_divide(x, d):
    """Exact quotient of Laurent elements, or None."""
    q = exact_divide_dicts(x.as_dict(), d.as_dict())
    return None if q is None else LaurentElement(q)


def _members(d):
    """Convert a Laurent dict back to normal form; raises NonMember."""
    if not d:
        return ZERO
    s_atoms = {v for m in d for v, _ in m if v.kind == Kind.S}
    if not s_atoms:
        for m in d:
            for v, e in m:
                if e < 0:
                    raise NonMember(f"{v.key} carries a negative exponent")
        return Element._from_dict(d)
    s = max(s_atoms, key=lambda v: v.sortkey)
    comps = defaultdict(dict)
    for m, c in d.items():
        h = 0
        rest = []
        for v, e in m:
            if v == s:
                h = e
            else:
                rest.append((v, e))
        comps[h][tuple(rest)] = c
    total = ZERO
    for h in sorted(comps, reverse=True):
        comp = comps[h]
        if h >= 0:
            inner = _members(comp)
            piece = inner * Element.variable(s, h) if h else inner
        else:
            q = exact_divide_dicts(comp, _laurent_pow(s.split_prime, -h))
            if q is None:
                raise NonMember(
                    f"coefficient of {s.key}^{h} is not divisible by the split prime to the power {-h}"
                )
            piece = mul(_members(q), Element.variable(s.conj, -h))
        total = total + piece
    return total


def from_laurent(l):
    """Normal-form element with the given Laurent image; raises NonMember."""
    if isinstance(l, Element):
        raise TypeError("from_laurent expects a LaurentElement")
    return _members(l.as_dict())


def is_member(l):
    try:
        from_laurent(l)
    except NonMember:
        return False
    return True


def try_divide(x, d):
    """Return ``q`` with ``q*d == x`` exactly, or None when ``d`` does not divide ``x``."""
    if d.is_zero():
        raise ZeroDivisor("division by zero")
    if x.is_zero():
        return ZERO
    if d.is_constant():
        return x * (1 / d.constant_value())
    q = exact_divide_dicts(_laurent_dict(x), _laurent_dict(d))
    if q is None:
        return None
    try:
        return _members(q)
    except NonMember:
        return None


def divide(x, d):
    """Like :func:`try_divide` but raises NotDivisible."""
    q = try_divide(x, d)
    if q is None:
        raise NotDivisible(f"{d.pretty()} does not divide {x.pretty()}")
    return q


def divides(d, x):
    return try_divide(x, d) is not None


def valuation(x, p):
    """Largest ``n`` with ``p**n`` dividing ``x``."""
    if x.is_zero():
        raise ZeroElement("valuation of zero is infinite")
    if p.is_zero() or p.is_constant():
        raise ValueError("valuation needs a nonconstant prime")
    n = 0
    while True:
        q = try_divide(x, p)
        if q is None:
            return n
        x = q
        n += 1


def clear_caches():
    _laurent_dict.cache_clear()
    _laurent_pow.cache_clear()
