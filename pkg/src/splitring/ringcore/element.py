"""Indeterminates and elements of the split tower in conjugate-pair normal form.

An element is a finite sum of rational multiples of monomials in the
registered indeterminates.  Whenever a monomial contains both generators
``s`` and ``s'`` of one split, the product ``s*s'`` is rewritten to the split
prime; the rewrite is repeated until no conjugate pair is left.  Because the
split prime always has strictly smaller rank than the split stage, the
rewriting terminates; all overlaps resolve, so the normal form is unique.
"""

from __future__ import annotations

import enum
from collections import defaultdict
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

from ..errors import RankTooLow, TooManyTerms, ZeroElement

_limits = {"max_terms": 10000}


def set_max_terms(n):
    """Set the expansion guard; products with more terms raise TooManyTerms."""
    _limits["max_terms"] = int(n)


def max_terms():
    return _limits["max_terms"]


class Kind(enum.IntEnum):
    S = 0
    SCONJ = 1
    T = 2
    U = 3


class Indet:
    """An interned indeterminate.

    ``payload`` holds the monic split prime for S/SCONJ and the pair ``(a, b)``
    for U.  T-indeterminates have no payload.  Two indeterminates are equal
    iff their canonical keys are equal; instances are interned on the key.
    """

    __slots__ = ("kind", "stage", "payload", "key", "sortkey", "__weakref__")
    _interned: dict[str, "Indet"] = {}

    def __new__(cls, kind, stage, payload=()):
        kind = Kind(kind)
        payload = tuple(payload)
        expected = {Kind.S: 1, Kind.SCONJ: 1, Kind.T: 0, Kind.U: 2}[kind]
        if len(payload) != expected:
            raise ValueError(f"{kind.name} indeterminate takes {expected} payload elements")
        if stage < 1:
            raise ValueError("indeterminate stage must be >= 1")
        if kind == Kind.T:
            key = f"t{stage}"
            pkey = ""
        elif kind == Kind.U:
            pkey = f"{payload[0].key};{payload[1].key}"
            key = f"u[{stage};{pkey}]"
        else:
            pkey = payload[0].key
            head = "s" if kind == Kind.S else "s'"
            key = f"{head}[{stage};{pkey}]"
        self = cls._interned.get(key)
        if self is not None:
            return self
        self = object.__new__(cls)
        self.kind = kind
        self.stage = stage
        self.payload = payload
        self.key = key
        self.sortkey = (stage, int(kind), pkey)
        cls._interned[key] = self
        return self

    def __reduce__(self):
        return (Indet, (self.kind, self.stage, self.payload))

    def __hash__(self):
        return hash(self.key)

    def __eq__(self, other):
        return self is other or (isinstance(other, Indet) and self.key == other.key)

    def __lt__(self, other):
        return self.sortkey < other.sortkey

    def __repr__(self):
        return f"Indet({self.key})"

    @property
    def is_split_generator(self):
        return self.kind in (Kind.S, Kind.SCONJ)

    @property
    def conj(self):
        """The conjugate generator of an S/SCONJ indeterminate."""
        if self.kind == Kind.S:
            return Indet(Kind.SCONJ, self.stage, self.payload)
        if self.kind == Kind.SCONJ:
            return Indet(Kind.S, self.stage, self.payload)
        raise ValueError(f"{self.key} has no conjugate")

    @property
    def split_prime(self):
        if not self.is_split_generator:
            raise ValueError(f"{self.key} is not a split generator")
        return self.payload[0]

    @property
    def s(self):
        """The S-generator of the split this generator belongs to."""
        return self if self.kind == Kind.S else self.conj

    def pretty(self):
        if self.kind == Kind.T:
            return self.key
        if self.kind == Kind.U:
            a, b = self.payload
            return f"u[{self.stage};{a.pretty()};{b.pretty()}]"
        head = "s" if self.kind == Kind.S else "s'"
        return f"{head}[{self.stage};{self.payload[0].pretty()}]"


# A monomial is a tuple of (Indet, exponent >= 1) pairs in ascending indet order.

def _sort_pairs(d):
    return tuple(sorted(((v, e) for v, e in d.items() if e), key=lambda ve: ve[0].sortkey))


def mono_mul(m1, m2):
    if not m1:
        return m2
    if not m2:
        return m1
    d = dict(m1)
    for v, e in m2:
        d[v] = d.get(v, 0) + e
    return _sort_pairs(d)


@lru_cache(maxsize=None)
def mono_order_key(m):
    """Graded lexicographic key; the highest indeterminate is most significant."""
    return (sum(e for _, e in m), tuple((v.sortkey, e) for v, e in reversed(m)))


def mono_key(m):
    return "*".join(f"{v.key}^{e}" for v, e in m)


def _coerce_fraction(c):
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, Rational)):
        return Fraction(c)
    raise TypeError(f"exact rational coefficient expected, got {type(c).__name__}")


class Element:
    """An immutable element of the tower ring in normal form.

    ``terms`` is a tuple of ``(monomial, Fraction)`` pairs sorted in
    descending canonical monomial order with nonzero coefficients.
    """

    __slots__ = ("terms", "_key", "_hash")

    def __init__(self, terms=()):
        self.terms = tuple(terms)
        self._key = None
        self._hash = None

    @classmethod
    def _from_dict(cls, d):
        items = [(m, c) for m, c in d.items() if c]
        if len(items) > _limits["max_terms"]:
            raise TooManyTerms(f"expansion produced {len(items)} terms (limit {_limits['max_terms']})")
        items.sort(key=lambda mc: mono_order_key(mc[0]), reverse=True)
        return cls(items)

    @classmethod
    def constant(cls, c):
        c = _coerce_fraction(c)
        return cls(((((), c),) if c else ()))

    @classmethod
    def variable(cls, v, exponent=1):
        return cls(((((v, exponent),), Fraction(1)),))

    @classmethod
    def coerce(cls, x):
        return x if isinstance(x, Element) else cls.constant(x)

    # -- basic queries ---------------------------------------------------

    @property
    def key(self):
        """Canonical, injective text encoding."""
        if self._key is None:
            if not self.terms:
                self._key = "{0}"
            else:
                parts = []
                for m, c in self.terms:
                    parts.append(f"{c}*{mono_key(m)}" if m else f"{c}")
                self._key = "{" + " + ".join(parts) + "}"
        return self._key

    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return not self.terms or (len(self.terms) == 1 and not self.terms[0][0])

    def constant_value(self):
        if not self.is_constant():
            raise ValueError("element is not constant")
        return self.terms[0][1] if self.terms else Fraction(0)

    def is_unit(self):
        """Units of the tower ring are exactly the nonzero constants."""
        return bool(self.terms) and self.is_constant()

    def leading_coefficient(self):
        if not self.terms:
            raise ZeroElement("zero has no leading coefficient")
        return self.terms[0][1]

    def monic(self):
        return self * (1 / self.leading_coefficient())

    @property
    def rank(self):
        """Largest stage of an indeterminate in the normal form (0 for constants)."""
        return max((v.stage for m, _ in self.terms for v, _ in m), default=0)

    def indets(self):
        """Top-level indeterminates occurring in the normal form, sorted."""
        found = {v for m, _ in self.terms for v, _ in m}
        return sorted(found, key=lambda v: v.sortkey)

    def contains(self, x):
        return any(v == x for m, _ in self.terms for v, _ in m)

    def as_dict(self):
        return dict(self.terms)

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, Element):
            try:
                other = Element.constant(other)
            except TypeError:
                return NotImplemented
        return add(self, other)

    __radd__ = __add__

    def __neg__(self):
        return Element((m, -c) for m, c in self.terms)

    def __sub__(self, other):
        if not isinstance(other, Element):
            try:
                other = Element.constant(other)
            except TypeError:
                return NotImplemented
        return add(self, -other)

    def __rsub__(self, other):
        return Element.coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Element):
            try:
                c = _coerce_fraction(other)
            except TypeError:
                return NotImplemented
            if not c:
                return ZERO
            return Element((m, k * c) for m, k in self.terms)
        return mul(self, other)

    __rmul__ = __mul__

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise ValueError("elements can only be raised to nonnegative integer powers")
        return power(self, n)

    def __eq__(self, other):
        if isinstance(other, Element):
            return self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.is_constant() and self.constant_value() == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.key)
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        return f"Element({self.key})"

    def __str__(self):
        return self.pretty()

    def pretty(self):
        """Relaxed display form: implicit 1 coefficients and exponents."""
        if not self.terms:
            return "0"
        out = []
        for i, (m, c) in enumerate(self.terms):
            neg = c < 0
            a = -c if neg else c
            factors = [v.pretty() if e == 1 else f"{v.pretty()}^{e}" for v, e in m]
            if not factors:
                body = str(a)
            elif a == 1:
                body = "*".join(factors)
            else:
                body = f"{a}*" + "*".join(factors)
            if i == 0:
                out.append(f"-{body}" if neg else body)
            else:
                out.append(f" - {body}" if neg else f" + {body}")
        return "".join(out)


ZERO = Element()
ONE = Element.constant(1)


def add(x, y):
    d = dict(x.terms)
    for m, c in y.terms:
        d[m] = d.get(m, 0) + c
    return Element._from_dict(d)


def _conjugate_pairs(d):
    return [v for v in d if v.kind == Kind.S and v.conj in d]


def _reduce_raw(m, rng):
    d = dict(m)
    pairs = _conjugate_pairs(d)
    if not pairs:
        return {m: Fraction(1)}
    if rng is None:
        v = max(pairs, key=lambda w: w.sortkey)
        k = min(d[v], d[v.conj])
    else:
        v = rng.choice(sorted(pairs, key=lambda w: w.sortkey))
        k = rng.randint(1, min(d[v], d[v.conj]))
    d[v] -= k
    d[v.conj] -= k
    rest = _sort_pairs(d)
    out = defaultdict(Fraction)
    for mp, cp in _power(v.split_prime, k, rng).terms:
        for mr, cr in _reduce(mono_mul(rest, mp), rng):
            out[mr] += cp * cr
    return {mr: c for mr, c in out.items() if c}


@lru_cache(maxsize=200000)
def _reduce_cached(m):
    return tuple(_reduce_raw(m, None).items())


def _reduce(m, rng=None):
    """Rewrite a raw monomial into normal form; returns (monomial, coeff) pairs."""
    if rng is None:
        return _reduce_cached(m)
    return tuple(_reduce_raw(m, rng).items())


def mul(x, y, rng=None):
    """Product in normal form.

    ``rng`` (a ``random.Random``) randomizes which conjugate pair is rewritten
    first and how many copies at a time; the result must not depend on it.
    """
    if not x.terms or not y.terms:
        return ZERO
    raw = defaultdict(Fraction)
    for m1, c1 in x.terms:
        for m2, c2 in y.terms:
            raw[mono_mul(m1, m2)] += c1 * c2
    out = defaultdict(Fraction)
    for m, c in raw.items():
        if not c:
            continue
        for mr, cr in _reduce(m, rng):
            out[mr] += c * cr
    return Element._from_dict(out)


@lru_cache(maxsize=4096)
def _power_cached(x, n):
    if n == 0:
        return ONE
    if n == 1:
        return x
    half = _power_cached(x, n // 2)
    sq = mul(half, half)
    return mul(sq, x) if n % 2 else sq


def _power(x, n, rng=None):
    if rng is None:
        return _power_cached(x, n)
    out = ONE
    for _ in range(n):
        out = mul(out, x, rng)
    return out


def power(x, n):
    return _power_cached(x, n)


# -- grading ---------------------------------------------------------------

def _split_s(k):
    if not isinstance(k, Indet) or not k.is_split_generator:
        raise TypeError("split key must be an S or S' indeterminate")
    return k.s


def monomial_grade(m, s):
    sc = s.conj
    g = 0
    for v, e in m:
        if v == s:
            g += e
        elif v == sc:
            g -= e
    return g


def grade_decompose(e, k):
    """Split ``e`` into components homogeneous with respect to the split ``k``.

    The grade of a monomial is the exponent of ``s`` minus the exponent of
    ``s'``.  This is a ring grading on elements of rank at most the split
    stage; higher-rank elements raise RankTooLow.
    """
    s = _split_s(k)
    if e.rank > s.stage:
        raise RankTooLow(f"rank {e.rank} exceeds split stage {s.stage}; grading undefined")
    comps = defaultdict(list)
    for m, c in e.terms:
        comps[monomial_grade(m, s)].append((m, c))
    return {g: Element(ts) for g, ts in sorted(comps.items(), reverse=True)}


def grades(e, k):
    """Sorted set of grades occurring in ``e`` with respect to split ``k``.

    For rank above the split stage, grades are read off the Laurent image,
    where ``s`` is a genuine Laurent variable.
    """
    s = _split_s(k)
    if e.rank <= s.stage:
        return sorted({monomial_grade(m, s) for m, _ in e.terms})
    from .laurent import to_laurent

    return to_laurent(e).exponents_of(s)


def spread(e, k):
    """Top grade minus bottom grade; additive under multiplication."""
    if e.is_zero():
        raise ZeroElement("spread of zero is undefined")
    gs = grades(e, k)
    return gs[-1] - gs[0]


def rank(e):
    return e.rank


def coefficients_in(e, x):
    """Coefficients of ``e`` with respect to the indeterminate ``x``.

    For T/U indeterminates the result is the list ``[c0, ..., cn]`` with
    ``e == sum(ci * x**i)``.  For S/S' the result is a dict from grade to
    coefficient: ``e == sum(c*x**h for h >= 0) + sum(c*conj(x)**-h for h < 0)``;
    see :func:`reassemble`.
    """
    if x.stage < e.rank:
        raise RankTooLow(f"{x.key} has stage {x.stage} < rank {e.rank}")
    if x.kind in (Kind.T, Kind.U):
        buckets = defaultdict(list)
        for m, c in e.terms:
            n = 0
            rest = []
            for v, k in m:
                if v == x:
                    n = k
                else:
                    rest.append((v, k))
            buckets[n].append((tuple(rest), c))
        top = max(buckets, default=0)
        return [Element._from_dict(dict(buckets.get(i, ()))) for i in range(top + 1)]
    xc = x.conj
    buckets = defaultdict(dict)
    for m, c in e.terms:
        g = monomial_grade(m, x.s) * (1 if x.kind == Kind.S else -1)
        rest = tuple((v, k) for v, k in m if v != x and v != xc)
        buckets[g][rest] = c
    return {g: Element._from_dict(d) for g, d in sorted(buckets.items(), reverse=True)}


def reassemble(coeffs, x):
    """Inverse of :func:`coefficients_in`."""
    if isinstance(coeffs, dict):
        total = ZERO
        for g, c in coeffs.items():
            gen = x if g >= 0 else x.conj
            total = total + c * Element.variable(gen) ** abs(g) if g else total + c
        return total
    total = ZERO
    xe = Element.variable(x)
    for i, c in enumerate(coeffs):
        total = total + c * xe ** i
    return total


def clear_caches():
    _reduce_cached.cache_clear()
    _power_cached.cache_clear()
    mono_order_key.cache_clear()
