"""Factorization certificates over stable and unit primes, and the norm phi."""

from __future__ import annotations

from fractions import Fraction
from functools import cached_property

from .errors import NotSubcertificate, ParseError, TemporaryDivisor, ZeroElement
from .ringcore import Element, Kind, parse_element, try_divide
from .tower import PrimeHandle


class Certificate:
    """``unit * prod(value(h)**e)`` for registered, pairwise non-associate handles."""

    __slots__ = ("unit", "factors", "__dict__")

    def __init__(self, unit=1, factors=None):
        unit = Fraction(unit)
        if not unit:
            raise ZeroElement("a certificate has a nonzero unit")
        items = dict(factors or {})
        for h, e in items.items():
            if not isinstance(h, PrimeHandle):
                raise TypeError("certificate factors must be PrimeHandles")
            if not isinstance(e, int) or e < 0:
                raise ValueError("exponents must be nonnegative integers")
        self.unit = unit
        self.factors = tuple(sorted(((h, e) for h, e in items.items() if e), key=lambda he: he[0].sortkey))

    @classmethod
    def of_handle(cls, h, e=1):
        return cls(1, {h: e})

    def handles(self):
        return [h for h, _ in self.factors]

    def exponent(self, h):
        return dict(self.factors).get(h, 0)

    @cached_property
    def _value(self):
        total = Element.constant(self.unit)
        for h, e in self.factors:
            total = total * h.value() ** e
        return total

    def value(self):
        return self._value

    def stable_part(self):
        return Certificate(1, {h: e for h, e in self.factors if h.is_stable})

    def unit_part(self):
        """Rational unit times the unit-prime factors (a unit of the localized ring)."""
        return Certificate(self.unit, {h: e for h, e in self.factors if h.is_unit})

    def __mul__(self, other):
        return cert_mul(self, other)

    def __eq__(self, other):
        if not isinstance(other, Certificate):
            return NotImplemented
        return self.unit == other.unit and self.factors == other.factors

    def __hash__(self):
        return hash((self.unit, self.factors))

    @property
    def key(self):
        parts = [str(self.unit)] + [f"{h.key}^{e}" for h, e in self.factors]
        return " * ".join(parts)

    def pretty(self):
        parts = [] if self.unit == 1 and self.factors else [str(self.unit)]
        parts += [h.pretty() if e == 1 else f"{h.pretty()}^{e}" for h, e in self.factors]
        return " * ".join(parts)

    def __repr__(self):
        return f"Certificate({self.key})"


def cert_value(c):
    return c.value()


def cert_mul(c, d):
    exps = dict(c.factors)
    for h, e in d.factors:
        exps[h] = exps.get(h, 0) + e
    return Certificate(c.unit * d.unit, exps)


def cert_gcd(c, d):
    """Minimum exponents over stable and unit handles alike; unit 1."""
    de = dict(d.factors)
    return Certificate(1, {h: min(e, de[h]) for h, e in c.factors if h in de})


def cert_cofactor(c, g):
    ce = dict(c.factors)
    out = dict(ce)
    for h, e in g.factors:
        if ce.get(h, 0) < e:
            raise NotSubcertificate(f"{h.key} has exponent {ce.get(h, 0)} < {e}")
        out[h] = ce[h] - e
    return Certificate(c.unit / g.unit, out)


def phi(c):
    """Sum of squared exponents of the stable handles."""
    return sum(e * e for h, e in c.factors if h.is_stable)


def stable_squarefree(c):
    return all(e <= 1 for h, e in c.factors if h.is_stable)


def is_unit_in_R(c):
    return not any(h.is_stable for h, _ in c.factors)


def verify_certificate(c, e):
    return c.value() == e


def certify(tower, e, max_stage=None):
    """Trial-divide ``e`` by the registered handles (of stage <= ``max_stage``).

    Raises TemporaryDivisor when a nonconstant cofactor is left over: such
    a cofactor has no registered stable or unit prime factor, so all of its
    prime factors are temporary at that stage.
    """
    if e.is_zero():
        raise ZeroElement("zero has no factorization")
    exps = {}
    rest = e
    for h in sorted(tower.handles(), key=lambda h: h.sortkey, reverse=True):
        if rest.is_constant():
            break
        if max_stage is not None and h.stage > max_stage:
            continue
        if h.stage > rest.rank and h.is_unit:
            continue
        hv = h.value()
        while True:
            q = try_divide(rest, hv)
            if q is None:
                break
            exps[h] = exps.get(h, 0) + 1
            rest = q
    if not rest.is_constant():
        raise TemporaryDivisor(f"{rest.pretty()} has no registered prime factor; it is not yet split")
    return Certificate(rest.constant_value(), exps)


def parse_certificate(src, tower, names=None):
    """Parse ``<rational> [* <handle>^<exp> ...]``.

    Handles are split generators (``s[..]``/``s'[..]``), unit primes
    ``up[u[..]]``, or names resolving to certificates.
    """
    parts = [p.strip() for p in _split_top(src, "*")]
    if not parts or not parts[0]:
        raise ParseError("empty certificate", 0, src)
    result = Certificate(1)
    for part in parts:
        base, exp = _split_exponent(part)
        if base.startswith("up["):
            if not base.endswith("]"):
                raise ParseError(f"bad unit-prime handle {part!r}", src.find(part), src)
            u = parse_element(base[3:-1], tower, _element_names(names))
            if len(u.terms) != 1 or not u.terms[0][0] or u.terms[0][0][0][0].kind != Kind.U:
                raise ParseError(f"{part!r} does not name a u-indeterminate", src.find(part), src)
            factor = Certificate.of_handle(_single_indet_handle(u, part, src), exp)
        elif base.startswith(("s[", "s'[")):
            v = parse_element(base, tower)
            factor = Certificate.of_handle(_single_indet_handle(v, part, src), exp)
        elif names is not None and _is_name(base):
            try:
                c = names(base)
            except KeyError:
                raise ParseError(f"unknown name {base!r}", src.find(part), src) from None
            if not isinstance(c, Certificate):
                raise ParseError(f"{base!r} is not a certificate", src.find(part), src)
            factor = Certificate(c.unit ** exp, {h: e * exp for h, e in c.factors})
        else:
            try:
                factor = Certificate(Fraction(base) ** exp)
            except (ValueError, ZeroDivisionError):
                raise ParseError(f"bad certificate factor {part!r}", src.find(part), src) from None
        result = cert_mul(result, factor)
    for h in result.handles():
        tower.classify(h)
    return result


def _element_names(names):
    if names is None:
        return None

    def lookup(n):
        v = names(n)
        if isinstance(v, Certificate):
            return v.value()
        return v

    return lookup


def _is_name(text):
    return text.replace("_", "a").replace("'", "a").isalnum() and not text[0].isdigit()


def _single_indet_handle(e, part, src):
    if len(e.terms) != 1 or e.terms[0][1] != 1 or len(e.terms[0][0]) != 1 or e.terms[0][0][0][1] != 1:
        raise ParseError(f"{part!r} is not a single indeterminate", src.find(part), src)
    return PrimeHandle(e.terms[0][0][0][0])


def _split_top(src, sep):
    parts, depth, cur = [], 0, []
    for ch in src:
        if ch in "[{(":
            depth += 1
        elif ch in "]})":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return parts


def _split_exponent(part):
    depth = 0
    for i in range(len(part) - 1, -1, -1):
        ch = part[i]
        if ch in "]})":
            depth += 1
        elif ch in "[{(":
            depth -= 1
        elif ch == "^" and depth == 0:
            try:
                return part[:i].strip(), int(part[i + 1:])
            except ValueError:
                raise ParseError(f"bad exponent in {part!r}") from None
    return part, 1


UNIT = Certificate(1)
