"""Append-only construction state of the tower R_0 ⊆ R_1 ⊆ ...

Indeterminates are created lazily: a split is registered the first time a
certified temporary prime is split, and a u-indeterminate the first time it
is requested.  Every created indeterminate exists in the eagerly built ring,
at the same stage.
"""

from __future__ import annotations

import enum
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    AlreadyStableOrUnit,
    NotCertifiedPrime,
    NotCoprime,
    ParseError,
    RankTooHigh,
    StableSquare,
    TemporaryDivisor,
    UnknownHandle,
    ZeroArgument,
    ZeroOrConstant,
)
from .ringcore import Element, Indet, Kind, parse_element, try_divide
from .ringcore.text import Cursor

SESSION_HEADER = "splitring-tower 1"


def t_var(k):
    """The t-indeterminate of stage ``k`` as an element."""
    if k < 1:
        raise ValueError("t-indeterminates start at stage 1")
    return Element.variable(Indet(Kind.T, k))


class PrimeClass(enum.Enum):
    STABLE = "stable"
    UNIT = "unit"


@dataclass(frozen=True)
class PrimeHandle:
    """A registered prime of the tower ring.

    Either a split generator (stable prime) or a u-indeterminate standing for
    the unit prime ``a - u*b``.
    """

    indet: Indet

    def __post_init__(self):
        if self.indet.kind == Kind.T:
            raise ValueError("t-indeterminates are temporary primes, not handles")

    @property
    def is_stable(self):
        return self.indet.kind in (Kind.S, Kind.SCONJ)

    @property
    def is_unit(self):
        return self.indet.kind == Kind.U

    @property
    def stage(self):
        return self.indet.stage

    @property
    def sortkey(self):
        return self.indet.sortkey

    def value(self):
        if self.is_stable:
            return Element.variable(self.indet)
        a, b = self.indet.payload
        return a - Element.variable(self.indet) * b

    @property
    def key(self):
        return self.indet.key if self.is_stable else f"up[{self.indet.key}]"

    def pretty(self):
        if self.is_stable:
            return self.indet.pretty()
        return f"up[{self.indet.pretty()}]"

    def __lt__(self, other):
        return self.sortkey < other.sortkey

    def __repr__(self):
        return f"PrimeHandle({self.key})"


# -- primality certificates ------------------------------------------------

@dataclass(frozen=True)
class TIndeterminate:
    """The prime is a nonzero multiple of a t-indeterminate."""


@dataclass(frozen=True)
class StableGenerator:
    """The prime is a multiple of a split generator (prime, but never split again)."""

    handle: PrimeHandle


@dataclass(frozen=True)
class LinearFreshVariable:
    """The prime is ``a - x*b`` with ``x`` free over a ring containing ``a, b``.

    ``a_cert``/``b_cert`` are factorization certificates used as coprimality
    evidence; a nonzero constant coefficient needs none.
    """

    a: Element
    x: Indet
    b: Element
    a_cert: object = None
    b_cert: object = None


@dataclass(frozen=True)
class Split:
    stage: int
    rep: Element
    s: Indet
    sconj: Indet

    @property
    def handles(self):
        return PrimeHandle(self.s), PrimeHandle(self.sconj)


def coprime_by_evidence(a, b, a_cert=None, b_cert=None):
    """Decide gcd(a, b) = 1 from complete factorizations of a and/or b."""
    if a.is_unit() or b.is_unit():
        return True
    if a_cert is not None and b_cert is not None:
        if a_cert.value() != a or b_cert.value() != b:
            raise NotCertifiedPrime("coprimality certificate does not match its element")
        return not (set(a_cert.handles()) & set(b_cert.handles()))
    for cert, other, own in ((b_cert, a, b), (a_cert, b, a)):
        if cert is not None:
            if cert.value() != own:
                raise NotCertifiedPrime("coprimality certificate does not match its element")
            return all(try_divide(other, h.value()) is None for h in cert.handles())
    raise NotCertifiedPrime("coprimality of the coefficients needs a certificate for one of them")


class Tower:
    """Registry of splits and u-indeterminates, in creation order."""

    def __init__(self):
        self._splits = {}
        self._u = {}
        self._assoc = {}
        self.events = []

    # -- inspection ------------------------------------------------------
    def lookup_split(self, p):
        """S-generator of the split of ``p`` (any associate), or None."""
        if p.is_zero() or p.is_constant():
            return None
        sp = self._splits.get(p.monic().key)
        return None if sp is None else sp.s

    def lookup_u(self, stage, a, b):
        return self._u.get((stage, a.key, b.key))

    def splits(self):
        return list(self._splits.values())

    def u_indets(self):
        return list(self._u.values())

    def handles(self):
        out = []
        for sp in self._splits.values():
            out.extend(sp.handles)
        out.extend(PrimeHandle(u) for u in self._u.values())
        return out

    def stable_handles(self):
        return [h for h in self.handles() if h.is_stable]

    def unit_handles(self):
        return [h for h in self.handles() if h.is_unit]

    def is_registered(self, h):
        ind = h.indet
        if ind.kind == Kind.U:
            return self._u.get((ind.stage, ind.payload[0].key, ind.payload[1].key)) == ind
        sp = self._splits.get(ind.split_prime.key)
        return sp is not None and sp.stage == ind.stage

    def classify(self, h):
        if not self.is_registered(h):
            raise UnknownHandle(f"{h.key} is not registered")
        return PrimeClass.STABLE if h.is_stable else PrimeClass.UNIT

    def associate_handle(self, e):
        """The registered handle whose value is an associate of ``e``, if any."""
        if e.is_zero() or e.is_constant():
            return None
        return self._assoc.get(e.monic().key)

    def max_stage(self):
        stages = [sp.stage for sp in self._splits.values()] + [u.stage for u in self._u.values()]
        return max(stages, default=0)

    # -- adjunction ------------------------------------------------------
    def _check_prime_tag(self, p, rep, tag):
        if isinstance(tag, TIndeterminate):
            ok = len(rep.terms) == 1 and rep.terms[0][1] == 1
            ok = ok and len(rep.terms[0][0]) == 1
            if ok:
                v, e = rep.terms[0][0][0]
                ok = v.kind == Kind.T and e == 1
            if not ok:
                raise NotCertifiedPrime(f"{p.pretty()} is not a multiple of a t-indeterminate")
            return
        if isinstance(tag, StableGenerator):
            if tag.handle.value().monic() != rep:
                raise NotCertifiedPrime("stable-generator tag does not match the element")
            raise AlreadyStableOrUnit(f"{p.pretty()} is a stable prime")
        if isinstance(tag, LinearFreshVariable):
            a, x, b = tag.a, tag.x, tag.b
            if a.is_zero() or b.is_zero():
                raise NotCertifiedPrime("linear coefficients must be nonzero")
            if x.kind not in (Kind.T, Kind.U):
                raise NotCertifiedPrime("the fresh variable must be a t- or u-indeterminate")
            if max(a.rank, b.rank) > x.stage or a.contains(x) or b.contains(x):
                raise NotCertifiedPrime(f"{x.key} is not free over the coefficients")
            if a - Element.variable(x) * b != p:
                raise NotCertifiedPrime("element is not a - x*b for the given a, x, b")
            if not coprime_by_evidence(a, b, tag.a_cert, tag.b_cert):
                raise NotCertifiedPrime("linear coefficients are not coprime")
            return
        raise NotCertifiedPrime(f"unknown primality certificate {tag!r}")

    def split(self, p, tag):
        """Split the certified temporary prime ``p`` into two conjugate stable primes.

        Returns ``(sigma, sigma_conj, lam)`` with ``p == lam * sigma * sigma_conj``.
        """
        if p.is_zero() or p.is_constant():
            raise ZeroOrConstant("zero and constants cannot be split")
        lam = p.leading_coefficient()
        rep = p * (1 / lam)
        existing = self._splits.get(rep.key)
        if existing is not None:
            return (*existing.handles, lam)
        if rep.key in self._assoc:
            raise AlreadyStableOrUnit(f"{p.pretty()} is associate to {self._assoc[rep.key].key}")
        self._check_prime_tag(p, rep, tag)
        sp = self._register_split(rep.rank + 1, rep)
        self.events.append(("SPLIT", sp.stage, rep.key, lam))
        return (*sp.handles, lam)

    def _register_split(self, stage, rep):
        s = Indet(Kind.S, stage, (rep,))
        sp = Split(stage, rep, s, s.conj)
        self._splits[rep.key] = sp
        for h in sp.handles:
            self._assoc[h.value().key] = h
        return sp

    def fresh_u(self, stage, a, bcert, acert=None):
        """Register ``u[stage; a; b]`` and return it with the unit-prime handle ``a - u*b``.

        ``bcert`` is a factorization certificate of ``b``; a bare element is
        accepted and certified by trial division over registered handles.
        """
        from .factor import Certificate, certify

        if a.is_zero():
            raise ZeroArgument("a must be nonzero")
        if not isinstance(bcert, Certificate):
            if bcert.is_zero():
                raise ZeroArgument("b must be nonzero")
            if bcert.rank > stage - 1:
                raise RankTooHigh(f"rank of b is {bcert.rank} > {stage - 1}")
            bcert = certify(self, bcert, max_stage=stage - 1)
        b = bcert.value()
        if a.rank > stage - 1 or b.rank > stage - 1:
            raise RankTooHigh(f"ranks {a.rank}, {b.rank} must be at most {stage - 1}")
        for h, e in bcert.factors:
            if not self.is_registered(h):
                raise UnknownHandle(f"{h.key} is not registered")
            if h.stage > stage - 1:
                raise TemporaryDivisor(
                    f"{h.key} only exists from stage {h.stage}; at stage {stage - 1} its prime is temporary"
                )
            if h.is_stable and e > 1:
                raise StableSquare(f"{h.key} divides b with exponent {e}")
        key = (stage, a.key, b.key)
        u = self._u.get(key)
        if u is None:
            if acert is not None:
                if acert.value() != a:
                    raise NotCoprime("certificate of a does not match a")
                if set(acert.handles()) & set(bcert.handles()):
                    raise NotCoprime("a and b share a prime factor")
            else:
                for h in bcert.handles():
                    if try_divide(a, h.value()) is not None:
                        raise NotCoprime(f"{h.key} divides both a and b")
            u = self._register_u(stage, a, b)
            self.events.append(("FRESHU", stage, a.key, b.key))
        return u, PrimeHandle(u)

    def _register_u(self, stage, a, b):
        u = Indet(Kind.U, stage, (a, b))
        self._u[(stage, a.key, b.key)] = u
        h = PrimeHandle(u)
        self._assoc[h.value().monic().key] = h
        return u

    # -- transactions ------------------------------------------------------
    def checkpoint(self):
        return len(self.events)

    def rollback(self, mark):
        """Undo registrations made after ``mark`` (used for failed commands only)."""
        while len(self.events) > mark:
            ev = self.events.pop()
            if ev[0] == "SPLIT":
                sp = self._splits.pop(ev[2])
                for h in sp.handles:
                    self._assoc.pop(h.value().key, None)
            else:
                u = self._u.pop((ev[1], ev[2], ev[3]))
                self._assoc.pop(PrimeHandle(u).value().monic().key, None)

    @contextmanager
    def transaction(self):
        mark = self.checkpoint()
        try:
            yield self
        except BaseException:
            self.rollback(mark)
            raise

    # -- persistence -------------------------------------------------------
    def dump_lines(self):
        lines = []
        for ev in self.events:
            if ev[0] == "SPLIT":
                lines.append(f"SPLIT {ev[1]} {ev[2]} {ev[3]}")
            else:
                lines.append(f"FRESHU {ev[1]} {ev[2]} {ev[3]}")
        return lines

    def dumps(self):
        return "\n".join([SESSION_HEADER, *self.dump_lines()]) + "\n"

    def replay_line(self, line):
        """Apply one ``SPLIT``/``FRESHU`` event line."""
        verb, _, rest = line.partition(" ")
        stage_text, _, rest = rest.partition(" ")
        try:
            stage = int(stage_text)
        except ValueError:
            raise ParseError(f"bad stage in {line!r}") from None
        if verb == "SPLIT":
            key, end = Cursor.take_braced(rest)
            lam = Fraction(rest[end:].strip())
            rep = parse_element(key, self)
            if rep.key != key or rep.monic() != rep or rep.rank + 1 != stage:
                raise ParseError(f"inconsistent split event {line!r}")
            if rep.key not in self._splits:
                self._register_split(stage, rep)
                self.events.append(("SPLIT", stage, rep.key, lam))
        elif verb == "FRESHU":
            akey, end = Cursor.take_braced(rest)
            bkey, end2 = Cursor.take_braced(rest, end)
            if rest[end2:].strip():
                raise ParseError(f"trailing text in {line!r}")
            a = parse_element(akey, self)
            b = parse_element(bkey, self)
            if a.key != akey or b.key != bkey or max(a.rank, b.rank) > stage - 1:
                raise ParseError(f"inconsistent u event {line!r}")
            if (stage, akey, bkey) not in self._u:
                self._register_u(stage, a, b)
                self.events.append(("FRESHU", stage, akey, bkey))
        else:
            raise ParseError(f"unknown tower event {verb!r}")

    @classmethod
    def loads(cls, text):
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines or lines[0] != SESSION_HEADER:
            raise ParseError("missing tower header")
        tw = cls()
        for ln in lines[1:]:
            tw.replay_line(ln)
        return tw


def new_tower():
    return Tower()


def min_u_stage(a, bcert, acert=None):
    """Least stage at which ``u[stage; a; value(bcert)]`` is eligible."""
    stages = [a.rank, bcert.value().rank]
    stages.extend(h.stage for h in bcert.handles())
    if acert is not None:
        stages.extend(h.stage for h in acert.handles())
    return 1 + max(stages)
