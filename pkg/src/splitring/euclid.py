"""The localized ring R, its three-case division step and Euclidean loop.

Elements of R are fractions whose denominators are products of unit
primes.  Since unit multiples change neither phi nor divisibility, a
division step clears both denominators, divides the numerators, and
re-attaches the denominators to quotient and remainder.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .errors import CertificateRequired, NotCoprime, UnsupportedShape, ZeroDivisor
from .factor import (
    Certificate,
    cert_cofactor,
    cert_gcd,
    cert_mul,
    is_unit_in_R,
    phi,
    stable_squarefree,
)
from .ringcore import ZERO, Element, Indet, try_divide
from .tower import LinearFreshVariable, PrimeHandle, TIndeterminate, min_u_stage, t_var

_ONE_CERT = Certificate(1)


class RElement:
    """``num / den`` with ``den`` a product of unit primes (a unit of R).

    ``cert`` optionally certifies the numerator; division steps require it.
    """

    __slots__ = ("num", "den", "cert")

    def __init__(self, num, den=None, cert=None):
        if isinstance(num, Certificate):
            cert, num = num, num.value()
        den = den or _ONE_CERT
        if not is_unit_in_R(den):
            raise ValueError("denominators must be unit-prime products")
        if cert is not None and num.is_zero():
            raise ValueError("zero has no certificate")
        self.num = num
        self.den = den
        self.cert = cert

    @classmethod
    def zero(cls):
        return cls(ZERO)

    def is_zero(self):
        return self.num.is_zero()

    @property
    def certified(self):
        return self.cert is not None or self.num.is_zero()

    def phi(self):
        if self.cert is None:
            raise CertificateRequired("phi needs a factorization")
        return phi(self.cert)

    def __eq__(self, other):
        if not isinstance(other, RElement):
            return NotImplemented
        return self.num * other.den.value() == other.num * self.den.value()

    __hash__ = None

    @property
    def key(self):
        num = self.cert.key if self.cert is not None else self.num.key
        if not self.den.factors and self.den.unit == 1:
            return num
        return f"{num} / {self.den.key}"

    def pretty(self):
        num = self.cert.pretty() if self.cert is not None else self.num.pretty()
        if not self.den.factors and self.den.unit == 1:
            return num
        return f"({num}) / ({self.den.pretty()})"

    def __repr__(self):
        return f"RElement({self.key})"


def as_relement(x):
    if isinstance(x, RElement):
        return x
    if isinstance(x, Certificate):
        return RElement(x)
    if isinstance(x, Element):
        return RElement(x)
    raise TypeError(f"cannot use {type(x).__name__} as an element of R")


@dataclass(frozen=True)
class DivisionStep:
    a: RElement
    b: RElement
    case: int
    q: RElement
    r: RElement
    phi_b: int
    phi_r: int | None

    def identity_holds(self):
        """Check ``a == q*b + r`` by cross-multiplying all denominators."""
        a, b, q, r = self.a, self.b, self.q, self.r
        ad, bd, qd, rd = (x.den.value() for x in (a, b, q, r))
        lhs = a.num * bd * qd * rd
        rhs = q.num * b.num * ad * rd + r.num * ad * bd * qd
        return lhs == rhs


@dataclass(frozen=True)
class DivisionTrace:
    steps: tuple

    def __len__(self):
        return len(self.steps)

    @property
    def cases(self):
        return [s.case for s in self.steps]

    def last_nonzero_remainder(self):
        """The gcd candidate: the divisor of the final (exact) step."""
        return self.steps[-1].b if self.steps else None

    def render(self):
        return render_trace(self)


def _require(x):
    x = as_relement(x)
    if not x.certified:
        raise CertificateRequired("division arguments must carry factorization certificates")
    return x


def div_step(a, b, tw):
    """One division ``a = q*b + r`` in R with ``r == 0`` or ``phi(r) < phi(b)``."""
    a = _require(a)
    b = _require(b)
    if b.is_zero():
        raise ZeroDivisor("division by zero")
    phi_b = phi(b.cert)
    if a.is_zero():
        return DivisionStep(a, b, 1, RElement.zero(), RElement.zero(), phi_b, None)
    g = cert_gcd(a.cert, b.cert)
    a1 = cert_cofactor(a.cert, g)
    b1 = cert_cofactor(b.cert, g)
    if is_unit_in_R(b1):
        # q = (a1/b1) * den(b)/den(a); b1 carries no stable handle
        qnum = cert_mul(Certificate(1, dict(a1.factors)), b.den)
        qden = cert_mul(Certificate(b1.unit / a1.unit, dict(b1.factors)), a.den)
        q = RElement(qnum.value(), qden, qnum)
        return DivisionStep(a, b, 1, q, RElement.zero(), phi_b, None)
    a1v, b1v = a1.value(), b1.value()
    if stable_squarefree(b1):
        stage = min_u_stage(a1v, b1, a1)
        u, h = tw.fresh_u(stage, a1v, b1, acert=a1)
        rem = cert_mul(g, Certificate.of_handle(h))
        case = 2
        qnum = Element.variable(u) * b.den.value()
    else:
        level = max(a1v.rank, b1v.rank, g.value().rank)
        t = t_var(level + 1)
        x = t.terms[0][0][0][0]
        for part in (a1v, b1v, g.value()):
            assert not part.contains(x), "t-indeterminate reused inside a cofactor"
        m = a1v - t * b1v
        tag = LinearFreshVariable(a1v, x, b1v, a_cert=a1, b_cert=b1)
        sigma, sigma_c, lam = tw.split(m, tag)
        rem = cert_mul(g, Certificate(lam, {sigma: 1, sigma_c: 1}))
        case = 3
        qnum = t * b.den.value()
    q = RElement(qnum, a.den)
    r = RElement(rem.value(), a.den, rem)
    return DivisionStep(a, b, case, q, r, phi_b, phi(rem))


def euclid_run(a, b, tw, max_steps=8):
    """Iterate division steps ``(a, b) <- (b, r)`` until the remainder is zero."""
    steps = []
    while True:
        step = div_step(a, b, tw)
        steps.append(step)
        if step.r.is_zero():
            return DivisionTrace(tuple(steps))
        if len(steps) >= max_steps:
            raise RuntimeError("Euclidean loop did not terminate")
        a, b = b, step.r


def render_trace(trace):
    """Deterministic text table for a division trace."""
    rows = [("step", "case", "phi(b)", "phi(r)", "q", "r")]
    for i, s in enumerate(trace.steps, 1):
        rows.append((
            str(i),
            str(s.case),
            str(s.phi_b),
            "-" if s.phi_r is None else str(s.phi_r),
            s.q.key,
            "0" if s.r.is_zero() else s.r.key,
        ))
    widths = [max(len(r[i]) for r in rows) for i in range(4)]
    lines = []
    for r in rows:
        head = "  ".join(c.rjust(w) for c, w in zip(r[:4], widths))
        lines.append(f"{head}  {r[4]}  |  {r[5]}")
    return "\n".join(lines)


# -- stable divisors of v*t - q*p^2 ----------------------------------------

@dataclass(frozen=True)
class StableFactorWitness:
    p: PrimeHandle
    k: int
    v: Certificate
    q: Element
    r: Element
    sigma1: PrimeHandle
    sigma2: PrimeHandle
    lam: Fraction
    common: Certificate

    def product_holds(self):
        """``value(sigma1)*value(sigma2)`` equals the monic representative of ``r``."""
        return self.sigma1.value() * self.sigma2.value() == self.r.monic()

    def full_identity_holds(self, v_orig, q_orig):
        t = t_var(self.k + 1)
        lhs = v_orig.value() * t - q_orig * self.p.value() ** 2
        rhs = self.common.value() * self.lam * self.sigma1.value() * self.sigma2.value()
        return lhs == rhs


def _stable_handle(p):
    if isinstance(p, Indet):
        p = PrimeHandle(p)
    if isinstance(p, Certificate):
        if p.unit != 1 or len(p.factors) != 1 or p.factors[0][1] != 1:
            raise ValueError("p must be a single stable prime")
        p = p.factors[0][0]
    if not isinstance(p, PrimeHandle) or not p.is_stable:
        raise ValueError("p must be a stable prime handle")
    return p


def prop9_witness(p, v, q, tw):
    """Exhibit two stable prime factors of ``v*t_{k+1} - q*p^2`` with ``k = rank(p)``.

    Supported when, after cancelling unit primes common to ``v`` and ``q``,
    both have rank at most ``k+1`` and do not involve ``t_{k+1}``; then the
    element is linear in a fresh variable with coprime coefficients, hence a
    temporary prime, and it is split.
    """
    p = _stable_handle(p)
    if not is_unit_in_R(v):
        raise ValueError("v must be a product of unit primes")
    if isinstance(q, RElement):
        v = cert_mul(v, q.den)
        q = q.num
    elif isinstance(q, Certificate):
        q = q.value()
    k = p.stage
    t = t_var(k + 1)
    x = t.terms[0][0][0][0]
    exps = dict(v.factors)
    common = {}
    qq = q
    if not qq.is_zero():
        for h, e in v.factors:
            while exps[h] > 0:
                d = try_divide(qq, h.value())
                if d is None:
                    break
                qq = d
                exps[h] -= 1
                common[h] = common.get(h, 0) + 1
    v2 = Certificate(v.unit, exps)
    v2v = v2.value()
    if v2v.rank > k + 1 or qq.rank > k + 1 or v2v.contains(x) or qq.contains(x):
        raise UnsupportedShape(
            f"rank(v)={v2v.rank}, rank(q)={qq.rank} with t{k + 1}; only ranks <= {k + 1} avoiding t{k + 1} are witnessed"
        )
    common_cert = Certificate(1, common)
    if qq.is_zero():
        sigma1, sigma2, lam = tw.split(t, TIndeterminate())
        common_cert = cert_mul(common_cert, v2)
        return StableFactorWitness(p, k, v2, qq, t, sigma1, sigma2, lam, common_cert)
    a = -(qq * p.value() ** 2)
    b = -v2v
    r = a - t * b
    bcert = Certificate(-v2.unit, dict(v2.factors))
    for h in v2.handles():
        if try_divide(qq, h.value()) is not None:
            raise NotCoprime(f"{h.key} divides both v and q")
    sigma1, sigma2, lam = tw.split(r, LinearFreshVariable(a, x, b, b_cert=bcert))
    return StableFactorWitness(p, k, v2, qq, r, sigma1, sigma2, lam, common_cert)


def refute_norm_report(p, candidates, tw):
    """Plain-text demonstration, for finitely many quotients, of why no
    multiplicative norm works at ``p^2``.

    ``candidates`` is a sequence of ``(q, v)`` pairs.
    """
    p = _stable_handle(p)
    if not candidates:
        return ""
    k = p.stage
    lines = [
        "finite demonstration over the listed quotients (not a universal proof)",
        f"p = {p.key}   rank(p) = {k}   phi(p^2) = 4",
    ]
    for i, (q, v) in enumerate(candidates, 1):
        qtext = q.key if hasattr(q, "key") else str(q)
        lines.append(f"candidate {i}: q = {qtext}   v = {v.key}")
        try:
            w = prop9_witness(p, v, q, tw)
        except (UnsupportedShape, NotCoprime) as exc:
            lines.append(f"  skipped: {type(exc).__name__}: {exc}")
            continue
        lines.append(f"  r = v*t{k + 1} - q*p^2 = {w.r.key}")
        lines.append(f"  stable factors: p1 = {w.sigma1.key}   p2 = {w.sigma2.key}   lambda = {w.lam}")
        rest = "unit" if not w.common.factors else w.common.key
        lines.append(f"  remaining factor: {rest}")
        lines.append(
            "  psi(p^2) = psi(p)psi(p) <= psi(p1)psi(p2)1_M <= psi(p1)psi(p2)psi(rest) = psi(r) < psi(p^2)"
        )
        lines.append("  phi-side: phi(p^2) = 4, phi(r) >= phi(p1*p2) = 2; a multiplicative psi would need psi(p1)psi(p2) < psi(p)^2")
    return "\n".join(lines)


def random_supported_candidates(p, tw, n, seed=0):
    """Sample ``n`` supported (q, v) pairs from the registered primes."""
    p = _stable_handle(p)
    rng = random.Random(seed)
    units = [h for h in tw.unit_handles() if h.stage <= p.stage + 1]
    gens = [Element.variable(h.indet) for h in tw.stable_handles() if h.stage <= p.stage]
    gens += [t_var(j) for j in range(1, p.stage + 1)]
    out = []
    for _ in range(n):
        q = Element.constant(rng.randint(-3, 3) or 1)
        for _ in range(rng.randint(0, 2)):
            q = q * rng.choice(gens) + rng.randint(-2, 2)
        v = Certificate(rng.choice([1, 2, -1, Fraction(1, 2)]),
                        {h: 1 for h in rng.sample(units, min(len(units), rng.randint(0, 2)))})
        out.append((q, v))
    return out

