"""Shared fixtures: a small seeded tower and random element generators."""

import random
from fractions import Fraction

from splitring.factor import Certificate
from splitring.ringcore import Element
from splitring.tower import LinearFreshVariable, TIndeterminate, Tower, t_var

T1, T2, T3 = t_var(1), t_var(2), t_var(3)


def x(h):
    """Handle or indeterminate as an Element."""
    return Element.variable(getattr(h, "indet", h))


def three_stage_tower(deep=False):
    """Splits at stages 2 and 3 (and 4 when ``deep``) plus five unit primes.

    Returns ``(tower, info)`` where ``info`` names the generators.
    """
    tw = Tower()
    s1, c1, _ = tw.split(T1, TIndeterminate())
    s2, c2, _ = tw.split(T1 + 1, LinearFreshVariable(Element.constant(1), T1.terms[0][0][0][0], Element.constant(-1)))
    # s[2;t1] + t2 is linear in t2 with a constant coefficient
    p3 = x(s1) + T2
    s3, c3, _ = tw.split(p3, LinearFreshVariable(x(s1), T2.terms[0][0][0][0], Element.constant(-1)))
    # t3*s[2;t1+1] - s'[3;..] is linear in t3 over the coprime pair (s'3, s2)
    extra = []
    if deep:
        a4 = x(c3)
        b4 = x(s2)
        p4 = a4 - T3 * b4
        tag = LinearFreshVariable(
            a4, T3.terms[0][0][0][0], b4, a_cert=Certificate.of_handle(c3), b_cert=Certificate.of_handle(s2)
        )
        s4, c4, _ = tw.split(p4, tag)
        extra = [s4, c4]
    units = []
    for stage, a, b in [
        (1, Element.constant(2), Element.constant(3)),
        (1, Element.constant(1), Element.constant(5)),
        (2, T1, Element.constant(1)),
        (3, T1 + 1, x(s1)),
        (3, T2, x(s2) * x(c1)),
    ]:
        _, h = tw.fresh_u(stage, a, b)
        units.append(h)
    info = {
        "stable": [s1, c1, s2, c2, s3, c3] + extra,
        "splits": [s1, s2, s3] + extra[:1],
        "units": units,
    }
    return tw, info


def atoms_for(tw, max_stage=None):
    out = [t_var(k) for k in (1, 2, 3)]
    for h in tw.handles():
        if max_stage is None or h.stage <= max_stage:
            out.append(x(h))
    return [a for a in out if max_stage is None or a.rank <= max_stage]


def random_element(rng, atoms, terms=3, max_exp=2, max_atoms=2, nonzero=True):
    while True:
        e = Element.constant(0)
        for _ in range(rng.randint(1, terms)):
            c = Fraction(rng.randint(-4, 4), rng.choice([1, 1, 2, 3]))
            m = Element.constant(c)
            for _ in range(rng.randint(0, max_atoms)):
                m = m * rng.choice(atoms) ** rng.randint(1, max_exp)
            e = e + m
        if not nonzero or not e.is_zero():
            return e


def random_certificate(rng, handles, max_handles=3, max_exp=3, unit=True):
    chosen = rng.sample(handles, rng.randint(0, min(max_handles, len(handles))))
    u = Fraction(rng.choice([1, -1, 2, -3]), rng.choice([1, 2])) if unit else 1
    return Certificate(u, {h: rng.randint(1, max_exp) for h in chosen})


def seeded(seed):
    return random.Random(seed)
