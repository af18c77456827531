import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import T1, random_certificate, three_stage_tower, x
from splitring.errors import NotSubcertificate, ParseError, TemporaryDivisor
from splitring.factor import (
    Certificate,
    cert_cofactor,
    cert_gcd,
    cert_mul,
    cert_value,
    certify,
    is_unit_in_R,
    parse_certificate,
    phi,
    stable_squarefree,
    verify_certificate,
)
from splitring.ringcore import ONE, Element
from splitring.tower import TIndeterminate, Tower, t_var

TOWER, INFO = three_stage_tower()
SIG, SIGC, TAU = INFO["stable"][0], INFO["stable"][1], INFO["stable"][2]
UNIT = INFO["units"][0]


def test_cert_value_examples():
    assert cert_value(Certificate()) == ONE
    assert cert_value(Certificate(1, {SIG: 1, SIGC: 1})) == T1
    assert cert_value(Certificate(-2, {SIG: 2})) == -2 * x(SIG) ** 2


def test_cert_mul_examples():
    s = Certificate.of_handle(SIG)
    assert cert_mul(s, s) == Certificate.of_handle(SIG, 2)
    c = Certificate(3, {SIG: 2, UNIT: 1})
    assert cert_mul(c, Certificate()) == c


def test_cert_gcd_and_cofactor_examples():
    a = Certificate(1, {SIG: 2, TAU: 1})
    b = Certificate(1, {SIG: 1, TAU: 3})
    g = cert_gcd(a, b)
    assert g == Certificate(1, {SIG: 1, TAU: 1})
    assert cert_gcd(a, Certificate()) == Certificate()
    assert cert_cofactor(a, g) == Certificate.of_handle(SIG)
    assert cert_cofactor(a, a) == Certificate()
    with pytest.raises(NotSubcertificate):
        cert_cofactor(g, a)


def test_phi_examples():
    assert phi(Certificate(5)) == 0
    assert phi(Certificate.of_handle(SIG, 2)) == 4
    assert phi(Certificate(1, {SIG: 2, SIGC: 3})) == 13
    assert phi(Certificate(1, {SIG: 1, UNIT: 7})) == 1


def test_predicates():
    assert stable_squarefree(Certificate(1, {SIG: 1, TAU: 1}))
    assert not stable_squarefree(Certificate.of_handle(SIG, 2))
    assert stable_squarefree(Certificate.of_handle(UNIT, 5))
    assert is_unit_in_R(Certificate.of_handle(UNIT))
    assert not is_unit_in_R(Certificate.of_handle(SIG))
    assert is_unit_in_R(Certificate())
    assert verify_certificate(Certificate(1, {SIG: 1, SIGC: 1}), T1)
    assert not verify_certificate(Certificate.of_handle(SIG), T1)


def test_certify_recovers_factorizations():
    rng = random.Random(3)
    handles = TOWER.handles()
    for _ in range(50):
        c = random_certificate(rng, handles, max_handles=2, max_exp=2)
        assert certify(TOWER, c.value()) == c


def test_certify_rejects_unsplit_factor():
    with pytest.raises(TemporaryDivisor):
        certify(TOWER, x(SIG) * (T1 + 5))


def test_parse_certificate():
    c = parse_certificate("-2 * s[2;t1]^2 * s'[2;t1] * up[u[1;2;3]]^3", TOWER)
    assert c == Certificate(-2, {SIG: 2, SIGC: 1, UNIT: 3})
    assert parse_certificate(c.key, TOWER) == c
    with pytest.raises(ParseError):
        parse_certificate("s[2;t1]^x", TOWER)
    with pytest.raises(ParseError):
        parse_certificate("up[t1]", TOWER)


def test_parse_certificate_unknown_handle():
    tw = Tower()
    tw.split(T1, TIndeterminate())
    with pytest.raises(Exception) as exc:
        parse_certificate("s[2;t1+1]", tw)
    assert type(exc.value).__name__ in {"UnknownIndeterminate", "UnknownHandle"}


def test_phi_enumeration_small():
    stable = INFO["stable"][:3]
    for exps in itertools.product(range(5), repeat=3):
        c = Certificate(1, dict(zip(stable, exps)))
        assert phi(c) == sum(e * e for e in exps)


def test_certificate_survives_later_adjunctions():
    tw = Tower()
    s, sc, _ = tw.split(T1, TIndeterminate())
    c = Certificate(3, {s: 2, sc: 1})
    value = c.value()
    for k in range(2, 6):
        tw.split(t_var(k), TIndeterminate())
    tw.fresh_u(6, T1 + 1, Certificate.of_handle(s))
    assert verify_certificate(c, value)
    assert certify(tw, value) == c


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_phi_superadditive_and_value_multiplicative(seed):
    rng = random.Random(seed)
    handles = TOWER.handles()
    a = random_certificate(rng, handles, max_handles=2, max_exp=2)
    b = random_certificate(rng, handles, max_handles=2, max_exp=2)
    ab = cert_mul(a, b)
    assert phi(ab) >= phi(a) + phi(b)
    assert cert_value(ab) == cert_value(a) * cert_value(b)
    g = cert_gcd(a, b)
    assert cert_mul(cert_cofactor(a, g), g) == a
