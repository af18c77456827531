import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import T1, T2, atoms_for, random_element, three_stage_tower, x
from splitring.errors import (
    NonMember,
    ParseError,
    RankTooLow,
    TooManyTerms,
    UnknownIndeterminate,
    ZeroDivisor,
    ZeroElement,
)
from splitring.ringcore import (
    ONE,
    ZERO,
    Element,
    Indet,
    Kind,
    LaurentElement,
    add,
    canonical_encode,
    coefficients_in,
    divide,
    from_laurent,
    grade_decompose,
    is_member,
    mul,
    parse_element,
    parse_laurent,
    rank,
    reassemble,
    set_max_terms,
    spread,
    to_laurent,
    try_divide,
    valuation,
)
from splitring.tower import LinearFreshVariable, TIndeterminate, Tower, t_var


@pytest.fixture
def tw():
    tower = Tower()
    tower.split(T1, TIndeterminate())
    return tower


def S(tower, src):
    return parse_element(src, tower)


# -- examples ---------------------------------------------------------------

def test_add_examples(tw):
    assert add(T1, -T1) == ZERO
    s, sc = S(tw, "s[2;t1]"), S(tw, "s'[2;t1]")
    total = add(s, sc)
    assert len(total.terms) == 2
    assert total.pretty() == "s'[2;t1] + s[2;t1]"
    assert add(Fraction(1, 2) * T1, Fraction(1, 3) * T1) == Fraction(5, 6) * T1


def test_mul_examples(tw):
    s, sc = S(tw, "s[2;t1]"), S(tw, "s'[2;t1]")
    assert mul(s, sc) == T1
    assert mul(s + sc, s + 1) == s ** 2 + s + T1 + sc
    e = s ** 3 - 2 * sc + T1
    assert mul(e, ONE) == e


def test_grade_decompose_examples(tw):
    s, sc = S(tw, "s[2;t1]"), S(tw, "s'[2;t1]")
    k = s.terms[0][0][0][0]
    assert grade_decompose(s + T1, k) == {1: s, 0: T1}
    assert grade_decompose(Element.constant(7), k) == {0: Element.constant(7)}
    assert grade_decompose(sc ** 3, k) == {-3: sc ** 3}


def test_grade_decompose_rejects_higher_rank(tw):
    k = S(tw, "s[2;t1]").terms[0][0][0][0]
    with pytest.raises(RankTooLow):
        grade_decompose(t_var(3), k)


def test_spread_examples(tw):
    s, sc = S(tw, "s[2;t1]"), S(tw, "s'[2;t1]")
    k = s.terms[0][0][0][0]
    assert spread(s, k) == 0
    assert spread(s + sc, k) == 2
    with pytest.raises(ZeroElement):
        spread(ZERO, k)


def test_rank_examples():
    tw = Tower()
    tw.split(T1, TIndeterminate())
    tw.fresh_u(1, Element.constant(2), Element.constant(3))
    assert rank(Element.constant(Fraction(7, 3))) == 0
    assert rank(S(tw, "s[2;t1] + t1*u[1;2;3]")) == 2
    _, h = tw.fresh_u(3, ONE, S(tw, "s[2;t1]"))
    prod = mul(S(tw, "2 - 3*u[1;2;3]"), S(tw, "1 - u[3;1;s[2;t1]]*s[2;t1]"))
    assert h.value() == S(tw, "1 - u[3;1;s[2;t1]]*s[2;t1]")
    assert rank(prod) == 3


def test_try_divide_examples(tw):
    s, sc = S(tw, "s[2;t1]"), S(tw, "s'[2;t1]")
    assert try_divide(T1, s) == sc
    assert try_divide(T1 + 1, s) is None
    with pytest.raises(ZeroDivisor):
        try_divide(T1, ZERO)
    with pytest.raises(Exception) as exc:
        divide(T1 + 1, s)
    assert type(exc.value).__name__ == "NotDivisible"


def test_try_divide_round_trip():
    tower, _ = three_stage_tower()
    rng = random.Random(11)
    atoms = atoms_for(tower)
    for _ in range(300):
        a = random_element(rng, atoms, terms=2, max_atoms=2)
        b = random_element(rng, atoms, terms=2, max_atoms=2)
        assert try_divide(mul(a, b), a) == b


def test_valuation_examples(tw):
    s, sc = S(tw, "s[2;t1]"), S(tw, "s'[2;t1]")
    assert valuation(s ** 2 * sc, s) == 2
    assert valuation(T1 + 1, s) == 0
    assert valuation(T1, s) == 1
    with pytest.raises(ZeroElement):
        valuation(ZERO, s)


def test_coefficients_in_examples():
    tw = Tower()
    tw.split(T1, TIndeterminate())
    u, _ = tw.fresh_u(3, ONE, S(tw, "s[2;t1]"))
    q0, q1 = S(tw, "t1 + s[2;t1]"), S(tw, "s'[2;t1]^2 - 1")
    e = q0 + q1 * Element.variable(u)
    assert coefficients_in(e, u) == [q0, q1]
    assert coefficients_in(Element.constant(5), T1.terms[0][0][0][0]) == [Element.constant(5)]
    with pytest.raises(RankTooLow):
        coefficients_in(S(tw, "s'[2;t1]"), T1.terms[0][0][0][0])


def test_coefficients_in_split_generator(tw):
    s, sc = S(tw, "s[2;t1]"), S(tw, "s'[2;t1]")
    k = s.terms[0][0][0][0]
    e = 3 * s ** 2 + T1 * sc + 5
    cs = coefficients_in(e, k)
    assert cs == {2: Element.constant(3), 0: Element.constant(5), -1: T1}
    assert reassemble(cs, k) == e


def test_laurent_examples(tw):
    s, sc = S(tw, "s[2;t1]"), S(tw, "s'[2;t1]")
    sv = s.terms[0][0][0][0]
    assert to_laurent(sc ** 2) == LaurentElement({((T1.terms[0][0][0][0], 2), (sv, -2)): 1})
    assert from_laurent(parse_laurent("t1*s[2;t1]^-1", tw)) == sc


def test_laurent_non_member():
    tw = Tower()
    tw.split(1 - T1, LinearFreshVariable(ONE, T1.terms[0][0][0][0], ONE))
    bad = parse_laurent("s[2;t1-1]^-1", tw)
    with pytest.raises(NonMember):
        from_laurent(bad)
    assert not is_member(bad)


def test_canonical_encoding():
    tw = Tower()
    tw.split(T1, TIndeterminate())
    sc = S(tw, "s'[2;t1]")
    assert sc.terms[0][0][0][0].key == "s'[2;{1*t1^1}]"
    assert canonical_encode(sc) == "{1*s'[2;{1*t1^1}]^1}"
    e = parse_element("1/2*t1^2 + -1*t1^1 + 3", tw)
    assert len(e.terms) == 3
    assert e == Fraction(1, 2) * T1 ** 2 - T1 + 3
    assert canonical_encode(ZERO) == "{0}"


def test_parse_errors(tw):
    with pytest.raises(ParseError) as exc:
        parse_element("t1 + * 2", tw)
    assert "column" in str(exc.value)
    with pytest.raises(UnknownIndeterminate):
        parse_element("s[2;t2]", tw)
    with pytest.raises(UnknownIndeterminate):
        parse_element("s[3;t1]", tw)
    with pytest.raises(ParseError):
        parse_element("t1^-1", tw)


def test_pretty_and_canonical_forms_parse_back():
    tower, _ = three_stage_tower()
    rng = random.Random(5)
    atoms = atoms_for(tower)
    for _ in range(100):
        e = random_element(rng, atoms, nonzero=False)
        assert parse_element(canonical_encode(e), tower) == e
        assert parse_element(e.pretty(), tower) == e


def test_term_limit():
    set_max_terms(20)
    try:
        with pytest.raises(TooManyTerms):
            (T1 + T2 + t_var(3) + 1) ** 4
    finally:
        set_max_terms(10000)


def test_indeterminates_are_interned(tw):
    a = S(tw, "s[2;t1]").terms[0][0][0][0]
    b = Indet(Kind.S, 2, (T1,))
    assert a is b
    assert a.conj.conj is a


# -- properties -------------------------------------------------------------

TOWER, INFO = three_stage_tower()
ATOMS = atoms_for(TOWER)


@st.composite
def elements(draw):
    terms = draw(st.lists(
        st.tuples(
            st.fractions(min_value=-5, max_value=5, max_denominator=4),
            st.lists(st.tuples(st.sampled_from(ATOMS), st.integers(1, 2)), max_size=2),
        ),
        max_size=3,
    ))
    e = ZERO
    for c, mono in terms:
        m = Element.constant(c)
        for a, k in mono:
            m = m * a ** k
        e = e + m
    return e


@settings(max_examples=60, deadline=None)
@given(elements(), elements(), elements())
def test_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a + b == b + a
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a
    assert a * (b + c) == a * b + a * c
    assert a - a == ZERO
    assert a * ONE == a


@settings(max_examples=60, deadline=None)
@given(elements(), elements())
def test_no_zero_divisors(a, b):
    if not a.is_zero() and not b.is_zero():
        assert not (a * b).is_zero()


@settings(max_examples=60, deadline=None)
@given(elements(), elements(), st.integers(0, 10 ** 6))
def test_randomized_schedule_is_confluent(a, b, seed):
    assert mul(a, b, rng=random.Random(seed)).key == mul(a, b).key


@settings(max_examples=60, deadline=None)
@given(elements())
def test_normal_form_has_no_conjugate_pair(e):
    for m, _ in e.terms:
        vs = {v for v, _ in m}
        assert not any(v.kind == Kind.S and v.conj in vs for v in vs)


@settings(max_examples=60, deadline=None)
@given(elements())
def test_laurent_round_trip(e):
    assert from_laurent(to_laurent(e)) == e


@settings(max_examples=60, deadline=None)
@given(elements(), elements())
def test_laurent_is_a_ring_map(a, b):
    assert to_laurent(a * b) == to_laurent(a) * to_laurent(b)
    assert to_laurent(a + b) == to_laurent(a) + to_laurent(b)


@settings(max_examples=60, deadline=None)
@given(elements(), elements(), st.sampled_from(INFO["splits"]))
def test_spread_additive(a, b, h):
    if a.is_zero() or b.is_zero():
        return
    k = h.indet
    assert spread(a * b, k) == spread(a, k) + spread(b, k)


@settings(max_examples=60, deadline=None)
@given(elements(), st.sampled_from(INFO["splits"]))
def test_grade_components_reassemble(e, h):
    if e.rank > h.stage:
        return
    comps = grade_decompose(e, h.indet)
    total = ZERO
    for g, c in comps.items():
        total = total + c
        assert spread(c, h.indet) == 0 or c.is_zero()
    assert total == e


@settings(max_examples=60, deadline=None)
@given(elements())
def test_rank_is_max_indeterminate_stage(e):
    assert e.rank == max((v.stage for v in e.indets()), default=0)


@settings(max_examples=40, deadline=None)
@given(elements(), st.sampled_from([a for a in ATOMS if a.terms[0][0][0][0].kind in (Kind.T, Kind.U)]))
def test_polynomial_coefficients_reassemble(e, a):
    v = a.terms[0][0][0][0]
    if v.stage < e.rank:
        return
    assert reassemble(coefficients_in(e, v), v) == e
