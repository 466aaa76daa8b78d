from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from anisotope.field import DEGREE, REAL, DomainError, FqT, Q, parse_place, prime_place
from anisotope.hilbert import (
    Quaternion,
    critical_places,
    delta_set,
    hilbert_symbol,
    is_norm,
    s_witness_search,
    sqrt_exact,
    t_membership,
    t_witness_search,
)
from anisotope.oracle import local_solvable

F3 = FqT(3)
t = F3.t
nonzero = st.integers(-200, 200).filter(bool)


def test_symbol_examples():
    assert hilbert_symbol(-1, -1, prime_place(2)) == -1
    assert hilbert_symbol(-1, -1, REAL) == -1
    assert hilbert_symbol(-1, -1, prime_place(3)) == 1
    assert hilbert_symbol(2, 3, prime_place(3)) == -1
    assert hilbert_symbol(5, 3, prime_place(5)) == -1
    assert hilbert_symbol(t, F3(2), parse_place("t", F3)) == -1
    assert hilbert_symbol(t, F3(2), DEGREE) == -1


def test_symbol_of_zero_is_an_error():
    with pytest.raises(DomainError):
        hilbert_symbol(0, 1, prime_place(3))


def test_delta_sets():
    assert [str(v) for v in delta_set(-1, -1, Q)] == ["2", "inf"]
    assert [str(v) for v in delta_set(3, 5, Q)] == ["3", "5"]
    assert [str(v) for v in delta_set(t, 2, F3)] == ["t", "inf"]
    assert len(delta_set(1, 7, Q)) == 0


@given(nonzero, nonzero)
def test_product_formula_q(a, b):
    prod = 1
    for v in critical_places(Q, a, b):
        prod *= hilbert_symbol(a, b, v)
    assert prod == 1


@given(nonzero, nonzero, nonzero)
def test_bimultiplicative(a, b, c):
    for v in critical_places(Q, a, b, c):
        assert hilbert_symbol(a * b, c, v) == hilbert_symbol(a, c, v) * hilbert_symbol(b, c, v)
        assert hilbert_symbol(a, b, v) == hilbert_symbol(b, a, v)
        assert hilbert_symbol(a, -a, v) == 1


@settings(max_examples=60, deadline=None)
@given(st.integers(-30, 30).filter(bool), st.integers(-30, 30).filter(bool))
def test_symbol_matches_local_solvability(a, b):
    for v in critical_places(Q, a, b):
        assert (hilbert_symbol(a, b, v) == 1) == local_solvable([Q(a), Q(b), Q(-1)], v)


def test_symbol_matches_local_solvability_f3():
    elems = [F3(1), F3(2), t, 2 * t, t + 1, t * t + 1, t * (t + 2)]
    for a in elems:
        for b in elems:
            for v in critical_places(F3, a, b):
                assert (hilbert_symbol(a, b, v) == 1) == local_solvable([a, b, F3(-1)], v)


def test_candidate_places_suffice():
    # no symbol is -1 outside the candidate set, checked on a wider scan
    for a, b in [(3, 5), (-7, 11), (6, -10), (13, 2)]:
        crit = set(critical_places(Q, a, b))
        for v in Q.places_upto(100):
            if v not in crit:
                assert hilbert_symbol(a, b, v) == 1


def test_quaternion_invariants():
    x = Quaternion(Q(1), Q(1), Q(0), Q(0), Q(2), Q(3))
    assert x.trd == 2
    assert x.nrd == -1


def test_sqrt_exact():
    assert sqrt_exact(Fraction(9, 4)) == Fraction(3, 2)
    assert sqrt_exact(Q(2)) is None
    r = sqrt_exact(F3(2) * (t + 1) ** 2 * F3(2))
    assert r * r == (t + 1) ** 2


def test_s_witness():
    x = s_witness_search(Q(3), 3, 5, 6)
    assert x is not None and x.nrd == 1 and x.trd == 3


def test_t_membership_examples():
    assert t_membership(Fraction(1, 3), 3, 5, Q) is False
    assert t_membership(Fraction(1, 7), 3, 5, Q) is True
    assert t_membership(Q(0), 3, 5, Q) is True
    with pytest.raises(DomainError):
        t_membership(Q(2), -1, -1, Q)


@pytest.mark.parametrize("x", [Q(4), Q(0), Q(1), Fraction(9, 2)])
def test_t_witness_is_sound(x):
    found = t_witness_search(x, 3, 5, 4, Q)
    assert found is not None
    y, z = found
    assert y.nrd == 1 and z.nrd == 1 and y.trd + z.trd == x
    assert t_membership(x, 3, 5, Q)


def test_norms():
    assert not is_norm(7, -1, Q)
    assert is_norm(5, -1, Q)
    assert is_norm(2, 9, Q)
    assert is_norm(-t, t, F3)
    assert not is_norm(F3(2), t, F3)
