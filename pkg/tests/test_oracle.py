from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from anisotope.field import DEGREE, REAL, DomainError, FqT, Q, is_square, parse_place, prime_place
from anisotope.oracle import class_oracle, evaluate_diagonal, global_witness_search, k_min, local_solvable

F3 = FqT(3)
t = F3.t


def q(*xs):
    return [Q(x) for x in xs]


def test_global_search_examples():
    assert global_witness_search(q(1, -1), 1) == (1, 1)
    assert global_witness_search(q(1, 1, 1), 200) is None
    assert global_witness_search(q(1, 1, -7), 200) is None
    assert global_witness_search(q(1, 1, -2), 3) == (1, 1, 1)


def test_global_search_returns_primitive_zero():
    w = global_witness_search(q(3, 5, -2, -7), 20)
    assert w is not None
    assert evaluate_diagonal(q(3, 5, -2, -7), w) == 0


def test_global_search_f3():
    w = global_witness_search([F3(1)] * 5, 1)
    assert [str(x) for x in w] == ["1", "1", "1", "0", "0"]
    w = global_witness_search([t, F3(1), F3(-1)], 1)
    assert evaluate_diagonal([t, F3(1), F3(-1)], w) == 0


def test_global_search_rational_coefficients():
    coeffs = [Fraction(1, 2), Fraction(1, 2), Q(-1)]
    w = global_witness_search(coeffs, 3)
    assert evaluate_diagonal(coeffs, w) == 0


def test_zero_coefficient_rejected():
    with pytest.raises(DomainError):
        global_witness_search(q(1, 0), 2)
    with pytest.raises(DomainError):
        local_solvable(q(1, 0), prime_place(3))


def test_local_examples():
    assert local_solvable(q(1, 1, -1), prime_place(5))
    assert not local_solvable(q(1, 1, -7), prime_place(7))
    assert not local_solvable(q(1, 1, 1, 1), prime_place(2), k=5)
    assert local_solvable(q(1, 1, 1, 1, 1), prime_place(2))
    assert not local_solvable(q(1, 1, 1), REAL)


def test_precision_threshold():
    assert k_min(q(1, 1, 1, 1), prime_place(2)) == 5
    with pytest.raises(DomainError):
        local_solvable(q(1, 1, 1, 1), prime_place(2), k=4)


def test_local_f3():
    # -1 is a non-square mod 3 but a square mod t^2+1
    assert not local_solvable([F3(1), -t], parse_place("t", F3))
    assert not local_solvable([F3(1), F3(1)], parse_place("t", F3))
    assert local_solvable([F3(1), F3(1)], parse_place("t^2+1", F3))
    assert local_solvable([F3(1), F3(1), t, 2 * t], DEGREE) == local_solvable([F3(1), F3(1), t, 2 * t], DEGREE, k=8)


def test_class_oracle():
    assert class_oracle(Q(17), prime_place(2))
    assert not class_oracle(Q(3), prime_place(7))
    assert class_oracle(Q(5), prime_place(3), kind="norm", y=Q(-1))
    with pytest.raises(DomainError):
        class_oracle(Q(5), prime_place(3), kind="cube")


@settings(max_examples=80, deadline=None)
@given(st.integers(-60, 60).filter(bool), st.sampled_from([2, 3, 5, 7, 11, 13]))
def test_square_oracle_matches_square_test(x, p):
    v = prime_place(p)
    assert class_oracle(Q(x), v) == is_square(Q(x), v)
