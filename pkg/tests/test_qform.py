import dataclasses
import pytest
from hypothesis import given, settings, strategies as st

from anisotope.field import DomainError, FqT, Q, parse_place
from anisotope.qform import (
    ANISOTROPIC,
    ISOTROPIC,
    QuadForm,
    check_certificate,
    decide,
    decision_places,
    determinant,
    diagonalize,
    local_isotropic,
    matmul,
)

F3 = FqT(3)


def diag(*xs):
    return [Q(x) for x in xs]


def test_decide_examples():
    d = decide(diag(1, 1, -7))
    assert d.verdict == ANISOTROPIC and str(d.certificate.place) == "7"
    d = decide(diag(1, 1, 1))
    assert d.verdict == ANISOTROPIC and str(d.certificate.place) == "inf"
    d = decide(diag(1, 1, -2))
    assert d.isotropic and check_certificate(diag(1, 1, -2), d.certificate)
    d = decide([F3(1)] * 5)
    assert [str(x) for x in d.certificate.witness] == ["1", "1", "1", "0", "0"]


def test_report_order():
    places = [str(v) for v in decision_places(Q, diag(3, 5, -7, 2))]
    assert places[0] == "inf" and places[-1] == "2"
    assert places[1:-1] == sorted(places[1:-1], key=int)


def test_degenerate_forms():
    f = QuadForm.from_coefficients(Q, [[1, 1], [1, 1]])
    d = decide(f)
    assert d.certificate.kind == "degenerate" and check_certificate(f, d.certificate)
    z = QuadForm.from_coefficients(Q, [[0, 0], [0, 0]])
    assert decide(z).isotropic


def test_non_symmetric_input_is_symmetrized():
    f = QuadForm.from_coefficients(Q, [[1, 2], [0, 1]])
    assert f.A[0][1] == f.A[1][0] == 1
    with pytest.raises(DomainError):
        QuadForm(Q, ((Q(1), Q(2)), (Q(0), Q(1))))


def test_hyperbolic_plane_diagonalizes():
    f = QuadForm.from_coefficients(Q, [[0, 1], [1, 0]])
    d = diagonalize(f)
    assert d.rank == 2
    B = matmul(matmul([list(r) for r in zip(*d.C)], f.A), d.C)
    assert B[0][1] == B[1][0] == 0
    assert B[0][0] * B[1][1] < 0
    assert decide(f).isotropic


small = st.integers(-6, 6)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(small, min_size=3, max_size=3), min_size=3, max_size=3))
def test_diagonalize_is_congruence(rows):
    f = QuadForm.from_coefficients(Q, rows)
    d = diagonalize(f)
    assert determinant(d.C) != 0
    CT = [list(r) for r in zip(*d.C)]
    B = matmul(matmul(CT, f.A), d.C)
    for i in range(3):
        for j in range(3):
            expected = d.coeffs[i] if i == j and i < d.rank else 0
            assert B[i][j] == expected


@settings(max_examples=40, deadline=None)
@given(st.lists(small.filter(bool), min_size=2, max_size=4))
def test_certificates_verify(coeffs):
    f = diag(*coeffs)
    d = decide(f, heights=[30])
    if d.certificate.witness is not None or d.verdict == ANISOTROPIC:
        assert check_certificate(f, d.certificate)


def test_mutated_witness_fails():
    f = diag(1, 1, -2)
    cert = decide(f).certificate
    bad = dataclasses.replace(cert, witness=(Q(1), Q(2), Q(1)))
    assert not check_certificate(f, bad)
    assert not check_certificate(f, dataclasses.replace(cert, witness=(Q(0),) * 3))
    assert not check_certificate(f, dataclasses.replace(cert, witness=None))


def test_mutated_anisotropic_certificate_fails():
    f = diag(1, 1, -7)
    cert = decide(f).certificate
    assert check_certificate(f, cert)
    assert not check_certificate(f, dataclasses.replace(cert, place=parse_place("5", Q)))
    assert not check_certificate(f, dataclasses.replace(cert, place=parse_place("inf", Q)))
    assert not check_certificate(f, dataclasses.replace(cert, diagonal=(Q(1), Q(1), Q(-3))))
    assert not check_certificate(f, dataclasses.replace(cert, congruence=((Q(1),) * 3,) * 3))
    assert not check_certificate(f, dataclasses.replace(cert, kind="bogus"))
    assert not check_certificate(diag(1, 1, -2), cert)


def test_quaternary_certificate():
    f = diag(1, 1, 1, 1)
    d = decide(f)
    assert d.verdict == ANISOTROPIC and str(d.certificate.place) == "inf"
    # 7 is not a sum of three squares, so the obstruction sits at 2
    g = diag(1, 1, 1, -7)
    d = decide(g)
    assert d.verdict == ANISOTROPIC and str(d.certificate.place) == "2"
    assert check_certificate(g, d.certificate)
    assert decide(diag(1, 1, 1, -1)).isotropic


def test_local_isotropic_binary():
    assert local_isotropic(diag(1, -4), parse_place("3", Q))
    assert not local_isotropic(diag(1, -3), parse_place("3", Q))
