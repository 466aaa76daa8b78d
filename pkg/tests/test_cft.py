from math import prod

import pytest
from hypothesis import given, settings, strategies as st

from anisotope import cft
from anisotope.field import DomainError, FqT, Q, parse_place
from anisotope.hilbert import delta_set, hilbert_symbol

F3 = FqT(3)
P = lambda s, K=Q: parse_place(s, K)


@pytest.fixture(scope="module")
def toy():
    return cft.CftConstants.build(Q, Q(17), Q(13))


@pytest.fixture(scope="module")
def qc():
    return cft.load_constants(Q)[0]


@pytest.fixture(scope="module")
def f3c():
    return cft.load_constants(F3)[0]


def test_artin_map_examples(toy):
    assert cft.artin_map(P("3"), toy) == (-1, 1)
    assert cft.artin_map(Q(9), toy) == cft.IDENTITY
    assert cft.artin_map(Q(3 * 7), toy) == cft.gal_mul(cft.artin_map(P("3"), toy), cft.artin_map(P("7"), toy))
    with pytest.raises(DomainError):
        cft.artin_map(P("13"), toy)
    with pytest.raises(DomainError):
        cft.artin_map(Q(26), toy)


def test_admissible_modulus():
    assert str(cft.admissible_modulus(Q(17), Q(13), Q)) == "8*13*17*inf"
    assert str(cft.admissible_modulus(F3(2), F3.t, F3)) == "t*inf"
    with pytest.raises(DomainError):
        cft.admissible_modulus(Q(5), Q(5), Q)


def test_gal_roundtrip():
    for s in cft.GALOIS:
        assert cft.parse_gal(cft.fmt_gal(s)) == s
        assert cft.gal_mul(s, s) == cft.IDENTITY


def test_p_partition(toy):
    assert cft.p_partition(Q(12), toy).places == (P("3"),)
    assert cft.p_partition(Q(49), toy).places == ()
    part = cft.p_partition(Q(21), toy)
    assert part.fibers[(-1, 1)] == (P("3"),)
    assert part.fibers[(-1, -1)] == (P("7"),)


def test_phi_membership(toy):
    assert cft.phi_membership(Q(3), (-1, 1), toy)
    assert not cft.phi_membership(Q(21), (1, -1), toy)
    assert not cft.phi_membership(Q(12), (-1, 1), toy)
    assert cft.phi_membership(Q(12), (-1, 1), toy, tilde=True)


def test_coset_and_radical():
    R = cft.SemilocalRing(frozenset({P("7")}))
    assert cft.coset_membership(Q(14), Q(7), R, "units")
    assert not cft.coset_membership(Q(3), Q(1), R, "one_plus_j")
    assert cft.coset_membership(Q(2), Q(1), R, "one_plus_j")
    empty = cft.SemilocalRing(frozenset())
    assert cft.coset_membership(Q(5), Q(3), empty, "one_plus_j")
    R3 = cft.SemilocalRing(frozenset({P("3")}))
    assert cft.j_membership(Q(6), R3) and not cft.j_membership(Q(2), R3)
    assert cft.j_membership(Q(2), empty) and cft.j_membership(Q(0), R3)


def test_r_delta_needs_q(qc):
    with pytest.raises(DomainError):
        cft.r_delta(cft.IDENTITY, Q(3), qc)
    assert cft.r_delta((-1, -1), Q(49), qc).places == frozenset()


@pytest.mark.parametrize("K", [Q, F3, FqT(5), FqT(7)], ids=str)
def test_surjectivity_below_200(K):
    consts = cft.load_constants(K)[0]
    seen = {cft.artin_map(v, consts) for v in K.iter_places(200) if v not in consts.modulus}
    assert seen == set(cft.GALOIS)


@pytest.mark.parametrize("name", ["qc", "f3c"])
def test_isolation_and_prop41(name, request):
    consts = request.getfixturevalue(name)
    K = consts.K
    count = 0
    for v in K.iter_places(120):
        if v in consts.modulus:
            continue
        sigma = cft.artin_map(v, consts)
        iso = cft.isolate_prime(sigma, v, consts, cft._default_q_bound(K))
        assert iso.ring.places == {v}
        if sigma == cft.IDENTITY:
            assert cft.psi_membership(iso.p, iso.q, consts)
            D = delta_set(consts.a * iso.p, iso.q, K).finite & delta_set(consts.b * iso.p, iso.q, K).finite
            assert D and all(w not in consts.modulus for w in iso.ring.places)
        else:
            assert cft.phi_membership(iso.p, sigma, consts)
            assert cft.p_partition(iso.p, consts).fibers[sigma]
        count += 1
    assert count > 10


def test_isolate_wrong_fiber(qc):
    v = next(w for w in Q.iter_places(100) if w not in qc.modulus and cft.artin_map(w, qc) == (-1, -1))
    with pytest.raises(DomainError):
        cft.isolate_prime((1, -1), v, qc, 1000)


def test_psi_rejects_bad_p(qc):
    v = next(w for w in Q.iter_places(500) if w not in qc.modulus and cft.artin_map(w, qc) == cft.IDENTITY)
    iso = cft.isolate_prime(cft.IDENTITY, v, qc, 10_000)
    assert cft.psi_membership(iso.p, iso.q, qc)
    w = next(u for u in Q.iter_places(100) if u not in qc.modulus and cft.artin_map(u, qc) != cft.IDENTITY)
    assert not cft.psi_membership(Q(w.p) * iso.p, iso.q, qc)


primes = st.sampled_from([2, 3, 5, 7, 11, 13, 19, 23, 29, 31])
elems = st.builds(lambda s, xs: Q(s * prod(xs)), st.sampled_from([1, -1]), st.lists(primes, max_size=3))


@settings(max_examples=60, deadline=None)
@given(elems, elems)
def test_dagger_bridge(qc, x, y):
    for v in (P("3"), P("7"), P("11"), P("19")):
        if v in qc.modulus:
            continue
        iso = cft.isolate_prime(cft.artin_map(v, qc), v, qc, 10_000)
        ctx = cft.context_for(iso, qc)
        h = hilbert_symbol(x, y, v)
        assert cft.dagger(x, y, -1, ctx) == (h == -1)
        assert cft.dagger(x, y, 1, ctx) == (h == 1)


def test_opposition_examples(qc):
    assert cft.eval_opposition(1, 1, 1, 1, qc, 100).value
    assert cft.eval_opposition(1, 1, -1, -1, qc, 100).value is False
    r = cft.eval_opposition(1, 1, -7, 1, qc, 100)
    assert r.value == bool(cft.opposition_sweep(1, 1, -7, 1, Q))


@settings(max_examples=25, deadline=None)
@given(st.lists(elems, min_size=4, max_size=4))
def test_opposition_matches_sweep(qc, a):
    r = cft.eval_opposition(*a, qc, 100)
    assert r.value == bool(cft.opposition_sweep(*a, Q))


def test_reciprocity_q(qc):
    kernel, classes, failures = cft.reciprocity_check(qc, 10_000, kernel_bound=10**6)
    assert kernel > 0 and classes > 0 and not failures


def test_fixture_roundtrip(f3c):
    text = cft.constants_to_json(f3c, 500, {"isolation": 1})
    back, data = cft.constants_from_json(text)
    assert back == f3c and data["bound"] == 500
