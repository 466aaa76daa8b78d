"""Hilbert symbols, quaternion algebras H_{a,b} and their ramification sets."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .field import (
    DEGREE,
    REAL,
    DomainError,
    Place,
    as_elem,
    factor,
    field_of,
    is_square,
    residue_character,
    support,
    unit_residue,
    valuation,
)
from .poly import Poly, RatFunc, polys_upto


def critical_places(K, *elems):
    """Places where a symbol built from elems can be nontrivial.

    Over Q: 2, the real place and the primes dividing some element.  Over
    F_q(t): the degree place and the irreducibles dividing some element.
    At every other place all the elements are units at a non-dyadic place.
    """
    places = set()
    for x in elems:
        x = as_elem(x)
        if x:
            places.update(support(x))
    if K.is_rational:
        places.update((Place("prime", 2), REAL))
    else:
        places.add(DEGREE)
    return sorted(places, key=Place.sort_key)


def hilbert_symbol(a, b, v):
    """(a, b)_v: +1 iff z^2 = a x^2 + b y^2 has a nontrivial solution in K_v."""
    a, b = as_elem(a), as_elem(b)
    if not a or not b:
        raise DomainError("Hilbert symbol of zero")
    if v.kind == "real":
        return -1 if a < 0 and b < 0 else 1
    alpha, beta = valuation(a, v), valuation(b, v)
    if v.is_dyadic:
        u = unit_residue(a, v, modulus=8)
        w = unit_residue(b, v, modulus=8)
        e = _eps(u) * _eps(w) + alpha * _omega(w) + beta * _omega(u)
        return -1 if e % 2 else 1
    K = field_of(a)
    n = v.residue_size(K)
    sign = -1 if (alpha * beta * ((n - 1) // 2)) % 2 else 1
    if beta % 2:
        sign *= residue_character(unit_residue(a, v), v, K)
    if alpha % 2:
        sign *= residue_character(unit_residue(b, v), v, K)
    return sign


def _eps(u):
    return ((u - 1) // 2) % 2


def _omega(u):
    return ((u * u - 1) // 8) % 2


@dataclass(frozen=True)
class RamificationSet:
    a: object
    b: object
    places: frozenset

    def __contains__(self, v):
        return v in self.places

    def __len__(self):
        return len(self.places)

    def __iter__(self):
        return iter(sorted(self.places, key=Place.sort_key))

    @property
    def finite(self):
        return frozenset(v for v in self.places if v.is_finite)


def delta_set(a, b, K):
    """Places where H_{a,b} does not split."""
    a, b = K(a), K(b)
    ram = frozenset(v for v in critical_places(K, a, b) if hilbert_symbol(a, b, v) == -1)
    return RamificationSet(a, b, ram)


@dataclass(frozen=True)
class Quaternion:
    """x0 + x1*alpha + x2*beta + x3*alpha*beta in H_{a,b}."""

    x0: object
    x1: object
    x2: object
    x3: object
    a: object
    b: object

    def __post_init__(self):
        if not self.a or not self.b:
            raise DomainError("quaternion algebra parameters must be nonzero")

    @property
    def coords(self):
        return (self.x0, self.x1, self.x2, self.x3)

    @property
    def trd(self):
        return 2 * self.x0

    @property
    def nrd(self):
        a, b = self.a, self.b
        return self.x0 ** 2 - a * self.x1 ** 2 - b * self.x2 ** 2 + a * b * self.x3 ** 2


def reduced_invariants(x):
    return x.trd, x.nrd


# -- bounded searches -------------------------------------------------------


def _signed_ints(h):
    yield 0
    for k in range(1, h + 1):
        yield k
        yield -k


def _shell(K, bound):
    """Numerators and common denominators in increasing height shells.

    Over Q a height-H value is n/D with max(|n|, D) = H; over F_q(t) it is
    n/D with D monic and max(deg n, deg D) = H.
    """
    if K.is_rational:
        for h in range(1, bound + 1):
            yield h, [K(n) for n in _signed_ints(h)], [K(d) for d in range(1, h + 1)]
    else:
        for h in range(0, bound + 1):
            nums = [RatFunc(f) for f in polys_upto(K.q, h)]
            dens = [RatFunc(f) for f in polys_upto(K.q, h) if f and f.is_monic()]
            yield h, nums, dens


def sqrt_exact(x):
    """A square root of x in K, or None."""
    x = as_elem(x)
    if not x:
        return x
    if not is_square(x):
        return None
    if isinstance(x, Fraction):
        from math import isqrt

        return Fraction(isqrt(x.numerator), isqrt(x.denominator))
    fac = factor(x)
    q = x.q
    c = next(r for r in range(1, q) if r * r % q == fac.unit)
    out = RatFunc(Poly.const(c, q))
    for w, e in fac.factors:
        out = out * RatFunc(w.p) ** (e // 2)
    return out


def s_witness_search(tval, a, b, bound, K=None):
    """Least x in H_{a,b} with Trd(x) = tval and Nrd(x) = 1, by height.

    Coordinates x1, x2, x3 are n_i/D over a shared denominator D; the search
    runs over (D, n1, n2) in increasing height and solves for n3 exactly.
    Returns None when nothing is found within the bound.
    """
    K = K or field_of(as_elem(tval))
    tval, a, b = K(tval), K(a), K(b)
    x0 = tval / 2
    rhs = x0 * x0 - 1
    seen = set()
    for _, nums, dens in _shell(K, bound):
        for d in dens:
            for n1 in nums:
                for n2 in nums:
                    key = (d, n1, n2)
                    if key in seen:
                        continue
                    seen.add(key)
                    # a n1^2 + b n2^2 - ab n3^2 = rhs * d^2
                    val = (a * n1 * n1 + b * n2 * n2 - rhs * d * d) / (a * b)
                    n3 = sqrt_exact(val)
                    if n3 is None:
                        continue
                    x = Quaternion(x0, n1 / d, n2 / d, n3 / d, a, b)
                    assert x.nrd == 1
                    return x
    return None


def _splits_at_real_places(a, b, K):
    return not K.is_rational or hilbert_symbol(a, b, REAL) == 1


def t_membership(x, a, b, K):
    """Is x in T(H_{a,b}/K), i.e. integral at every finite ramified place?"""
    a, b, x = K(a), K(b), K(x)
    if not _splits_at_real_places(a, b, K):
        raise DomainError(f"H_({a},{b}) does not split at the real place")
    if not x:
        return True
    return all(valuation(x, v) >= 0 for v in delta_set(a, b, K).finite)


def _trace_candidates(K, bound):
    yield K(2)
    yield K(-2)
    seen = {K(2), K(-2)}
    for _, nums, dens in _shell(K, bound):
        for d in dens:
            for n in nums:
                s = n / d
                if s not in seen:
                    seen.add(s)
                    yield s


def t_witness_search(x, a, b, bound, K=None):
    """Find (y, z) with Nrd(y) = Nrd(z) = 1 and Trd(y) + Trd(z) = x, or None."""
    K = K or field_of(as_elem(x))
    x, a, b = K(x), K(a), K(b)
    if not _splits_at_real_places(a, b, K):
        raise DomainError(f"H_({a},{b}) does not split at the real place")
    for s in _trace_candidates(K, bound):
        y = s_witness_search(s, a, b, bound, K)
        if y is None:
            continue
        z = s_witness_search(x - s, a, b, bound, K)
        if z is not None:
            return y, z
    return None


def is_norm(x, y, K):
    """Is x a norm from K(sqrt y)?"""
    x, y = K(x), K(y)
    if not x or not y:
        raise DomainError("norm test with zero argument")
    if is_square(y):
        return True
    return all(hilbert_symbol(y, x, v) == 1 for v in critical_places(K, x, y))
