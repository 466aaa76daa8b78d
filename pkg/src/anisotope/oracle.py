"""Brute-force ground truth for isotropy questions.

Nothing here uses Hilbert-symbol formulas.  Global questions are answered by
exhaustive height-bounded search, local ones by enumerating residues and
applying Hensel's criterion.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import reduce
from itertools import product

from .field import DomainError, Place, as_elem, field_of, unit_residue, valuation
from .poly import Poly, RatFunc, poly_gcd, polys_upto


# -- global search ------------------------------------------------------------


def _integral_coeffs(coeffs):
    """Scale a diagonal form to integral coefficients (same zeros)."""
    K = field_of(coeffs[0])
    if K.is_rational:
        den = reduce(math.lcm, (c.denominator for c in coeffs), 1)
        return K, [int(c * den) for c in coeffs]
    den = coeffs[0].den
    for c in coeffs[1:]:
        den = den * c.den // poly_gcd(den, c.den)
    return K, [(c * RatFunc(den)).num for c in coeffs]


def _coordinate_values(K, height):
    if K.is_rational:
        return list(range(height + 1))
    return list(polys_upto(K.q, height))


def _primitive(K, vec):
    if K.is_rational:
        g = reduce(math.gcd, vec, 0)
        return tuple(Fraction(x // g) for x in vec)
    g = Poly((), K.q)
    for x in vec:
        g = poly_gcd(g, x) if g else (x.monic()[1] if x else g)
    return tuple(RatFunc(x // g) for x in vec)


def _colex(n, k):
    for idx in product(range(n), repeat=k):
        yield idx[::-1]


def global_witness_search(coeffs, height):
    """First nonzero vector of height <= H on which sum c_i x_i^2 vanishes.

    Over Q the coordinates run over 0..H (signs do not matter for a diagonal
    form); over F_q(t) over all polynomials of degree <= H.  Vectors are
    ordered colexicographically (last coordinate most significant).  The
    search is a meet-in-the-middle split: the first half of the variables is
    tabulated, the second half enumerated in colex order, and the first hit
    is the colex-least zero.  Returns a primitive vector of K elements, or
    None.
    """
    coeffs = [as_elem(c) for c in coeffs]
    if any(not c for c in coeffs):
        raise DomainError("diagonal coefficients must be nonzero")
    K, ints = _integral_coeffs(coeffs)
    m = len(ints)
    if m < 2:
        return None
    values = _coordinate_values(K, height)
    terms = [[c * x * x for x in values] for c in ints]
    zero = 0 if K.is_rational else Poly((), K.q)
    half = m // 2

    table = {}
    nonzero_zero = None
    for idx in _colex(len(values), half):
        s = zero
        for i, j in enumerate(idx):
            s = s + terms[i][j]
        if s not in table:
            table[s] = idx
        if s == zero and nonzero_zero is None and any(idx):
            nonzero_zero = idx
    for idx in _colex(len(values), m - half):
        s = zero
        for i, j in enumerate(idx):
            s = s + terms[half + i][j]
        need = -s
        if not any(idx):
            left = nonzero_zero
        else:
            left = table.get(need)
        if left is None:
            continue
        vec = [values[j] for j in left + idx]
        return _primitive(K, vec)
    return None


def evaluate_diagonal(coeffs, vec):
    return sum((as_elem(c) * x * x for c, x in zip(coeffs, vec)), 0 * as_elem(coeffs[0]))


# -- local solvability ----------------------------------------------------------


class _ResidueField:
    """The residue field at a non-dyadic finite place, by brute enumeration."""

    def __init__(self, v, K):
        if v.kind == "poly":
            pi = v.p
            self.elements = list(polys_upto(pi.q, pi.degree - 1))
            self.zero, self.one = Poly((), pi.q), Poly.const(1, pi.q)
            self.add = lambda x, y: (x + y) % pi
            self.mul = lambda x, y: x * y % pi
        else:
            n = v.p if v.kind == "prime" else K.q
            self.elements = list(range(n))
            self.zero, self.one = 0, 1
            self.add = lambda x, y: (x + y) % n
            self.mul = lambda x, y: x * y % n
        self.squares = {self.mul(x, x) for x in self.elements}

    @property
    def _minus_one(self):
        return next(y for y in self.elements if self.add(y, self.one) == self.zero)

    def has_nontrivial_zero(self, coeffs):
        """Does sum c_i x_i^2 = 0 have a nonzero solution over the residue field?

        Enumerates x_1..x_{n-1} and asks whether -(sum)/c_n is a square.
        """
        n = len(coeffs)
        if n < 2:
            return False
        last = coeffs[-1]
        inv_last = next(y for y in self.elements if self.mul(y, last) == self.one)
        scale = self.mul(self._minus_one, inv_last)
        sq_terms = [[self.mul(c, self.mul(x, x)) for x in self.elements] for c in coeffs[:-1]]
        for idx in product(range(len(self.elements)), repeat=n - 1):
            if not any(idx):
                continue  # forces x_n = 0 as well
            s = self.zero
            for i, j in enumerate(idx):
                s = self.add(s, sq_terms[i][j])
            if self.mul(s, scale) in self.squares:
                return True
        return False


def k_min(coeffs, v):
    """Lifting precision v(4 * prod coeffs) + 3 recorded with each local verdict."""
    prod = reduce(lambda x, y: x * y, (as_elem(c) for c in coeffs))
    return valuation(4 * prod, v) + 3


def _uniformizer(v, K):
    if v.kind == "prime":
        return K(v.p)
    if v.kind == "poly":
        return RatFunc(v.p)
    return 1 / K.t


def _normalize(coeffs, v, K):
    """Rescale by even powers of the uniformizer so every valuation is 0 or 1."""
    pi = _uniformizer(v, K)
    out = []
    for c in coeffs:
        e = valuation(c, v)
        out.append((c * pi ** (-2 * (e // 2)), e % 2))
    return out


def local_solvable(coeffs, v, k=None):
    """Is sum c_i x_i^2 isotropic over K_v?

    k is the lifting precision; it defaults to, and may not be below,
    :func:`k_min`.  After rescaling every coefficient to valuation 0 or 1:

    * at 2, primitive vectors mod 16 are enumerated and accepted when
      v(f(x)) >= 2 min_i v(2 c_i x_i) + 1, which Newton's lemma lifts to a
      2-adic zero (and every primitive zero reduces to such a vector);
    * at an odd place, a primitive zero has a unit coordinate either among
      the unit coefficients (a simple zero of that residue form, liftable
      by Hensel) or, after substituting x = pi*y in the unit part, among
      the pi-coefficients; the two residue forms are enumerated.
    """
    coeffs = [as_elem(c) for c in coeffs]
    if any(not c for c in coeffs):
        raise DomainError("diagonal coefficients must be nonzero")
    K = field_of(coeffs[0])
    if v.kind == "real":
        return len(coeffs) >= 2 and any(c > 0 for c in coeffs) and any(c < 0 for c in coeffs)
    need = k_min(coeffs, v)
    if k is not None and k < need:
        raise DomainError(f"precision {k} below lifting threshold {need} at {v}")
    if len(coeffs) < 2:
        return False
    norm = _normalize(coeffs, v, K)
    if v.is_dyadic:
        return _dyadic_search(norm)
    F = _ResidueField(v, K)
    f0 = [unit_residue(c, v) for c, e in norm if e == 0]
    f1 = [unit_residue(c, v) for c, e in norm if e == 1]
    return F.has_nontrivial_zero(f0) or F.has_nontrivial_zero(f1)


def _v2(n):
    if n == 0:
        return math.inf
    return (n & -n).bit_length() - 1


def _dyadic_search(norm):
    cs = [(2 ** e) * unit_residue(c, _TWO, modulus=32) % 32 for c, e in norm]
    m = len(cs)
    for x in product(range(16), repeat=m):
        if not any(xi % 2 for xi in x):
            continue
        fx = sum(c * xi * xi for c, xi in zip(cs, x)) % 32
        s = min(_v2(2 * c * xi) if xi else math.inf for c, xi in zip(cs, x))
        if _v2(fx) >= 2 * s + 1:
            return True
    return False


_TWO = Place("prime", 2)


def class_oracle(x, v, kind="square", y=None):
    """Local square / local norm test via local_solvable."""
    x = as_elem(x)
    if kind == "square":
        return local_solvable([1 + 0 * x, -x], v)
    if kind == "norm":
        y = as_elem(y)
        return local_solvable([1 + 0 * x, -y, -x], v)
    raise DomainError(f"unknown class oracle kind {kind!r}")
