"""Polynomials over GF(q) and rational functions in F_q(t).

Polynomials are immutable coefficient tuples, lowest degree first, with no
trailing zeros; the zero polynomial is the empty tuple.  Rational functions
are kept reduced with a monic denominator, so equality is structural.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product

from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_factor, gf_irreducible_p


class Poly:
    """Polynomial in t over GF(q), q an odd prime."""

    __slots__ = ("q", "c")

    def __init__(self, coeffs, q):
        c = [int(x) % q for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.q = q
        self.c = tuple(c)

    @classmethod
    def const(cls, a, q):
        return cls((a,), q)

    @classmethod
    def t(cls, q):
        return cls((0, 1), q)

    def _coerce(self, other):
        if isinstance(other, Poly):
            if other.q != self.q:
                raise ValueError(f"mixing GF({self.q}) and GF({other.q}) polynomials")
            return other
        if isinstance(other, int):
            return Poly.const(other, self.q)
        return NotImplemented

    @property
    def degree(self):
        """Degree, with -1 for the zero polynomial."""
        return len(self.c) - 1

    @property
    def lc(self):
        return self.c[-1] if self.c else 0

    def is_monic(self):
        return self.lc == 1

    def monic(self):
        """Return (lc, monic part)."""
        if not self.c:
            raise ZeroDivisionError("zero polynomial has no monic part")
        lc = self.lc
        inv = pow(lc, -1, self.q)
        return lc, Poly([x * inv for x in self.c], self.q)

    def __bool__(self):
        return bool(self.c)

    def __eq__(self, other):
        if isinstance(other, int):
            other = Poly.const(other, self.q)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.q == other.q and self.c == other.c

    def __hash__(self):
        return hash(("Poly", self.q, self.c))

    def __neg__(self):
        return Poly([-x for x in self.c], self.q)

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        n = max(len(self.c), len(other.c))
        a = self.c + (0,) * (n - len(self.c))
        b = other.c + (0,) * (n - len(other.c))
        return Poly([x + y for x, y in zip(a, b)], self.q)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not self.c or not other.c:
            return Poly((), self.q)
        out = [0] * (len(self.c) + len(other.c) - 1)
        for i, x in enumerate(self.c):
            if x:
                for j, y in enumerate(other.c):
                    out[i + j] += x * y
        return Poly(out, self.q)

    __rmul__ = __mul__

    def __divmod__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not other.c:
            raise ZeroDivisionError("polynomial division by zero")
        q = self.q
        rem = list(self.c)
        dq = other.degree
        inv = pow(other.lc, -1, q)
        quo = [0] * max(len(rem) - dq, 0)
        for k in range(len(rem) - 1 - dq, -1, -1):
            coef = rem[k + dq] * inv % q
            quo[k] = coef
            if coef:
                for j, y in enumerate(other.c):
                    rem[k + j] = (rem[k + j] - coef * y) % q
        return Poly(quo, q), Poly(rem[:dq] if dq > 0 else [], q)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = Poly.const(1, self.q)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def powmod(self, n, mod):
        result = Poly.const(1, self.q) % mod
        base = self % mod
        while n:
            if n & 1:
                result = result * base % mod
            base = base * base % mod
            n >>= 1
        return result

    def sort_key(self):
        return (self.degree, tuple(reversed(self.c)))

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def __call__(self, x):
        acc = 0
        for coef in reversed(self.c):
            acc = (acc * x + coef) % self.q
        return acc

    def __str__(self):
        if not self.c:
            return "0"
        terms = []
        for k in range(len(self.c) - 1, -1, -1):
            a = self.c[k]
            if not a:
                continue
            if k == 0:
                terms.append(str(a))
                continue
            mono = "t" if k == 1 else f"t^{k}"
            terms.append(mono if a == 1 else f"{a}*{mono}")
        return "+".join(terms)

    def __repr__(self):
        return f"Poly({self}, q={self.q})"


def poly_gcd(a, b):
    while b:
        a, b = b, a % b
    if not a:
        return a
    return a.monic()[1]


def poly_xgcd(a, b):
    """Return (g, s, t) with s*a + t*b = g, g monic."""
    q = a.q
    r0, r1 = a, b
    s0, s1 = Poly.const(1, q), Poly((), q)
    t0, t1 = Poly((), q), Poly.const(1, q)
    while r1:
        quo, rem = divmod(r0, r1)
        r0, r1 = r1, rem
        s0, s1 = s1, s0 - quo * s1
        t0, t1 = t1, t0 - quo * t1
    lc, g = r0.monic()
    inv = pow(lc, -1, q)
    return g, s0 * inv, t0 * inv


def poly_inverse_mod(a, m):
    g, s, _ = poly_xgcd(a % m, m)
    if g.degree != 0:
        raise ZeroDivisionError(f"{a} is not invertible modulo {m}")
    return s % m


def is_irreducible(f):
    if f.degree < 1:
        return False
    return bool(gf_irreducible_p([ZZ(x) for x in reversed(f.c)], f.q, ZZ))


def factor_poly(f):
    """Factor f as (lc, [(monic irreducible, exponent), ...]), factors sorted."""
    if not f:
        raise ValueError("cannot factor the zero polynomial")
    lc, parts = gf_factor([ZZ(x) for x in reversed(f.c)], f.q, ZZ)
    out = [(Poly([int(x) for x in reversed(g)], f.q), int(e)) for g, e in parts]
    out.sort(key=lambda fe: fe[0].sort_key())
    return int(lc) % f.q, out


@lru_cache(maxsize=None)
def monic_irreducibles(q, degree):
    """All monic irreducibles of the given degree, in ascending order."""
    out = []
    for tail in product(range(q), repeat=degree):
        f = Poly(tuple(reversed(tail)) + (1,), q)
        if is_irreducible(f):
            out.append(f)
    out.sort(key=Poly.sort_key)
    return tuple(out)


def polys_upto(q, max_degree):
    """Every polynomial of degree <= max_degree (zero first), ascending."""
    if max_degree < 0:
        yield Poly((), q)
        return
    for coeffs in product(range(q), repeat=max_degree + 1):
        yield Poly(tuple(reversed(coeffs)), q)


class RatFunc:
    """Element of F_q(t): reduced num/den with den monic."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        if den is None:
            den = Poly.const(1, num.q)
        if not den:
            raise ZeroDivisionError("rational function with zero denominator")
        if not num:
            self.num = num
            self.den = Poly.const(1, num.q)
            return
        g = poly_gcd(num, den)
        if g.degree > 0:
            num, den = num // g, den // g
        lc, den = den.monic()
        if lc != 1:
            num = num * pow(lc, -1, num.q)
        self.num = num
        self.den = den

    @property
    def q(self):
        return self.num.q

    def _coerce(self, other):
        if isinstance(other, RatFunc):
            if other.q != self.q:
                raise ValueError("mixing rational functions over different fields")
            return other
        if isinstance(other, Poly):
            return RatFunc(other)
        if isinstance(other, int):
            return RatFunc(Poly.const(other, self.q))
        return NotImplemented

    def __bool__(self):
        return bool(self.num)

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash(("RatFunc", self.q, self.num.c, self.den.c))

    def __neg__(self):
        return RatFunc(-self.num, self.den)

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.den == other.den:
            return RatFunc(self.num + other.num, self.den)
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return RatFunc(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not other:
            raise ZeroDivisionError("division by zero in F_q(t)")
        return RatFunc(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other / self

    def __pow__(self, n):
        if n < 0:
            if not self:
                raise ZeroDivisionError("zero to a negative power")
            return RatFunc(self.den ** (-n), self.num ** (-n))
        return RatFunc(self.num ** n, self.den ** n)

    def is_poly(self):
        return self.den.degree == 0

    def __str__(self):
        if self.den.degree == 0:
            return str(self.num)
        num = str(self.num)
        if len([x for x in self.num.c if x]) > 1:
            num = f"({num})"
        return f"{num}/({self.den})"

    def __repr__(self):
        return f"RatFunc({self}, q={self.q})"
