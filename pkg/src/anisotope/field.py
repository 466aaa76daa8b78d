"""Exact arithmetic in K = Q or F_q(t): elements, places, valuations, square classes.

Elements of Q are ``fractions.Fraction``; elements of F_q(t) are
:class:`~anisotope.poly.RatFunc`.  Places are small frozen records.  The ring
of integers is Z, resp. F_q[t] with the degree place as the only place at
infinity.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction

from sympy import factorint, isprime, primerange

from .poly import (
    Poly,
    RatFunc,
    factor_poly,
    is_irreducible,
    monic_irreducibles,
    poly_inverse_mod,
    polys_upto,
)


class DomainError(ValueError):
    """An operation was called outside its mathematical domain."""


# --------------------------------------------------------------------------
# fields


@dataclass(frozen=True)
class GlobalField:
    kind: str  # "Q" or "FqT"
    q: int | None = None

    def __post_init__(self):
        if self.kind == "FqT":
            if self.q is None or self.q < 3 or not isprime(self.q):
                raise DomainError(f"F_q(t) needs q an odd prime, got {self.q}")
        elif self.kind != "Q" or self.q is not None:
            raise DomainError(f"unknown field {self.kind!r}")

    @classmethod
    def parse(cls, tag):
        tag = tag.strip()
        if tag in ("Q", "QQ"):
            return Q
        m = re.fullmatch(r"F_?(\d+)\(t\)", tag)
        if not m:
            raise DomainError(f"bad field tag {tag!r}; expected Q or F<q>(t)")
        return cls("FqT", int(m.group(1)))

    @property
    def is_rational(self):
        return self.kind == "Q"

    @property
    def tag(self):
        return "Q" if self.is_rational else f"F{self.q}(t)"

    def __str__(self):
        return self.tag

    def __call__(self, x):
        """Coerce ints, Fractions, Polys, RatFuncs or text into K."""
        if isinstance(x, str):
            return self.parse_elem(x)
        if self.is_rational:
            if isinstance(x, (int, Fraction)):
                return Fraction(x)
            raise TypeError(f"cannot coerce {x!r} into Q")
        if isinstance(x, RatFunc):
            if x.q != self.q:
                raise TypeError(f"{x!r} is not in {self}")
            return x
        if isinstance(x, Poly):
            return RatFunc(x)
        if isinstance(x, int):
            return RatFunc(Poly.const(x, self.q))
        raise TypeError(f"cannot coerce {x!r} into {self}")

    @property
    def one(self):
        return self(1)

    @property
    def zero(self):
        return self(0)

    @property
    def t(self):
        if self.is_rational:
            raise DomainError("Q has no generator t")
        return RatFunc(Poly.t(self.q))

    @property
    def infinite_place(self):
        return REAL if self.is_rational else DEGREE

    def parse_elem(self, text):
        return parse_expr(text, self)

    def fmt(self, x):
        return str(x)

    def nonsquare_constant(self):
        """Fixed non-square of K used for AND-flattening: 2 over Q, t over F_q(t)."""
        return self(2) if self.is_rational else self.t

    def places_upto(self, bound):
        """Finite places of norm <= bound, ascending.

        The norm of a prime p is p; that of an irreducible pi is q^deg(pi).
        """
        return list(self.iter_places(bound))

    def iter_places(self, bound):
        """Lazy version of places_upto."""
        if self.is_rational:
            for p in primerange(2, bound + 1):
                yield Place("prime", int(p))
            return
        d = 1
        while self.q ** d <= bound:
            for f in monic_irreducibles(self.q, d):
                yield Place("poly", f)
            d += 1

    def generator(self, v):
        """The positive prime, resp. monic irreducible, generating a finite place."""
        return self(v.p)


Q = GlobalField("Q")


def FqT(q):
    return GlobalField("FqT", q)


def field_of(x):
    if isinstance(x, RatFunc):
        return FqT(x.q)
    if isinstance(x, (int, Fraction)):
        return Q
    raise TypeError(f"not a field element: {x!r}")


def as_elem(x):
    return Fraction(x) if isinstance(x, int) else x


# --------------------------------------------------------------------------
# text syntax


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")


def _tokenize(text):
    text = text.replace("−", "-")
    pos, out = 0, []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            if text[pos:].strip() == "":
                break
            raise DomainError(f"cannot parse {text!r} at position {pos}")
        num, ident, op = m.groups()
        if num is not None:
            out.append(("num", int(num)))
        elif ident is not None:
            out.append(("id", ident))
        else:
            out.append(("op", "^" if op == "**" else op))
        pos = m.end()
    return out


def parse_expr(text, K, variable=None):
    """Parse an arithmetic expression over K.

    Integers become field elements and ``t`` the generator of F_q(t).  Any
    other identifier is handed to ``variable(name)``; without a callback it is
    an error.  Implicit multiplication (``2t``, ``3(t+1)``) is accepted.
    """
    toks = _tokenize(text)
    pos = 0

    def peek():
        return toks[pos] if pos < len(toks) else (None, None)

    def take():
        nonlocal pos
        tok = peek()
        pos += 1
        return tok

    def expr():
        acc = term()
        while peek() in (("op", "+"), ("op", "-")):
            _, op = take()
            rhs = term()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def term():
        acc = unary()
        while True:
            kind, val = peek()
            if (kind, val) == ("op", "*"):
                take()
                acc = acc * unary()
            elif (kind, val) == ("op", "/"):
                take()
                acc = acc / unary()
            elif kind in ("num", "id") or (kind, val) == ("op", "("):
                acc = acc * power()
            else:
                return acc

    def unary():
        kind, val = peek()
        if (kind, val) == ("op", "-"):
            take()
            return -unary()
        if (kind, val) == ("op", "+"):
            take()
            return unary()
        return power()

    def power():
        base = atom()
        if peek() == ("op", "^"):
            take()
            sign = 1
            if peek() == ("op", "-"):
                take()
                sign = -1
            kind, val = take()
            if kind != "num":
                raise DomainError(f"exponent must be an integer literal in {text!r}")
            return base ** (sign * val)
        return base

    def atom():
        kind, val = take()
        if kind == "num":
            return K(val)
        if kind == "id":
            if val == "t" and not K.is_rational:
                return K.t
            if variable is None:
                raise DomainError(f"unexpected symbol {val!r} in {text!r}")
            return variable(val)
        if (kind, val) == ("op", "("):
            inner = expr()
            if take() != ("op", ")"):
                raise DomainError(f"unbalanced parentheses in {text!r}")
            return inner
        raise DomainError(f"unexpected end of input in {text!r}")

    if not toks:
        raise DomainError("empty expression")
    result = expr()
    if pos != len(toks):
        raise DomainError(f"trailing input in {text!r}")
    return result


# --------------------------------------------------------------------------
# places


@dataclass(frozen=True)
class Place:
    """A place of K.

    kind is one of "prime" (p in Z), "real" (the archimedean place of Q),
    "poly" (monic irreducible pi in F_q[t]) or "deg" (the degree place).
    """

    kind: str
    p: int | Poly | None = None

    @property
    def is_finite(self):
        return self.kind in ("prime", "poly")

    @property
    def is_archimedean(self):
        return self.kind == "real"

    @property
    def is_dyadic(self):
        return self.kind == "prime" and self.p == 2

    @property
    def degree(self):
        if self.kind == "poly":
            return self.p.degree
        return 1

    def residue_size(self, K=None):
        if self.kind == "prime":
            return self.p
        if self.kind == "poly":
            return self.p.q ** self.p.degree
        if self.kind == "deg":
            if K is None:
                raise DomainError("residue size of the degree place needs the field")
            return K.q
        raise DomainError("the real place has no residue field")

    def sort_key(self):
        order = {"prime": 0, "poly": 0, "real": 1, "deg": 1}[self.kind]
        if self.kind == "prime":
            return (order, (self.p,))
        if self.kind == "poly":
            return (order, self.p.sort_key())
        return (order, ())

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def __str__(self):
        return "inf" if self.p is None else str(self.p)


REAL = Place("real")
DEGREE = Place("deg")


def prime_place(p):
    if not isprime(p):
        raise DomainError(f"{p} is not prime")
    return Place("prime", p)


def poly_place(f):
    if not f.is_monic() or not is_irreducible(f):
        raise DomainError(f"{f} is not monic irreducible")
    return Place("poly", f)


def parse_place(text, K):
    text = text.strip()
    if text in ("inf", "oo", "infinity", "∞"):
        return K.infinite_place
    if K.is_rational:
        return prime_place(int(text))
    x = K.parse_elem(text)
    if not x.is_poly():
        raise DomainError(f"place {text!r} is not a polynomial")
    return poly_place(x.num)


# --------------------------------------------------------------------------
# factorization and valuations


@dataclass(frozen=True)
class Factorization:
    unit: int  # sign for Q, element of F_q^x for F_q(t)
    factors: tuple  # ((Place, exponent), ...) sorted by place

    def exponent(self, v):
        for w, e in self.factors:
            if w == v:
                return e
        return 0

    @property
    def places(self):
        return [w for w, _ in self.factors]


def factor(x):
    """Unique factorization of a nonzero element into finite places."""
    x = as_elem(x)
    if not x:
        raise DomainError("cannot factor zero")
    exps = {}
    if isinstance(x, Fraction):
        for p, e in factorint(abs(x.numerator)).items():
            exps[Place("prime", int(p))] = int(e)
        for p, e in factorint(x.denominator).items():
            exps[Place("prime", int(p))] = exps.get(Place("prime", int(p)), 0) - int(e)
        unit = 1 if x > 0 else -1
    else:
        unit, nf = factor_poly(x.num)
        for f, e in nf:
            exps[Place("poly", f)] = e
        if x.den.degree > 0:
            for f, e in factor_poly(x.den)[1]:
                exps[Place("poly", f)] = exps.get(Place("poly", f), 0) - e
    items = sorted(((v, e) for v, e in exps.items() if e), key=lambda ve: ve[0].sort_key())
    return Factorization(unit, tuple(items))


def support(x):
    """Finite places where x has nonzero valuation."""
    return factor(x).places


def _int_val(n, p):
    if n == 0:
        return math.inf
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def _poly_val(f, pi):
    if not f:
        return math.inf
    k = 0
    while True:
        quo, rem = divmod(f, pi)
        if rem:
            return k
        f = quo
        k += 1


def valuation(x, v):
    """Normalized valuation v(x); +inf for x = 0."""
    x = as_elem(x)
    if v.kind == "real":
        raise DomainError("the real place has no valuation")
    if not x:
        return math.inf
    if v.kind == "prime":
        if not isinstance(x, Fraction):
            raise DomainError(f"place {v} is not a place of {field_of(x)}")
        return _int_val(x.numerator, v.p) - _int_val(x.denominator, v.p)
    if not isinstance(x, RatFunc):
        raise DomainError(f"place {v} is not a place of Q")
    if v.kind == "poly":
        return _poly_val(x.num, v.p) - _poly_val(x.den, v.p)
    return x.den.degree - x.num.degree


def unit_residue(x, v, modulus=None):
    """Residue of the unit part x * uniformizer^(-v(x)).

    Returns an int mod p (prime places; mod ``modulus`` if given, which must
    be a power of p), a Poly reduced mod pi (poly places) or an int mod q
    (degree place, the ratio of leading coefficients).
    """
    x = as_elem(x)
    if not x:
        raise DomainError("zero has no unit part")
    if v.kind == "prime":
        p = v.p
        n, d = x.numerator, x.denominator
        while n % p == 0:
            n //= p
        while d % p == 0:
            d //= p
        m = modulus or p
        return n * pow(d, -1, m) % m
    if v.kind == "poly":
        n, d = x.num, x.den
        pi = v.p
        while not n % pi:
            n //= pi
        while not d % pi:
            d //= pi
        return n * poly_inverse_mod(d, pi) % pi
    if v.kind == "deg":
        q = x.q
        return x.num.lc * pow(x.den.lc, -1, q) % q
    raise DomainError("the real place has no residue field")


def jacobi(a, n):
    """Jacobi symbol (a/n) for odd positive n."""
    if n <= 0 or n % 2 == 0:
        raise DomainError(f"Jacobi symbol needs odd positive modulus, got {n}")
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def residue_character(r, v, K=None):
    """Quadratic character of a nonzero residue r at a non-dyadic place."""
    if v.kind == "prime":
        return jacobi(r, v.p)
    if v.kind == "poly":
        pi = v.p
        e = (pi.q ** pi.degree - 1) // 2
        val = r.powmod(e, pi)
        if val == Poly.const(1, pi.q):
            return 1
        if val == Poly.const(-1, pi.q):
            return -1
        raise DomainError(f"{r} is not a unit mod {pi}")
    if v.kind == "deg":
        return jacobi(r, K.q)
    raise DomainError("no residue character at the real place")


def residue_symbol(u, v):
    """+1 iff the unit u is a square in the residue field at v (Euler criterion)."""
    u = as_elem(u)
    if v.kind == "real":
        raise DomainError("no residue symbol at the real place")
    if v.is_dyadic:
        raise DomainError("residue symbol at 2 is not defined")
    if valuation(u, v) != 0:
        raise DomainError(f"{u} is not a unit at {v}")
    return residue_character(unit_residue(u, v), v, field_of(u))


def is_square(x, v=None):
    """Global (v is None) or local square test for nonzero x."""
    x = as_elem(x)
    if not x:
        raise DomainError("square test of zero")
    if v is None:
        if isinstance(x, Fraction):
            return x > 0 and _is_int_square(x.numerator) and _is_int_square(x.denominator)
        fac = factor(x)
        return all(e % 2 == 0 for _, e in fac.factors) and jacobi(fac.unit, x.q) == 1
    if v.kind == "real":
        return x > 0
    if valuation(x, v) % 2:
        return False
    if v.is_dyadic:
        return unit_residue(x, v, modulus=8) == 1
    return residue_character(unit_residue(x, v), v, field_of(x)) == 1


def _is_int_square(n):
    return n >= 0 and math.isqrt(n) ** 2 == n


def least_nonresidue(v, K):
    """Least unit (in sort order) that is a non-square in the residue field at v."""
    if v.kind == "prime":
        return next(u for u in range(2, v.p) if jacobi(u, v.p) == -1)
    if v.kind == "deg":
        return next(u for u in range(2, K.q) if jacobi(u, K.q) == -1)
    pi = v.p
    for r in polys_upto(pi.q, pi.degree - 1):
        if r and residue_character(r, v) == -1:
            return r
    raise AssertionError("unreachable: residue field has non-squares")


def square_class_reps(v, K):
    """Representatives of K_v^x / K_v^x2."""
    if v.kind == "real":
        return [K(1), K(-1)]
    if v.is_dyadic:
        return [K(s * u) for u in (1, 2, 5, 10) for s in (1, -1)]
    u = K(least_nonresidue(v, K))
    if v.kind == "prime":
        pi = K(v.p)
    elif v.kind == "poly":
        pi = K(v.p)
    else:
        pi = 1 / K.t
    return [K(1), u, pi, u * pi]


def same_square_class(x, y, v=None):
    return is_square(as_elem(x) * as_elem(y), v)


def squarefree_part(x):
    """Canonical representative of the global square class of x."""
    x = as_elem(x)
    fac = factor(x)
    if isinstance(x, Fraction):
        out = Fraction(fac.unit)
        for w, e in fac.factors:
            if e % 2:
                out *= w.p
        return out
    K = field_of(x)
    q = K.q
    out = K(1) if jacobi(fac.unit, q) == 1 else K(least_nonresidue(DEGREE, K))
    for w, e in fac.factors:
        if e % 2:
            out = out * K(w.p)
    return out
