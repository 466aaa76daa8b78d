"""The biquadratic extension L = K(sqrt a, sqrt b): Frobenius classes,
the sets P(p), Phi_sigma and Psi, the semilocal rings R and the opposition
criterion for quaternary forms.

Galois elements are pairs (i, j) of signs: sigma acts on sqrt a by i and on
sqrt b by j.  Semilocal rings are recorded by their defining set of places
only; membership questions reduce to valuations and residues there.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from sympy import isprime

from .field import (
    DomainError,
    GlobalField,
    Place,
    factor,
    field_of,
    is_square,
    least_nonresidue,
    residue_character,
    residue_symbol,
    squarefree_part,
    unit_residue,
    valuation,
)
from .hilbert import critical_places, delta_set, hilbert_symbol
from .poly import monic_irreducibles

IDENTITY = (1, 1)
GALOIS = ((1, 1), (-1, -1), (-1, 1), (1, -1))
NONTRIVIAL = ((-1, -1), (-1, 1), (1, -1))


class SearchExhausted(RuntimeError):
    """A bounded search ended without a hit."""


class Undetermined(SearchExhausted):
    """The answer depends on places beyond the scanned bound."""


def gal_mul(s, t):
    return (s[0] * t[0], s[1] * t[1])


def fmt_gal(s):
    return f"({s[0]},{s[1]})"


def parse_gal(text):
    parts = text.strip().strip("()[]").split(",")
    s = tuple(int(x) for x in parts)
    if s not in GALOIS:
        raise DomainError(f"bad Galois element {text!r}")
    return s


# -- modulus and constants -------------------------------------------------


@dataclass(frozen=True)
class Modulus:
    finite: tuple  # ((Place, exponent), ...)
    infinite: tuple  # (Place, ...)

    @property
    def places(self):
        return tuple(v for v, _ in self.finite) + self.infinite

    def __contains__(self, v):
        return v in self.places

    def coprime(self, x):
        return not any(v in self for v in factor(x).places)

    def finite_part(self, K):
        out = K(1)
        for v, e in self.finite:
            out = out * K.generator(v) ** e
        return out

    def __str__(self):
        parts = []
        for v, e in self.finite:
            if v.kind == "prime":
                parts.append(str(v.p ** e))
            else:
                parts.append(str(v) if e == 1 else f"({v})^{e}")
        parts.extend("inf" for _ in self.infinite)
        return "*".join(parts)


def _nondegenerate(a, b):
    if not a or not b or is_square(a) or is_square(b) or is_square(a * b):
        raise DomainError(f"K(sqrt {a}, sqrt {b}) is not biquadratic")


def admissible_modulus(a, b, K):
    """A multiple of the conductor of K(sqrt a, sqrt b)/K.

    Over Q: 2^3, every odd prime dividing a or b, and the real place.  Over
    F_q(t): every irreducible dividing a or b, and the degree place.
    """
    a, b = K(a), K(b)
    _nondegenerate(a, b)
    places = set(factor(a).places) | set(factor(b).places)
    if K.is_rational:
        two = Place("prime", 2)
        places.discard(two)
        finite = ((two, 3),) + tuple((v, 1) for v in sorted(places, key=Place.sort_key))
    else:
        finite = tuple((v, 1) for v in sorted(places, key=Place.sort_key))
    return Modulus(finite, (K.infinite_place,))


@dataclass(frozen=True)
class CftConstants:
    K: GlobalField
    a: object
    b: object
    c: object
    d: object
    modulus: Modulus

    @classmethod
    def build(cls, K, a, b, c=1, d=1):
        a, b = K(a), K(b)
        if K.is_rational and (a < 0 or b < 0):
            raise DomainError("over Q the constants a, b must be positive")
        return cls(K, a, b, K(c), K(d), admissible_modulus(a, b, K))

    def to_dict(self):
        return {"field": self.K.tag, "a": str(self.a), "b": str(self.b), "c": str(self.c), "d": str(self.d), "modulus": str(self.modulus)}


@lru_cache(maxsize=None)
def _frobenius(a, b, v):
    return (residue_symbol(a, v), residue_symbol(b, v))


def artin_map(x, consts):
    """Frobenius class of a finite place, extended multiplicatively to elements."""
    if isinstance(x, Place):
        if not x.is_finite or x in consts.modulus:
            raise DomainError(f"place {x} is not coprime to the modulus")
        return _frobenius(consts.a, consts.b, x)
    x = consts.K(x)
    if not x:
        raise DomainError("Artin map of zero")
    sigma = IDENTITY
    for v, e in factor(x).factors:
        if v in consts.modulus:
            raise DomainError(f"{x} is not coprime to the modulus (divisible by {v})")
        if e % 2:
            sigma = gal_mul(sigma, _frobenius(consts.a, consts.b, v))
    return sigma


# -- P(p), Phi, Psi --------------------------------------------------------------


@dataclass(frozen=True)
class Partition:
    places: tuple
    fibers: dict
    ramified: tuple


def p_partition(p, consts):
    """P(p): places of odd valuation in p, split by Frobenius class."""
    p = consts.K(p)
    odd = tuple(v for v, e in factor(p).factors if e % 2)
    fibers = {s: [] for s in GALOIS}
    ramified = []
    for v in odd:
        if v in consts.modulus:
            ramified.append(v)
        else:
            fibers[artin_map(v, consts)].append(v)
    return Partition(odd, {s: tuple(vs) for s, vs in fibers.items()}, tuple(ramified))


def phi_membership(p, sigma, consts, tilde=False):
    """p in Phi_sigma, or in K^2 Phi_sigma when tilde is set.

    Squares cannot clear odd valuations, so the squarefree representative
    decides membership in K^2 Phi_sigma.
    """
    p = consts.K(p)
    if not p:
        return False
    if tilde:
        p = squarefree_part(p)
    if not consts.modulus.coprime(p):
        return False
    if artin_map(p, consts) != sigma:
        return False
    part = p_partition(p, consts)
    return all(artin_map(v, consts) in (IDENTITY, sigma) for v in part.places)


# -- semilocal rings -------------------------------------------------------------


@dataclass(frozen=True)
class SemilocalRing:
    """Intersection of the local rings at the places in `places`.

    `full` keeps the unrestricted intersection of ramification sets; places
    of the modulus are dropped from `places` (see r_delta).
    """

    places: frozenset
    sigma: tuple | None = None
    params: tuple = ()
    full: frozenset = frozenset()

    @property
    def intrusions(self):
        return self.full - self.places

    def sorted_places(self):
        return sorted(self.places, key=Place.sort_key)


def _bullet_pairs(sigma, p, consts, q=None):
    K, a, b = consts.K, consts.a, consts.b
    if sigma == IDENTITY:
        if q is None:
            raise DomainError("sigma = (1,1) needs the pair (p, q)")
        return [(a * p, q), (b * p, q)]
    if sigma == (-1, -1):
        return [(a, p), (b, p)]
    pairs = [(a, p), (a * b, p)] if sigma == (-1, 1) else [(b, p), (a * b, p)]
    if not K.is_rational:
        pairs.append((a, consts.c * p) if sigma == (-1, 1) else (b, consts.d * p))
    return pairs


def r_delta(sigma, p, consts, q=None):
    """The ring R_p^sigma (R_{p,q} for sigma = (1,1)) as its set of places.

    The defining set is the intersection of ramification sets, restricted to
    finite places coprime to the modulus.
    """
    K = consts.K
    p = K(p)
    q = None if q is None else K(q)
    if not p or (q is not None and not q):
        raise DomainError("ring parameters must be nonzero")
    sets = [delta_set(x, y, K).finite for x, y in _bullet_pairs(sigma, p, consts, q)]
    full = frozenset.intersection(*sets)
    places = frozenset(v for v in full if v not in consts.modulus)
    params = (p,) if q is None else (p, q)
    return SemilocalRing(places, sigma, params, full)


def coset_membership(x, c, R, mode="units"):
    """x in c K^2 R^x (mode "units") or x in c K^2 (1 + J(R)) (mode "one_plus_j").

    Weak approximation lets a global square match any even valuations and
    square unit residues on the finitely many places of R.
    """
    if mode not in ("units", "one_plus_j"):
        raise DomainError(f"unknown coset mode {mode!r}")
    if not x or not c:
        raise DomainError("coset membership of zero")
    ratio = x / c
    for v in R.places:
        if valuation(ratio, v) % 2:
            return False
        if mode == "one_plus_j" and not v.is_dyadic:
            if residue_character(unit_residue(ratio, v), v, field_of(ratio)) != 1:
                return False
    return True


def j_membership(x, R):
    """x in the Jacobson radical of R."""
    if not x:
        return True
    return all(valuation(x, v) >= 1 for v in R.places)


def mod_symbol_product(x, y, consts):
    out = 1
    for v in consts.modulus.places:
        out *= hilbert_symbol(x, y, v)
    return out


def psi_membership(p, q, consts):
    K = consts.K
    p, q = K(p), K(q)
    if not p or not q:
        return False
    if not phi_membership(p, IDENTITY, consts, tilde=True):
        return False
    if not phi_membership(q, (-1, -1), consts, tilde=True):
        return False
    if mod_symbol_product(consts.a * p, q, consts) != -1:
        return False
    return coset_membership(p, consts.a, r_delta((-1, -1), q, consts), "one_plus_j")


# -- isolating elements ---------------------------------------------------------


def _unit_twists(K):
    return (K(1), K(-1)) if K.is_rational else (K(1), K(least_nonresidue(K.infinite_place, K)))


@dataclass(frozen=True)
class Isolation:
    sigma: tuple
    place: Place
    p: object
    q: object = None
    ring: SemilocalRing = None


def isolate_prime(sigma, v, consts, search_bound):
    """An element whose ring R has defining set exactly {v}.

    For sigma != (1,1) the generator of v works.  For sigma = (1,1) a
    partner q is scanned over the places of class (-1,-1) of norm at most
    search_bound (and their unit twists, as are those of p), keeping the
    first pair in Psi with R_{p,q} = {v} and q a unit of R_{p,q}.
    """
    K = consts.K
    if not v.is_finite or v in consts.modulus:
        raise DomainError(f"place {v} is not coprime to the modulus")
    if artin_map(v, consts) != sigma:
        raise DomainError(f"place {v} has Frobenius {fmt_gal(artin_map(v, consts))}, not {fmt_gal(sigma)}")
    g = K.generator(v)
    if sigma != IDENTITY:
        R = r_delta(sigma, g, consts)
        return Isolation(sigma, v, g, None, R)
    for w in K.iter_places(search_bound):
        if w in consts.modulus or artin_map(w, consts) != (-1, -1):
            continue
        for up in _unit_twists(K):
            p = up * g
            for uq in _unit_twists(K):
                q = uq * K.generator(w)
                R = r_delta(IDENTITY, p, consts, q)
                if R.places != {v} or not coset_membership(q, K(1), R, "units"):
                    continue
                if psi_membership(p, q, consts):
                    return Isolation(sigma, v, p, q, R)
    raise SearchExhausted(f"no partner q of norm <= {search_bound} isolates {v}")


# -- dagger sentences and the opposition criterion ------------------------------


@dataclass(frozen=True)
class DaggerContext:
    """Ring R with cofactor p (odd part) and cofactor s (non-residue part)."""

    ring: SemilocalRing
    p: object
    s: object


def context_for(iso, consts):
    if iso.sigma == IDENTITY:
        return DaggerContext(iso.ring, iso.p, iso.q)
    s = consts.a if iso.sigma[0] == -1 else consts.b
    return DaggerContext(iso.ring, iso.p, s)


def dagger(x, y, sign, ctx):
    """Evaluate dagger^sign_{x,y} in the context ctx.

    With a one-place ring {v} and s a non-residue at v, dagger^- holds iff
    (x, y)_v = -1 and dagger^+ iff (x, y)_v = +1.
    """
    R = ctx.ring
    one = x / x
    if sign < 0:
        for u, w in ((x, y), (y, x)):
            if coset_membership(u, ctx.p, R, "units") and (
                coset_membership(w, ctx.s, R, "one_plus_j") or coset_membership(-x * y, ctx.s, R, "one_plus_j")
            ):
                return True
        return False
    if coset_membership(x, one, R, "units") and coset_membership(y, one, R, "units"):
        return True
    return any(coset_membership(z, one, R, "one_plus_j") for z in (x, y, -x * y))


def opposition_sentence(a1, a2, a3, a4, ctx):
    return (dagger(a1, a2, 1, ctx) and dagger(-a3, -a4, -1, ctx)) or (
        dagger(a1, a2, -1, ctx) and dagger(-a3, -a4, 1, ctx)
    )


def opposed_at(a1, a2, a3, a4, v):
    return hilbert_symbol(a1, a2, v) == -hilbert_symbol(-a3, -a4, v)


@dataclass(frozen=True)
class OppositionResult:
    value: bool
    bullet: int | None = None
    place: Place | None = None
    p: object = None
    q: object = None


def eval_opposition(a1, a2, a3, a4, consts, search_bound, q_bound=None, with_discriminant=False):
    """Is (a1, a2)_w = -(-a3, -a4)_w at some place w?

    Bullet 1 checks the places of the modulus directly.  Bullets 2 and 3 scan
    the places of norm <= search_bound outside the modulus, isolate each by
    an element p (or a pair (p, q) when its Frobenius is trivial) and
    evaluate the dagger sentences in the one-place ring.  With
    with_discriminant, the place must also make a1 a2 a3 a4 a local square.
    Raises Undetermined if a place beyond the bound could still matter.
    """
    K = consts.K
    a1, a2, a3, a4 = (K(x) for x in (a1, a2, a3, a4))
    if not (a1 and a2 and a3 and a4):
        raise DomainError("coefficients must be nonzero")
    disc = a1 * a2 * a3 * a4
    q_bound = q_bound or _default_q_bound(K)
    for v in consts.modulus.places:
        if opposed_at(a1, a2, a3, a4, v) and (not with_discriminant or is_square(disc, v)):
            return OppositionResult(True, 1, v)
    relevant = {v for x in (a1, a2, a3, a4) for v in factor(x).places if v not in consts.modulus}
    scanned = set()
    missed = []
    for v in K.places_upto(search_bound):
        if v in consts.modulus:
            continue
        scanned.add(v)
        sigma = artin_map(v, consts)
        try:
            iso = isolate_prime(sigma, v, consts, q_bound)
        except SearchExhausted:
            if v in relevant:
                missed.append(v)
            continue
        ctx = context_for(iso, consts)
        if not opposition_sentence(a1, a2, a3, a4, ctx):
            continue
        if with_discriminant and not coset_membership(disc, K(1), ctx.ring, "one_plus_j"):
            continue
        return OppositionResult(True, 2 if sigma != IDENTITY else 3, v, iso.p, iso.q)
    beyond = relevant - scanned
    if beyond or missed:
        bad = sorted(beyond | set(missed), key=Place.sort_key)
        raise Undetermined("undetermined at bound: places " + ", ".join(map(str, bad)) + " not covered")
    return OppositionResult(False)


eval_lemma42 = eval_opposition


def _default_q_bound(K):
    return 10_000 if K.is_rational else K.q ** 6


def opposition_sweep(a1, a2, a3, a4, K, extra=()):
    """Places among the critical ones (plus extra) where the symbols are opposed."""
    a1, a2, a3, a4 = (K(x) for x in (a1, a2, a3, a4))
    places = set(critical_places(K, a1, a2, a3, a4)) | set(extra)
    return sorted((v for v in places if opposed_at(a1, a2, a3, a4, v)), key=Place.sort_key)


# -- constants: search, verification, fixtures --------------------------------------


def _sample_elements(consts, bound):
    """Elements coprime to the modulus: generators, unit twists, adjacent products."""
    K = consts.K
    gens = [K.generator(v) for v in K.places_upto(bound) if v not in consts.modulus]
    out = []
    for u in _unit_twists(K):
        out.extend(u * g for g in gens)
    out.extend(g * h for g, h in zip(gens, gens[1:]))
    return out


def verify_constants(consts, bound, isolation_bound=None):
    """Run the verification suite; returns (counts, failures)."""
    counts = {"bullet(-1,-1)": 0, "bullet(-1,1)": 0, "bullet(1,-1)": 0, "isolation": 0, "intrusions": 0}
    failures = []
    K = consts.K
    try:
        _nondegenerate(consts.a, consts.b)
    except DomainError as exc:
        return counts, [str(exc)]
    for p in _sample_elements(consts, bound):
        part = p_partition(p, consts)
        for sigma in NONTRIVIAL:
            R = r_delta(sigma, p, consts)
            key = f"bullet{fmt_gal(sigma)}"
            if set(part.fibers[sigma]) == set(R.places):
                counts[key] += 1
            else:
                failures.append(f"{key} fails at p={p}")
            if R.intrusions:
                counts["intrusions"] += 1
    for v in K.places_upto(isolation_bound or bound):
        if v in consts.modulus:
            continue
        try:
            iso = isolate_prime(artin_map(v, consts), v, consts, _default_q_bound(K))
        except SearchExhausted as exc:
            failures.append(str(exc))
            continue
        if iso.ring.places == {v}:
            counts["isolation"] += 1
        else:
            failures.append(f"isolation of {v} gives {sorted(map(str, iso.ring.places))}")
    return counts, failures


def _candidates(K):
    if K.is_rational:
        from sympy import primerange

        primes = [int(p) for p in primerange(3, 400) if p % 8 == 1]
        for i, a in enumerate(primes):
            for b in primes[i + 1:]:
                yield K(a), K(b)
        return
    u = K(least_nonresidue(K.infinite_place, K))
    for deg in (1, 2):
        for f in monic_irreducibles(K.q, deg):
            yield u, K(f)


def _pick_cd(K, a, b, bound):
    """Choose c, d among 1, u, b, ub to keep ramification sets off the modulus."""
    u = K(least_nonresidue(K.infinite_place, K))
    opts = [K(1), u, b, u * b]
    base = CftConstants.build(K, a, b)

    def score(sigma, c, d):
        trial = CftConstants(K, a, b, c, d, base.modulus)
        return sum(bool(r_delta(sigma, p, trial).intrusions) for p in _sample_elements(trial, bound))

    c = min(opts, key=lambda c: score((-1, 1), c, K(1)))
    d = min(opts, key=lambda d: score((1, -1), K(1), d))
    return c, d


def find_constants(K, prime_bound=500, isolation_bound=None):
    """First candidate constants passing verify_constants at prime_bound."""
    tried = []
    for a, b in _candidates(K):
        try:
            if K.is_rational:
                consts = CftConstants.build(K, a, b)
            else:
                c, d = _pick_cd(K, a, b, min(prime_bound, K.q ** 3))
                consts = CftConstants.build(K, a, b, c, d)
        except DomainError as exc:
            tried.append(f"({a},{b}): {exc}")
            continue
        counts, failures = verify_constants(consts, prime_bound, isolation_bound)
        if not failures:
            return consts, counts
        tried.append(f"({a},{b}): {failures[0]}")
    raise SearchExhausted("no constants passed verification; tried " + "; ".join(tried[:10]))


def reciprocity_check(consts, bound, kernel_bound=None):
    """Frobenius is constant on ray classes mod the modulus; trivial on 1 mod m.

    Returns (kernel_checks, class_checks, failures).  Over Q the class of a
    prime p is p mod m_0; over F_q(t) the class of a monic irreducible is its
    residue mod m_0 together with the parity of its degree.  Over Q, primes
    1 mod m_0 up to kernel_bound are also tested.
    """
    K = consts.K
    m0 = consts.modulus.finite_part(K)
    seen = {}
    kernel = classes = 0
    failures = []
    for v in K.places_upto(bound):
        if v in consts.modulus:
            continue
        s = artin_map(v, consts)
        if K.is_rational:
            key = (v.p % int(m0),)
            in_kernel = key == (1,)
        else:
            r = v.p % m0.num
            key = (r.c, v.p.degree % 2)
            in_kernel = r == 1 and v.p.degree % 2 == 0
        if in_kernel:
            kernel += 1
            if s != IDENTITY:
                failures.append(f"{v} is 1 mod m but has Frobenius {fmt_gal(s)}")
        if key in seen:
            classes += 1
            if seen[key] != s:
                failures.append(f"{v} disagrees with its ray class")
        else:
            seen[key] = s
    if K.is_rational and kernel_bound:
        # the progression 1 mod m_0 is sparse below bound; walk it directly
        step = int(m0)
        for n in range(1 + step, kernel_bound + 1, step):
            if n > bound and isprime(n):
                kernel += 1
                if artin_map(Place("prime", n), consts) != IDENTITY:
                    failures.append(f"{n} is 1 mod m but has nontrivial Frobenius")
    return kernel, classes, failures


def fixture_name(K):
    return "constants_" + K.tag.replace("(", "").replace(")", "") + ".json"


def constants_to_json(consts, bound, counts):
    data = consts.to_dict()
    data["bound"] = bound
    data["checks"] = counts
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def constants_from_json(text):
    data = json.loads(text)
    K = GlobalField.parse(data["field"])
    consts = CftConstants.build(K, K(data["a"]), K(data["b"]), K(data["c"]), K(data["d"]))
    if str(consts.modulus) != data["modulus"]:
        raise DomainError(f"fixture modulus {data['modulus']} disagrees with {consts.modulus}")
    return consts, data


def load_constants(K, path=None):
    """Shipped (or given) constants for K, with the recorded fixture data."""
    if path is not None:
        with open(path) as fh:
            return constants_from_json(fh.read())
    ref = resources.files("anisotope") / "data" / fixture_name(K)
    if not ref.is_file():
        raise DomainError(f"no shipped constants for {K}")
    return constants_from_json(ref.read_text())
