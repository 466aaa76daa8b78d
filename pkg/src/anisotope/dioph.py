"""Existential formulas over K: syntax, emitters, evaluation and flattening.

A formula is built from polynomial equations, conjunction, disjunction,
existential quantifiers and named predicate leaves.  Predicate leaves stand
for sets whose polynomial definitions are not expanded here (non-squares,
non-norms, the class-field sets); an evaluator supplies their meaning.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from sympy.solvers.diophantine.diophantine import sum_of_four_squares

from .cft import (
    IDENTITY,
    NONTRIVIAL,
    SearchExhausted,
    artin_map,
    coset_membership,
    eval_opposition,
    fmt_gal,
    parse_gal,
    phi_membership,
    psi_membership,
    r_delta,
)
from .field import DomainError, as_elem, field_of, is_square, parse_expr, parse_place, support
from .hilbert import hilbert_symbol, is_norm

PRED_NAMES = frozenset(
    {"nonsquare", "nonnorm", "coset_unit", "coset_one_plus_j", "phi", "psi", "hilbert", "local_square"}
)


class UnboundVariable(DomainError):
    pass


# -- polynomials in named variables -----------------------------------------------


class MPoly:
    """Polynomial over K in named variables; terms map monomials to coefficients.

    A monomial is a sorted tuple of (name, exponent) pairs.
    """

    __slots__ = ("K", "terms")

    def __init__(self, K, terms=None):
        self.K = K
        self.terms = {m: c for m, c in (terms or {}).items() if c}

    @classmethod
    def const(cls, K, c):
        return cls(K, {(): K(c)})

    @classmethod
    def var(cls, K, name):
        if not K.is_rational and name == "t":
            raise DomainError("'t' is reserved for the field generator")
        return cls(K, {((name, 1),): K(1)})

    @classmethod
    def parse(cls, text, K):
        out = parse_expr(text, K, variable=lambda name: cls.var(K, name))
        return out if isinstance(out, MPoly) else cls.const(K, out)

    def _coerce(self, other):
        if isinstance(other, MPoly):
            return other
        try:
            return MPoly.const(self.K, other)
        except TypeError:
            return NotImplemented

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def __neg__(self):
        return MPoly(self.K, {m: -c for m, c in self.terms.items()})

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out[m] + c if m in out else c
        return MPoly(self.K, out)

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
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                out[m] = out[m] + c1 * c2 if m in out else c1 * c2
        return MPoly(self.K, out)

    __rmul__ = __mul__

    def constant_value(self):
        if any(m for m in self.terms):
            return None
        return self.terms.get((), self.K(0))

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        c = other.constant_value()
        if c is None or not c:
            raise DomainError("division by a non-constant or zero polynomial")
        return MPoly(self.K, {m: x / c for m, x in self.terms.items()})

    def __rtruediv__(self, other):
        c = self.constant_value()
        if c is None or not c:
            raise DomainError("division by a non-constant or zero polynomial")
        return MPoly.const(self.K, as_elem(other) / c)

    def __pow__(self, n):
        if n < 0:
            c = self.constant_value()
            if c is None:
                raise DomainError("negative power of a non-constant polynomial")
            return MPoly.const(self.K, c ** n)
        out = MPoly.const(self.K, 1)
        for _ in range(n):
            out = out * self
        return out

    @property
    def variables(self):
        return sorted({name for m in self.terms for name, _ in m})

    def evaluate(self, assignment):
        K = self.K
        total = K(0)
        for m, c in self.terms.items():
            term = c
            for name, e in m:
                if name not in assignment:
                    raise UnboundVariable(f"variable {name!r} has no value")
                term = term * K(assignment[name]) ** e
            total = total + term
        return total

    def rename(self, mapping):
        out = {}
        for m, c in self.terms.items():
            m2 = _mono_mul((), tuple((mapping.get(n, n), e) for n, e in m))
            out[m2] = out[m2] + c if m2 in out else c
        return MPoly(self.K, out)

    def __str__(self):
        if not self.terms:
            return "0"
        items = sorted(self.terms.items(), key=lambda mc: (-sum(e for _, e in mc[0]), mc[0]))
        out = ""
        for m, c in items:
            sign, body = _term_text(self.K, m, c)
            if not out:
                out = ("-" if sign < 0 else "") + body
            else:
                out += (" - " if sign < 0 else " + ") + body
        return out

    def __repr__(self):
        return f"MPoly({self})"


def _mono_mul(m1, m2):
    exps = dict(m1)
    for name, e in m2:
        exps[name] = exps.get(name, 0) + e
    return tuple(sorted((n, e) for n, e in exps.items() if e))


def _mono_text(m):
    return "*".join(n if e == 1 else f"{n}^{e}" for n, e in m)


def _term_text(K, m, c):
    sign = 1
    if K.is_rational and c < 0:
        sign, c = -1, -c
    cs = str(c)
    if not m:
        return sign, cs if re.fullmatch(r"[0-9t]+", cs) else f"({cs})"
    mono = _mono_text(m)
    if c == 1:
        return sign, mono
    if not re.fullmatch(r"[0-9]+", cs):
        cs = f"({cs})"
    return sign, f"{cs}*{mono}"


def as_mpoly(x, K):
    if isinstance(x, MPoly):
        return x
    if isinstance(x, str):
        return MPoly.parse(x, K)
    return MPoly.const(K, x)


# -- formula nodes -------------------------------------------------------------------


@dataclass(frozen=True)
class PolyEq:
    poly: MPoly


@dataclass(frozen=True)
class And:
    items: tuple


@dataclass(frozen=True)
class Or:
    items: tuple


@dataclass(frozen=True)
class Exists:
    vars: tuple
    body: object


@dataclass(frozen=True)
class Pred:
    name: str
    args: tuple
    params: tuple = ()


TRUE = And(())
FALSE = Or(())


def conj(*items):
    return And(tuple(items))


def disj(*items):
    return Or(tuple(items))


def walk(F):
    yield F
    if isinstance(F, (And, Or)):
        for G in F.items:
            yield from walk(G)
    elif isinstance(F, Exists):
        yield from walk(F.body)


def is_existential_positive(F):
    """Only equations, and, or, exists and known predicates occur."""
    for node in walk(F):
        if isinstance(node, Pred):
            if node.name not in PRED_NAMES:
                return False
        elif not isinstance(node, (PolyEq, And, Or, Exists)):
            return False
    return True


def free_variables(F, bound=frozenset()):
    if isinstance(F, PolyEq):
        return set(F.poly.variables) - bound
    if isinstance(F, Pred):
        return {v for a in F.args for v in a.variables} - bound
    if isinstance(F, Exists):
        return free_variables(F.body, bound | set(F.vars))
    out = set()
    for G in F.items:
        out |= free_variables(G, bound)
    return out


def bound_variables(F):
    return [v for node in walk(F) if isinstance(node, Exists) for v in node.vars]


# -- evaluation --------------------------------------------------------------------


class SemanticEvaluator:
    """Predicate semantics from the hilbert and cft layers."""

    def __init__(self, K, consts=None):
        self.K = K
        self.consts = consts

    def _need_consts(self, name):
        if self.consts is None:
            raise DomainError(f"predicate {name} needs class field constants")
        return self.consts

    def __call__(self, name, args, params):
        K = self.K
        if name == "nonsquare":
            (x,) = args
            return bool(x) and not is_square(x)
        if name == "nonnorm":
            x, y = args
            return bool(x) and bool(y) and not is_norm(x, y, K)
        if name == "hilbert":
            x, y = args
            place, sign = params
            return bool(x) and bool(y) and hilbert_symbol(x, y, parse_place(place, K)) == int(sign)
        if name == "local_square":
            (x,) = args
            return bool(x) and is_square(x, parse_place(params[0], K))
        if name == "phi":
            (p,) = args
            return phi_membership(p, parse_gal(params[0]), self._need_consts(name))
        if name == "psi":
            p, q = args
            return psi_membership(p, q, self._need_consts(name))
        if name in ("coset_unit", "coset_one_plus_j"):
            consts = self._need_consts(name)
            x, c, p, *rest = args
            q = rest[0] if rest else None
            if not x or not c or not p or (rest and not q):
                return False
            R = r_delta(parse_gal(params[0]), p, consts, q)
            return coset_membership(x, c, R, "units" if name == "coset_unit" else "one_plus_j")
        raise DomainError(f"unknown predicate {name!r}")


def eval_formula(F, w, evaluator):
    """Evaluate F with every variable (free or bound) read from w."""
    if isinstance(F, PolyEq):
        return not F.poly.evaluate(w)
    if isinstance(F, And):
        return all(eval_formula(G, w, evaluator) for G in F.items)
    if isinstance(F, Or):
        return any(eval_formula(G, w, evaluator) for G in F.items)
    if isinstance(F, Exists):
        for v in F.vars:
            if v not in w:
                raise UnboundVariable(f"witness does not bind {v!r}")
        return eval_formula(F.body, w, evaluator)
    if isinstance(F, Pred):
        if F.name not in PRED_NAMES:
            raise DomainError(f"unknown predicate {F.name!r}")
        return evaluator(F.name, tuple(a.evaluate(w) for a in F.args), F.params)
    raise DomainError(f"not a formula node: {F!r}")


# -- emitters --------------------------------------------------------------------


def _pred(K, name, *args, params=()):
    return Pred(name, tuple(as_mpoly(a, K) for a in args), tuple(str(p) for p in params))


def emit_isotropy_system(coeffs, K=None):
    """exists x, y: sum a_i x_i^2 = 0 and some x_i y = 1."""
    K = K or field_of(as_elem(coeffs[0]))
    xs = [MPoly.var(K, f"x{i + 1}") for i in range(len(coeffs))]
    y = MPoly.var(K, "y")
    f = sum((K(a) * x * x for a, x in zip(coeffs, xs)), MPoly.const(K, 0))
    nontrivial = Or(tuple(PolyEq(x * y - 1) for x in xs))
    names = tuple(f"x{i + 1}" for i in range(len(coeffs))) + ("y",)
    return Exists(names, And((PolyEq(f), nontrivial)))


def isotropy_witness(vec):
    K = field_of(as_elem(vec[0]))
    w = {f"x{i + 1}": K(x) for i, x in enumerate(vec)}
    w["y"] = 1 / next(K(x) for x in vec if x)
    return w


def _nrd(K, a, b, names):
    x0, x1, x2, x3 = (MPoly.var(K, n) for n in names)
    return x0 * x0 - a * x1 * x1 - b * x2 * x2 + a * b * x3 * x3


def emit_t_membership(a, b, K):
    """exists y, z in H_{a,b}: Nrd(y) = Nrd(z) = 1, Trd(y) + Trd(z) = x (x free)."""
    a, b = K(a), K(b)
    ys = tuple(f"y{i}" for i in range(4))
    zs = tuple(f"z{i}" for i in range(4))
    x = MPoly.var(K, "x")
    body = And(
        (
            PolyEq(_nrd(K, a, b, ys) - 1),
            PolyEq(_nrd(K, a, b, zs) - 1),
            PolyEq(2 * MPoly.var(K, "y0") + 2 * MPoly.var(K, "z0") - x),
        )
    )
    return Exists(ys + zs, body)


def t_witness(x, y, z):
    w = {"x": x}
    w.update({f"y{i}": c for i, c in enumerate(y.coords)})
    w.update({f"z{i}": c for i, c in enumerate(z.coords)})
    return w


@dataclass(frozen=True)
class DaggerSpec:
    """Where a dagger sentence lives: sigma, the element p (and q), the cofactor s."""

    sigma: tuple
    p: object
    q: object = None
    s: object = None


def dagger_spec(sigma, p, consts, q=None):
    K = consts.K
    p = as_mpoly(p, K)
    q = None if q is None else as_mpoly(q, K)
    if sigma == IDENTITY:
        if q is None:
            raise DomainError("sigma = (1,1) needs q")
        s = q
    else:
        s = as_mpoly(consts.a if sigma[0] == -1 else consts.b, K)
    return DaggerSpec(sigma, p, q, s)


def _coset(K, kind, x, c, spec):
    ring = (spec.p,) if spec.q is None else (spec.p, spec.q)
    name = "coset_unit" if kind == "units" else "coset_one_plus_j"
    return _pred(K, name, x, c, *ring, params=(fmt_gal(spec.sigma),))


def emit_dagger(spec, x, y, sign, K):
    """The dagger sentence for (x, y) with the given sign as a formula."""
    x, y = as_mpoly(x, K), as_mpoly(y, K)
    mxy = -(x * y)
    if sign < 0:
        return Or(
            tuple(
                And((_coset(K, "units", u, spec.p, spec), Or((_coset(K, "one_plus_j", w, spec.s, spec), _coset(K, "one_plus_j", mxy, spec.s, spec)))))
                for u, w in ((x, y), (y, x))
            )
        )
    one = MPoly.const(K, 1)
    return Or(
        (
            And((_coset(K, "units", x, one, spec), _coset(K, "units", y, one, spec))),
            _coset(K, "one_plus_j", x, one, spec),
            _coset(K, "one_plus_j", y, one, spec),
            _coset(K, "one_plus_j", mxy, one, spec),
        )
    )


def _opposition(spec, a, K):
    a1, a2, a3, a4 = a
    return Or(
        (
            And((emit_dagger(spec, a1, a2, 1, K), emit_dagger(spec, -a3, -a4, -1, K))),
            And((emit_dagger(spec, a1, a2, -1, K), emit_dagger(spec, -a3, -a4, 1, K))),
        )
    )


def _sigma_var(i):
    return f"p{i + 1}"


def emit_anisotropy_formula(coeffs, consts=None, K=None):
    """A formula true exactly when sum a_i x_i^2 is anisotropic over K.

    m = 1: true.  m = 2: -a1 a2 is not a square.  m = 3: -a1 a2 is not a
    square and -a1 a3 is not a norm from K(sqrt(-a1 a2)).  m = 4: at some
    place the discriminant is a local square and (a1, a2) = -(-a3, -a4);
    places of the modulus are tested directly, the others through the
    dagger sentences with existentially chosen p (or p, q).  m >= 5: over Q
    all a1 a_i are sums of four squares (definiteness); over F_q(t) false.
    """
    K = K or (consts.K if consts else field_of(as_elem(coeffs[0])))
    a = [K(c) for c in coeffs]
    if any(not c for c in a):
        raise DomainError("coefficients must be nonzero")
    m = len(a)
    if m == 1:
        return TRUE
    if m == 2:
        return _pred(K, "nonsquare", -a[0] * a[1])
    if m == 3:
        y = -a[0] * a[1]
        return And((_pred(K, "nonsquare", y), _pred(K, "nonnorm", -a[0] * a[2], y)))
    if m >= 5:
        if not K.is_rational:
            return FALSE
        parts = []
        for i in range(1, m):
            ws = tuple(f"w{i + 1}_{k}" for k in range(4))
            total = sum((MPoly.var(K, n) ** 2 for n in ws), MPoly.const(K, 0))
            parts.append(Exists(ws, PolyEq(total - a[0] * a[i])))
        return And(tuple(parts))
    if consts is None:
        raise DomainError("the quaternary case needs class field constants")
    disc = a[0] * a[1] * a[2] * a[3]
    a1, a2, a3, a4 = (MPoly.const(K, c) for c in a)
    local = []
    for v in consts.modulus.places:
        pv = str(v)
        opp = Or(
            (
                And((_pred(K, "hilbert", a1, a2, params=(pv, 1)), _pred(K, "hilbert", -a3, -a4, params=(pv, -1)))),
                And((_pred(K, "hilbert", a1, a2, params=(pv, -1)), _pred(K, "hilbert", -a3, -a4, params=(pv, 1)))),
            )
        )
        local.append(And((_pred(K, "local_square", disc, params=(pv,)), opp)))
    branches = [Or(tuple(local))]
    for i, sigma in enumerate(NONTRIVIAL):
        p = MPoly.var(K, _sigma_var(i))
        spec = dagger_spec(sigma, p, consts)
        body = And(
            (
                _pred(K, "phi", p, params=(fmt_gal(sigma),)),
                _coset(K, "one_plus_j", disc, 1, spec),
                _opposition(spec, (a1, a2, a3, a4), K),
            )
        )
        branches.append(Exists((_sigma_var(i),), body))
    p, q = MPoly.var(K, "p4"), MPoly.var(K, "q4")
    spec = dagger_spec(IDENTITY, p, consts, q)
    body = And(
        (
            _pred(K, "psi", p, q),
            _coset(K, "units", q, 1, spec),
            _coset(K, "one_plus_j", disc, 1, spec),
            _opposition(spec, (a1, a2, a3, a4), K),
        )
    )
    branches.append(Exists(("p4", "q4"), body))
    return Or(tuple(branches))


def anisotropy_witness(coeffs, consts=None, K=None, search_bound=None):
    """A witness for emit_anisotropy_formula, or None if none was found.

    Bound variables of branches that are not used get the value 1.
    """
    K = K or (consts.K if consts else field_of(as_elem(coeffs[0])))
    a = [K(c) for c in coeffs]
    m = len(a)
    if m <= 3:
        return {}
    if m >= 5:
        if not K.is_rational:
            return None
        w = {}
        for i in range(1, m):
            r = a[0] * a[i]
            if r <= 0:
                return None
            n, d = r.numerator * r.denominator, r.denominator
            for k, s in enumerate(sum_of_four_squares(n)):
                w[f"w{i + 1}_{k}"] = Fraction(int(s), d)
        return w
    w = {_sigma_var(i): K(1) for i in range(3)}
    w.update(p4=K(1), q4=K(1))
    if search_bound is None:
        search_bound = max([2] + [_norm(v, K) for c in a for v in support(c)])
    try:
        res = eval_opposition(*a, consts, search_bound, with_discriminant=True)
    except SearchExhausted:
        return None
    if not res.value:
        return None
    if res.bullet == 2:
        w[_sigma_var(NONTRIVIAL.index(artin_map(res.place, consts)))] = res.p
    elif res.bullet == 3:
        w.update(p4=res.p, q4=res.q)
    return w


def _norm(v, K):
    return v.p if K.is_rational else K.q ** v.p.degree


# -- flattening ----------------------------------------------------------------------


def flatten(F, K):
    """Rewrite a predicate-free formula as one equation under one quantifier.

    And(f = 0, g = 0) becomes f^2 - d g^2 = 0 with d = K.nonsquare_constant(),
    Or(f = 0, g = 0) becomes f g = 0, and quantifiers are hoisted (bound
    names that clash are renamed with a numeric suffix).
    """
    used = set(free_variables(F))
    d = K.nonsquare_constant()
    names, poly = _flat(F, K, d, used)
    eq = PolyEq(poly)
    return Exists(tuple(names), eq) if names else eq


def _flat(F, K, d, used):
    if isinstance(F, PolyEq):
        return [], F.poly
    if isinstance(F, Pred):
        raise DomainError(f"predicate {F.name} cannot be flattened to a polynomial")
    if isinstance(F, Exists):
        mapping = {}
        for v in F.vars:
            new = v
            k = 1
            while new in used:
                new = f"{v}_{k}"
                k += 1
            used.add(new)
            if new != v:
                mapping[v] = new
        body = _rename(F.body, mapping) if mapping else F.body
        names, poly = _flat(body, K, d, used)
        return [mapping.get(v, v) for v in F.vars] + names, poly
    names = []
    if isinstance(F, And):
        acc = MPoly.const(K, 0)
        for G in F.items:
            ns, g = _flat(G, K, d, used)
            names += ns
            acc = acc * acc - d * g * g if acc else g
        return names, acc
    if isinstance(F, Or):
        acc = MPoly.const(K, 1)
        for G in F.items:
            ns, g = _flat(G, K, d, used)
            names += ns
            acc = acc * g
        return names, acc
    raise DomainError(f"not a formula node: {F!r}")


def _rename(F, mapping):
    if isinstance(F, PolyEq):
        return PolyEq(F.poly.rename(mapping))
    if isinstance(F, Pred):
        return Pred(F.name, tuple(a.rename(mapping) for a in F.args), F.params)
    if isinstance(F, Exists):
        inner = {k: v for k, v in mapping.items() if k not in F.vars}
        return Exists(F.vars, _rename(F.body, inner))
    return type(F)(tuple(_rename(G, mapping) for G in F.items))


# -- s-expressions ----------------------------------------------------------------------


def _quote(s):
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_sexpr(F):
    if isinstance(F, PolyEq):
        return f"(poly {_quote(str(F.poly))})"
    if isinstance(F, And):
        return "(and" + "".join(" " + to_sexpr(G) for G in F.items) + ")"
    if isinstance(F, Or):
        return "(or" + "".join(" " + to_sexpr(G) for G in F.items) + ")"
    if isinstance(F, Exists):
        return f"(exists ({' '.join(F.vars)}) {to_sexpr(F.body)})"
    if isinstance(F, Pred):
        out = f"(pred {F.name}" + "".join(" " + _quote(str(a)) for a in F.args)
        if F.params:
            out += " (params" + "".join(" " + _quote(p) for p in F.params) + ")"
        return out + ")"
    raise DomainError(f"not a formula node: {F!r}")


_SEXPR_TOKEN = re.compile(r'\s*(?:(\()|(\))|"((?:[^"\\]|\\.)*)"|([^\s()"]+))')


def _sexpr_tokens(text):
    pos, out = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _SEXPR_TOKEN.match(text, pos)
        if not m:
            raise DomainError(f"bad s-expression at position {pos}")
        lp, rp, s, atom = m.groups()
        if lp:
            out.append(("(", None))
        elif rp:
            out.append((")", None))
        elif s is not None:
            out.append(("str", re.sub(r"\\(.)", r"\1", s)))
        else:
            out.append(("atom", atom))
        pos = m.end()
    return out


def _read(tokens, i):
    kind, val = tokens[i]
    if kind == "(":
        items = []
        i += 1
        while i < len(tokens) and tokens[i][0] != ")":
            item, i = _read(tokens, i)
            items.append(item)
        if i >= len(tokens):
            raise DomainError("unbalanced s-expression")
        return items, i + 1
    if kind == ")":
        raise DomainError("unexpected ')'")
    return (kind, val), i + 1


def _build(node, K):
    if not isinstance(node, list) or not node or node[0][0] != "atom":
        raise DomainError("expected a formula list")
    head = node[0][1]
    rest = node[1:]
    if head == "poly":
        if len(rest) != 1 or rest[0][0] != "str":
            raise DomainError("poly takes one quoted polynomial")
        return PolyEq(MPoly.parse(rest[0][1], K))
    if head in ("and", "or"):
        items = tuple(_build(x, K) for x in rest)
        return And(items) if head == "and" else Or(items)
    if head == "exists":
        if len(rest) != 2 or not isinstance(rest[0], list):
            raise DomainError("exists takes a variable list and a body")
        names = tuple(v[1] for v in rest[0])
        return Exists(names, _build(rest[1], K))
    if head == "pred":
        if not rest or rest[0][0] != "atom":
            raise DomainError("pred needs a name")
        name = rest[0][1]
        args, params = [], ()
        for x in rest[1:]:
            if isinstance(x, list):
                if not x or x[0] != ("atom", "params"):
                    raise DomainError("only (params ...) may follow predicate arguments")
                params = tuple(p[1] for p in x[1:])
            else:
                args.append(MPoly.parse(x[1], K))
        return Pred(name, tuple(args), params)
    raise DomainError(f"unknown formula head {head!r}")


def parse_sexpr(text, K):
    tokens = _sexpr_tokens(text)
    if not tokens:
        raise DomainError("empty s-expression")
    node, i = _read(tokens, 0)
    if i != len(tokens):
        raise DomainError("trailing input after s-expression")
    return _build(node, K)
