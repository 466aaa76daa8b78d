"""The acceptance suite: ten end-to-end checks against independent oracles.

Each criterion_N function runs at full size by default and returns a
CriterionResult; `scale` shrinks sample counts for quick smoke runs.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from itertools import product


from . import cft, dioph, qform
from .field import FqT, Q, is_square, squarefree_part
from .hilbert import critical_places, hilbert_symbol
from .oracle import global_witness_search, local_solvable
from .poly import Poly, RatFunc, polys_upto


@dataclass(frozen=True)
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.number}: {self.title} | {self.detail} | {self.seconds:.1f}s"


def _timed(number, title, limit=None):
    def wrap(fn):
        def run(*args, **kwargs):
            t0 = time.perf_counter()
            passed, detail = fn(*args, **kwargs)
            dt = time.perf_counter() - t0
            if limit is not None and dt > limit:
                passed = False
                detail += f"; exceeded {limit}s"
            return CriterionResult(number, title, passed, detail, dt)

        run.number = number
        run.title = title
        return run

    return wrap


def _n(count, scale):
    return max(1, round(count * scale))


SQUAREFREE_30 = [s * n for n in range(1, 31) if squarefree_part(n) == n for s in (1, -1)]
SQUAREFREE_15 = [x for x in SQUAREFREE_30 if abs(x) <= 15]


def _random_poly(rng, q, max_deg, nonzero=True):
    while True:
        d = rng.randint(0, max_deg)
        f = Poly([rng.randrange(q) for _ in range(d + 1)], q)
        if f or not nonzero:
            return RatFunc(f)


# -- 1 ------------------------------------------------------------------------------


@_timed(1, "Hilbert symbol agrees with local solvability", limit=120)
def criterion_1(scale=1.0):
    values = SQUAREFREE_30 if scale >= 1 else SQUAREFREE_30[: _n(len(SQUAREFREE_30), scale)]
    checked = bad = 0
    for a, b in product(values, repeat=2):
        for v in critical_places(Q, a, b):
            checked += 1
            if (hilbert_symbol(a, b, v) == 1) != local_solvable([Q(a), Q(b), Q(-1)], v):
                bad += 1
    return bad == 0, f"{checked} (pair, place) checks, {bad} disagreements"


# -- 2 ------------------------------------------------------------------------------


@_timed(2, "Product formula", limit=60)
def criterion_2(scale=1.0, seed=2):
    rng = random.Random(seed)
    bad = total = 0
    for _ in range(_n(1000, scale)):
        a = rng.choice([-1, 1]) * rng.randint(1, 10_000)
        b = rng.choice([-1, 1]) * rng.randint(1, 10_000)
        total += 1
        prod = 1
        for v in critical_places(Q, a, b):
            prod *= hilbert_symbol(a, b, v)
        bad += prod != 1
    for q in (3, 5, 7):
        K = FqT(q)
        for _ in range(_n(1000, scale)):
            a, b = _random_poly(rng, q, 4), _random_poly(rng, q, 4)
            total += 1
            prod = 1
            for v in critical_places(K, a, b):
                prod *= hilbert_symbol(a, b, v)
            bad += prod != 1
    return bad == 0, f"{total} pairs (Q and F_q(t), q = 3, 5, 7), {bad} failures"


# -- 3 ------------------------------------------------------------------------------


@_timed(3, "Hasse-Minkowski against brute force", limit=600)
def criterion_3(scale=1.0, seed=3):
    rng = random.Random(seed)
    cache = {}
    iso = aniso = bad = 0
    for _ in range(_n(2000, scale)):
        m = rng.choice((2, 3, 4))
        coeffs = tuple(sorted(rng.choice(SQUAREFREE_15) for _ in range(m)))
        if coeffs not in cache:
            d = qform.decide(list(coeffs), Q)
            if d.isotropic:
                ok = d.certificate.witness is not None and qform.check_certificate(list(coeffs), d.certificate, Q).ok
            else:
                ok = global_witness_search([Q(c) for c in coeffs], 200) is None
            cache[coeffs] = (d.isotropic, ok)
        is_iso, ok = cache[coeffs]
        iso += is_iso
        aniso += not is_iso
        bad += not ok
    return bad == 0, f"{iso} isotropic, {aniso} anisotropic ({len(cache)} distinct forms), {bad} contradictions"


# -- 4 ------------------------------------------------------------------------------


@_timed(4, "Five-variable forms over F_3(t) are isotropic")
def criterion_4(scale=1.0, seed=4):
    rng = random.Random(seed)
    K = FqT(3)
    bad = 0
    count = _n(200, scale)
    for _ in range(count):
        coeffs = [_random_poly(rng, 3, 2) for _ in range(5)]
        d = qform.decide(coeffs, K)
        if not d.isotropic or d.certificate.witness is None:
            bad += 1
        elif not qform.check_certificate(coeffs, d.certificate, K).ok:
            bad += 1
    return bad == 0, f"{count} forms, {bad} failures"


# -- 5 ------------------------------------------------------------------------------


def _random_symmetric(rng, K, m):
    def entry():
        if rng.random() < 0.35:
            return K(0)
        if K.is_rational:
            return Q(rng.randint(-9, 9)) / rng.randint(1, 4)
        return _random_poly(rng, K.q, 2, nonzero=False)

    A = [[K(0)] * m for _ in range(m)]
    for i in range(m):
        for j in range(i, m):
            A[i][j] = A[j][i] = entry()
    return qform.QuadForm(K, tuple(tuple(r) for r in A))


def check_diagonalization(f):
    """C^T A C = diag(b, 0...), det C != 0, det A = det B / det(C)^2."""
    d = qform.diagonalize(f)
    K, m = f.K, f.m
    C = d.C
    B = qform.matmul(qform.matmul(tuple(zip(*C)), f.A), C)
    want = [[(d.coeffs[i] if i == j and i < d.rank else K(0)) for j in range(m)] for i in range(m)]
    if any(B[i][j] != want[i][j] for i in range(m) for j in range(m)):
        return False
    if any(not b for b in d.coeffs):
        return False
    detC = qform.determinant(C)
    if not detC:
        return False
    detA = qform.determinant(f.A)
    detB = qform.determinant(B)
    if detB != detA * detC * detC:
        return False
    if d.rank == m and detA and not is_square(detA * detB):
        return False
    return (d.rank == m) == bool(detA)


@_timed(5, "Diagonalization is an exact congruence", limit=30)
def criterion_5(scale=1.0, seed=5):
    rng = random.Random(seed)
    fields = [Q, FqT(3), FqT(5)]
    bad = 0
    count = _n(500, scale)
    for k in range(count):
        K = Q if k % 2 == 0 else fields[1 + (k // 2) % 2]
        f = _random_symmetric(rng, K, rng.randint(1, 6))
        bad += not check_diagonalization(f)
    return bad == 0, f"{count} matrices over Q, F_3(t), F_5(t), {bad} failures"


# -- 6 ------------------------------------------------------------------------------


@_timed(6, "Quaternary local isotropy via square classes")
def criterion_6(scale=1.0, seed=6):
    rng = random.Random(seed)
    K3 = FqT(3)
    checks = bad = 0
    count = _n(500, scale)
    for k in range(count):
        if k % 2 == 0:
            K = Q
            b = [Q(rng.choice(SQUAREFREE_30)) * rng.choice((1, 4, 9)) for _ in range(4)]
        else:
            K = K3
            b = [_random_poly(rng, 3, 2) for _ in range(4)]
        for v in critical_places(K, *b):
            checks += 1
            bad += qform.local_isotropic(b, v) != qform.h_set_isotropic(b, v, K)
    return bad == 0, f"{count} quadruples, {checks} place checks, {bad} disagreements"


# -- 7 ------------------------------------------------------------------------------


def _small_element(rng, K, gens, extra=None):
    x = K(rng.choice(cft._unit_twists(K)))
    for _ in range(rng.randint(0, 2)):
        x = x * rng.choice(gens)
    if extra is not None:
        x = x * extra ** rng.randint(0, 3)
    return x


def bridge_configs(consts, count, rng, place_bound, gen_bound):
    """Run the dagger/symbol comparison on `count` random configurations."""
    K = consts.K
    places = [v for v in K.places_upto(place_bound) if v not in consts.modulus]
    gens = [K.generator(v) for v in K.places_upto(gen_bound)]
    bad = 0
    for _ in range(count):
        v = rng.choice(places)
        sigma = cft.artin_map(v, consts)
        iso = cft.isolate_prime(sigma, v, consts, cft._default_q_bound(K))
        if iso.ring.places != {v}:
            bad += 1
            continue
        if sigma != cft.IDENTITY and cft.p_partition(iso.p, consts).fibers[sigma] != (v,):
            bad += 1
            continue
        ctx = cft.context_for(iso, consts)
        g = K.generator(v)
        x = _small_element(rng, K, gens, g)
        y = _small_element(rng, K, gens, g)
        h = hilbert_symbol(x, y, v)
        if cft.dagger(x, y, -1, ctx) != (h == -1) or cft.dagger(x, y, 1, ctx) != (h == 1):
            bad += 1
    return bad


@_timed(7, "Dagger sentences match the Hilbert symbol")
def criterion_7(scale=1.0, seed=7):
    rng = random.Random(seed)
    total = bad = 0
    for K, pb, gb in ((Q, 200, 50), (FqT(3), 81, 27)):
        consts, _ = cft.load_constants(K)
        n = _n(100, scale)
        bad += bridge_configs(consts, n, rng, pb, gb)
        total += n
    return bad == 0, f"{total} configurations over Q and F_3(t), {bad} mismatches"


# -- 8 ------------------------------------------------------------------------------


def opposition_agreement(consts, quads, search_bound):
    """Compare eval_opposition with the direct sweep; returns (agree, disagree, undetermined)."""
    K = consts.K
    agree = disagree = undetermined = 0
    for a in quads:
        try:
            got = cft.eval_opposition(*a, consts, search_bound).value
        except cft.Undetermined:
            undetermined += 1
            continue
        want = bool(cft.opposition_sweep(*a, K, consts.modulus.places))
        if got == want:
            agree += 1
        else:
            disagree += 1
    return agree, disagree, undetermined


def random_quads(rng, K, gens, count):
    out = []
    for _ in range(count):
        quad = []
        for _ in range(4):
            x = K(rng.choice(cft._unit_twists(K)))
            for _ in range(rng.randint(0, 3)):
                x = x * rng.choice(gens) ** rng.randint(1, 2)
            quad.append(x)
        out.append(tuple(quad))
    return out


@_timed(8, "Opposition criterion against the direct sweep")
def criterion_8(scale=1.0, seed=8):
    rng = random.Random(seed)
    parts = []
    ok = True
    for K, bound in ((Q, 50), (FqT(3), 27)):
        consts, _ = cft.load_constants(K)
        gens = [K.generator(v) for v in K.places_upto(bound)]
        n = _n(100, scale)
        agree, disagree, und = opposition_agreement(consts, random_quads(rng, K, gens, n), bound)
        rate = und / n
        ok = ok and disagree == 0 and rate <= 0.05
        parts.append(f"{K}: {agree} agree, {disagree} disagree, undetermined {100 * rate:.1f}%")
    return ok, "; ".join(parts)


# -- 9 ------------------------------------------------------------------------------


@_timed(9, "Shipped constants pass verification")
def criterion_9(scale=1.0, fields=None):
    fields = fields or [Q, FqT(3), FqT(5), FqT(7)]
    bound = 500 if scale >= 1 else 50
    rbound = 10_000
    ok = True
    parts = []
    for K in fields:
        consts, data = cft.load_constants(K)
        counts, failures = cft.verify_constants(consts, bound)
        kernel, classes, rfail = cft.reciprocity_check(consts, rbound, kernel_bound=10**6)
        good = not failures and not rfail and classes > 0
        if scale >= 1 and counts != data["checks"]:
            good = False
            failures.append("check counts differ from the fixture")
        ok = ok and good
        n = sum(v for k, v in counts.items() if k.startswith("bullet"))
        parts.append(
            f"{K}: {n} bullet checks, {counts['isolation']} isolations, "
            f"{kernel} kernel + {classes} ray-class reciprocity checks, {len(failures) + len(rfail)} failures"
        )
    return ok, "; ".join(parts)


# -- 10 -----------------------------------------------------------------------------


def _random_pred_free(rng, K, names, depth=2):
    values = [K(c) for c in range(-2, 3)] if K.is_rational else [K(c) for c in range(K.q)]
    if depth == 0 or rng.random() < 0.3:
        x = dioph.MPoly.var(K, rng.choice(names))
        y = dioph.MPoly.var(K, rng.choice(names))
        shape = rng.randrange(3)
        c = rng.choice(values)
        if shape == 0:
            p = x - c
        elif shape == 1:
            p = x * y - c
        else:
            p = x * x - y - c
        return dioph.PolyEq(p)
    items = tuple(_random_pred_free(rng, K, names, depth - 1) for _ in range(rng.randint(2, 3)))
    return dioph.And(items) if rng.random() < 0.5 else dioph.Or(items)


def flatten_agrees(F, K, names, box):
    """Pointwise agreement of F and flatten(F) on every assignment from box."""
    G = dioph.flatten(F, K)
    ev = dioph.SemanticEvaluator(K)
    sat = False
    for vals in product(box, repeat=len(names)):
        w = dict(zip(names, vals))
        a = dioph.eval_formula(F, w, ev)
        if a != dioph.eval_formula(G, w, ev):
            return False, sat
        sat = sat or a
    return True, sat


@_timed(10, "Formula round trips")
def criterion_10(scale=1.0, seed=10):
    rng = random.Random(seed)
    notes = []
    ok = True

    # isotropy systems
    sys_bad = sys_n = 0
    for k in range(_n(100, scale)):
        K = Q if k % 2 == 0 else FqT(3)
        m = rng.randint(2, 5)
        coeffs = [rng.choice(SQUAREFREE_15) for _ in range(m)] if K.is_rational else [_random_poly(rng, 3, 1) for _ in range(m)]
        d = qform.decide(coeffs, K)
        if d.isotropic and d.certificate.witness is not None:
            sys_n += 1
            F = dioph.emit_isotropy_system(coeffs, K)
            sys_bad += not dioph.eval_formula(F, dioph.isotropy_witness(d.certificate.witness), dioph.SemanticEvaluator(K))
    ok = ok and sys_bad == 0 and sys_n > 0
    notes.append(f"{sys_n} isotropy systems, {sys_bad} rejected")

    # flattening
    fl_bad = fl_sat = 0
    n = _n(100, scale)
    for k in range(n):
        K = Q if k % 2 == 0 else FqT(3)
        names = ["x", "y", "z"][: rng.randint(1, 3)]
        F = dioph.Exists(tuple(names), _random_pred_free(rng, K, names))
        box = [K(c) for c in range(-3, 4)] if K.is_rational else [RatFunc(f) for f in polys_upto(3, 1)]
        good, sat = flatten_agrees(F, K, names, box)
        fl_bad += not good
        fl_sat += sat
    ok = ok and fl_bad == 0
    notes.append(f"{n} flattenings ({fl_sat} satisfiable), {fl_bad} mismatches")

    # semantic agreement
    sem_bad = sem_n = 0
    for K, count in ((Q, 100), (FqT(3), 50)):
        consts, _ = cft.load_constants(K)
        ev = dioph.SemanticEvaluator(K, consts)
        for _ in range(_n(count, scale)):
            m = rng.randint(1, 5)
            if K.is_rational:
                coeffs = [rng.choice(SQUAREFREE_15) for _ in range(m)]
            else:
                coeffs = [_random_poly(rng, 3, 1) for _ in range(m)]
            d = qform.decide(coeffs, K)
            F = dioph.emit_anisotropy_formula(coeffs, consts, K)
            w = dioph.anisotropy_witness(coeffs, consts, K)
            sat = w is not None and dioph.eval_formula(F, w, ev)
            sem_n += 1
            sem_bad += sat == d.isotropic
    ok = ok and sem_bad == 0
    notes.append(f"{sem_n} anisotropy formulas, {sem_bad} disagree with decide")
    return ok, "; ".join(notes)


CRITERIA = [
    criterion_1,
    criterion_2,
    criterion_3,
    criterion_4,
    criterion_5,
    criterion_6,
    criterion_7,
    criterion_8,
    criterion_9,
    criterion_10,
]


def run_all(scale=1.0, only=None, echo=None):
    results = []
    for crit in CRITERIA:
        if only and crit.number not in only:
            continue
        res = crit(scale=scale)
        if echo:
            echo(res.line())
        results.append(res)
    return results
