"""Quadratic forms: congruence diagonalization, local and global isotropy, certificates."""

from __future__ import annotations

from dataclasses import dataclass, field

from .field import DomainError, GlobalField, Place, as_elem, field_of, is_square, square_class_reps
from .hilbert import critical_places, hilbert_symbol
from .oracle import global_witness_search

ISOTROPIC = "isotropic"
ANISOTROPIC = "anisotropic"


@dataclass(frozen=True)
class QuadForm:
    """f(x) = x^T A x with A symmetric over K."""

    K: GlobalField
    A: tuple

    def __post_init__(self):
        m = len(self.A)
        if m < 1 or any(len(row) != m for row in self.A):
            raise DomainError("coefficient matrix must be square and nonempty")
        for i in range(m):
            for j in range(i):
                if self.A[i][j] != self.A[j][i]:
                    raise DomainError("coefficient matrix must be symmetric")

    @classmethod
    def from_coefficients(cls, K, a):
        """Form sum a_ij x_i x_j; A_ii = a_ii and A_ij = (a_ij + a_ji)/2."""
        m = len(a)
        a = [[K(x) for x in row] for row in a]
        A = tuple(
            tuple(a[i][i] if i == j else (a[i][j] + a[j][i]) / 2 for j in range(m)) for i in range(m)
        )
        return cls(K, A)

    @classmethod
    def diagonal(cls, K, coeffs):
        m = len(coeffs)
        return cls(K, tuple(tuple(K(coeffs[i]) if i == j else K(0) for j in range(m)) for i in range(m)))

    @property
    def m(self):
        return len(self.A)

    def __call__(self, x):
        K, A = self.K, self.A
        return sum((A[i][j] * x[i] * x[j] for i in range(self.m) for j in range(self.m)), K(0))

    def is_zero(self):
        return all(not x for row in self.A for x in row)


@dataclass(frozen=True)
class DiagForm:
    """C^T A C = diag(coeffs, 0, ..., 0) with C invertible."""

    K: GlobalField
    coeffs: tuple
    m: int
    C: tuple

    @property
    def rank(self):
        return len(self.coeffs)


def _transpose(M):
    return tuple(zip(*M))


def matmul(X, Y):
    n, k = len(X), len(Y[0])
    return tuple(tuple(sum((X[i][r] * Y[r][j] for r in range(len(Y))), 0 * X[0][0]) for j in range(k)) for i in range(n))


def determinant(M):
    """Exact determinant by fraction-field elimination."""
    M = [list(row) for row in M]
    n = len(M)
    det = M[0][0] ** 0
    for k in range(n):
        piv = next((i for i in range(k, n) if M[i][k]), None)
        if piv is None:
            return 0 * det
        if piv != k:
            M[k], M[piv] = M[piv], M[k]
            det = -det
        det = det * M[k][k]
        for i in range(k + 1, n):
            if M[i][k]:
                r = M[i][k] / M[k][k]
                M[i] = [x - r * y for x, y in zip(M[i], M[k])]
    return det


def diagonalize(f):
    """Symmetric congruence reduction of f.

    Pivots on the first nonzero diagonal entry of the remaining block.  When
    that block has zero diagonal but a nonzero entry A_ij, the substitution
    x_i = u + v, x_j = u - v turns it into diag(2A_ij, -2A_ij) first.
    """
    K, m = f.K, f.m
    A = [list(row) for row in f.A]
    C = [[K(1) if i == j else K(0) for j in range(m)] for i in range(m)]

    def col_op(j, k, r):
        # column/row j += r * column/row k
        for row in A:
            row[j] = row[j] + r * row[k]
        A[j] = [x + r * y for x, y in zip(A[j], A[k])]
        for row in C:
            row[j] = row[j] + r * row[k]

    def pair_op(i, j):
        # (e_i, e_j) -> (e_i + e_j, e_i - e_j)
        for row in A + C:
            row[i], row[j] = row[i] + row[j], row[i] - row[j]
        A[i], A[j] = [x + y for x, y in zip(A[i], A[j])], [x - y for x, y in zip(A[i], A[j])]

    def swap(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        A[i], A[j] = A[j], A[i]
        for row in C:
            row[i], row[j] = row[j], row[i]

    rank = 0
    for k in range(m):
        piv = next((i for i in range(k, m) if A[i][i]), None)
        if piv is None:
            pair = next(((i, j) for i in range(k, m) for j in range(i + 1, m) if A[i][j]), None)
            if pair is None:
                break
            i, j = pair
            pair_op(i, j)
            piv = i
        if piv != k:
            swap(piv, k)
        for j in range(k + 1, m):
            if A[k][j]:
                col_op(j, k, -A[k][j] / A[k][k])
        rank += 1
    coeffs = tuple(A[i][i] for i in range(rank))
    return DiagForm(K, coeffs, m, tuple(tuple(row) for row in C))


def _as_coeffs(d):
    coeffs = tuple(as_elem(b) for b in (d.coeffs if isinstance(d, DiagForm) else d))
    if any(not b for b in coeffs):
        raise DomainError("local isotropy needs a nondegenerate diagonal form")
    return coeffs


def local_isotropic(d, v):
    """Is the nondegenerate diagonal form d isotropic over K_v?"""
    b = _as_coeffs(d)
    n = len(b)
    if n == 0:
        raise DomainError("empty form")
    if v.is_archimedean:
        return any(x > 0 for x in b) and any(x < 0 for x in b)
    if n == 1:
        return False
    if n == 2:
        return is_square(-b[0] * b[1], v)
    if n == 3:
        return hilbert_symbol(-b[0] * b[1], -b[0] * b[2], v) == 1
    if n == 4:
        same_disc = is_square(b[0] * b[1] * b[2] * b[3], v)
        opposed = hilbert_symbol(b[0], b[1], v) == -hilbert_symbol(-b[2], -b[3], v)
        return not (same_disc and opposed)
    return True


def h_set_isotropic(b, v, K):
    """Quaternary isotropy at v via the square-class sets A and B.

    A = {x : (x, -b1 b2) = (b1, b2)}, B = {x : (x, -b3 b4) = (-b3, -b4)};
    the form is isotropic at v iff some class x lies in both.
    """
    b1, b2, b3, b4 = _as_coeffs(b)
    h12 = hilbert_symbol(b1, b2, v)
    h34 = hilbert_symbol(-b3, -b4, v)
    for x in square_class_reps(v, K):
        if hilbert_symbol(x, -b1 * b2, v) == h12 and hilbert_symbol(x, -b3 * b4, v) == h34:
            return True
    return False


def _report_order(v):
    if v.is_finite and not v.is_dyadic:
        return (1, v.sort_key())
    return (0,) if not v.is_finite else (2,)


def decision_places(K, coeffs):
    """The critical place set, infinite place first and the dyadic place last."""
    return sorted(critical_places(K, *coeffs), key=_report_order)


@dataclass(frozen=True)
class IsotropyCertificate:
    """Checkable evidence for a verdict.

    kind "isotropic" carries a witness (None if the bounded search gave up);
    "degenerate" a radical vector; "anisotropic" a place, the diagonal
    coefficients with their congruence matrix, and an obstruction record.
    """

    kind: str
    witness: tuple | None = None
    place: Place | None = None
    diagonal: tuple | None = None
    congruence: tuple | None = None
    obstruction: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Decision:
    verdict: str
    certificate: IsotropyCertificate

    @property
    def isotropic(self):
        return self.verdict == ISOTROPIC


def _as_form(f, K):
    if isinstance(f, QuadForm):
        return f
    coeffs = list(f)
    if K is None:
        K = field_of(as_elem(coeffs[0]))
    return QuadForm.diagonal(K, coeffs)


def obstruction(b, v):
    """Obstruction record for an anisotropic place, or None if isotropic there."""
    b = _as_coeffs(b)
    if local_isotropic(b, v):
        return None
    n = len(b)
    if v.is_archimedean:
        return {"case": "definite", "sign": 1 if b[0] > 0 else -1}
    if n == 1:
        return {"case": "rank1"}
    if n == 2:
        return {"case": "binary", "value": -b[0] * b[1]}
    if n == 3:
        return {"case": "ternary", "args": (-b[0] * b[1], -b[0] * b[2]), "symbol": -1}
    return {
        "case": "quaternary",
        "disc": b[0] * b[1] * b[2] * b[3],
        "h12": hilbert_symbol(b[0], b[1], v),
        "h34": hilbert_symbol(-b[2], -b[3], v),
    }


WITNESS_WORK_CAP = 2_000_000


def _height_schedule(K, m):
    half = (m + 1) // 2
    if K.is_rational:
        heights = [10, 100, 1000, 10_000, 100_000]
        cost = lambda h: (h + 1) ** half
    else:
        heights = [0, 1, 2, 3, 4, 5]
        cost = lambda h: K.q ** ((h + 1) * half)
    return [h for h in heights if cost(h) <= WITNESS_WORK_CAP] or heights[:1]


def find_witness(coeffs, K, heights=None):
    """Escalating global search for a zero of a diagonal form."""
    for h in heights or _height_schedule(K, len(coeffs)):
        w = global_witness_search(coeffs, h)
        if w is not None:
            return w
    return None


def decide(f, K=None, heights=None):
    """Decide isotropy of f over K (Hasse-Minkowski on the critical places)."""
    f = _as_form(f, K)
    K = f.K
    m = f.m
    if f.is_zero():
        e1 = tuple(K(1) if i == 0 else K(0) for i in range(m))
        return Decision(ISOTROPIC, IsotropyCertificate("degenerate", witness=e1))
    d = diagonalize(f)
    if d.rank < m:
        kernel = tuple(d.C[i][d.rank] for i in range(m))
        return Decision(ISOTROPIC, IsotropyCertificate("degenerate", witness=kernel))
    b = d.coeffs
    for v in decision_places(K, b):
        obs = obstruction(b, v)
        if obs is not None:
            cert = IsotropyCertificate(ANISOTROPIC, place=v, diagonal=b, congruence=d.C, obstruction=obs)
            return Decision(ANISOTROPIC, cert)
    y = find_witness(b, K, heights)
    witness = None
    if y is not None:
        witness = tuple(sum((d.C[i][j] * y[j] for j in range(m)), K(0)) for i in range(m))
    return Decision(ISOTROPIC, IsotropyCertificate(ISOTROPIC, witness=witness))


@dataclass(frozen=True)
class CheckResult:
    ok: bool
    reason: str

    def __bool__(self):
        return self.ok


def check_certificate(f, cert, K=None):
    """Validate a certificate against f using only field arithmetic and symbols."""
    try:
        f = _as_form(f, K)
        return _check(f, cert)
    except (DomainError, TypeError, ValueError, ZeroDivisionError, IndexError, KeyError) as exc:
        return CheckResult(False, f"malformed certificate: {exc}")


def _check(f, cert):
    K, m = f.K, f.m
    if cert.kind in (ISOTROPIC, "degenerate"):
        w = cert.witness
        if w is None:
            return CheckResult(False, "no explicit witness")
        w = tuple(K(x) for x in w)
        if len(w) != m or all(not x for x in w):
            return CheckResult(False, "witness must be a nonzero vector of length m")
        if cert.kind == "degenerate":
            if any(sum((f.A[i][j] * w[j] for j in range(m)), K(0)) for i in range(m)):
                return CheckResult(False, "vector is not in the radical")
            return CheckResult(True, "radical vector")
        if f(w):
            return CheckResult(False, "f(witness) != 0")
        return CheckResult(True, "f(witness) = 0")
    if cert.kind != ANISOTROPIC:
        return CheckResult(False, f"unknown certificate kind {cert.kind!r}")
    b = tuple(K(x) for x in cert.diagonal)
    C = tuple(tuple(K(x) for x in row) for row in cert.congruence)
    if len(b) != m or len(C) != m:
        return CheckResult(False, "anisotropic certificates need a full-rank diagonalization")
    B = matmul(matmul(_transpose(C), f.A), C)
    if any(B[i][j] != (b[i] if i == j else 0) for i in range(m) for j in range(m)):
        return CheckResult(False, "C^T A C is not the claimed diagonal")
    if not determinant(C):
        return CheckResult(False, "congruence matrix is singular")
    if any(not x for x in b):
        return CheckResult(False, "diagonal has a zero entry")
    v = cert.place
    obs = cert.obstruction
    case = obs.get("case")
    n = len(b)
    if v.is_archimedean:
        if not K.is_rational:
            return CheckResult(False, "no archimedean place over F_q(t)")
        ok = case == "definite" and (all(x > 0 for x in b) or all(x < 0 for x in b))
        return CheckResult(ok, "definite at the real place" if ok else "form is indefinite")
    if n == 1:
        return CheckResult(case == "rank1", "one-dimensional form")
    if n == 2:
        val = -b[0] * b[1]
        ok = case == "binary" and K(obs["value"]) == val and not is_square(val, v)
        return CheckResult(ok, f"-b1*b2 nonsquare at {v}" if ok else f"-b1*b2 is a square at {v}")
    if n == 3:
        args = (-b[0] * b[1], -b[0] * b[2])
        ok = (
            case == "ternary"
            and tuple(K(x) for x in obs["args"]) == args
            and hilbert_symbol(*args, v) == -1
            and obs.get("symbol") == -1
        )
        return CheckResult(ok, f"Hilbert symbol -1 at {v}" if ok else f"symbol is +1 at {v}")
    if n == 4:
        disc = b[0] * b[1] * b[2] * b[3]
        h12 = hilbert_symbol(b[0], b[1], v)
        h34 = hilbert_symbol(-b[2], -b[3], v)
        ok = (
            case == "quaternary"
            and K(obs["disc"]) == disc
            and obs.get("h12") == h12
            and obs.get("h34") == h34
            and is_square(disc, v)
            and h12 == -h34
        )
        return CheckResult(ok, f"square discriminant and opposed symbols at {v}" if ok else f"form is isotropic at {v}")
    return CheckResult(False, f"forms of rank {n} are isotropic at every finite place")
