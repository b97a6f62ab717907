"""
Determinant Core

Exact polynomial linear algebra on Id - xM: its determinant, the deleted-state
polynomials pi_v(x) = det(Id - x M^(v)), the adjugate Adj(Id - xM) and
K0(x) = det(Id - xM) / (1 - x).

Determinants use fraction-free Bareiss elimination over Z[x]: the matrix is
scaled by the lcm L of the entry denominators, so L*(Id - xM) has integer
polynomial entries and every intermediate division is exact.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import lcm
from types import MappingProxyType
from typing import Mapping, Optional, Sequence
import logging

from .chain import Chain, SubmatrixView
from .config import Settings, get_settings
from .errors import DivisionNotExact, InvariantViolation
from .exactalg import ONE, X, Matrix, Polynomial, identity, mat_mul

logger = logging.getLogger(__name__)

IntPoly = list[int]


# integer polynomial helpers (coefficient lists, index = power, trimmed)

def _trim(p: IntPoly) -> IntPoly:
    while p and p[-1] == 0:
        p.pop()
    return p


def _ip_mul(a: IntPoly, b: IntPoly) -> IntPoly:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim(out)


def _ip_sub(a: IntPoly, b: IntPoly) -> IntPoly:
    n = max(len(a), len(b))
    out = [(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)]
    return _trim(out)


def _ip_scale(a: IntPoly, k: int) -> IntPoly:
    return _trim([k * x for x in a])


def _ip_exact_div(a: IntPoly, b: IntPoly) -> IntPoly:
    """Quotient a / b, which must lie in Z[x]."""
    if not a:
        return []
    rem = list(a)
    db = len(b) - 1
    lead = b[-1]
    if len(rem) - 1 < db:
        raise DivisionNotExact(a, b, a)
    quot = [0] * (len(rem) - db)
    for k in range(len(rem) - 1 - db, -1, -1):
        c, r = divmod(rem[k + db], lead)
        if r:
            raise DivisionNotExact(a, b, rem)
        quot[k] = c
        if c:
            for j, bc in enumerate(b):
                rem[k + j] -= c * bc
    if any(rem[:db]):
        raise DivisionNotExact(a, b, rem[:db])
    return _trim(quot)


def _to_poly(p: IntPoly, scale: int = 1) -> Polynomial:
    return Polynomial(tuple(Fraction(c, scale) for c in p))


def _common_denominator(matrix: Sequence[Sequence[Fraction]]) -> int:
    den = 1
    for row in matrix:
        for x in row:
            den = lcm(den, x.denominator)
    return den


def _lift(matrix: Sequence[Sequence[Fraction]], scale: int) -> list[list[IntPoly]]:
    """scale * (Id - x*matrix) as integer polynomials."""
    n = len(matrix)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            m = matrix[i][j] * scale
            if m.denominator != 1:
                raise ValueError("scale does not clear the matrix denominators")
            row.append(_trim([scale if i == j else 0, -m.numerator]))
        out.append(row)
    return out


def _bareiss_forward(a: list[list[IntPoly]], n: int) -> int:
    """In-place fraction-free elimination of the first n columns.

    Returns the sign of the row permutation used. After the call a[k][k] is
    the k-th leading principal minor (up to that sign) and a[n-1][n-1] is
    +/- the determinant.
    """
    sign = 1
    prev: IntPoly = [1]
    for k in range(n - 1):
        if not a[k][k]:
            swap = next((i for i in range(k + 1, n) if a[i][k]), None)
            if swap is None:
                a[n - 1][n - 1] = []
                return sign
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        pivot = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            for j in range(k + 1, len(a[i])):
                a[i][j] = _ip_exact_div(
                    _ip_sub(_ip_mul(pivot, a[i][j]), _ip_mul(aik, a[k][j])), prev
                )
            a[i][k] = []
        prev = pivot
    return sign


def bareiss_det(b: list[list[IntPoly]]) -> IntPoly:
    n = len(b)
    if n == 0:
        return [1]
    a = [list(row) for row in b]
    sign = _bareiss_forward(a, n)
    return _ip_scale(a[n - 1][n - 1], sign)


def bareiss_solve(b: list[list[IntPoly]], rhs: list[list[IntPoly]]) -> tuple[IntPoly, list[list[IntPoly]]]:
    """Fraction-free solve of b * Y = det(b) * rhs (rhs given as columns).

    Returns (det(b), Y) with Y as a list of solution columns; each Y entry is
    a Cramer numerator, hence an integer polynomial.
    """
    n = len(b)
    m = len(rhs)
    a = [list(b[i]) + [list(rhs[c][i]) for c in range(m)] for i in range(n)]
    sign = _bareiss_forward(a, n)
    det = a[n - 1][n - 1]
    cols = []
    for c in range(m):
        y: list[IntPoly] = [[] for _ in range(n)]
        for i in range(n - 1, -1, -1):
            acc = _ip_mul(det, a[i][n + c])
            for j in range(i + 1, n):
                if a[i][j] and y[j]:
                    acc = _ip_sub(acc, _ip_mul(a[i][j], y[j]))
            y[i] = _ip_exact_div(acc, a[i][i]) if acc else []
        cols.append([_ip_scale(p, sign) for p in y])
    return _ip_scale(det, sign), cols


def solve_rational(a: Sequence[Sequence[Fraction]], b: Sequence[Fraction]) -> list[Fraction]:
    """Solve a y = b over Q by clearing denominators and running bareiss_solve
    on constant integer polynomials."""
    scale = lcm(_common_denominator(a), _common_denominator([b]))
    lifted = [[_trim([(Fraction(x) * scale).numerator]) for x in row] for row in a]
    rhs = [_trim([(Fraction(x) * scale).numerator]) for x in b]
    det, cols = bareiss_solve(lifted, [rhs])
    if not det:
        raise InvariantViolation("singular linear system")
    return [Fraction(p[0] if p else 0, det[0]) for p in cols[0]]


# characteristic quantities

def _id_minus_x_det(matrix: Sequence[Sequence[Fraction]]) -> Polynomial:
    n = len(matrix)
    if n == 0:
        return ONE
    scale = _common_denominator(matrix)
    det = bareiss_det(_lift(matrix, scale))
    return _to_poly(det, scale ** n)


def charpoly_faddeev_leverrier(c: Chain) -> Polynomial:
    """det(Id - xM) from the Faddeev-LeVerrier trace recursion.

    With det(lambda*Id - M) = sum_k c_k lambda^k, the coefficient of x^k in
    det(Id - xM) is c_{d-k}.
    """
    n = c.d
    m = c.matrix
    eye = identity(n)
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    mk = tuple(tuple(Fraction(0) for _ in range(n)) for _ in range(n))
    for k in range(1, n + 1):
        prod = mat_mul(m, mk)
        cprev = coeffs[n - k + 1]
        mk = tuple(
            tuple(prod[i][j] + (cprev if i == j else 0) for j in range(n))
            for i in range(n)
        )
        am = mat_mul(m, mk)
        trace = sum((am[i][i] for i in range(n)), Fraction(0))
        coeffs[n - k] = -trace / k
    return Polynomial(tuple(coeffs[n - k] for k in range(n + 1)))


@lru_cache(maxsize=64)
def det_id_minus_xM(c: Chain, verify: bool = False) -> Polynomial:
    """det(Id_d - xM) by Bareiss; verify=True cross-checks with Faddeev-LeVerrier."""
    det = _id_minus_x_det(c.matrix)
    if verify:
        other = charpoly_faddeev_leverrier(c)
        if other != det:
            raise InvariantViolation(
                f"Bareiss determinant {det} differs from Faddeev-LeVerrier {other}"
            )
        logger.debug("Determinant routes agree")
    if det(1) != 0:
        raise InvariantViolation(f"det(Id - xM) does not vanish at 1: {det(1)}")
    return det


@lru_cache(maxsize=64)
def pi_polys(c: Chain) -> Mapping[str, Polynomial]:
    """pi_v(x) = det(Id_{d-1} - x M^(v)) for every state v."""
    return MappingProxyType({
        v: _id_minus_x_det(SubmatrixView(c, v, 'deleted').matrix) for v in c.states
    })


@lru_cache(maxsize=64)
def k0_poly(c: Chain) -> Polynomial:
    """K0(x) = det(Id - xM) / (1 - x), by synthetic division."""
    try:
        return det_id_minus_xM(c).exact_div(ONE - X)
    except DivisionNotExact as e:
        raise InvariantViolation(f"(1 - x) does not divide det(Id - xM): {e}") from e


@dataclass(frozen=True)
class CharBundle:
    """det(Id - xM), the pi_v(x) family, K0(x) and Z = K0(1) for one chain."""
    chain: Chain
    det_poly: Polynomial
    pi: Mapping[str, Polynomial]
    k0: Polynomial
    Z: Fraction

    def pi_at(self, x0) -> tuple[Fraction, ...]:
        return tuple(self.pi[v](x0) for v in self.chain.states)


@lru_cache(maxsize=64)
def char_bundle(c: Chain) -> CharBundle:
    det = det_id_minus_xM(c)
    pi = pi_polys(c)
    k0 = k0_poly(c)
    z = k0(1)
    if z != sum((p(1) for p in pi.values()), Fraction(0)):
        raise InvariantViolation(f"K0(1) = {z} differs from the sum of pi_v(1)")
    if z <= 0:
        raise InvariantViolation(f"Z = {z} is not positive")
    return CharBundle(chain=c, det_poly=det, pi=pi, k0=k0, Z=z)


@dataclass(frozen=True)
class AdjugateMatrix:
    """Adj(Id - xM); entry (u, v) is entries[index(u)][index(v)]."""
    chain: Chain
    entries: tuple[tuple[Polynomial, ...], ...]

    def entry(self, u, v) -> Polynomial:
        return self.entries[self.chain.index(u)][self.chain.index(v)]

    def diagonal(self) -> dict[str, Polynomial]:
        return {s: self.entries[i][i] for i, s in enumerate(self.chain.states)}

    def times_id_minus_xM(self) -> tuple[tuple[Polynomial, ...], ...]:
        """Adj * (Id - xM) as a polynomial matrix."""
        n = self.chain.d
        m = self.chain.matrix
        cols = [
            [(ONE if k == j else Polynomial()) - X * m[k][j] for k in range(n)]
            for j in range(n)
        ]
        return tuple(
            tuple(
                sum((self.entries[i][k] * cols[j][k] for k in range(n)), Polynomial())
                for j in range(n)
            )
            for i in range(n)
        )

    def verify(self, det: Optional[Polynomial] = None) -> bool:
        det = det if det is not None else det_id_minus_xM(self.chain)
        product = self.times_id_minus_xM()
        n = self.chain.d
        return all(
            product[i][j] == (det if i == j else Polynomial())
            for i in range(n) for j in range(n)
        )


def _adjugate_by_cofactors(c: Chain, scale: int, lifted) -> list[list[Polynomial]]:
    n = c.d
    adj = [[Polynomial()] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            # Adj[i][j] = (-1)^(i+j) * minor with row j and column i removed
            minor = [
                [lifted[r][k] for k in range(n) if k != i]
                for r in range(n) if r != j
            ]
            sign = -1 if (i + j) % 2 else 1
            adj[i][j] = _to_poly(_ip_scale(bareiss_det(minor), sign), scale ** (n - 1))
    return adj


def _adjugate_by_columns(c: Chain, scale: int, lifted) -> list[list[Polynomial]]:
    n = c.d
    unit_cols = [[[1] if i == j else [] for i in range(n)] for j in range(n)]
    _, cols = bareiss_solve(lifted, unit_cols)
    return [[_to_poly(cols[j][i], scale ** (n - 1)) for j in range(n)] for i in range(n)]


@lru_cache(maxsize=64)
def _adjugate_cached(c: Chain, cofactor_max_dim: int) -> AdjugateMatrix:
    scale = _common_denominator(c.matrix)
    lifted = _lift(c.matrix, scale)
    if c.d <= cofactor_max_dim:
        entries = _adjugate_by_cofactors(c, scale, lifted)
        method = "cofactors"
    else:
        entries = _adjugate_by_columns(c, scale, lifted)
        method = "column solves"
    logger.debug(f"Adjugate of Id - xM (d={c.d}) by {method}")
    return AdjugateMatrix(chain=c, entries=tuple(tuple(row) for row in entries))


def adjugate(c: Chain, settings: Optional[Settings] = None, verify: bool = False) -> AdjugateMatrix:
    """Adj(Id - xM); verify=True multiplies back against Id - xM."""
    settings = settings or get_settings()
    adj = _adjugate_cached(c, settings.cofactor_max_dim)
    if verify and not adj.verify():
        raise InvariantViolation("Adj(Id - xM) * (Id - xM) != det * Id")
    return adj


@lru_cache(maxsize=256)
def taboo_resolvent_column(c: Chain, v: str) -> tuple[Polynomial, tuple[Polynomial, ...]]:
    """Solve (Id - x M^{*v}) y = x M[:, v] fraction-free.

    Returns (den, nums) with y_u = nums[u] / den and den = det(Id - x M^{*v}),
    which equals pi_v(x) (expand along the zeroed column).
    """
    k = c.index(v)
    taboo = SubmatrixView(c, v, 'zeroed').matrix
    scale = _common_denominator(c.matrix)
    lifted = _lift(taboo, scale)
    rhs = [_trim([0, (c.matrix[i][k] * scale).numerator]) for i in range(c.d)]
    det, cols = bareiss_solve(lifted, [rhs])
    # y = nums/det; common scale factors cancel once both are rationalised
    den = _to_poly(det, scale ** c.d)
    nums = tuple(_to_poly(p, scale ** c.d) for p in cols[0])
    return den, nums


def geometric_stop_law(c: Chain, u, x0) -> tuple[Fraction, ...]:
    """P_u(C_Geo(x0) = v) = (1 - x0) Adj_{u,v}(x0) / det(x0), for x0 in [0, 1)."""
    x0 = Fraction(x0)
    if not 0 <= x0 < 1:
        raise ValueError(f"x0 must lie in [0, 1), got {x0}")
    det = det_id_minus_xM(c)(x0)
    adj = adjugate(c)
    row = adj.entries[c.index(u)]
    return tuple((1 - x0) * p(x0) / det for p in row)


def tilted_measure(c: Chain, x0) -> tuple[Fraction, ...]:
    """Probability vector proportional to (pi_v(x0))_v, x0 in (0, 1]."""
    values = char_bundle(c).pi_at(Fraction(x0))
    total = sum(values, Fraction(0))
    return tuple(p / total for p in values)
