"""
Hitting Times

Generating functions G_{u,v}^{>=t}(x) = E_u(x^{tau_v^{>=t}}), hitting laws,
factorial moments, the stationary law, Kemeny constants and an exact
verification suite for the identities that tie them to det(Id - xM).
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Mapping, Optional
import logging

import numpy as np

from .chain import Chain, SubmatrixView
from .config import Settings, get_settings
from .detcore import (
    adjugate,
    char_bundle,
    det_id_minus_xM,
    geometric_stop_law,
    pi_polys,
    solve_rational,
    taboo_resolvent_column,
)
from .errors import (
    ConstancyViolation,
    InvariantViolation,
    MarkovGFError,
    ShiftTooLarge,
)
from .exactalg import (
    ONE,
    X,
    Polynomial,
    RationalFunction,
    mat_mul,
    mat_pow,
    series_divide,
)

logger = logging.getLogger(__name__)

TILT_POINTS = (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4))
EIGEN_IMAG_TOLERANCE = 1e-10


@dataclass(frozen=True)
class HittingGF:
    """Probability generating function of tau_v^{>=t} started from u."""
    u: str
    v: str
    t: int
    gf: RationalFunction

    def series(self, n: int) -> list[Fraction]:
        return self.gf.series(n)

    def mean(self) -> Fraction:
        return self.gf.derivative_at(1, 1)


@dataclass(frozen=True)
class KemenyResult:
    by_mean_hitting: Fraction
    by_polynomial: Fraction
    by_eigenvalues: float
    Q1: Fraction
    Z: Fraction

    @property
    def constant(self) -> Fraction:
        return self.Q1 / self.Z

    @property
    def eigen_error(self) -> float:
        return abs(float(self.by_mean_hitting) - self.by_eigenvalues)


@dataclass(frozen=True)
class MomentTable:
    """E_u[Fac_k(tau_v^{>=1})] for k = 0..k_max, keyed by (u, v)."""
    states: tuple[str, ...]
    k_max: int
    values: Mapping[tuple[str, str], tuple[Fraction, ...]]

    def get(self, u, v, k: int) -> Fraction:
        return self.values[(str(u), str(v))][k]


# generating functions

@lru_cache(maxsize=512)
def _adjugate_numerators(c: Chain, v: str, t: int) -> tuple[Polynomial, ...]:
    """Numerators N_u with G_{u,v}^{>=t} = N_u / pi_v for every u.

    t = 0: the adjugate column. t = 1: the same column with det subtracted on
    the diagonal (tau^{>=0} and tau^{>=1} differ only when u = v). t > 1:
    x^{t-1} M^{t-1} applied to the t = 1 column (Markov property at t - 1).
    """
    adj = adjugate(c)
    k = c.index(v)
    col = [adj.entries[w][k] for w in range(c.d)]
    if t == 0:
        return tuple(col)
    col[k] = col[k] - det_id_minus_xM(c)
    if t > 1:
        p = mat_pow(c.matrix, t - 1)
        col = [
            sum((p[u][w] * col[w] for w in range(c.d) if p[u][w]), Polynomial())
            for u in range(c.d)
        ]
    return tuple(n.shift(t - 1) for n in col)


def _gf_by_taboo_solve(c: Chain, u, v, t: int) -> RationalFunction:
    """G_{u,v}^{>=t} from the taboo matrix M^{*v}:
    [(xM)^{t-1} (Id - x M^{*v})^{-1} (xM)]_{u,v}, with G^{>=0}_{v,v} = 1."""
    den, nums = taboo_resolvent_column(c, str(v))
    ku = c.index(u)
    if t == 0:
        if str(u) == str(v):
            return RationalFunction.of(1)
        return RationalFunction(nums[ku], den)
    if t == 1:
        return RationalFunction(nums[ku], den)
    p = mat_pow(c.matrix, t - 1)
    num = sum((p[ku][w] * nums[w] for w in range(c.d) if p[ku][w]), Polynomial())
    return RationalFunction(num.shift(t - 1), den)


def hitting_gf(c: Chain, u, v, t: int = 0, cross_check: bool = False,
               settings: Optional[Settings] = None) -> HittingGF:
    """G_{u,v}^{>=t}(x) as a reduced rational function.

    The adjugate route is primary; cross_check=True also runs the taboo
    linear solve and requires exact agreement.
    """
    settings = settings or get_settings()
    if t < 0:
        raise ValueError(f"shift t must be >= 0, got {t}")
    if t > settings.t_max:
        raise ShiftTooLarge(t, settings.t_max)
    ku = c.index(u)
    v = c.label(c.index(v))
    gf = RationalFunction(_adjugate_numerators(c, v, t)[ku], pi_polys(c)[v])
    if cross_check:
        other = _gf_by_taboo_solve(c, u, v, t)
        if other != gf:
            raise InvariantViolation(
                f"G_{{{u},{v}}}^{{>={t}}}: adjugate route {gf} != taboo route {other}"
            )
        logger.debug(f"GF routes agree for u={u}, v={v}, t={t}")
    return HittingGF(u=c.label(ku), v=v, t=t, gf=gf)


def gf_matrix(c: Chain, t: int) -> dict[tuple[str, str], RationalFunction]:
    """All G_{u,v}^{>=t} keyed by (u, v)."""
    pi = pi_polys(c)
    out = {}
    for v in c.states:
        nums = _adjugate_numerators(c, v, t)
        for i, u in enumerate(c.states):
            out[(u, v)] = RationalFunction(nums[i], pi[v])
    return out


def return_gf(c: Chain, u) -> RationalFunction:
    """E_u(x^{tau_u^{>=1}}) = 1 - det(Id - xM) / pi_u(x)."""
    pi_u = pi_polys(c)[c.label(c.index(u))]
    return RationalFunction(pi_u - det_id_minus_xM(c), pi_u)


def hitting_distribution(c: Chain, u, v, m_max: int) -> list[Fraction]:
    """P_u(tau_v^{>=0} = m) for m = 0..m_max.

    The first d values are series coefficients of Adj_{u,v} / pi_v; beyond
    that the numerator has no terms left and the law follows the finite
    recursion P(m) = -sum_{s>=1} P(m - s) [x^s] pi_v.
    """
    if m_max < 0:
        raise ValueError(f"m_max must be >= 0, got {m_max}")
    ku, kv = c.index(u), c.index(v)
    if ku == kv:
        return [Fraction(1)] + [Fraction(0)] * m_max
    pi = pi_polys(c)[c.label(kv)].coeffs
    num = adjugate(c).entries[ku][kv].coeffs
    probs = series_divide(num, pi, min(m_max + 1, c.d))
    for m in range(c.d, m_max + 1):
        probs.append(-sum((probs[m - s] * pi[s] for s in range(1, len(pi))), Fraction(0)))
    bad = [(m, p) for m, p in enumerate(probs) if not 0 <= p <= 1]
    if bad:
        raise InvariantViolation(f"hitting probabilities outside [0, 1]: {bad[:3]}")
    return probs


# stationary law, moments and Kemeny constants

def stationary(c: Chain) -> tuple[Fraction, ...]:
    """rho_v = pi_v(1) / Z."""
    bundle = char_bundle(c)
    rho = tuple(p / bundle.Z for p in bundle.pi_at(1))
    check = mat_mul((rho,), c.matrix)[0]
    if check != rho:
        raise InvariantViolation(f"rho M != rho for rho = {rho}")
    return rho


@lru_cache(maxsize=64)
def mean_hitting_times(c: Chain) -> tuple[tuple[Fraction, ...], ...]:
    """E_u(tau_v^{>=1}) by exact linear solves: h = (Id - M^{*v})^{-1} 1."""
    d = c.d
    cols = []
    for v in c.states:
        taboo = SubmatrixView(c, v, 'zeroed').matrix
        a = [[(1 if i == j else 0) - taboo[i][j] for j in range(d)] for i in range(d)]
        cols.append(solve_rational(a, [Fraction(1)] * d))
    return tuple(tuple(cols[k][u] for k in range(d)) for u in range(d))


def factorial_moments(c: Chain, k_max: int) -> MomentTable:
    """E_u[Fac_k(tau_v^{>=1})] = k-th derivative of G_{u,v}^{>=1} at 1.

    Any k_max >= 0 is accepted; the practical bound is k_max <= 8.
    """
    if k_max < 0:
        raise ValueError(f"k_max must be >= 0, got {k_max}")
    gfs = gf_matrix(c, 1)
    values = {}
    for key, g in gfs.items():
        taylor = g.taylor_at(1, k_max + 1)
        values[key] = tuple(coef * math.factorial(k) for k, coef in enumerate(taylor))
        if values[key][0] != 1:
            raise InvariantViolation(f"G^{{>=1}}_{key}(1) = {values[key][0]}, expected 1")
    return MomentTable(states=c.states, k_max=k_max, values=values)


def _kemeny_from_roots(k0: Polynomial, d: int) -> float:
    """1 + sum 1/(1 - lambda_i) from the roots of K0(x) = prod (1 - x lambda_i).

    A root r gives lambda = 1/r and 1/(1 - lambda) = r/(r - 1); eigenvalues
    equal to zero drop out of K0 and each contribute 1.
    """
    zeros = d - 1 - k0.degree
    total = complex(1 + zeros)
    if k0.degree > 0:
        roots = np.roots([float(coef) for coef in reversed(k0.coeffs)])
        total += complex(np.sum(roots / (roots - 1)))
    if abs(total.imag) >= EIGEN_IMAG_TOLERANCE:
        raise InvariantViolation(f"eigenvalue sum has imaginary part {total.imag}")
    return float(total.real)


def kemeny(c: Chain) -> KemenyResult:
    """Kemeny constant by mean hitting times, by K0 and by eigenvalues.

    The polynomial route uses log(K0)' = sum -lambda_i / (1 - x lambda_i), so
    K0'(1)/Z = (d - 1) - sum 1/(1 - lambda_i) and the constant is d - K0'(1)/Z.
    """
    bundle = char_bundle(c)
    rho = stationary(c)
    h = mean_hitting_times(c)
    per_state = [sum((h[u][v] * rho[v] for v in range(c.d)), Fraction(0)) for u in range(c.d)]
    for u in range(1, c.d):
        if per_state[u] != per_state[0]:
            raise ConstancyViolation(c.states[0], c.states[u], (per_state[0], per_state[u]))
    by_mean = per_state[0]
    by_poly = c.d - bundle.k0.derivative()(1) / bundle.Z
    by_eig = _kemeny_from_roots(bundle.k0, c.d)
    result = KemenyResult(
        by_mean_hitting=by_mean,
        by_polynomial=by_poly,
        by_eigenvalues=by_eig,
        Q1=bundle.Z * by_mean,
        Z=bundle.Z,
    )
    if result.eigen_error > 1e-9 * c.d:
        logger.warning(f"Eigenvalue Kemeny {by_eig} is {result.eigen_error:.3e} off the exact value")
    return result


def q_shift(c: Chain, t: int) -> Fraction:
    """Q^{>=t} = sum_v E_u(tau_v^{>=t}) pi_v, computed from G^{>=t}'(1) for
    every starting state u and required to be the same for all of them."""
    bundle = char_bundle(c)
    pi1 = bundle.pi_at(1)
    totals = [Fraction(0)] * c.d
    for k, v in enumerate(c.states):
        nums = _adjugate_numerators(c, v, t)
        for u in range(c.d):
            mean = RationalFunction(nums[u], bundle.pi[v]).derivative_at(1, 1)
            totals[u] += mean * pi1[k]
    for u in range(1, c.d):
        if totals[u] != totals[0]:
            raise ConstancyViolation(c.states[0], c.states[u], (totals[0], totals[u]))
    return totals[0]


def variance_by_state(c: Chain, table: Optional[MomentTable] = None) -> dict[str, Fraction]:
    """Var_u(tau_X^{>=1}) with X ~ rho independent of the chain."""
    table = table if table is not None and table.k_max >= 2 else factorial_moments(c, 2)
    rho = stationary(c)
    out = {}
    for u in c.states:
        first = sum((rho[k] * table.get(u, v, 1) for k, v in enumerate(c.states)), Fraction(0))
        second = sum(
            (rho[k] * (table.get(u, v, 2) + table.get(u, v, 1)) for k, v in enumerate(c.states)),
            Fraction(0),
        )
        out[u] = second - first * first
    return out


def _pi_prime_at_one(c: Chain) -> dict[str, Fraction]:
    return {v: p.derivative()(1) for v, p in pi_polys(c).items()}


def variance_spread(c: Chain, table: Optional[MomentTable] = None) -> tuple[Fraction, Fraction]:
    """(max_u Var_u - min_u Var_u, (2/Z)(max_u S_u - min_u S_u)) where
    S_u = sum_v E_u(tau_v^{>=1}) pi_v'(1). The two agree."""
    table = table if table is not None and table.k_max >= 2 else factorial_moments(c, 2)
    var = variance_by_state(c, table)
    dpi = _pi_prime_at_one(c)
    s = {u: sum((table.get(u, v, 1) * dpi[v] for v in c.states), Fraction(0)) for u in c.states}
    z = char_bundle(c).Z
    return max(var.values()) - min(var.values()), 2 / z * (max(s.values()) - min(s.values()))


def factorial_moment_tail(c: Chain, u, n: int,
                          table: Optional[MomentTable] = None) -> tuple[Fraction, Fraction]:
    """Both sides of Z E_u[Fac_n(tau_X)]/n! = -sum_{s=1}^{d-1} sum_v
    E_u[Fac_{n-s}(tau_v)]/(n-s)! * pi_v^{(s)}(1)/s!, valid for n >= d + 1."""
    if n < c.d + 1:
        raise ValueError(f"identity needs n >= d + 1 = {c.d + 1}, got {n}")
    if table is None or table.k_max < n:
        table = factorial_moments(c, n)
    pi = pi_polys(c)
    taylor = {v: p.taylor_shift(1) for v, p in pi.items()}
    u = c.label(c.index(u))
    lhs = sum(
        (table.get(u, v, n) / math.factorial(n) * pi[v](1) for v in c.states), Fraction(0)
    )
    rhs = Fraction(0)
    for s in range(1, c.d):
        for v in c.states:
            rhs -= table.get(u, v, n - s) / math.factorial(n - s) * taylor[v].coeff(s)
    return lhs, rhs


# identity verification

@dataclass
class CheckResult:
    label: str
    name: str
    description: str
    passed: bool
    witness: Optional[str] = None


@dataclass
class IdentityReport:
    states: tuple[str, ...]
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def failures(self) -> list[CheckResult]:
        return [check for check in self.checks if not check.passed]


def _run_check(report: IdentityReport, label: str, name: str, description: str,
               fn: Callable[[], Optional[str]]) -> None:
    try:
        witness = fn()
    except MarkovGFError as e:
        witness = f"{type(e).__name__}: {e}"
    passed = witness is None
    if not passed:
        logger.warning(f"Identity check ({label}) {name} failed: {witness}")
    report.checks.append(CheckResult(label, name, description, passed, witness))


def verify_identities(c: Chain, settings: Optional[Settings] = None) -> IdentityReport:
    """Check every generating-function identity exactly; failures carry a witness."""
    settings = settings or get_settings()
    states = c.states
    d = c.d
    bundle = char_bundle(c)
    det, pi, k0, z = bundle.det_poly, bundle.pi, bundle.k0, bundle.Z
    adj = adjugate(c, settings)
    g0 = gf_matrix(c, 0)
    g1 = gf_matrix(c, 1)
    report = IdentityReport(states=states)
    logger.info(f"Verifying identities for d={d}")

    def k_constancy():
        for u in states:
            total = sum((g0[(u, v)] * pi[v] for v in states), RationalFunction.of(0))
            if total != RationalFunction.of(k0):
                return f"u={u}: sum_v G0*pi_v = {total}, K0 = {k0}"

    def shift_law():
        for t in (1, 2):
            gt = g1 if t == 1 else gf_matrix(c, t)
            target = RationalFunction.of(k0.shift(t))
            for u in states:
                total = sum((gt[(u, v)] * pi[v] for v in states), RationalFunction.of(0))
                if total != target:
                    return f"t={t}, u={u}: {total} != x^{t} K0"

    def adjugate_factorization():
        for u in states:
            for v in states:
                lhs = g0[(u, v)] * pi[v]
                if lhs != RationalFunction.of(adj.entry(u, v)):
                    return f"({u},{v}): G0*pi_v = {lhs}, Adj = {adj.entry(u, v)}"

    def renewal_split():
        for u in states:
            for v in states:
                lhs = RationalFunction(adj.entry(u, v), det)
                rhs = g0[(u, v)] * RationalFunction(adj.entry(v, v), det)
                if lhs != rhs:
                    return f"({u},{v}): {lhs} != {rhs}"

    def jacobi():
        total = RationalFunction.of(X * det.derivative())
        for v in states:
            total = total + g1[(v, v)] * pi[v]
        if not total.is_zero():
            return f"x det' + sum_v G1_vv pi_v = {total}"

    def constancy_sum():
        target = RationalFunction(ONE, ONE - X)
        for u in states:
            total = sum((g0[(u, v)] / (1 - g1[(v, v)]) for v in states), RationalFunction.of(0))
            if total != target:
                return f"u={u}: {total} != 1/(1-x)"

    def return_identity():
        for u in states:
            lhs = 1 - g1[(u, u)]
            if lhs != RationalFunction(det, pi[u]):
                return f"u={u}: 1 - G1_uu = {lhs}"

    def second_derivative():
        lhs = det.derivative(2)(1)
        rhs = (1 - d) * z - sum((p.derivative()(1) for p in pi.values()), Fraction(0))
        if lhs != rhs:
            return f"det''(1) = {lhs}, (1-d)Z - sum pi_v'(1) = {rhs}"

    k_needed = d + 1 if d <= 4 else 2
    table_holder: dict[str, MomentTable] = {}

    def moments() -> MomentTable:
        if 'table' not in table_holder:
            table_holder['table'] = factorial_moments(c, k_needed)
        return table_holder['table']

    def variance_constancy():
        table = moments()
        var = variance_by_state(c, table)
        dpi = _pi_prime_at_one(c)
        values = {
            u: z / 2 * var[u] + sum((table.get(u, v, 1) * dpi[v] for v in states), Fraction(0))
            for u in states
        }
        if len(set(values.values())) != 1:
            return f"Z/2 Var_u + sum_v E_u tau_v pi_v'(1) by state: {values}"

    def tilted_constancy():
        for x0 in TILT_POINTS:
            pis = bundle.pi_at(x0)
            if any(p <= 0 for p in pis):
                return f"pi_v({x0}) not positive: {pis}"
            for t, gt in ((0, g0), (1, g1)):
                values = {
                    u: sum((gt[(u, v)](x0) * pis[k] for k, v in enumerate(states)), Fraction(0))
                    for u in states
                }
                if len(set(values.values())) != 1:
                    return f"x0={x0}, t={t}: values by state {values}"

    def geometric_stop():
        for x0 in TILT_POINTS:
            for u in states:
                law = geometric_stop_law(c, u, x0)
                if sum(law) != 1 or any(p < 0 for p in law):
                    return f"x0={x0}, u={u}: law {law}"

    def moment_tail():
        table = moments()
        n = d + 1
        for u in states:
            lhs, rhs = factorial_moment_tail(c, u, n, table)
            if lhs != rhs:
                return f"u={u}, n={n}: {lhs} != {rhs}"

    def mean_hitting_routes():
        table = moments()
        h = mean_hitting_times(c)
        rho = stationary(c)
        for i, u in enumerate(states):
            for j, v in enumerate(states):
                if table.get(u, v, 1) != h[i][j]:
                    return f"({u},{v}): G1'(1) = {table.get(u, v, 1)}, linear solve = {h[i][j]}"
            if rho[i] * h[i][i] != 1:
                return f"rho_{u} * E_{u} tau_{u} = {rho[i] * h[i][i]}"

    def kemeny_routes():
        result = kemeny(c)
        if result.by_mean_hitting != result.by_polynomial:
            return f"mean hitting {result.by_mean_hitting} != polynomial {result.by_polynomial}"
        if result.eigen_error > 1e-9 * d:
            return f"eigenvalue route off by {result.eigen_error:.3e}"

    _run_check(report, "a", "k_constancy", "sum_v G0_uv pi_v = K0 for every u", k_constancy)
    _run_check(report, "b", "shift_law", "sum_v Gt_uv pi_v = x^t K0 for t = 1, 2", shift_law)
    _run_check(report, "c", "adjugate_factorization", "G0_uv pi_v = Adj_uv", adjugate_factorization)
    _run_check(report, "d", "renewal_split", "Adj_uv/det = G0_uv Adj_vv/det", renewal_split)
    _run_check(report, "e", "jacobi", "x det' + sum_v G1_vv pi_v = 0", jacobi)
    _run_check(report, "f", "constancy_sum", "sum_v G0_uv/(1 - G1_vv) = 1/(1-x)", constancy_sum)
    _run_check(report, "g", "return_identity", "1 - G1_uu = det/pi_u", return_identity)
    _run_check(report, "h", "second_derivative", "det''(1) = (1-d)Z - sum_v pi_v'(1)", second_derivative)
    _run_check(report, "i", "variance_constancy",
               "Z/2 Var_u(tau_X) + sum_v E_u(tau_v) pi_v'(1) is the same for all u", variance_constancy)
    _run_check(report, "j", "tilted_constancy",
               "sum_v Gt_uv(x0) pi_v(x0) is the same for all u, x0 in {1/4, 1/2, 3/4}", tilted_constancy)
    _run_check(report, "k", "geometric_stop_law", "rows of (1-x)(Id - xM)^-1 are probability laws",
               geometric_stop)
    if d <= 4:
        _run_check(report, "l", "moment_tail",
                   "Z E_u[Fac_n(tau_X)]/n! equals minus the s >= 1 terms, n = d + 1", moment_tail)
    _run_check(report, "m", "mean_hitting_routes",
               "G1_uv'(1) matches the linear solve and rho_v E_v(tau_v) = 1", mean_hitting_routes)
    _run_check(report, "n", "kemeny_routes", "mean-hitting, polynomial and eigenvalue routes agree",
               kemeny_routes)

    logger.info(f"Identity checks: {sum(ch.passed for ch in report.checks)}/{len(report.checks)} passed")
    return report
