"""
Simulation and DP Oracles

Exact first-passage laws by the taboo recursion, plus seeded Monte Carlo
estimates of hitting times and of the chain observed at a geometric time.

Path i reads only from its own PCG64 stream, child i of SeedSequence(seed),
so a path's outcome depends on (seed, i) alone. Paths are stepped together
in blocks of BLOCK_SIZE and blocks are merged in path order, so results do
not depend on the number of worker threads or on n_paths beyond the paths
added.
"""

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence
import logging

import numpy as np

from .chain import Chain
from .detcore import geometric_stop_law
from .errors import ConfigError, StepCapExceeded
from .exactalg import format_decimal
from .hitting import stationary

logger = logging.getLogger(__name__)

BLOCK_SIZE = 4096
STREAM_CHUNK = 32


@dataclass(frozen=True)
class SimConfig:
    seed: int
    n_paths: int
    max_steps: int = 1_000_000
    workers: int = 1

    def __post_init__(self):
        if self.seed < 0 or self.seed >= 2 ** 64:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.n_paths < 1:
            raise ConfigError(f"n_paths must be >= 1, got {self.n_paths}")
        if self.max_steps < 1:
            raise ConfigError(f"max_steps must be >= 1, got {self.max_steps}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")

    def check_chain(self, c: Chain) -> None:
        if self.max_steps < c.d:
            raise ConfigError(f"max_steps={self.max_steps} is below d={c.d}")


# exact oracle

@dataclass(frozen=True)
class DPTable:
    """taboo[u][m] = P_u(tau_v^{>=0} = m) for m = 0..m_max."""
    states: tuple[str, ...]
    v: str
    m_max: int
    taboo: Mapping[str, tuple[Fraction, ...]]

    def law(self, u) -> tuple[Fraction, ...]:
        return self.taboo[str(u)]

    def mass(self, u) -> Fraction:
        return sum(self.taboo[str(u)], Fraction(0))


def dp_hitting_oracle(c: Chain, v, m_max: int) -> DPTable:
    """f(u, 0) = 1_{u=v}; f(u, m) = sum_w M[u][w] f(w, m - 1) for u != v and
    f(v, m) = 0 for m >= 1, so mass is absorbed at the first arrival."""
    if m_max < 0:
        raise ValueError(f"m_max must be >= 0, got {m_max}")
    k = c.index(v)
    d = c.d
    m = c.matrix
    f = [Fraction(1) if u == k else Fraction(0) for u in range(d)]
    rows = [[value] for value in f]
    for _ in range(m_max):
        f = [
            Fraction(0) if u == k
            else sum((m[u][w] * f[w] for w in range(d) if f[w]), Fraction(0))
            for u in range(d)
        ]
        for u in range(d):
            rows[u].append(f[u])
    return DPTable(
        states=c.states,
        v=c.label(k),
        m_max=m_max,
        taboo={c.label(u): tuple(rows[u]) for u in range(d)},
    )


def dp_hitting_table(c: Chain, m_max: int) -> dict[str, DPTable]:
    return {v: dp_hitting_oracle(c, v, m_max) for v in c.states}


# sampling

def _cumulative(rows: Sequence[Sequence[Fraction]]) -> np.ndarray:
    cum = np.cumsum(np.array([[float(p) for p in row] for row in rows]), axis=1)
    cum[:, -1] = 1.0
    return cum


class PathStreams:
    """Uniform draws for paths first..first+n-1, each from its own stream.

    Stream i is Generator(PCG64(SeedSequence(seed, spawn_key=(i,)))), the
    same child SeedSequence(seed).spawn would hand out at index i.
    """

    def __init__(self, seed: int, first: int, n: int):
        self._gens = [
            np.random.Generator(
                np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(first + i,)))
            )
            for i in range(n)
        ]
        self._buf = np.empty((n, STREAM_CHUNK))
        self._pos = np.full(n, STREAM_CHUNK, dtype=np.int64)

    def next(self, idx: np.ndarray) -> np.ndarray:
        """One uniform on [0, 1) for each path in idx."""
        for i in idx[self._pos[idx] >= STREAM_CHUNK]:
            self._buf[i] = self._gens[i].random(STREAM_CHUNK)
            self._pos[i] = 0
        out = self._buf[idx, self._pos[idx]]
        self._pos[idx] += 1
        return out


def _draw(cum: np.ndarray, states: np.ndarray, uniforms: np.ndarray) -> np.ndarray:
    return (cum[states] <= uniforms[:, None]).sum(axis=1)


def _blocks(n_paths: int) -> list[tuple[int, int]]:
    """(first path index, size) for each block."""
    return [(first, min(BLOCK_SIZE, n_paths - first)) for first in range(0, n_paths, BLOCK_SIZE)]


def _run_blocks(cfg: SimConfig, fn) -> list:
    jobs = _blocks(cfg.n_paths)
    logger.debug(f"Simulating {cfg.n_paths} paths in {len(jobs)} block(s), workers={cfg.workers}")
    if cfg.workers == 1:
        return [fn(first, size) for first, size in jobs]
    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        return list(pool.map(lambda job: fn(*job), jobs))


@dataclass
class HittingSummary:
    """Empirical law of tau_v^{>=t} from u; v is None when X ~ rho."""
    u: str
    v: Optional[str]
    t: int
    n_paths: int
    mean: float
    variance: float
    std_error: float
    histogram: dict[int, int] = field(default_factory=dict)

    def z_score(self, exact_mean) -> float:
        delta = self.mean - float(exact_mean)
        if self.std_error == 0:
            return 0.0 if delta == 0 else math.inf
        return delta / self.std_error

    def to_dict(self) -> dict:
        return {
            "u": self.u,
            "v": self.v,
            "t": self.t,
            "n_paths": self.n_paths,
            "mean": self.mean,
            "variance": self.variance,
            "std_error": self.std_error,
            "histogram": {str(m): n for m, n in sorted(self.histogram.items())},
        }


def hitting_samples(c: Chain, u, v, t: int, cfg: SimConfig,
                    rho: Optional[Sequence[Fraction]] = None) -> np.ndarray:
    """tau_v^{>=t} from u for paths 0..n_paths-1, in path order. With v=None
    the target X is drawn from rho (computed from the chain when not given)
    independently for each path."""
    cfg.check_chain(c)
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    start = c.index(u)
    cum = _cumulative(c.matrix)
    if v is None:
        if rho is None:
            rho = stationary(c)
        rho_cum = _cumulative([rho])[0]
        target = None
    else:
        target = c.index(v)

    def block(first: int, n: int) -> np.ndarray:
        streams = PathStreams(cfg.seed, first, n)
        everyone = np.arange(n)
        state = np.full(n, start, dtype=np.int64)
        if target is None:
            targets = _draw(rho_cum[None, :], np.zeros(n, dtype=np.int64), streams.next(everyone))
        else:
            targets = np.full(n, target, dtype=np.int64)
        for _ in range(t):
            state = _draw(cum, state, streams.next(everyone))
        tau = np.full(n, -1, dtype=np.int64)
        active = np.ones(n, dtype=bool)
        k = t
        while True:
            hit = active & (state == targets)
            tau[hit] = k
            active &= ~hit
            if not active.any():
                return tau
            if k >= cfg.max_steps:
                raise StepCapExceeded(cfg.max_steps, int(active.sum()))
            idx = np.flatnonzero(active)
            state[idx] = _draw(cum, state[idx], streams.next(idx))
            k += 1

    return np.concatenate(_run_blocks(cfg, block))


def simulate_hitting(c: Chain, u, v, t: int, cfg: SimConfig,
                     rho: Optional[Sequence[Fraction]] = None) -> HittingSummary:
    """Summary of hitting_samples: mean, variance, standard error and histogram."""
    taus = hitting_samples(c, u, v, t, cfg, rho)
    n = len(taus)
    mean = float(taus.mean())
    variance = float(taus.var(ddof=1)) if n > 1 else 0.0
    values, counts = np.unique(taus, return_counts=True)
    summary = HittingSummary(
        u=c.label(c.index(u)),
        v=None if v is None else c.label(c.index(v)),
        t=t,
        n_paths=n,
        mean=mean,
        variance=variance,
        std_error=math.sqrt(variance / n),
        histogram={int(m): int(k) for m, k in zip(values, counts)},
    )
    logger.info(f"Simulated {n} paths: mean={mean:.6f} se={summary.std_error:.6f}")
    return summary


@dataclass
class GeometricStopSummary:
    u: str
    x0: Fraction
    n_paths: int
    counts: dict[str, int]
    empirical: dict[str, float]
    exact: dict[str, Fraction]
    std_errors: dict[str, float]
    z_scores: dict[str, float]

    def max_abs_z(self) -> float:
        return max(abs(z) for z in self.z_scores.values())

    def to_dict(self) -> dict:
        return {
            "u": self.u,
            "x0": str(self.x0),
            "n_paths": self.n_paths,
            "counts": self.counts,
            "empirical": self.empirical,
            "exact": {v: str(p) for v, p in self.exact.items()},
            "std_errors": self.std_errors,
            "z_scores": self.z_scores,
        }


def simulate_geometric_stop(c: Chain, u, x0, cfg: SimConfig) -> GeometricStopSummary:
    """Law of C_K with K independent, P(K = k) = (1 - x0) x0^k for k >= 0."""
    cfg.check_chain(c)
    x0 = Fraction(x0)
    if not 0 < x0 < 1:
        raise ValueError(f"x0 must lie in (0, 1), got {x0}")
    start = c.index(u)
    cum = _cumulative(c.matrix)
    log_x0 = math.log(float(x0))

    def block(first: int, n: int) -> np.ndarray:
        streams = PathStreams(cfg.seed, first, n)
        # P(K >= k) = x0^k by inversion
        remaining = np.floor(np.log1p(-streams.next(np.arange(n))) / log_x0).astype(np.int64)
        state = np.full(n, start, dtype=np.int64)
        steps = 0
        while True:
            idx = np.flatnonzero(remaining > 0)
            if len(idx) == 0:
                return np.bincount(state, minlength=c.d)
            if steps >= cfg.max_steps:
                raise StepCapExceeded(cfg.max_steps, len(idx))
            state[idx] = _draw(cum, state[idx], streams.next(idx))
            remaining[idx] -= 1
            steps += 1

    totals = np.sum(_run_blocks(cfg, block), axis=0)
    exact_law = geometric_stop_law(c, u, x0)
    n = cfg.n_paths
    counts, empirical, exact, std_errors, z_scores = {}, {}, {}, {}, {}
    for k, v in enumerate(c.states):
        counts[v] = int(totals[k])
        empirical[v] = counts[v] / n
        exact[v] = exact_law[k]
        p = float(exact_law[k])
        std_errors[v] = math.sqrt(p * (1 - p) / n)
        delta = empirical[v] - p
        if std_errors[v] == 0:
            z_scores[v] = 0.0 if delta == 0 else math.inf
        else:
            z_scores[v] = delta / std_errors[v]
    logger.info(f"Geometric stop at x0={x0}: max |z| = {max(abs(z) for z in z_scores.values()):.3f}")
    return GeometricStopSummary(
        u=c.label(start), x0=x0, n_paths=n, counts=counts, empirical=empirical,
        exact=exact, std_errors=std_errors, z_scores=z_scores,
    )


def histogram_csv(summary: HittingSummary, exact: Optional[Sequence[Fraction]] = None) -> str:
    """CSV with columns m,count,exact_probability; the last column is empty
    where no exact value is known."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["m", "count", "exact_probability"])
    for m in sorted(summary.histogram):
        prob = format_decimal(exact[m]) if exact is not None and m < len(exact) else ""
        writer.writerow([m, summary.histogram[m], prob])
    return out.getvalue()
