"""
Analysis Report

Collects every exact result for one chain into a versioned JSON document.
Rationals are rendered as "p/q" strings; decimals are display annotations.
"""

import json
from dataclasses import dataclass
from datetime import datetime, timezone
from fractions import Fraction
from typing import Optional
import logging

from .chain import Chain, chain_to_dict
from .config import Settings, get_settings
from .detcore import CharBundle, char_bundle
from .exactalg import RationalFunction, format_decimal, format_rational
from .hitting import (
    IdentityReport,
    KemenyResult,
    MomentTable,
    factorial_moments,
    gf_matrix,
    kemeny,
    mean_hitting_times,
    stationary,
    verify_identities,
)

logger = logging.getLogger(__name__)

REPORT_VERSION = 1


@dataclass
class AnalysisReport:
    chain: Chain
    stationary: tuple[Fraction, ...]
    bundle: CharBundle
    gf_t0: dict[tuple[str, str], RationalFunction]
    mean_hitting: tuple[tuple[Fraction, ...], ...]
    moments: MomentTable
    kemeny: KemenyResult
    identities: IdentityReport
    simulation: Optional[dict] = None
    generated_at: str = ""

    @property
    def all_identities_pass(self) -> bool:
        return self.identities.passed

    def _hitting_times(self, render) -> dict:
        states = self.chain.states
        return {
            u: {v: render(self.mean_hitting[i][j]) for j, v in enumerate(states)}
            for i, u in enumerate(states)
        }

    def _moments(self, render) -> dict:
        states = self.chain.states
        return {
            u: {v: [render(m) for m in self.moments.values[(u, v)]] for v in states}
            for u in states
        }

    def to_dict(self) -> dict:
        states = self.chain.states
        fr = format_rational
        return {
            "report_version": REPORT_VERSION,
            "generated_at": self.generated_at,
            "chain": chain_to_dict(self.chain),
            "stationary": {v: fr(p) for v, p in zip(states, self.stationary)},
            "Z": fr(self.bundle.Z),
            "polynomials": {
                "det": self.bundle.det_poly.to_strings(),
                "k0": self.bundle.k0.to_strings(),
                "pi": {v: self.bundle.pi[v].to_strings() for v in states},
            },
            "hitting": {
                "gf_t0": {
                    u: {
                        v: {
                            "num": self.gf_t0[(u, v)].num.to_strings(),
                            "den": self.gf_t0[(u, v)].den.to_strings(),
                        }
                        for v in states
                    }
                    for u in states
                },
                "mean_hitting_times": self._hitting_times(format_rational),
                "mean_hitting_times_decimal": self._hitting_times(format_decimal),
                "moments": self._moments(format_rational),
                "moments_decimal": self._moments(format_decimal),
            },
            "kemeny": {
                "by_mean_hitting": fr(self.kemeny.by_mean_hitting),
                "by_polynomial": fr(self.kemeny.by_polynomial),
                "by_eigenvalues": format_decimal(Fraction(self.kemeny.by_eigenvalues)),
                "Q1": fr(self.kemeny.Q1),
                "decimal": format_decimal(self.kemeny.by_mean_hitting),
            },
            "identities": [
                {
                    "label": check.label,
                    "name": check.name,
                    "description": check.description,
                    "passed": check.passed,
                    "witness": check.witness,
                }
                for check in self.identities.checks
            ],
            "all_identities_pass": self.all_identities_pass,
            "simulation": self.simulation,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, allow_nan=False) + "\n"

    def summary_lines(self) -> list[str]:
        states = self.chain.states
        lines = [
            f"Chain: d={self.chain.d}, states={', '.join(states)}",
            "Stationary: " + ", ".join(
                f"{v}={format_rational(p)}" for v, p in zip(states, self.stationary)
            ),
            f"Z = {format_rational(self.bundle.Z)}",
            f"det(Id - xM) = {self.bundle.det_poly}",
            f"Kemeny constant: {format_rational(self.kemeny.by_mean_hitting)}"
            f" ({format_decimal(self.kemeny.by_mean_hitting)})",
            f"Kemeny by eigenvalues: {self.kemeny.by_eigenvalues!r}",
        ]
        checks = self.identities.checks
        lines.append(f"Identity checks: {sum(ch.passed for ch in checks)}/{len(checks)} passed")
        for check in self.identities.failures():
            lines.append(f"  FAILED ({check.label}) {check.name}: {check.witness}")
        if self.simulation is not None:
            sim = self.simulation
            z = "n/a" if sim.get('z_score') is None else f"{sim['z_score']:.3f}"
            lines.append(
                f"Simulation: mean={sim['mean']:.6f}, std_error={sim['std_error']:.6f}, z={z}"
            )
        return lines


def build_report(c: Chain, k_max: Optional[int] = None, settings: Optional[Settings] = None,
                 simulation: Optional[dict] = None) -> AnalysisReport:
    settings = settings or get_settings()
    k_max = settings.k_max if k_max is None else k_max
    logger.info(f"Analyzing chain with d={c.d}, k_max={k_max}")
    report = AnalysisReport(
        chain=c,
        stationary=stationary(c),
        bundle=char_bundle(c),
        gf_t0=gf_matrix(c, 0),
        mean_hitting=mean_hitting_times(c),
        moments=factorial_moments(c, k_max),
        kemeny=kemeny(c),
        identities=verify_identities(c, settings),
        simulation=simulation,
        generated_at=datetime.now(timezone.utc).isoformat(timespec='seconds'),
    )
    logger.info(f"Report complete, identities pass: {report.all_identities_pass}")
    return report
