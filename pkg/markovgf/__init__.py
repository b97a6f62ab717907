# Markov chain generating functions
"""Exact hitting-time generating functions for finite Markov chains."""

from .chain import Chain, load_chain, make_chain, parse_chain, random_chain, serialize_chain
from .config import Settings, get_settings
from .detcore import adjugate, char_bundle, det_id_minus_xM, k0_poly, pi_polys
from .errors import MarkovGFError
from .exactalg import Polynomial, RationalFunction
from .hitting import (
    hitting_distribution,
    hitting_gf,
    kemeny,
    return_gf,
    stationary,
    verify_identities,
)
from .mcsim import SimConfig, dp_hitting_oracle, simulate_geometric_stop, simulate_hitting
from .report import build_report

__all__ = [
    'Chain', 'load_chain', 'make_chain', 'parse_chain', 'random_chain', 'serialize_chain',
    'Settings', 'get_settings',
    'adjugate', 'char_bundle', 'det_id_minus_xM', 'k0_poly', 'pi_polys',
    'MarkovGFError',
    'Polynomial', 'RationalFunction',
    'hitting_distribution', 'hitting_gf', 'kemeny', 'return_gf', 'stationary',
    'verify_identities',
    'SimConfig', 'dp_hitting_oracle', 'simulate_geometric_stop', 'simulate_hitting',
    'build_report',
]
