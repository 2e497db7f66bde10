"""Coded caching with more users than files: placement, two-step multicast delivery,
closed-form loads and the uncoded-placement outer bound."""

from .analytics import centralized_curve, m_threshold, mns_centralized, mns_decentralized, r_co, r_d, rco_curve
from .bounds import certify_optimality_n2, closed_form_bound_n2, lp_bound
from .combinatorics import binom, lower_convex_envelope
from .gf import GF
from .model import DemandVector, ProblemInstance, make_instance, worst_case_demand
from .simulation import simulate

__all__ = [
    "GF",
    "DemandVector",
    "ProblemInstance",
    "binom",
    "centralized_curve",
    "certify_optimality_n2",
    "closed_form_bound_n2",
    "lower_convex_envelope",
    "lp_bound",
    "m_threshold",
    "make_instance",
    "mns_centralized",
    "mns_decentralized",
    "r_co",
    "r_d",
    "rco_curve",
    "simulate",
    "worst_case_demand",
]
