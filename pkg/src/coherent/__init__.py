"""Exact computations on coherent opinion pairs and families."""

from .coherence import (
    CoherenceVerdict,
    QuickCertificate,
    check_coherence,
    check_independent_pair,
    quick_incoherence,
    strassen_check,
    verify_gap_lemma,
)
from .extremal import (
    Grid,
    TargetFunction,
    eps_fixed_mean,
    eps_grid,
    eps_one_by_n,
    eps_sweep,
    independent_search,
    optimize_target,
    sup_moment,
)
from .laws import DiscreteJointLaw, EventSplitWitness, make_law
from .numeric import Rational, parse_rational
from .polytope import Rect, enumerate_vertices

__version__ = "0.1.0"

__all__ = [
    "CoherenceVerdict", "DiscreteJointLaw", "EventSplitWitness", "Grid", "QuickCertificate",
    "Rational", "Rect", "TargetFunction", "check_coherence", "check_independent_pair",
    "enumerate_vertices", "eps_fixed_mean", "eps_grid", "eps_one_by_n", "eps_sweep",
    "independent_search", "make_law", "optimize_target", "parse_rational", "quick_incoherence",
    "strassen_check", "sup_moment", "verify_gap_lemma",
]
