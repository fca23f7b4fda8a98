"""Limiting spectral moments of sparse weighted bipartite random graphs.

Three independent routes to the same numbers:

* ``recursion``: the two-table dynamic program for the limiting moments,
* ``walks``: brute-force enumeration of essential walks,
* ``sampler`` + ``estimator``: Monte Carlo traces of finite-N matrices.
"""

from .estimator import MomentReport, correlator_scaling, monte_carlo, trace_moments
from .recursion import ModelParams, build_tables, carleman_report, compute_moments, limiting_moment
from .sampler import EnsembleParams, SparseSymmetricMatrix, sample_matrix
from .walks import decompose, enumerate_essential_walks, gather, oracle_moment, second_join, second_split
from .weights import WeightModel, even_moments, sample_weight, validate_growth

__version__ = "0.1.0"

__all__ = [
    "EnsembleParams",
    "ModelParams",
    "MomentReport",
    "SparseSymmetricMatrix",
    "WeightModel",
    "build_tables",
    "carleman_report",
    "compute_moments",
    "correlator_scaling",
    "decompose",
    "enumerate_essential_walks",
    "even_moments",
    "gather",
    "limiting_moment",
    "monte_carlo",
    "oracle_moment",
    "sample_matrix",
    "sample_weight",
    "second_join",
    "second_split",
    "trace_moments",
    "validate_growth",
]
