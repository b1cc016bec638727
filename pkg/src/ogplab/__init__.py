"""Desk-scale laboratory for the overlap gap property.

Random instances (number partitioning, G(n, p) cliques, random K-SAT,
binary p-spin, symmetric binary perceptron), the standard heuristics,
exhaustive oracles, overlap spectra with gap detection, first-moment
exponents, and correlated-instance paths for stability experiments.
"""

from ._kernels import BACKEND
from .algorithms import KkTrace, greedy_clique, karmarkar_karp, walksat
from .core import (
    GapReport,
    NodeSubset,
    OverlapSpectrum,
    SignVector,
    SolutionSet,
    build_spectrum,
    detect_gap,
    hamming,
    overlap,
)
from .ensembles import (
    InterpolationPath,
    StabilityTrace,
    chaos_probe,
    graph_resample_path,
    ksat_resample_path,
    make_algorithm,
    npp_resample_path,
    pspin_resample_path,
    stability_run,
)
from .models import (
    GraphInstance,
    GuardError,
    KsatInstance,
    NppInstance,
    PerceptronInstance,
    PSpinInstance,
    gen_gnp,
    gen_ksat,
    gen_npp,
    gen_perceptron,
    gen_pspin,
)
from .oracles import (
    cluster_decompose,
    dpll_sat,
    enumerate_cliques,
    enumerate_npp,
    enumerate_perceptron,
    enumerate_sat,
    exact_max_clique,
    tuple_gap_search,
)
from .rng import RngStream

__version__ = "0.1.0"
