"""Causal webs from time series.

Decomposes the mutual information between a target series and N driver
series into pure multi-driver links (mlinks) with k-nearest-neighbour
estimators, normalises them by the total certainty of the target and
attributes the remainder to unmodelled processes.
"""

from .core import (AnalysisSpec, CausalWebError, Dataset, DesignMatrix, DriverSpec,
                   NumericalError, ProcessSeries, ValidationError, build_design, parse_drivers)
from .decomposition import DecompositionResult, full_decomposition
from .diagnostics import confounder_scan, missing_process_test
from .estimators import EstimatorParams, cmi_ksg, entropy_kl, mi_ksg

__version__ = "0.1.0"

__all__ = [
    "AnalysisSpec",
    "CausalWebError",
    "Dataset",
    "DesignMatrix",
    "DriverSpec",
    "NumericalError",
    "ProcessSeries",
    "ValidationError",
    "build_design",
    "parse_drivers",
    "DecompositionResult",
    "full_decomposition",
    "confounder_scan",
    "missing_process_test",
    "EstimatorParams",
    "cmi_ksg",
    "entropy_kl",
    "mi_ksg",
]
