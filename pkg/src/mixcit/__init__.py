"""k-nearest-neighbour CMI estimation and conditional independence testing for mixed data."""

from .bench import RateReport, SweepSpec, binomial_ci, run_cit_sweep, run_cmi_sweep, write_report
from .cit import CitConfig, CitResult, local_permutation, permutation_pvalue, run_cit
from .data import ColumnKind, Dataset, Preprocessing, VariablePartition, apply_preprocessing, load_dataset, save_dataset
from .errors import (
    CitEstimatorError,
    ConfigurationError,
    DegenerateColumnError,
    DegenerateGeometryError,
    DomainError,
    EstimatorUndefinedError,
    MixcitError,
    ParseError,
    SchemaMismatchError,
)
from .estimators import (
    CmiEstimate,
    EstimatorConfig,
    EstimatorKind,
    estimate,
    fp_cmi,
    gkov_mi,
    kl_entropy,
    ksg_mi,
    ms_cmi,
    msinf_cmi,
    plugin_cmi,
    zmadg_cmi,
)
from .models import Family, GeneratedSample, ModelSpec, generate, ground_truth
from .neighbors import ClusterIndex, HeuristicKind, KHeuristic, effective_k, subspace_counts
from .special import digamma

__version__ = "0.1.0"

__all__ = [
    "CitConfig", "CitEstimatorError", "CitResult", "ClusterIndex", "CmiEstimate", "ColumnKind",
    "ConfigurationError", "Dataset", "DegenerateColumnError", "DegenerateGeometryError", "DomainError",
    "EstimatorConfig", "EstimatorKind", "EstimatorUndefinedError", "Family", "GeneratedSample",
    "HeuristicKind", "KHeuristic", "MixcitError", "ModelSpec", "ParseError", "Preprocessing",
    "RateReport", "SchemaMismatchError", "SweepSpec", "VariablePartition", "apply_preprocessing",
    "binomial_ci", "digamma", "effective_k", "estimate", "fp_cmi", "generate", "gkov_mi",
    "ground_truth", "kl_entropy", "ksg_mi", "load_dataset", "local_permutation", "ms_cmi",
    "msinf_cmi", "permutation_pvalue", "plugin_cmi", "run_cit", "run_cit_sweep", "run_cmi_sweep",
    "save_dataset", "subspace_counts", "write_report", "zmadg_cmi",
]
