"""Private inference for +-1 linear models over block-structured cosets."""
from __future__ import annotations

from .approx import (
    GammaSpec,
    Transcript,
    count_gamma,
    count_gamma_members,
    run_session,
    run_sessions,
    sample_gamma,
)
from .bounds import BoundReport, error_bound, mi_achieved, mi_lower, report
from .estimator import PrivateInnerProduct
from .exact import SchemeParams, exact_infer
from .exceptions import (
    CosetMismatchError,
    GammaMembershipError,
    HadamardError,
    LengthMismatchError,
    OracleSizeError,
    ParameterError,
    WireFormatError,
)
from .experiment import ExperimentConfig, ExperimentResult, run_experiment
from .gf2 import BlockPartition, SignVector
from .hadamard import HadamardMatrix, hadamard, load_hadamard, sylvester
from .wire import Kind, WireMessage, decode, encode

__version__ = "0.1.0"

__all__ = [
    "BlockPartition",
    "BoundReport",
    "CosetMismatchError",
    "ExperimentConfig",
    "ExperimentResult",
    "GammaMembershipError",
    "GammaSpec",
    "HadamardError",
    "HadamardMatrix",
    "Kind",
    "LengthMismatchError",
    "OracleSizeError",
    "ParameterError",
    "PrivateInnerProduct",
    "SchemeParams",
    "SignVector",
    "Transcript",
    "WireFormatError",
    "WireMessage",
    "count_gamma",
    "count_gamma_members",
    "decode",
    "encode",
    "error_bound",
    "exact_infer",
    "hadamard",
    "load_hadamard",
    "mi_achieved",
    "mi_lower",
    "report",
    "run_experiment",
    "run_session",
    "run_sessions",
    "sample_gamma",
    "sylvester",
]
