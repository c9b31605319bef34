"""Randomized verification suites, sharpness sweeps and reports."""

from .generators import BatchSet, Case, GenerationError, GeneratorParams, generate_case
from .report import Tally, VerificationReport
from .sharpness import CASES as SHARPNESS_CASES
from .sharpness import sharpness_sweep
from .suites import (
    SHARP,
    SUITES,
    SharpConstants,
    SuiteConfig,
    bound_probe,
    check_rho_bounds,
    check_p_family_chains,
    invariance_suite,
    metric_axiom_suite,
    monotonicity_suite,
    oracle_suite,
    small_p_probe,
    run_suite,
)

__all__ = [
    "BatchSet", "Case", "GenerationError", "GeneratorParams", "generate_case",
    "Tally", "VerificationReport", "SHARPNESS_CASES", "sharpness_sweep",
    "SHARP", "SUITES", "SharpConstants", "SuiteConfig", "bound_probe",
    "check_rho_bounds", "check_p_family_chains", "invariance_suite", "metric_axiom_suite",
    "monotonicity_suite", "oracle_suite", "small_p_probe", "run_suite",
]
