"""alphagate: a multiple-testing decision engine.

Three testing modes (individual, disjunction, conjunction) with their
alpha-adjustment contracts, closed-form error-rate math, FWER/FDR decision
procedures, and a seeded Monte Carlo simulator that verifies the analytic
claims over independent, equicorrelated, and shared-control test designs.
"""

from .decisions import (
    Decision,
    Verdict,
    apply_bh,
    decide_conjunction,
    decide_disjunction,
    decide_individual,
)
from .errors import (
    DomainError,
    FileFormatError,
    InvalidBattery,
    InvalidMethod,
    InvalidScenario,
)
from .families import (
    AdjustmentMethod,
    AlphaConfig,
    ClassificationInput,
    FamilySpec,
    Rationale,
    Recommendation,
    TestBattery,
    TestingMode,
    ValidationIssue,
    ValidationReport,
    classify_testing_mode,
    validate_family,
)
from .rates import (
    CostModel,
    ErrorRateReport,
    PowerSpec,
    bonferroni_adjust,
    conjunction_power,
    conjunction_type2,
    error_rate_report,
    fwer_independent,
    optimal_alpha,
    per_family_rate,
    power_one_sided_z,
    sidak_adjust,
)
from .rng import derive_rep_seed
from .simulate import (
    Design,
    Estimates,
    Scenario,
    Sides,
    normal_cdf,
    p_from_z,
    sample_statistics,
    simulate,
    wilson_ci,
)

__version__ = "0.1.0"

__all__ = [
    "AdjustmentMethod",
    "AlphaConfig",
    "ClassificationInput",
    "CostModel",
    "Decision",
    "Design",
    "DomainError",
    "ErrorRateReport",
    "Estimates",
    "FamilySpec",
    "FileFormatError",
    "InvalidBattery",
    "InvalidMethod",
    "InvalidScenario",
    "PowerSpec",
    "Rationale",
    "Recommendation",
    "Scenario",
    "Sides",
    "TestBattery",
    "TestingMode",
    "ValidationIssue",
    "ValidationReport",
    "Verdict",
    "apply_bh",
    "bonferroni_adjust",
    "classify_testing_mode",
    "conjunction_power",
    "conjunction_type2",
    "decide_conjunction",
    "decide_disjunction",
    "decide_individual",
    "derive_rep_seed",
    "error_rate_report",
    "fwer_independent",
    "normal_cdf",
    "optimal_alpha",
    "p_from_z",
    "per_family_rate",
    "power_one_sided_z",
    "sample_statistics",
    "sidak_adjust",
    "simulate",
    "validate_family",
    "wilson_ci",
]
