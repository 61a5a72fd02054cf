"""Domain vocabulary for multiple testing.

A *joint* hypothesis bundles two or more *constituent* hypotheses into a
family and is judged by either a disjunction rule (at least one constituent
test significant) or a conjunction rule (all constituent tests significant).
*Individual* testing makes one decision per hypothesis and never forms a
family. Only disjunction testing requires lowering the per-test alpha;
conjunction and individual testing run each test at the unadjusted level.

This module holds the value types for families, batteries of p-values, and
alpha configurations, plus two operations:

* :func:`validate_family` checks the declared structure of a family and
  warns when a disjunction family is not declared exchangeable.
* :func:`classify_testing_mode` maps five explicit yes/no study questions to
  a recommended testing mode and tells you whether to adjust alpha.

Family membership is always declared by the caller; nothing here tries to
infer it from data, and exchangeability/independence are taken as the
theoretical judgments they are.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import InvalidBattery


class TestingMode(Enum):
    """How multiple test results feed decisions about hypotheses."""

    INDIVIDUAL = "individual"
    DISJUNCTION = "disjunction"
    CONJUNCTION = "conjunction"


class AdjustmentMethod(Enum):
    """Per-test alpha adjustment procedures (NONE = unadjusted)."""

    NONE = "none"
    BONFERRONI = "bonferroni"
    SIDAK = "sidak"
    HOLM = "holm"
    HOCHBERG = "hochberg"
    BENJAMINI_HOCHBERG = "bh"


#: Methods that control the familywise error rate for disjunction testing.
FWER_METHODS = frozenset(
    {
        AdjustmentMethod.BONFERRONI,
        AdjustmentMethod.SIDAK,
        AdjustmentMethod.HOLM,
        AdjustmentMethod.HOCHBERG,
    }
)


def _check_id(token: str, what: str) -> None:
    if not isinstance(token, str) or not token:
        raise ValueError(f"{what} must be a non-empty string, got {token!r}")


@dataclass(frozen=True)
class FamilySpec:
    """A declared joint hypothesis and its constituent hypotheses.

    ``constituents`` may be structurally invalid (empty, duplicated ids);
    :func:`validate_family` reports those as errors rather than raising, so
    callers can surface every problem at once.
    """

    joint_id: str
    constituents: tuple[str, ...]
    mode: TestingMode
    exchangeable: bool
    independent: bool

    def __post_init__(self) -> None:
        _check_id(self.joint_id, "joint_id")
        object.__setattr__(self, "constituents", tuple(self.constituents))
        for token in self.constituents:
            _check_id(token, "constituent id")
        if self.mode is TestingMode.INDIVIDUAL:
            raise ValueError("a family implies a joint hypothesis; mode cannot be 'individual'")

    @property
    def k(self) -> int:
        return len(self.constituents)


@dataclass(frozen=True)
class TestBattery:
    """An ordered set of (hypothesis id, p-value) pairs awaiting judgment."""

    entries: tuple[tuple[str, float], ...]

    def __post_init__(self) -> None:
        normalized = []
        seen: set[str] = set()
        for entry in self.entries:
            hid, p = entry
            if not isinstance(hid, str) or not hid:
                raise InvalidBattery(f"hypothesis id must be a non-empty string, got {hid!r}")
            p = float(p)
            if not 0.0 <= p <= 1.0:
                raise InvalidBattery(f"p-value for {hid!r} must lie in [0, 1], got {p}")
            if hid in seen:
                raise InvalidBattery(f"duplicate hypothesis id {hid!r}")
            seen.add(hid)
            normalized.append((hid, p))
        object.__setattr__(self, "entries", tuple(normalized))

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(hid for hid, _ in self.entries)

    @property
    def pvalues(self) -> tuple[float, ...]:
        return tuple(p for _, p in self.entries)


@dataclass(frozen=True)
class AlphaConfig:
    """The joint-level alpha, the adjustment method, and the mode it serves.

    Disjunction testing must name an adjustment method; conjunction and
    individual testing must not (their per-test alpha equals ``alpha_joint``).
    """

    alpha_joint: float
    method: AdjustmentMethod
    mode: TestingMode

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha_joint < 1.0:
            raise ValueError(f"alpha_joint must lie in (0, 1), got {self.alpha_joint}")
        if self.mode is TestingMode.DISJUNCTION:
            if self.method is AdjustmentMethod.NONE:
                raise ValueError("disjunction testing requires an adjustment method")
        elif self.method is not AdjustmentMethod.NONE:
            raise ValueError(
                f"{self.mode.value} testing uses the unadjusted alpha; method must be 'none'"
            )


@dataclass(frozen=True, kw_only=True)
class ClassificationInput:
    """Answers to the five questions that pick a testing mode.

    Every answer is required; there are no defaults, because each one is a
    substantive judgment about the study.
    """

    statistical_claim: bool
    joint_inference: bool
    all_constituents_required: bool
    exchangeable: bool
    family_theoretically_relevant: bool

    def __post_init__(self) -> None:
        for name in (
            "statistical_claim",
            "joint_inference",
            "all_constituents_required",
            "exchangeable",
            "family_theoretically_relevant",
        ):
            if not isinstance(getattr(self, name), bool):
                raise ValueError(f"{name} must be an explicit boolean")


@dataclass(frozen=True)
class Rationale:
    """One applied classification rule: a stable code plus readable text."""

    code: str
    text: str


@dataclass(frozen=True)
class Recommendation:
    """Recommended testing mode (None = no statistical claim, not applicable)."""

    mode: TestingMode | None
    adjust_alpha: bool
    rationale: tuple[Rationale, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "rationale", tuple(self.rationale))
        if self.adjust_alpha != (self.mode is TestingMode.DISJUNCTION):
            raise ValueError("adjust_alpha must hold exactly when mode is disjunction")


@dataclass(frozen=True)
class ValidationIssue:
    code: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    errors: tuple[ValidationIssue, ...]
    warnings: tuple[ValidationIssue, ...]

    @property
    def ok(self) -> bool:
        return not self.errors


def validate_family(spec: FamilySpec) -> ValidationReport:
    """Check the declared structure of a family.

    Structural violations (no constituents, duplicated ids) are errors.
    A disjunction family whose constituents are not declared exchangeable
    gets a warning, not an error: exchangeability is required for any
    constituent rejection to license the joint inference, but it is a
    theoretical judgment the caller may stand behind deliberately.
    """
    errors: list[ValidationIssue] = []
    warnings: list[ValidationIssue] = []
    if spec.k == 0:
        errors.append(ValidationIssue("EmptyFamily", "family declares no constituent hypotheses"))
    seen: set[str] = set()
    for token in spec.constituents:
        if token in seen:
            errors.append(
                ValidationIssue("DuplicateConstituent", f"constituent {token!r} appears more than once")
            )
        seen.add(token)
    if spec.mode is TestingMode.DISJUNCTION and not spec.exchangeable:
        warnings.append(
            ValidationIssue(
                "NotExchangeable",
                "constituents must be theoretically exchangeable for disjunction testing: "
                "a significant result for any one of them has to carry the same inferential "
                "weight for the joint hypothesis",
            )
        )
    return ValidationReport(errors=tuple(errors), warnings=tuple(warnings))


def classify_testing_mode(answers: ClassificationInput) -> Recommendation:
    """Deterministic rule cascade from study questions to a testing mode.

    No statistical claim -> not applicable. No joint inference -> individual
    testing, unadjusted. A joint inference over a family with no theoretical
    relevance is a heap of unrelated hypotheses: downgrade to individual
    testing with a warning. Otherwise conjunction (all constituents must
    succeed, unadjusted) or disjunction (any success suffices, adjust alpha).
    """
    if not answers.statistical_claim:
        return Recommendation(
            mode=None,
            adjust_alpha=False,
            rationale=(
                Rationale(
                    "no-statistical-claim",
                    "the conclusion is not tied to a specific p-value and alpha level, so "
                    "no alpha policy applies",
                ),
            ),
        )
    if not answers.joint_inference:
        return Recommendation(
            mode=TestingMode.INDIVIDUAL,
            adjust_alpha=False,
            rationale=(
                Rationale(
                    "individual-decisions",
                    "each hypothesis is decided by its own single test, so the per-test "
                    "alpha stays unadjusted regardless of how many tests run side by side",
                ),
            ),
        )
    if not answers.family_theoretically_relevant:
        return Recommendation(
            mode=TestingMode.INDIVIDUAL,
            adjust_alpha=False,
            rationale=(
                Rationale(
                    "heap-of-hypotheses",
                    "the declared family has no theoretical or practical relevance as a joint "
                    "hypothesis; a joint inference over it would answer a question nobody is asking",
                ),
                Rationale(
                    "downgraded-to-individual",
                    "recommending individual testing of the constituents instead; override "
                    "deliberately if the joint hypothesis really is of interest",
                ),
            ),
        )
    if answers.all_constituents_required:
        return Recommendation(
            mode=TestingMode.CONJUNCTION,
            adjust_alpha=False,
            rationale=(
                Rationale(
                    "conjunction-all-required",
                    "the joint claim needs every constituent test to succeed, which leaves a "
                    "single opportunity to reject the joint null; the per-test alpha equals the "
                    "joint alpha with no adjustment",
                ),
            ),
        )
    rationale = [
        Rationale(
            "disjunction-any-suffices",
            "any single significant constituent rejects the joint null, so each test is an "
            "extra opportunity for a false joint rejection; lower the per-test alpha to hold "
            "the joint alpha",
        )
    ]
    if not answers.exchangeable:
        rationale.append(
            Rationale(
                "not-exchangeable",
                "constituents are not declared exchangeable; disjunction testing assumes any "
                "constituent rejection licenses the joint inference equally",
            )
        )
    return Recommendation(
        mode=TestingMode.DISJUNCTION,
        adjust_alpha=True,
        rationale=tuple(rationale),
    )
