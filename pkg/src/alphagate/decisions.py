"""Decision rules for judging a battery of p-values.

Three rules cover the three testing modes:

* :func:`decide_individual`: one decision per hypothesis at the unadjusted
  alpha; no joint verdict exists.
* :func:`decide_disjunction`: the joint null falls if at least one
  constituent is significant at its adjusted threshold (single-step
  Bonferroni/Sidak, step-down Holm, or step-up Hochberg).
* :func:`decide_conjunction`: the joint null falls only if every
  constituent is significant at the unadjusted joint alpha.

:func:`apply_bh` adds the Benjamini-Hochberg step-up procedure for screening
use; it controls the false discovery rate, not the familywise error rate,
and its per-hypothesis decisions remain individual decisions.

Throughout, a test is significant when ``p <= threshold`` (rejection at
equality). The stepwise procedures use the standard threshold sequences:
Holm and Hochberg compare the i-th smallest p-value against
``alpha / (k - i + 1)``, and Benjamini-Hochberg against ``i * q / m``.
Ties in p are ordered stably by battery position, which never changes which
hypotheses get rejected, only the bookkeeping order.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import DomainError, InvalidBattery, InvalidMethod
from .families import AdjustmentMethod, TestBattery, TestingMode
from .rates import bonferroni_adjust, sidak_adjust


class Verdict(Enum):
    REJECT = "reject"
    RETAIN = "retain"
    NOT_APPLICABLE = "not_applicable"


@dataclass(frozen=True)
class Decision:
    """Outcome of judging one battery under one testing mode.

    ``per_hypothesis`` and ``thresholds_used`` follow battery order; ``joint``
    is NOT_APPLICABLE exactly when the mode makes no joint claim. ``notes``
    carries stable advisory codes (documented in the README).
    """

    mode: TestingMode
    per_hypothesis: dict[str, Verdict]
    joint: Verdict
    thresholds_used: dict[str, float]
    notes: tuple[str, ...] = ()


_DISJUNCTION_METHODS = (
    AdjustmentMethod.BONFERRONI,
    AdjustmentMethod.SIDAK,
    AdjustmentMethod.HOLM,
    AdjustmentMethod.HOCHBERG,
)

#: Advisory note attached to every disjunction decision: constituent-level
#: outcomes under disjunction testing license only the joint inference.
NOTE_JOINT_INFERENCE_ONLY = "joint-inference-only"
NOTE_FDR_NOT_FWER = "fdr-control-not-fwer"


def _check_alpha(alpha: float, name: str) -> float:
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"{name} must lie strictly inside (0, 1), got {alpha}")
    return alpha


def _require_entries(battery: TestBattery) -> None:
    if not isinstance(battery, TestBattery):
        raise InvalidBattery(f"expected a TestBattery, got {type(battery).__name__}")
    if len(battery) == 0:
        raise InvalidBattery("battery holds no tests")


def decide_individual(battery: TestBattery, alpha_individual: float) -> Decision:
    """Judge each hypothesis on its own test; make no joint claim.

    The threshold is ``alpha_individual`` for every entry no matter how many
    entries the battery holds: each decision depends only on its own p-value,
    so adding unrelated tests can never flip an existing decision.
    """
    _require_entries(battery)
    alpha_individual = _check_alpha(alpha_individual, "alpha_individual")
    per = {hid: (Verdict.REJECT if p <= alpha_individual else Verdict.RETAIN) for hid, p in battery.entries}
    thresholds = {hid: alpha_individual for hid, _ in battery.entries}
    return Decision(
        mode=TestingMode.INDIVIDUAL,
        per_hypothesis=per,
        joint=Verdict.NOT_APPLICABLE,
        thresholds_used=thresholds,
    )


def decide_disjunction(
    battery: TestBattery, alpha_joint: float, method: AdjustmentMethod
) -> Decision:
    """Reject the joint null if any constituent clears its adjusted threshold.

    Bonferroni and Sidak are single-step: every p-value faces the same
    adjusted threshold. Holm steps down through the sorted p-values and stops
    at the first failure; Hochberg steps up and rejects everything at or
    below the largest passing position. Both use thresholds
    ``alpha_joint / (k - i + 1)`` at sorted position i.
    """
    _require_entries(battery)
    alpha_joint = _check_alpha(alpha_joint, "alpha_joint")
    if method not in _DISJUNCTION_METHODS:
        raise InvalidMethod(
            f"disjunction testing needs a FWER-controlling method "
            f"(bonferroni, sidak, holm, hochberg), got {getattr(method, 'value', method)!r}"
        )
    k = len(battery)
    entries = battery.entries

    if method in (AdjustmentMethod.BONFERRONI, AdjustmentMethod.SIDAK):
        if method is AdjustmentMethod.BONFERRONI:
            threshold = bonferroni_adjust(alpha_joint, k)
        else:
            threshold = sidak_adjust(alpha_joint, k)
        rejected = {hid for hid, p in entries if p <= threshold}
        thresholds = {hid: threshold for hid, _ in entries}
    else:
        order = sorted(range(k), key=lambda i: entries[i][1])  # stable: ties keep battery order
        steps = [alpha_joint / (k - rank) for rank in range(k)]
        if method is AdjustmentMethod.HOLM:
            n_reject = 0
            for rank, idx in enumerate(order):
                if entries[idx][1] <= steps[rank]:
                    n_reject = rank + 1
                else:
                    break
        else:  # Hochberg
            n_reject = 0
            for rank in range(k - 1, -1, -1):
                if entries[order[rank]][1] <= steps[rank]:
                    n_reject = rank + 1
                    break
        rejected = {entries[idx][0] for idx in order[:n_reject]}
        thresholds = {entries[idx][0]: steps[rank] for rank, idx in enumerate(order)}
        thresholds = {hid: thresholds[hid] for hid, _ in entries}  # back to battery order

    per = {hid: (Verdict.REJECT if hid in rejected else Verdict.RETAIN) for hid, _ in entries}
    notes = [NOTE_JOINT_INFERENCE_ONLY]
    if rejected:
        triggering = ",".join(hid for hid, _ in entries if hid in rejected)
        notes.append(f"triggered-by={triggering}")
    return Decision(
        mode=TestingMode.DISJUNCTION,
        per_hypothesis=per,
        joint=Verdict.REJECT if rejected else Verdict.RETAIN,
        thresholds_used=thresholds,
        notes=tuple(notes),
    )


def decide_conjunction(battery: TestBattery, alpha_joint: float) -> Decision:
    """Reject the joint null only if every constituent is significant.

    All-tests-significant leaves a single opportunity to reject the joint
    null, so each constituent is compared to the unadjusted ``alpha_joint``
    (the per-test level can never sit above the joint level, and raising it
    is not on offer either).
    """
    _require_entries(battery)
    alpha_joint = _check_alpha(alpha_joint, "alpha_joint")
    per = {hid: (Verdict.REJECT if p <= alpha_joint else Verdict.RETAIN) for hid, p in battery.entries}
    all_rejected = all(v is Verdict.REJECT for v in per.values())
    thresholds = {hid: alpha_joint for hid, _ in battery.entries}
    return Decision(
        mode=TestingMode.CONJUNCTION,
        per_hypothesis=per,
        joint=Verdict.REJECT if all_rejected else Verdict.RETAIN,
        thresholds_used=thresholds,
    )


def apply_bh(battery: TestBattery, q: float) -> Decision:
    """Benjamini-Hochberg step-up procedure at FDR level q.

    Sorting p ascending, find the largest position i with
    ``p_(i) <= i * q / m`` and reject positions 1..i (none when no position
    passes). The decisions are individual screening decisions (the
    procedure bounds the expected fraction of false rejections, not the
    probability of any false rejection), so no joint verdict is made.
    """
    _require_entries(battery)
    q = _check_alpha(q, "q")
    entries = battery.entries
    m = len(entries)
    order = sorted(range(m), key=lambda i: entries[i][1])
    steps = [(rank + 1) * q / m for rank in range(m)]
    n_reject = 0
    for rank in range(m - 1, -1, -1):
        if entries[order[rank]][1] <= steps[rank]:
            n_reject = rank + 1
            break
    rejected = {entries[idx][0] for idx in order[:n_reject]}
    thresholds_sorted = {entries[idx][0]: steps[rank] for rank, idx in enumerate(order)}
    per = {hid: (Verdict.REJECT if hid in rejected else Verdict.RETAIN) for hid, _ in entries}
    return Decision(
        mode=TestingMode.INDIVIDUAL,
        per_hypothesis=per,
        joint=Verdict.NOT_APPLICABLE,
        thresholds_used={hid: thresholds_sorted[hid] for hid, _ in entries},
        notes=(NOTE_FDR_NOT_FWER,),
    )
