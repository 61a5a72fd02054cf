"""Seeded Monte Carlo verification of multiple-testing error rates.

Each replication draws k z-statistics for two-group comparisons with known
unit variance (a z model rather than t keeps the estimates directly
comparable to the closed-form binomial arithmetic in :mod:`alphagate.rates`),
converts them to p-values, and judges the same battery three ways:
individual testing at the unadjusted joint alpha, disjunction testing with
the scenario's adjustment method, and conjunction testing. Accumulated over
replications this yields the familywise error rate, the expected
false-positive count, the false discovery rate, per-test rejection rates,
and joint-decision rates per mode.

Three dependence designs are supported:

* ``independent``: Z_i = delta_i * sqrt(n/2) + E_i with E_i iid N(0,1)
* ``equicorrelated(rho)``: E_i = sqrt(rho) * W + sqrt(1-rho) * G_i with a
  shared factor W, giving pairwise correlation rho
* ``shared_control``: every treatment mean is compared against one control
  mean, which induces pairwise correlation 1/2 among the statistics

Determinism contract: results are bit-identical for a fixed seed no matter
how replications are scheduled. Replications are seeded individually by a
counter-based derivation (:mod:`alphagate.rng`), work is cut into
fixed-size chunks independent of the thread count, and partial sums are
combined in chunk order.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.special import erfc, ndtri

from .errors import DomainError, InvalidScenario
from .families import AdjustmentMethod, TestingMode
from .rates import bonferroni_adjust, sidak_adjust
from .rng import normal_block, rep_seed_block

_SQRT2 = math.sqrt(2.0)

#: Replications per work unit. Fixed (never derived from the thread count)
#: so that chunk boundaries, and therefore partial-sum order, are stable.
CHUNK_REPS = 16_384


class Sides(Enum):
    ONE_SIDED = "one_sided"
    TWO_SIDED = "two_sided"


@dataclass(frozen=True)
class Design:
    """Dependence structure of the k test statistics."""

    kind: str
    rho: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("independent", "equicorrelated", "shared_control"):
            raise InvalidScenario(f"unknown design kind {self.kind!r}")
        if self.kind == "equicorrelated":
            if self.rho is None:
                raise InvalidScenario("equicorrelated design requires rho")
            rho = float(self.rho)
            if not 0.0 <= rho < 1.0:
                raise InvalidScenario(f"rho must lie in [0, 1), got {rho}")
            object.__setattr__(self, "rho", rho)
        elif self.rho is not None:
            raise InvalidScenario(f"design {self.kind!r} takes no rho")

    @classmethod
    def independent(cls) -> "Design":
        return cls("independent")

    @classmethod
    def equicorrelated(cls, rho: float) -> "Design":
        return cls("equicorrelated", rho)

    @classmethod
    def shared_control(cls) -> "Design":
        return cls("shared_control")


@dataclass(frozen=True)
class Scenario:
    """Full specification of one Monte Carlo run."""

    k: int
    null_pattern: tuple[bool, ...]
    deltas: tuple[float, ...]
    n: int
    design: Design
    sides: Sides
    alpha_joint: float
    method: AdjustmentMethod
    reps: int
    seed: int

    def __post_init__(self) -> None:
        if not isinstance(self.k, int) or isinstance(self.k, bool) or self.k < 1:
            raise InvalidScenario(f"k must be an integer >= 1, got {self.k!r}")
        object.__setattr__(self, "null_pattern", tuple(bool(b) for b in self.null_pattern))
        object.__setattr__(self, "deltas", tuple(float(d) for d in self.deltas))
        if len(self.null_pattern) != self.k:
            raise InvalidScenario(
                f"null_pattern has length {len(self.null_pattern)}, expected k={self.k}"
            )
        if len(self.deltas) != self.k:
            raise InvalidScenario(f"deltas has length {len(self.deltas)}, expected k={self.k}")
        for i, (is_null, delta) in enumerate(zip(self.null_pattern, self.deltas)):
            if not math.isfinite(delta):
                raise InvalidScenario(f"deltas[{i}] must be finite, got {delta}")
            if is_null and delta != 0.0:
                raise InvalidScenario(f"deltas[{i}] must be 0 where the null is true, got {delta}")
        if not isinstance(self.n, int) or isinstance(self.n, bool) or self.n < 2:
            raise InvalidScenario(f"n must be an integer >= 2, got {self.n!r}")
        if not isinstance(self.design, Design):
            raise InvalidScenario(f"design must be a Design, got {type(self.design).__name__}")
        if not isinstance(self.sides, Sides):
            raise InvalidScenario(f"sides must be a Sides value, got {self.sides!r}")
        if not 0.0 < self.alpha_joint < 1.0:
            raise InvalidScenario(f"alpha_joint must lie in (0, 1), got {self.alpha_joint}")
        if self.method not in (
            AdjustmentMethod.BONFERRONI,
            AdjustmentMethod.SIDAK,
            AdjustmentMethod.HOLM,
            AdjustmentMethod.HOCHBERG,
        ):
            raise InvalidScenario(
                "scenario method must control the FWER (bonferroni, sidak, holm, hochberg), "
                f"got {getattr(self.method, 'value', self.method)!r}"
            )
        if not isinstance(self.reps, int) or isinstance(self.reps, bool) or self.reps < 1:
            raise InvalidScenario(f"reps must be an integer >= 1, got {self.reps!r}")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool) or not 0 <= self.seed < 2**64:
            raise InvalidScenario(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")


@dataclass(frozen=True)
class Estimates:
    """Simulator output. ``elapsed`` is wall time and excluded from equality."""

    reps: int
    fwer_hat: float
    fwer_ci: tuple[float, float]
    fwer_events: int
    mean_false_positives: float
    fdr_hat: float
    per_test_rejection: tuple[float, ...]
    joint_reject_rate: dict[TestingMode, float]
    seed_echo: int
    elapsed: float = field(compare=False)


def normal_cdf(x):
    """Standard normal CDF, evaluated through the complementary error function.

    Accepts a scalar or an ndarray; absolute error is a few ulps (well inside
    1e-12) across the whole real line, including far tails.
    """
    result = 0.5 * erfc(-np.asarray(x, dtype=np.float64) / _SQRT2)
    return float(result) if np.isscalar(x) or np.ndim(x) == 0 else result


def p_from_z(z, sides: Sides):
    """p-value of a z statistic; one-sided tests reject for large positive z."""
    if not isinstance(sides, Sides):
        raise DomainError(f"sides must be a Sides value, got {sides!r}")
    z_arr = np.asarray(z, dtype=np.float64)
    if sides is Sides.ONE_SIDED:
        result = 0.5 * erfc(z_arr / _SQRT2)
    else:
        result = np.minimum(erfc(np.abs(z_arr) / _SQRT2), 1.0)
    return float(result) if np.isscalar(z) or np.ndim(z) == 0 else result


def wilson_ci(successes: int, trials: int, level: float) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if not isinstance(trials, int) or isinstance(trials, bool) or trials < 1:
        raise DomainError(f"trials must be an integer >= 1, got {trials!r}")
    if not isinstance(successes, int) or isinstance(successes, bool) or not 0 <= successes <= trials:
        raise DomainError(f"successes must be an integer in [0, trials], got {successes!r}")
    if not 0.0 < level < 1.0:
        raise DomainError(f"level must lie in (0, 1), got {level}")
    z = float(ndtri((1.0 + level) / 2.0))
    phat = successes / trials
    denom = 1.0 + z * z / trials
    center = (phat + z * z / (2.0 * trials)) / denom
    half = z * math.sqrt(phat * (1.0 - phat) / trials + z * z / (4.0 * trials * trials)) / denom
    lower = 0.0 if successes == 0 else max(0.0, center - half)
    upper = 1.0 if successes == trials else min(1.0, center + half)
    return (lower, upper)


def _draws_per_rep(design: Design, k: int) -> int:
    # equicorrelated spends draw 0 on the shared factor; shared_control on
    # the control-arm mean; independent uses exactly k draws
    return k if design.kind == "independent" else k + 1


def _z_block(scenario: Scenario, rep_seeds: np.ndarray) -> np.ndarray:
    """Z statistics for one batch of replications, shape (len(rep_seeds), k)."""
    k = scenario.k
    shift = np.asarray(scenario.deltas, dtype=np.float64) * math.sqrt(scenario.n / 2.0)
    kind = scenario.design.kind
    if kind == "independent":
        return shift + normal_block(rep_seeds, k)
    draws = normal_block(rep_seeds, k + 1)
    if kind == "equicorrelated":
        rho = scenario.design.rho
        return shift + math.sqrt(rho) * draws[:, :1] + math.sqrt(1.0 - rho) * draws[:, 1:]
    # shared control: Z_i = (mean_i - mean_0) / sqrt(2/n) with all group
    # means at their defining variance 1/n
    return shift + (draws[:, 1:] - draws[:, :1]) / _SQRT2


def sample_statistics(scenario: Scenario, rep_seed: int) -> tuple[float, ...]:
    """The k test statistics of a single replication, given its derived seed."""
    if not isinstance(scenario, Scenario):
        raise InvalidScenario(f"expected a Scenario, got {type(scenario).__name__}")
    row = _z_block(scenario, np.asarray([rep_seed], dtype=np.uint64))[0]
    return tuple(float(z) for z in row)


@dataclass
class _ChunkTotals:
    fwer_events: int
    v_sum: int
    fdp_sum: float
    any_reject: int
    disjunction_rejects: int
    conjunction_rejects: int
    per_test: np.ndarray


def _disjunction_joint(p: np.ndarray, alpha: float, method: AdjustmentMethod) -> np.ndarray:
    """Vectorized joint verdict of decide_disjunction for each row of p.

    Single-step rules compare the row minimum to the adjusted threshold; the
    joint verdict of Holm coincides with Bonferroni because Holm's first
    step is the Bonferroni threshold. Hochberg needs the sorted row. The
    thresholds come from the same functions decide_disjunction uses, so the
    two routes agree bit for bit.
    """
    k = p.shape[1]
    if method in (AdjustmentMethod.BONFERRONI, AdjustmentMethod.HOLM):
        return p.min(axis=1) <= bonferroni_adjust(alpha, k)
    if method is AdjustmentMethod.SIDAK:
        return p.min(axis=1) <= sidak_adjust(alpha, k)
    sorted_p = np.sort(p, axis=1)
    steps = alpha / np.arange(k, 0, -1, dtype=np.float64)
    return (sorted_p <= steps).any(axis=1)


def simulate(scenario: Scenario, *, threads: int = 1) -> Estimates:
    """Run the scenario and estimate its error rates.

    ``fwer_hat`` is the fraction of replications with at least one rejected
    true null under individual testing at the unadjusted joint alpha, with a
    95% Wilson interval; ``fdr_hat`` averages V/max(R, 1) per replication
    (0/0 counts as 0). ``joint_reject_rate`` reports, per mode, how often
    the joint decision was a rejection; for individual mode this is the
    rate of at least one rejection of any kind, i.e. what an unadjusted
    disjunction reading of the same results would conclude.
    """
    if not isinstance(scenario, Scenario):
        raise InvalidScenario(f"expected a Scenario, got {type(scenario).__name__}")
    if not isinstance(threads, int) or isinstance(threads, bool) or threads < 1:
        raise DomainError(f"threads must be an integer >= 1, got {threads!r}")

    start_time = time.perf_counter()
    k, reps, alpha = scenario.k, scenario.reps, scenario.alpha_joint
    nulls = np.asarray(scenario.null_pattern, dtype=bool)
    any_nulls = bool(nulls.any())

    def run_chunk(chunk_index: int) -> _ChunkTotals:
        start = chunk_index * CHUNK_REPS
        count = min(CHUNK_REPS, reps - start)
        seeds = rep_seed_block(scenario.seed, start, count)
        p = p_from_z(_z_block(scenario, seeds), scenario.sides)
        rejected = p <= alpha
        r = rejected.sum(axis=1)
        v = rejected[:, nulls].sum(axis=1) if any_nulls else np.zeros(count, dtype=np.int64)
        return _ChunkTotals(
            fwer_events=int((v >= 1).sum()),
            v_sum=int(v.sum()),
            fdp_sum=float(np.sum(v / np.maximum(r, 1))),
            any_reject=int((r >= 1).sum()),
            disjunction_rejects=int(_disjunction_joint(p, alpha, scenario.method).sum()),
            conjunction_rejects=int(rejected.all(axis=1).sum()),
            per_test=rejected.sum(axis=0, dtype=np.int64),
        )

    n_chunks = (reps + CHUNK_REPS - 1) // CHUNK_REPS
    if threads == 1 or n_chunks == 1:
        chunk_totals = [run_chunk(i) for i in range(n_chunks)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunk_totals = list(pool.map(run_chunk, range(n_chunks)))

    # reduce in chunk order so float accumulation is schedule-independent
    fwer_events = v_sum = any_reject = disj = conj = 0
    fdp_sum = 0.0
    per_test = np.zeros(k, dtype=np.int64)
    for totals in chunk_totals:
        fwer_events += totals.fwer_events
        v_sum += totals.v_sum
        fdp_sum += totals.fdp_sum
        any_reject += totals.any_reject
        disj += totals.disjunction_rejects
        conj += totals.conjunction_rejects
        per_test += totals.per_test

    return Estimates(
        reps=reps,
        fwer_hat=fwer_events / reps,
        fwer_ci=wilson_ci(fwer_events, reps, 0.95),
        fwer_events=fwer_events,
        mean_false_positives=v_sum / reps,
        fdr_hat=fdp_sum / reps,
        per_test_rejection=tuple(float(c) / reps for c in per_test),
        joint_reject_rate={
            TestingMode.INDIVIDUAL: any_reject / reps,
            TestingMode.DISJUNCTION: disj / reps,
            TestingMode.CONJUNCTION: conj / reps,
        },
        seed_echo=scenario.seed,
        elapsed=time.perf_counter() - start_time,
    )
