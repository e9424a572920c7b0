"""Distance-to-expected-line detection.

Per pair, clean delays (suspect, reference) move along a straight line
as the die-wide variation component varies; the line is pinned by the
nominal delay point and one deterministic inter-die-shifted sample.
Within-die variation scatters points off the line a little, a payload
gate on the suspect path pushes them off a lot.  The detection metric is
the perpendicular distance normalized by the nominal delay magnitude,
compared per pair against a threshold calibrated on Trojan-free
instances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import CalibrationError

Point = tuple[float, float]


@dataclass(frozen=True)
class ExpectedLine:
    nominal: Point  # (P_s, P_r) with no variation
    sample: Point  # (P_s, P_r) at the calibration inter-die offset
    alpha: float  # slope
    beta: float  # intercept

    def residual(self, point: Point) -> float:
        return self.alpha * point[0] - point[1] + self.beta


def fit_expected_line(nominal: Point, sample: Point) -> ExpectedLine:
    """Line through the nominal and shifted-sample delay points."""
    dx = sample[0] - nominal[0]
    if dx == 0.0:
        raise CalibrationError(
            "degenerate line sample (suspect delay did not move); "
            "recalibrate with a larger inter-die offset"
        )
    alpha = (sample[1] - nominal[1]) / dx
    beta = nominal[1] - alpha * nominal[0]
    return ExpectedLine(nominal=nominal, sample=sample, alpha=alpha, beta=beta)


def distance_to_line(line: ExpectedLine, point: Point) -> float:
    """Perpendicular distance from a measured delay point to the line."""
    return abs(line.residual(point)) / math.sqrt(1.0 + line.alpha**2)


def detection_metric(d: float, nominal: Point) -> float:
    """Distance normalized by the nominal delay vector's magnitude."""
    norm = math.hypot(nominal[0], nominal[1])
    if norm == 0.0:
        raise CalibrationError("nominal delay point is (0, 0); malformed pair")
    return d / norm


def pair_metric(line: ExpectedLine, point: Point) -> float:
    return detection_metric(distance_to_line(line, point), line.nominal)


@dataclass(frozen=True)
class ThresholdSet:
    dt: dict[str, float]  # pair id -> detection threshold
    fpr_budget: float


def nearest_rank(values: list[float], q: float) -> float:
    """Classic nearest-rank quantile: the ceil(q*n)-th smallest value."""
    if not values:
        raise CalibrationError("no samples to take a quantile of")
    ordered = sorted(values)
    k = max(1, math.ceil(q * len(ordered)))
    return ordered[k - 1]


def calibrate(
    clean_dms: dict[str, list[float]],
    fpr_budget: float = 0.03,
    min_samples: int = 100,
) -> ThresholdSet:
    """Per-pair thresholds: the (1 - budget) nearest-rank quantile of the
    Trojan-free detection metrics."""
    if not 0.0 <= fpr_budget < 1.0:
        raise CalibrationError("fpr budget must be in [0, 1)")
    dt: dict[str, float] = {}
    for pair_id, dms in clean_dms.items():
        if len(dms) < min_samples:
            raise CalibrationError(
                f"pair {pair_id}: {len(dms)} calibration samples < {min_samples}"
            )
        dt[pair_id] = nearest_rank(dms, 1.0 - fpr_budget)
    return ThresholdSet(dt=dt, fpr_budget=fpr_budget)


@dataclass(frozen=True)
class IcVerdict:
    instance: str
    trojan: bool
    violating_pairs: tuple[str, ...]


def classify_ic(
    dms: dict[str, float], thresholds: ThresholdSet, instance: str = ""
) -> IcVerdict:
    """Trojan-free iff every pair's metric is strictly below its
    threshold; otherwise the violating pairs localize the suspicion."""
    violating = []
    for pair_id, dt in thresholds.dt.items():
        if pair_id not in dms:
            raise CalibrationError(f"no measurement for pair {pair_id}")
        if not dms[pair_id] < dt:
            violating.append(pair_id)
    return IcVerdict(
        instance=instance, trojan=bool(violating), violating_pairs=tuple(violating)
    )


@dataclass
class DetectionReport:
    tpr: float | None
    fpr: float | None
    clean_total: int
    trojan_total: int
    per_pair_tpr: dict[str, float] = field(default_factory=dict)
    per_pair_fpr: dict[str, float] = field(default_factory=dict)
    config: dict = field(default_factory=dict)

    @property
    def worst_pair_fpr(self) -> float:
        """Highest single-pair false-positive rate (worst-case pair)."""
        return max(self.per_pair_fpr.values(), default=0.0)

    @property
    def best_pair_tpr(self) -> float:
        return max(self.per_pair_tpr.values(), default=0.0)

    def to_dict(self) -> dict:
        return {
            "tpr": self.tpr,
            "fpr": self.fpr,
            "clean_total": self.clean_total,
            "trojan_total": self.trojan_total,
            "worst_pair_fpr": self.worst_pair_fpr,
            "best_pair_tpr": self.best_pair_tpr,
            "per_pair_tpr": self.per_pair_tpr,
            "per_pair_fpr": self.per_pair_fpr,
            "config": self.config,
        }


def evaluate(
    clean_verdicts: list[IcVerdict],
    trojan_verdicts: list[IcVerdict],
    pair_ids: list[str] | None = None,
    config: dict | None = None,
) -> DetectionReport:
    """Score verdict populations.

    The whole-IC rates use the all-pairs rule (any violating pair flags
    the IC); the per-pair rates report each pair in isolation, which is
    what a worst-case-pair summary reads from.
    """
    if not clean_verdicts and not trojan_verdicts:
        raise CalibrationError("no verdicts to evaluate")
    pairs = list(pair_ids) if pair_ids else sorted(
        {p for v in clean_verdicts + trojan_verdicts for p in v.violating_pairs}
    )
    tpr = (
        sum(v.trojan for v in trojan_verdicts) / len(trojan_verdicts)
        if trojan_verdicts
        else None
    )
    fpr = (
        sum(v.trojan for v in clean_verdicts) / len(clean_verdicts)
        if clean_verdicts
        else None
    )
    per_pair_tpr = {}
    per_pair_fpr = {}
    for pid in pairs:
        if trojan_verdicts:
            per_pair_tpr[pid] = sum(
                pid in v.violating_pairs for v in trojan_verdicts
            ) / len(trojan_verdicts)
        if clean_verdicts:
            per_pair_fpr[pid] = sum(
                pid in v.violating_pairs for v in clean_verdicts
            ) / len(clean_verdicts)
    return DetectionReport(
        tpr=tpr,
        fpr=fpr,
        clean_total=len(clean_verdicts),
        trojan_total=len(trojan_verdicts),
        per_pair_tpr=per_pair_tpr,
        per_pair_fpr=per_pair_fpr,
        config=config or {},
    )


def attacker_bypass_probability(net_count: int, symmetric_counts: list[int]) -> float:
    """Chance an attacker guesses the monitored pair: one over the net
    count times the total number of symmetric partners."""
    if net_count < 1:
        raise ValueError("net count must be >= 1")
    if not symmetric_counts:
        raise ValueError("need at least one symmetric-path count")
    if any(k < 1 for k in symmetric_counts):
        raise ValueError("symmetric-path counts must be >= 1")
    return 1.0 / (net_count * sum(symmetric_counts))
