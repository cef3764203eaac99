"""
Summability Analysis for FuzzyCesaro
Finite-horizon limit estimation of s(t) and sigma(t), and the combined report
that records convergence, Cesaro summability and Tauberian consistency
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from config.settings import settings
from core.fuzzy import FuzzyNumber, metric_d, norm
from core.functions import FuzzyFunction
from core.integration import IntegralTrace, SamplingPlan, build_trace
from core.tauberian import (
    CheckerOutcome, check_condition_doublestar, check_condition_star, check_slow_decrease,
)

MIN_SAMPLES = 8

Series = Sequence[Tuple[float, FuzzyNumber]]


class LimitEstimationError(ValueError):
    """Series too short or not sampled on strictly increasing t"""


class LimitStatus(str, Enum):
    CONVERGED = "converged"
    DIVERGED = "diverged"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class LimitEstimate:
    """Finite-horizon verdict on a fuzzy-valued series"""
    status: LimitStatus
    value: Optional[FuzzyNumber]
    residual: float
    scale: float
    tolerance: float
    checkpoints: Tuple[float, ...] = ()

    @property
    def converged(self) -> bool:
        return self.status == LimitStatus.CONVERGED

    def to_dict(self) -> Dict:
        data = {
            "status": self.status.value,
            "residual": self.residual,
            "scale": self.scale,
            "tolerance": self.tolerance,
            "checkpoints": list(self.checkpoints),
        }
        if self.value is not None:
            data["value"] = self.value.to_dict()
        return data


def _checkpoint_indices(t: np.ndarray) -> List[int]:
    """Samples nearest to t_end / 2^k, ascending, until the index repeats"""
    indices: List[int] = []
    target = float(t[-1])
    while target >= t[0]:
        right = int(np.searchsorted(t, target))
        if right >= t.size:
            index = t.size - 1
        elif right == 0 or t[right] - target <= target - t[right - 1]:
            index = right
        else:
            index = right - 1
        if indices and index == indices[-1]:
            break
        indices.append(index)
        target /= 2.0
        if target == 0.0:
            break
    return indices[::-1]


def _strictly_increasing(values: Sequence[float]) -> bool:
    return all(a < b for a, b in zip(values, values[1:]))


def estimate_limit(
    series: Series, tol: float, divergence_threshold: Optional[float] = None
) -> LimitEstimate:
    """
    Classify a sampled series as converged, diverged or inconclusive

    Checkpoints are taken at t_end / 2^k. The series converges when the last
    D-increment between checkpoints is within tol and has not grown since the
    one before; it diverges when the sup-norm grows strictly over the last four
    checkpoints and either passes the divergence threshold or the increments
    grow strictly as well.
    """
    if not tol > 0:
        raise LimitEstimationError(f"Tolerance must be positive, got {tol}")
    if len(series) < MIN_SAMPLES:
        raise LimitEstimationError(f"Need at least {MIN_SAMPLES} samples, got {len(series)}")
    t = np.array([point for point, _ in series], dtype=float)
    if not np.all(np.diff(t) > 0):
        raise LimitEstimationError("Series abscissae must be strictly increasing")
    threshold = settings.divergence_threshold if divergence_threshold is None else divergence_threshold

    indices = _checkpoint_indices(t)
    values = [series[i][1] for i in indices]
    increments = [metric_d(a, b) for a, b in zip(values, values[1:])]
    magnitudes = [norm(v) for v in values]
    checkpoints = tuple(float(t[i]) for i in indices)
    scale = float(t[-1])
    residual = increments[-1] if increments else 0.0

    if len(increments) >= 2 and residual <= tol and increments[-2] >= increments[-1]:
        status = LimitStatus.CONVERGED
    elif (len(magnitudes) >= 4 and _strictly_increasing(magnitudes[-4:])
          and (magnitudes[-1] > threshold or _strictly_increasing(increments[-3:]))):
        status = LimitStatus.DIVERGED
    else:
        status = LimitStatus.INCONCLUSIVE

    logger.debug(f"Limit estimate: {status.value}, residual={residual:.3e} over {len(indices)} checkpoints")
    return LimitEstimate(
        status=status,
        value=series[-1][1] if status == LimitStatus.CONVERGED else None,
        residual=float(residual),
        scale=scale,
        tolerance=float(tol),
        checkpoints=checkpoints,
    )


@dataclass
class AnalysisReport:
    """Combined verdict for one function"""
    f_name: str
    plan: SamplingPlan
    integral_limit: LimitEstimate
    cesaro_limit: LimitEstimate
    checker_outcomes: List[CheckerOutcome] = field(default_factory=list)
    mode: str = "integral"
    notes: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict:
        return {
            "function": self.f_name,
            "mode": self.mode,
            "plan": self.plan.model_dump(),
            "integral_limit": self.integral_limit.to_dict(),
            "cesaro_limit": self.cesaro_limit.to_dict(),
            "checkers": [outcome.to_dict() for outcome in self.checker_outcomes],
            "notes": list(self.notes),
        }


def _consistency_notes(
    integral_limit: LimitEstimate, cesaro_limit: LimitEstimate, tauberian: List[CheckerOutcome]
) -> List[str]:
    notes = []
    if integral_limit.converged and cesaro_limit.converged:
        gap = metric_d(integral_limit.value, cesaro_limit.value)
        bound = integral_limit.tolerance + cesaro_limit.tolerance
        if gap <= bound:
            notes.append(f"regularity: both limits agree within {bound:g} (D = {gap:.3e})")
        else:
            notes.append(f"regularity-inconsistent: limits differ by D = {gap:.3e} > {bound:g}")
    elif integral_limit.converged:
        notes.append("regularity-inconsistent: the limit converged but the Cesaro mean did not at this scale")

    if cesaro_limit.converged and tauberian:
        if all(outcome.passed for outcome in tauberian) and not integral_limit.converged:
            notes.append("tauberian-inconsistent: summable with no counterexample to the Tauberian "
                         "conditions, yet the limit did not converge at this scale")
        elif any(not outcome.passed for outcome in tauberian):
            failed = ", ".join(outcome.name for outcome in tauberian if not outcome.passed)
            notes.append(f"tauberian: counterexample found for {failed}")

    for note in notes:
        if "inconsistent" in note:
            logger.warning(note)
    return notes


def _tauberian_outcomes(trace: IntegralTrace) -> List[CheckerOutcome]:
    """Slow decrease and the (*)/(**) pair at the configured defaults"""
    eps, t0, stride = settings.checker_eps, settings.checker_t0, settings.scan_stride
    return [
        check_slow_decrease(trace, eps, settings.checker_lambda, t0, stride),
        check_condition_star(trace, eps, settings.checker_lambda, t0, stride),
        check_condition_doublestar(trace, eps, settings.checker_ell, t0, stride),
    ]


def analyze_trace(trace: IntegralTrace, tol: Optional[float] = None) -> AnalysisReport:
    """Limit estimates for s and sigma from an existing trace"""
    tol = settings.limit_tol if tol is None else tol
    integral_limit = estimate_limit(trace.s_series(), tol)
    cesaro_limit = estimate_limit(trace.sigma_series(), tol)
    checkers = _tauberian_outcomes(trace) if cesaro_limit.converged else []
    return AnalysisReport(
        f_name=trace.f_name,
        plan=trace.plan,
        integral_limit=integral_limit,
        cesaro_limit=cesaro_limit,
        checker_outcomes=checkers,
        notes=_consistency_notes(integral_limit, cesaro_limit, checkers),
    )


def classify(f: FuzzyFunction, plan: Optional[SamplingPlan] = None, tol: Optional[float] = None) -> AnalysisReport:
    """Build the trace of f and classify both the improper integral and its Cesaro mean"""
    trace = build_trace(f, plan)
    report = analyze_trace(trace, tol)
    logger.info(f"{f.name}: integral {report.integral_limit.status.value}, "
                f"Cesaro mean {report.cesaro_limit.status.value}")
    return report


def cesaro_mean_of_function(f: FuzzyFunction, plan: Optional[SamplingPlan] = None) -> List[Tuple[float, FuzzyNumber]]:
    """(1/t) * integral of f over [0, t] at the positive plan samples"""
    return build_trace(f, plan).mean_series()


def classify_function(
    f: FuzzyFunction, plan: Optional[SamplingPlan] = None, tol: Optional[float] = None
) -> AnalysisReport:
    """
    Function mode: the limit of f(t) itself and of its Cesaro mean (1/t) s(t)

    The Tauberian checkers then run on f's own samples in place of s.
    """
    tol = settings.limit_tol if tol is None else tol
    trace = build_trace(f, plan)
    pointwise = IntegralTrace(trace.plan, f.name, f.grid, trace.t, trace.f_lower, trace.f_upper)

    function_limit = estimate_limit(pointwise.s_series(), tol)
    cesaro_limit = estimate_limit(trace.mean_series(), tol)
    checkers = _tauberian_outcomes(pointwise) if cesaro_limit.converged else []
    report = AnalysisReport(
        f_name=f.name,
        plan=trace.plan,
        integral_limit=function_limit,
        cesaro_limit=cesaro_limit,
        checker_outcomes=checkers,
        mode="function",
        notes=_consistency_notes(function_limit, cesaro_limit, checkers),
    )
    logger.info(f"{f.name}: f(t) {function_limit.status.value}, "
                f"Cesaro mean {cesaro_limit.status.value}")
    return report
