"""
Tauberian Condition Checkers for FuzzyCesaro
Finite-scale falsifiers for the averaged conditions (*) and (**), forward and
backward slow decrease, and the Landau-type one-sided condition x*f(x) >= u
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np
from loguru import logger

from config.settings import settings, CHECKER_NAMES
from core.fuzzy import FuzzyNumber, is_negative, norm, validate
from core.functions import FuzzyFunction
from core.integration import (
    IntegralTrace, SamplingPlan, deferred_means_backward, deferred_means_forward,
)

SCALE_NOTE = "finite-scale falsifier: no-counterexample is not a proof of the asymptotic condition"


class CheckerError(ValueError):
    """Invalid checker parameters or an empty scan range"""


class CheckerStatus(str, Enum):
    """Checker verdicts"""
    NO_COUNTEREXAMPLE = "no-counterexample"
    COUNTEREXAMPLE = "counterexample"


@dataclass(frozen=True)
class Witness:
    """First violation in scan order; margin < 0 is the amount of violation"""
    t: float
    alpha: float
    margin: float
    endpoint: str
    x: Optional[float] = None

    def to_dict(self) -> Dict:
        data = {"t": self.t, "alpha": self.alpha, "margin": self.margin, "endpoint": self.endpoint}
        if self.x is not None:
            data["x"] = self.x
        return data


@dataclass(frozen=True)
class CheckerOutcome:
    """Verdict of one checker run with its parameters echoed"""
    name: str
    params: Dict
    outcome: CheckerStatus
    witness: Optional[Witness] = None
    notes: Tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.outcome == CheckerStatus.COUNTEREXAMPLE:
            if self.witness is None or not self.witness.margin < 0:
                raise ValueError(f"{self.name}: a counterexample needs a witness with negative margin")

    @property
    def passed(self) -> bool:
        return self.outcome == CheckerStatus.NO_COUNTEREXAMPLE

    def to_dict(self) -> Dict:
        data = {
            "name": self.name,
            "params": self.params,
            "outcome": self.outcome.value,
            "notes": list(self.notes),
        }
        if self.witness is not None:
            data["witness"] = self.witness.to_dict()
        return data


# Scan helpers

def _require_positive_eps(eps: float) -> float:
    if not (math.isfinite(eps) and eps > 0):
        raise CheckerError(f"eps must be positive, got {eps}")
    return float(eps)


def _scan_rows(trace: IntegralTrace, t0: float, stride: int, t_limit: float) -> np.ndarray:
    """Decimated sample indices with t0 < t <= t_limit"""
    if stride < 1:
        raise CheckerError(f"stride must be >= 1, got {stride}")
    rows = np.arange(0, trace.t.size, stride)
    t = trace.t[rows]
    rows = rows[(t > t0) & (t > 0) & (t <= t_limit)]
    if rows.size == 0:
        raise CheckerError(f"Empty scan range: no sampled t in ({t0}, {t_limit}]")
    return rows


def _first_violation(margin_lower: np.ndarray, margin_upper: np.ndarray):
    """(row, level, endpoint, margin) of the first negative margin, rows then levels"""
    bad = (margin_lower < 0) | (margin_upper < 0)
    if not bad.any():
        return None
    row, level = np.argwhere(bad)[0]
    if margin_lower[row, level] < 0:
        return int(row), int(level), "lower", float(margin_lower[row, level])
    return int(row), int(level), "upper", float(margin_upper[row, level])


def _window_extreme(values: np.ndarray, starts: np.ndarray, ends: np.ndarray, ufunc) -> np.ndarray:
    """ufunc-reduction of values[starts[k]:ends[k]] per row k (windows may overlap)"""
    padded = np.vstack([values, values[-1:]])
    bounds = np.empty(2 * starts.size, dtype=np.intp)
    bounds[0::2] = starts
    bounds[1::2] = ends
    return ufunc.reduceat(padded, bounds, axis=0)[0::2]


def _scan_params(trace: IntegralTrace, rows: np.ndarray, eps: float, t0: float, stride: int, **extra) -> Dict:
    params = {"eps": eps, "t0": float(t0)}
    params.update(extra)
    params.update({
        "range": [float(trace.t[rows[0]]), float(trace.t[rows[-1]])],
        "stride": int(stride),
        "scanned": int(rows.size),
        "resolution": float(trace.plan.step),
    })
    return params


def _outcome(name: str, params: Dict, violation, witness_builder) -> CheckerOutcome:
    if violation is None:
        outcome = CheckerOutcome(name, params, CheckerStatus.NO_COUNTEREXAMPLE, notes=(SCALE_NOTE,))
    else:
        outcome = CheckerOutcome(name, params, CheckerStatus.COUNTEREXAMPLE,
                                 witness=witness_builder(violation), notes=(SCALE_NOTE,))
    logger.info(f"{name}: {outcome.outcome.value} (eps={params.get('eps')}, range={params.get('range')})")
    return outcome


def _defaults(t0: Optional[float], stride: Optional[int]) -> Tuple[float, int]:
    return (settings.checker_t0 if t0 is None else float(t0),
            settings.scan_stride if stride is None else int(stride))


# Averaged conditions

def check_condition_star(
    trace: IntegralTrace, eps: float, lam: float, t0: Optional[float] = None, stride: Optional[int] = None
) -> CheckerOutcome:
    """Scan (1/(lambda t - t)) * int_t^{lambda t} s >= s(t) - eps-bar"""
    eps = _require_positive_eps(eps)
    if not lam > 1:
        raise CheckerError(f"lambda must exceed 1, got {lam}")
    t0, stride = _defaults(t0, stride)

    rows = _scan_rows(trace, t0, stride, trace.t_max / lam)
    t = trace.t[rows]
    mean_lower, mean_upper = deferred_means_forward(trace, t, lam)
    margin_lower = mean_lower - (trace.s_lower[rows] - eps)
    margin_upper = mean_upper - (trace.s_upper[rows] - eps)

    params = _scan_params(trace, rows, eps, t0, stride, **{"lambda": float(lam)})
    def witness(violation):
        row, level, endpoint, margin = violation
        return Witness(float(t[row]), float(trace.grid.levels[level]), margin, endpoint)

    return _outcome(CHECKER_NAMES["star"], params, _first_violation(margin_lower, margin_upper), witness)


def check_condition_doublestar(
    trace: IntegralTrace, eps: float, ell: float, t0: Optional[float] = None, stride: Optional[int] = None
) -> CheckerOutcome:
    """Scan (1/(t - ell t)) * int_{ell t}^t s <= s(t) + eps-bar"""
    eps = _require_positive_eps(eps)
    if not 0 < ell < 1:
        raise CheckerError(f"ell must lie in (0, 1), got {ell}")
    t0, stride = _defaults(t0, stride)

    rows = _scan_rows(trace, t0, stride, trace.t_max)
    t = trace.t[rows]
    mean_lower, mean_upper = deferred_means_backward(trace, t, ell)
    margin_lower = (trace.s_lower[rows] + eps) - mean_lower
    margin_upper = (trace.s_upper[rows] + eps) - mean_upper

    params = _scan_params(trace, rows, eps, t0, stride, ell=float(ell))
    def witness(violation):
        row, level, endpoint, margin = violation
        return Witness(float(t[row]), float(trace.grid.levels[level]), margin, endpoint)

    return _outcome(CHECKER_NAMES["doublestar"], params,
                    _first_violation(margin_lower, margin_upper), witness)


# Slow decrease

def _pair_witness(trace: IntegralTrace, i: int, window: np.ndarray, eps: float, forward: bool) -> Witness:
    """First violating x inside one window of the pair scan"""
    if forward:
        # s(x) - s(t) + eps
        margin_lower = trace.s_lower[window] - trace.s_lower[i] + eps
        margin_upper = trace.s_upper[window] - trace.s_upper[i] + eps
    else:
        # s(t) - s(x) + eps
        margin_lower = trace.s_lower[i] - trace.s_lower[window] + eps
        margin_upper = trace.s_upper[i] - trace.s_upper[window] + eps
    row, level, endpoint, margin = _first_violation(margin_lower, margin_upper)
    return Witness(float(trace.t[i]), float(trace.grid.levels[level]), margin, endpoint,
                   x=float(trace.t[window[row]]))


def check_slow_decrease(
    trace: IntegralTrace, eps: float, lam: float, t0: Optional[float] = None, stride: Optional[int] = None
) -> CheckerOutcome:
    """
    Scan s(x) >= s(t) - eps-bar for t0 < t < x <= lambda t

    Endpoint-wise this is min over the window of s(x) - s(t) >= -eps for every
    alpha and both endpoint families. t runs over the decimated grid, x over
    every sample of (t, lambda t].
    """
    eps = _require_positive_eps(eps)
    if not lam > 1:
        raise CheckerError(f"lambda must exceed 1, got {lam}")
    t0, stride = _defaults(t0, stride)

    rows = _scan_rows(trace, t0, stride, trace.t_max)
    starts = rows + 1
    ends = np.searchsorted(trace.t, lam * trace.t[rows], side="right")
    keep = ends > starts
    rows, starts, ends = rows[keep], starts[keep], ends[keep]
    if rows.size == 0:
        raise CheckerError("Empty scan range: no sample pairs with t < x <= lambda t")

    window_min_lower = _window_extreme(trace.s_lower, starts, ends, np.minimum)
    window_min_upper = _window_extreme(trace.s_upper, starts, ends, np.minimum)
    margin_lower = window_min_lower - trace.s_lower[rows] + eps
    margin_upper = window_min_upper - trace.s_upper[rows] + eps

    params = _scan_params(trace, rows, eps, t0, stride, **{"lambda": float(lam)})
    def witness(violation):
        k = violation[0]
        return _pair_witness(trace, int(rows[k]), np.arange(starts[k], ends[k]), eps, forward=True)

    return _outcome(CHECKER_NAMES["slow_decrease"], params,
                    _first_violation(margin_lower, margin_upper), witness)


def check_backward_slow_decrease(
    trace: IntegralTrace, eps: float, lam: float, t0: Optional[float] = None, stride: Optional[int] = None
) -> CheckerOutcome:
    """Scan s(t) >= s(x) - eps-bar for lambda t < x <= t, with 0 < lambda < 1"""
    eps = _require_positive_eps(eps)
    if not 0 < lam < 1:
        raise CheckerError(f"backward lambda must lie in (0, 1), got {lam}")
    t0, stride = _defaults(t0, stride)

    rows = _scan_rows(trace, t0, stride, trace.t_max)
    starts = np.searchsorted(trace.t, lam * trace.t[rows], side="right")
    ends = rows + 1

    window_max_lower = _window_extreme(trace.s_lower, starts, ends, np.maximum)
    window_max_upper = _window_extreme(trace.s_upper, starts, ends, np.maximum)
    margin_lower = trace.s_lower[rows] - window_max_lower + eps
    margin_upper = trace.s_upper[rows] - window_max_upper + eps

    params = _scan_params(trace, rows, eps, t0, stride, **{"lambda": float(lam)})
    def witness(violation):
        k = violation[0]
        return _pair_witness(trace, int(rows[k]), np.arange(starts[k], ends[k]), eps, forward=False)

    return _outcome(CHECKER_NAMES["backward_slow_decrease"], params,
                    _first_violation(margin_lower, margin_upper), witness)


# Landau-type one-sided condition

def check_landau(
    f: FuzzyFunction,
    u: FuzzyNumber,
    x0: float = 0.0,
    scan: Optional[SamplingPlan] = None,
    eps: Optional[float] = None,
) -> CheckerOutcome:
    """
    Scan x*f(x) >= u for sampled x in (x0, t_max]

    u must be a negative constant fuzzy number; 0-bar is accepted as a flagged
    boundary case. The outcome also reports H = -u^-_0 and the slow-decrease
    window lambda = exp(eps/H) that the condition implies.
    """
    scan = scan or SamplingPlan()
    eps = _require_positive_eps(settings.checker_eps if eps is None else eps)
    if x0 < 0:
        raise CheckerError(f"x0 must be nonnegative, got {x0}")
    if u.grid != f.grid:
        raise CheckerError("u and f use different alpha grids")
    report = validate(u)
    if not report.ok:
        raise CheckerError(f"u is not a fuzzy number: {report.message}")

    notes: List[str] = [SCALE_NOTE]
    boundary = False
    if not is_negative(u):
        if norm(u) != 0.0:
            raise CheckerError("u must be a negative fuzzy number (u+ < 0 at every level) or 0-bar")
        boundary = True
        notes.append("u = 0-bar accepted as a boundary case: it is not negative in the strict sense")
        logger.warning("Landau check with u = 0-bar (boundary case)")

    x = scan.abscissae()
    x = x[x > x0]
    if x.size == 0:
        raise CheckerError(f"Empty scan range: no sampled x in ({x0}, {scan.t_max}]")

    lower, upper = f.sample(x)
    column = x[:, None]
    margin_lower = column * lower - u.lower
    margin_upper = column * upper - u.upper

    budget = -float(u.lower[0])
    implied_lambda = math.exp(eps / budget) if budget > 0 else None
    if implied_lambda is None:
        notes.append("H = 0: the slow-decrease bound holds for every lambda > 1")

    params = {
        "eps": eps,
        "x0": float(x0),
        "range": [float(x[0]), float(x[-1])],
        "stride": 1,
        "scanned": int(x.size),
        "resolution": float(scan.step),
        "H": budget,
        "implied_lambda": implied_lambda,
        "boundary_case": boundary,
    }

    violation = _first_violation(margin_lower, margin_upper)
    if violation is None:
        outcome = CheckerOutcome(CHECKER_NAMES["landau"], params, CheckerStatus.NO_COUNTEREXAMPLE,
                                 notes=tuple(notes))
    else:
        row, level, endpoint, margin = violation
        witness = Witness(float(x[row]), float(f.grid.levels[level]), margin, endpoint, x=float(x[row]))
        outcome = CheckerOutcome(CHECKER_NAMES["landau"], params, CheckerStatus.COUNTEREXAMPLE,
                                 witness=witness, notes=tuple(notes))
    logger.info(f"landau: {outcome.outcome.value} for {f.name} (H={budget})")
    return outcome
