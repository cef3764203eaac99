"""
Fuzzy Integration Engine for FuzzyCesaro
Endpoint-wise fuzzy Riemann integration, the integral function s(t),
Cesaro means sigma(t) and the deferred means over [t, lambda*t] and [ell*t, t]
"""

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field

from config.settings import settings
from core.fuzzy import (
    AlphaGrid, FuzzyNumber, add, find_level_violation, metric_d, scale,
)
from core.expressions import evaluate, parse
from core.functions import ClosedForm, FuzzyFunction

Endpoints = Tuple[np.ndarray, np.ndarray]


class IntegrationError(ArithmeticError):
    """Numeric failure while integrating"""


class QuadratureError(IntegrationError):
    """Adaptive quadrature exhausted its node budget"""


class RangeError(ValueError):
    """Abscissa or window parameter outside the trace"""


class SamplingPlan(BaseModel):
    """Uniform t-grid 0 = t_0 < ... < t_n = t_max and quadrature tolerance"""

    model_config = ConfigDict(frozen=True)

    t_max: float = Field(default_factory=lambda: settings.t_max, gt=0.0, allow_inf_nan=False)
    n_steps: int = Field(default_factory=lambda: settings.n_steps, ge=2)
    quad_tol: float = Field(default_factory=lambda: settings.quad_tol, gt=0.0, allow_inf_nan=False)

    @property
    def step(self) -> float:
        return self.t_max / self.n_steps

    def abscissae(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.n_steps + 1)


# Adaptive quadrature

def _simpson_round(f: FuzzyFunction, a: np.ndarray, b: np.ndarray):
    """Evaluate the five Boole nodes of every active panel in one block"""
    mid = 0.5 * (a + b)
    nodes = np.stack([a, 0.5 * (a + mid), mid, 0.5 * (mid + b), b])
    lower, upper = f.sample(nodes.reshape(-1))
    shape = (5, a.size, len(f.grid))
    return lower.reshape(shape), upper.reshape(shape), mid


def _panel_rules(values: np.ndarray, width: np.ndarray):
    """Whole-panel Simpson, two-half Simpson and the Boole combination"""
    f0, f1, f2, f3, f4 = values
    w = width[:, None]
    whole = w / 6.0 * (f0 + 4.0 * f2 + f4)
    halves = w / 12.0 * (f0 + 4.0 * f1 + 2.0 * f2 + 4.0 * f3 + f4)
    # positive weights keep alpha-monotonicity of the integrand
    boole = w / 90.0 * (7.0 * f0 + 32.0 * f1 + 12.0 * f2 + 32.0 * f3 + 7.0 * f4)
    return whole, halves, boole


def integrate_panels(
    f: FuzzyFunction, a: np.ndarray, b: np.ndarray, tol: float
) -> Endpoints:
    """
    Adaptive Simpson over many panels at once

    Each panel [a_k, b_k] is refined by bisection until both endpoint rules
    agree to 15*tol at every alpha level (the tolerance halves per split).
    Returns (lower, upper) integrals of shape (panels, levels).
    """
    a = np.asarray(a, dtype=float).reshape(-1)
    b = np.asarray(b, dtype=float).reshape(-1)
    levels = len(f.grid)
    total_lower = np.zeros((a.size, levels))
    total_upper = np.zeros((a.size, levels))

    owner = np.arange(a.size)
    panel_tol = np.full(a.size, float(tol))
    for depth in range(settings.quad_max_depth + 1):
        if owner.size == 0:
            break
        if owner.size > settings.quad_max_panels:
            raise QuadratureError(
                f"{f.name}: {owner.size} active panels exceed the budget of {settings.quad_max_panels}"
            )

        lower, upper, mid = _simpson_round(f, a, b)
        width = b - a
        lower_whole, lower_halves, lower_boole = _panel_rules(lower, width)
        upper_whole, upper_halves, upper_boole = _panel_rules(upper, width)
        error = np.maximum(
            np.max(np.abs(lower_halves - lower_whole), axis=1),
            np.max(np.abs(upper_halves - upper_whole), axis=1),
        )
        accepted = error <= 15.0 * panel_tol

        np.add.at(total_lower, owner[accepted], lower_boole[accepted])
        np.add.at(total_upper, owner[accepted], upper_boole[accepted])

        rejected = ~accepted
        logger.debug(f"{f.name}: quadrature depth {depth}, {int(rejected.sum())} panels refined")
        owner = np.concatenate([owner[rejected], owner[rejected]])
        a, b = (np.concatenate([a[rejected], mid[rejected]]),
                np.concatenate([mid[rejected], b[rejected]]))
        panel_tol = np.concatenate([panel_tol[rejected], panel_tol[rejected]]) / 2.0
    else:
        if owner.size:
            raise QuadratureError(
                f"{f.name}: adaptive Simpson did not converge within depth {settings.quad_max_depth} "
                f"({owner.size} panels unresolved)"
            )

    return total_lower, total_upper


def _check_result(lower: np.ndarray, upper: np.ndarray, what: str):
    violation = find_level_violation(lower, upper, settings.validation_atol)
    if violation is not None:
        raise IntegrationError(
            f"{what}: result row {violation.row} is not a fuzzy number "
            f"({violation.invariant} at level {violation.level})"
        )


def integrate_on(f: FuzzyFunction, a: float, b: float, tol: Optional[float] = None) -> FuzzyNumber:
    """Fuzzy Riemann integral over [a, b], one adaptive Simpson per endpoint and level"""
    tol = settings.quad_tol if tol is None else tol
    if tol <= 0:
        raise ValueError(f"Quadrature tolerance must be positive, got {tol}")
    if a > b:
        raise RangeError(f"Integration limits out of order: a={a} > b={b}")
    if a < f.domain_start:
        raise RangeError(f"Lower limit {a} is left of the domain start {f.domain_start}")

    if a == b:
        zero = np.zeros(len(f.grid))
        return FuzzyNumber(f.grid, zero, zero)

    lower, upper = integrate_panels(f, np.array([a]), np.array([b]), tol)
    _check_result(lower, upper, f"integral of {f.name} over [{a}, {b}]")
    return FuzzyNumber(f.grid, lower[0], upper[0])


# Traces

def _hermite_partial(u: np.ndarray) -> Tuple[np.ndarray, ...]:
    """Integrals over [0, u] of the four cubic Hermite basis functions"""
    u2, u3, u4 = u * u, u ** 3, u ** 4
    return (u4 / 2 - u3 + u, u4 / 4 - 2 * u3 / 3 + u2 / 2, -u4 / 2 + u3, u4 / 4 - u3 / 3)


@dataclass(frozen=True, eq=False)
class IntegralTrace:
    """
    Sampled integral function of a fuzzy-number-valued function

    `s_lower`/`s_upper` hold s(t_i) per level. When `f_lower`/`f_upper` (the
    derivative of s at the samples) are present, integrals of s use cubic
    Hermite panels; otherwise they use the trapezoid rule.
    """

    plan: SamplingPlan
    f_name: str
    grid: AlphaGrid
    t: np.ndarray
    s_lower: np.ndarray
    s_upper: np.ndarray
    f_lower: Optional[np.ndarray] = None
    f_upper: Optional[np.ndarray] = None
    cumulative_lower: np.ndarray = field(init=False, repr=False)
    cumulative_upper: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        for name in ("t", "s_lower", "s_upper", "f_lower", "f_upper"):
            value = getattr(self, name)
            if value is not None:
                value = np.array(value, dtype=float)
                value.setflags(write=False)
                object.__setattr__(self, name, value)

        if self.t.ndim != 1 or self.t.size < 2 or not np.all(np.diff(self.t) > 0):
            raise RangeError("Trace abscissae must be strictly increasing with at least two samples")
        expected = (self.t.size, len(self.grid))
        if self.s_lower.shape != expected or self.s_upper.shape != expected:
            raise RangeError(f"Trace samples must have shape {expected}")

        cumulative_lower = self._cumulate(self.s_lower, self.f_lower)
        cumulative_upper = self._cumulate(self.s_upper, self.f_upper)
        cumulative_lower.setflags(write=False)
        cumulative_upper.setflags(write=False)
        object.__setattr__(self, "cumulative_lower", cumulative_lower)
        object.__setattr__(self, "cumulative_upper", cumulative_upper)

    @classmethod
    def from_samples(
        cls,
        t,
        s_lower,
        s_upper,
        grid: AlphaGrid,
        f_name: str = "samples",
        f_lower=None,
        f_upper=None,
        quad_tol: Optional[float] = None,
    ) -> "IntegralTrace":
        """Trace built directly from sampled s values (t must start at 0)"""
        t = np.asarray(t, dtype=float)
        plan = SamplingPlan(
            t_max=float(t[-1]),
            n_steps=t.size - 1,
            quad_tol=settings.quad_tol if quad_tol is None else quad_tol,
        )
        return cls(plan, f_name, grid, t, s_lower, s_upper, f_lower, f_upper)

    def _cumulate(self, s: np.ndarray, derivative: Optional[np.ndarray]) -> np.ndarray:
        """Running integral of s over [t_0, t_i], accumulated left to right"""
        width = np.diff(self.t)[:, None]
        panels = width / 2.0 * (s[:-1] + s[1:])
        if derivative is not None:
            panels = panels + width * width / 12.0 * (derivative[:-1] - derivative[1:])
        cumulative = np.zeros_like(s)
        cumulative[1:] = np.cumsum(panels, axis=0)
        return cumulative

    @property
    def levels(self) -> int:
        return len(self.grid)

    @property
    def t_max(self) -> float:
        return float(self.t[-1])

    def s_at(self, index: int) -> FuzzyNumber:
        return FuzzyNumber(self.grid, self.s_lower[index], self.s_upper[index])

    def sigma_at(self, index: int) -> FuzzyNumber:
        if self.t[index] <= 0:
            raise RangeError("sigma is undefined at t = 0")
        return FuzzyNumber(
            self.grid,
            self.cumulative_lower[index] / self.t[index],
            self.cumulative_upper[index] / self.t[index],
        )

    def sigma_arrays(self) -> Endpoints:
        """sigma at every sample; NaN where t = 0"""
        with np.errstate(divide="ignore", invalid="ignore"):
            column = np.where(self.t > 0, self.t, np.nan)[:, None]
            return self.cumulative_lower / column, self.cumulative_upper / column

    def positive_indices(self) -> np.ndarray:
        return np.flatnonzero(self.t > 0)

    def s_series(self) -> List[Tuple[float, FuzzyNumber]]:
        return [(float(self.t[i]), self.s_at(i)) for i in range(self.t.size)]

    def sigma_series(self) -> List[Tuple[float, FuzzyNumber]]:
        return [(float(self.t[i]), self.sigma_at(i)) for i in self.positive_indices()]

    def mean_series(self) -> List[Tuple[float, FuzzyNumber]]:
        """(1/t) s(t): the Cesaro mean of the integrand f"""
        return [
            (float(self.t[i]),
             FuzzyNumber(self.grid, self.s_lower[i] / self.t[i], self.s_upper[i] / self.t[i]))
            for i in self.positive_indices()
        ]

    def to_frame(self) -> pd.DataFrame:
        """Long table: one row per (t, alpha)"""
        sigma_lower, sigma_upper = self.sigma_arrays()
        samples, levels = self.s_lower.shape
        return pd.DataFrame({
            "t": np.repeat(self.t, levels),
            "alpha": np.tile(self.grid.levels, samples),
            "s_lower": self.s_lower.reshape(-1),
            "s_upper": self.s_upper.reshape(-1),
            "sigma_lower": sigma_lower.reshape(-1),
            "sigma_upper": sigma_upper.reshape(-1),
        })

    def to_dict(self) -> Dict:
        sigma_lower, sigma_upper = self.sigma_arrays()

        def rows(array: np.ndarray):
            return [None if np.isnan(row[0]) else row.tolist() for row in array]

        return {
            "function": self.f_name,
            "plan": self.plan.model_dump(),
            "alpha": self.grid.to_list(),
            "t": self.t.tolist(),
            "s_lower": self.s_lower.tolist(),
            "s_upper": self.s_upper.tolist(),
            "sigma_lower": rows(sigma_lower),
            "sigma_upper": rows(sigma_upper),
        }


def build_trace(f: FuzzyFunction, plan: Optional[SamplingPlan] = None) -> IntegralTrace:
    """s(t) accumulated panel by panel and sigma(t) on the plan's uniform t-grid"""
    plan = plan or SamplingPlan()
    if f.domain_start > 0:
        raise RangeError(f"{f.name}: integral function needs a domain starting at 0")

    t = plan.abscissae()
    logger.info(f"Building trace for {f.name}: t_max={plan.t_max}, n_steps={plan.n_steps}, "
                f"levels={len(f.grid)}")
    panel_lower, panel_upper = integrate_panels(f, t[:-1], t[1:], plan.quad_tol)

    s_lower = np.zeros((t.size, len(f.grid)))
    s_upper = np.zeros((t.size, len(f.grid)))
    s_lower[1:] = np.cumsum(panel_lower, axis=0)
    s_upper[1:] = np.cumsum(panel_upper, axis=0)
    f_lower, f_upper = f.sample(t)

    trace = IntegralTrace(plan, f.name, f.grid, t, s_lower, s_upper, f_lower, f_upper)
    _check_result(trace.s_lower, trace.s_upper, f"s(t) of {f.name}")
    sigma_lower, sigma_upper = trace.sigma_arrays()
    _check_result(sigma_lower[1:], sigma_upper[1:], f"sigma(t) of {f.name}")
    logger.info(f"Trace for {f.name} complete")
    return trace


def function_trace(f: FuzzyFunction, plan: Optional[SamplingPlan] = None) -> IntegralTrace:
    """Trace whose sampled function is f itself, so the checkers can run on f"""
    plan = plan or SamplingPlan()
    t = plan.abscissae()
    f_lower, f_upper = f.sample(t)
    return IntegralTrace(plan, f.name, f.grid, t, f_lower, f_upper)


# Means derived from the running integral of s

def _check_abscissa(trace: IntegralTrace, t: np.ndarray, what: str):
    slack = 1e-12 * max(1.0, trace.t_max)
    if np.any(t < trace.t[0]) or np.any(t > trace.t_max + slack):
        raise RangeError(f"{what} outside the trace range [{trace.t[0]}, {trace.t_max}]")


def cumulative_mean_integral(trace: IntegralTrace, t) -> Endpoints:
    """
    Integral of s over [t_0, t] per endpoint, for scalar or array t

    Sample points return the stored running integral exactly; between samples
    the partial panel is integrated with the same panel model as the trace.
    """
    points = np.atleast_1d(np.asarray(t, dtype=float))
    _check_abscissa(trace, points, "Abscissa")
    points = np.minimum(points, trace.t_max)

    index = np.clip(np.searchsorted(trace.t, points, side="right") - 1, 0, trace.t.size - 2)
    width = (trace.t[index + 1] - trace.t[index])[:, None]
    u = ((points - trace.t[index]) / width[:, 0])[:, None]
    on_right_sample = (points == trace.t[index + 1])[:, None]

    def partial(s: np.ndarray, derivative: Optional[np.ndarray], cumulative: np.ndarray):
        left, right = s[index], s[index + 1]
        if derivative is None:
            area = width * (u * left + u * u / 2.0 * (right - left))
        else:
            b00, b10, b01, b11 = _hermite_partial(u)
            area = width * (b00 * left + b10 * width * derivative[index]
                            + b01 * right + b11 * width * derivative[index + 1])
        value = cumulative[index] + np.where(u == 0.0, 0.0, area)
        return np.where(on_right_sample, cumulative[index + 1], value)

    lower = partial(trace.s_lower, trace.f_lower, trace.cumulative_lower)
    upper = partial(trace.s_upper, trace.f_upper, trace.cumulative_upper)
    if np.ndim(t) == 0:
        return lower[0], upper[0]
    return lower, upper


def cesaro_mean_at(trace: IntegralTrace, t: float) -> FuzzyNumber:
    """sigma(t) = (1/t) * integral of s over [0, t]"""
    if not 0 < t:
        raise RangeError(f"sigma needs t > 0, got {t}")
    lower, upper = cumulative_mean_integral(trace, t)
    return FuzzyNumber(trace.grid, lower / t, upper / t)


def _window_mean(trace: IntegralTrace, start: float, end: float) -> FuzzyNumber:
    lower, upper = cumulative_mean_integral(trace, np.array([start, end]))
    width = end - start
    return FuzzyNumber(trace.grid, (lower[1] - lower[0]) / width, (upper[1] - upper[0]) / width)


def deferred_mean_forward(trace: IntegralTrace, t: float, lam: float) -> FuzzyNumber:
    """(1/(lambda*t - t)) * integral of s over [t, lambda*t]"""
    if not lam > 1:
        raise RangeError(f"lambda must exceed 1, got {lam}")
    if not t > 0:
        raise RangeError(f"Deferred mean needs t > 0, got {t}")
    return _window_mean(trace, t, lam * t)


def deferred_mean_backward(trace: IntegralTrace, t: float, ell: float) -> FuzzyNumber:
    """(1/(t - ell*t)) * integral of s over [ell*t, t]"""
    if not 0 < ell < 1:
        raise RangeError(f"ell must lie in (0, 1), got {ell}")
    if not t > 0:
        raise RangeError(f"Deferred mean needs t > 0, got {t}")
    return _window_mean(trace, ell * t, t)


def deferred_means_forward(trace: IntegralTrace, t: np.ndarray, lam: float) -> Endpoints:
    """Vectorised forward deferred means at many t; rows follow t"""
    start_lower, start_upper = cumulative_mean_integral(trace, t)
    end_lower, end_upper = cumulative_mean_integral(trace, lam * t)
    width = (lam * t - t)[:, None]
    return (end_lower - start_lower) / width, (end_upper - start_upper) / width


def deferred_means_backward(trace: IntegralTrace, t: np.ndarray, ell: float) -> Endpoints:
    """Vectorised backward deferred means at many t; rows follow t"""
    start_lower, start_upper = cumulative_mean_integral(trace, ell * t)
    end_lower, end_upper = cumulative_mean_integral(trace, t)
    width = (t - ell * t)[:, None]
    return (end_lower - start_lower) / width, (end_upper - start_upper) / width


@dataclass(frozen=True)
class MeanIdentityReport:
    """Residuals of the two sigma/deferred-mean identities at one (t, lambda, ell)"""
    t: float
    lam: float
    ell: float
    tol: float
    forward_residual: float
    backward_residual: float

    @property
    def forward_passed(self) -> bool:
        return self.forward_residual <= self.tol

    @property
    def backward_passed(self) -> bool:
        return self.backward_residual <= self.tol

    @property
    def passed(self) -> bool:
        return self.forward_passed and self.backward_passed

    def to_dict(self) -> Dict:
        return {
            "t": self.t, "lambda": self.lam, "ell": self.ell, "tol": self.tol,
            "forward_residual": self.forward_residual,
            "backward_residual": self.backward_residual,
            "passed": self.passed,
        }


def verify_mean_identities(
    trace: IntegralTrace, t: float, lam: float, ell: float, tol: Optional[float] = None
) -> MeanIdentityReport:
    """
    Both sides of

        D_fwd(t) + sigma(t)/(lambda-1)        = sigma(lambda t) + sigma(lambda t)/(lambda-1)
        D_bwd(t) + ell/(1-ell) * sigma(ell t) = sigma(t) + ell/(1-ell) * sigma(t)

    compared in the metric D.
    """
    if not lam > 1:
        raise RangeError(f"lambda must exceed 1, got {lam}")
    if not 0 < ell < 1:
        raise RangeError(f"ell must lie in (0, 1), got {ell}")
    tol = 10.0 * trace.plan.quad_tol if tol is None else tol
    if lam * t > trace.t_max * (1 + 1e-12):
        raise RangeError(f"lambda*t = {lam * t} exceeds t_max = {trace.t_max}")

    forward_factor = 1.0 / (lam - 1.0)
    sigma_t = cesaro_mean_at(trace, t)
    sigma_lam_t = cesaro_mean_at(trace, lam * t)
    forward_lhs = add(deferred_mean_forward(trace, t, lam), scale(forward_factor, sigma_t))
    forward_rhs = add(sigma_lam_t, scale(forward_factor, sigma_lam_t))

    backward_factor = ell / (1.0 - ell)
    backward_lhs = add(deferred_mean_backward(trace, t, ell),
                       scale(backward_factor, cesaro_mean_at(trace, ell * t)))
    backward_rhs = add(sigma_t, scale(backward_factor, sigma_t))

    report = MeanIdentityReport(
        t=float(t), lam=float(lam), ell=float(ell), tol=float(tol),
        forward_residual=metric_d(forward_lhs, forward_rhs),
        backward_residual=metric_d(backward_lhs, backward_rhs),
    )
    if not report.passed:
        logger.warning(f"Deferred-mean identities at t={t}: residuals {report.forward_residual:.3e}, "
                       f"{report.backward_residual:.3e} above {tol:.1e}")
    return report


def scalar_integral(values: np.ndarray, x: np.ndarray) -> float:
    """Composite trapezoid of a sampled real function"""
    values = np.asarray(values, dtype=float)
    x = np.asarray(x, dtype=float)
    return float(np.sum(np.diff(x) * (values[:-1] + values[1:]) / 2.0))


def distance_integral(f: FuzzyFunction, g: FuzzyFunction, a: float, b: float, nodes: int = 2001) -> float:
    """Integral over [a, b] of the continuous map x -> D(f(x), g(x))"""
    x = np.linspace(a, b, nodes)
    f_lower, f_upper = f.sample(x)
    g_lower, g_upper = g.sample(x)
    distance = np.maximum(np.max(np.abs(f_lower - g_lower), axis=1),
                          np.max(np.abs(f_upper - g_upper), axis=1))
    return scalar_integral(distance, x)


def closed_form_residual(trace: IntegralTrace, closed_form: ClosedForm, which: str = "s") -> float:
    """Max endpoint deviation of the trace from closed-form s or sigma (positive t only)"""
    indices = trace.positive_indices()
    t = trace.t[indices][:, None]
    levels = trace.grid.levels[None, :]
    expected_lower = evaluate(parse(closed_form.lower_expr), t, levels)
    expected_upper = evaluate(parse(closed_form.upper_expr), t, levels)
    if which == "s":
        lower, upper = trace.s_lower[indices], trace.s_upper[indices]
    else:
        sigma_lower, sigma_upper = trace.sigma_arrays()
        lower, upper = sigma_lower[indices], sigma_upper[indices]
    residual = max(np.max(np.abs(lower - expected_lower)), np.max(np.abs(upper - expected_upper)))
    if not math.isfinite(residual):
        raise IntegrationError("Closed-form comparison produced a non-finite residual")
    return float(residual)
