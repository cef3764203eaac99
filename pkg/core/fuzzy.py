"""
Fuzzy Number Core for FuzzyCesaro
Fuzzy numbers as discretized alpha-level interval families with arithmetic,
the supremum metric D and the endpoint-wise partial order
"""

import math
from dataclasses import dataclass
from typing import Dict, List, NamedTuple, Optional, Sequence, Union

import numpy as np

from config.settings import settings


class FuzzyArithmeticError(ValueError):
    """Raised for grid mismatches and invalid scalar operands"""


def _frozen_array(values) -> np.ndarray:
    array = np.array(values, dtype=float)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class AlphaGrid:
    """Shared discretization of the membership axis alpha in [0, 1]"""

    levels: np.ndarray

    def __post_init__(self):
        levels = _frozen_array(self.levels)
        if levels.ndim != 1 or levels.size < 2:
            raise FuzzyArithmeticError("Alpha grid needs at least two levels")
        if levels[0] != 0.0 or levels[-1] != 1.0:
            raise FuzzyArithmeticError("Alpha grid must start at 0 and end at 1")
        if not np.all(np.diff(levels) > 0):
            raise FuzzyArithmeticError("Alpha grid must be strictly increasing")
        object.__setattr__(self, "levels", levels)

    @classmethod
    def uniform(cls, size: Optional[int] = None) -> "AlphaGrid":
        """Uniform grid with `size` levels (default: settings.alpha_levels)"""
        size = settings.alpha_levels if size is None else size
        if size < 2:
            raise FuzzyArithmeticError(f"Alpha grid size must be >= 2, got {size}")
        return cls(np.linspace(0.0, 1.0, size))

    def __len__(self) -> int:
        return int(self.levels.size)

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, AlphaGrid):
            return NotImplemented
        return bool(np.array_equal(self.levels, other.levels))

    def __hash__(self) -> int:
        return hash(self.levels.tobytes())

    def to_list(self) -> List[float]:
        return self.levels.tolist()


class LevelViolation(NamedTuple):
    """First violated fuzzy-number invariant inside a block of level arrays"""
    row: int
    level: int
    invariant: str


# Invariant names in reporting priority within one level
FINITE = "finite"
LOWER_NONDECREASING = "lower-nondecreasing"
UPPER_NONINCREASING = "upper-nonincreasing"
LOWER_LE_UPPER = "lower-le-upper"


def find_level_violation(
    lower: np.ndarray, upper: np.ndarray, atol: float = 0.0
) -> Optional[LevelViolation]:
    """
    Locate the first invariant violation in endpoint arrays

    Arrays are (levels,) or (rows, levels). Rows are scanned first, then levels
    in increasing alpha, then invariants in the order finite, lower monotone,
    upper monotone, lower <= upper.
    """
    lower = np.atleast_2d(lower)
    upper = np.atleast_2d(upper)

    not_finite = ~(np.isfinite(lower) & np.isfinite(upper))
    lower_drop = np.zeros(lower.shape, dtype=bool)
    upper_rise = np.zeros(upper.shape, dtype=bool)
    with np.errstate(invalid="ignore"):
        lower_drop[:, 1:] = np.diff(lower, axis=1) < -atol
        upper_rise[:, 1:] = np.diff(upper, axis=1) > atol
        crossed = (lower - upper) > atol

    masks = ((FINITE, not_finite), (LOWER_NONDECREASING, lower_drop),
             (UPPER_NONINCREASING, upper_rise), (LOWER_LE_UPPER, crossed))
    any_bad = not_finite | lower_drop | upper_rise | crossed
    if not any_bad.any():
        return None

    row, level = np.argwhere(any_bad)[0]
    for name, mask in masks:
        if mask[row, level]:
            return LevelViolation(int(row), int(level), name)
    return None  # unreachable


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of validate(): ok, or the first violated invariant"""
    ok: bool
    invariant: Optional[str] = None
    level: Optional[int] = None
    alpha: Optional[float] = None

    def __bool__(self) -> bool:
        return self.ok

    @property
    def message(self) -> str:
        if self.ok:
            return "ok"
        return f"violation: {self.invariant} at level {self.level} (alpha={self.alpha})"


@dataclass(frozen=True, eq=False)
class FuzzyNumber:
    """Lower/upper endpoint arrays over an AlphaGrid"""

    grid: AlphaGrid
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = _frozen_array(self.lower)
        upper = _frozen_array(self.upper)
        expected = (len(self.grid),)
        if lower.shape != expected or upper.shape != expected:
            raise FuzzyArithmeticError(
                f"Endpoint arrays must have shape {expected}, got {lower.shape} and {upper.shape}"
            )
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    # Operator sugar over the module functions

    def __add__(self, other: "FuzzyNumber") -> "FuzzyNumber":
        if not isinstance(other, FuzzyNumber):
            return NotImplemented
        return add(self, other)

    def __mul__(self, k: float) -> "FuzzyNumber":
        if isinstance(k, FuzzyNumber):
            return NotImplemented
        return scale(k, self)

    __rmul__ = __mul__

    def __neg__(self) -> "FuzzyNumber":
        return scale(-1.0, self)

    def __sub__(self, r: float) -> "FuzzyNumber":
        """Crisp shift u - r; fuzzy subtraction is not a group operation"""
        if isinstance(r, FuzzyNumber):
            return NotImplemented
        return add(self, make_crisp(-float(r), self.grid))

    def __repr__(self) -> str:
        return (f"FuzzyNumber(levels={len(self.grid)}, "
                f"core=[{self.lower[-1]:.6g}, {self.upper[-1]:.6g}], "
                f"support=[{self.lower[0]:.6g}, {self.upper[0]:.6g}])")

    def equals(self, other: "FuzzyNumber", atol: Optional[float] = None) -> bool:
        """Endpoint-array equality within an absolute tolerance"""
        atol = settings.equality_atol if atol is None else atol
        _check_grid(self, other)
        return bool(np.allclose(self.lower, other.lower, rtol=0.0, atol=atol)
                    and np.allclose(self.upper, other.upper, rtol=0.0, atol=atol))

    def to_dict(self) -> Dict[str, List[float]]:
        return {"alpha": self.grid.to_list(), "lower": self.lower.tolist(),
                "upper": self.upper.tolist()}

    @classmethod
    def from_dict(cls, data: Dict[str, Sequence[float]]) -> "FuzzyNumber":
        missing = [key for key in ("alpha", "lower", "upper") if key not in data]
        if missing:
            raise FuzzyArithmeticError(f"Missing fuzzy number fields: {missing}")
        return cls(AlphaGrid(data["alpha"]), data["lower"], data["upper"])


def _check_grid(u: FuzzyNumber, v: FuzzyNumber):
    if u.grid != v.grid:
        raise FuzzyArithmeticError("Fuzzy numbers are defined on different alpha grids")


def _check_finite(value: float, what: str) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise FuzzyArithmeticError(f"{what} must be finite, got {value}")
    return value


def make_crisp(r: float, grid: AlphaGrid) -> FuzzyNumber:
    """Embed a real number r as the crisp fuzzy number r-bar"""
    r = _check_finite(r, "Crisp value")
    level = np.full(len(grid), r)
    return FuzzyNumber(grid, level, level)


def add(u: FuzzyNumber, v: FuzzyNumber) -> FuzzyNumber:
    _check_grid(u, v)
    return FuzzyNumber(u.grid, u.lower + v.lower, u.upper + v.upper)


def scale(k: float, u: FuzzyNumber) -> FuzzyNumber:
    """Scalar multiple k*u; a negative k swaps the endpoint roles"""
    k = _check_finite(k, "Scale factor")
    if k >= 0:
        return FuzzyNumber(u.grid, k * u.lower, k * u.upper)
    return FuzzyNumber(u.grid, k * u.upper, k * u.lower)


def metric_d(u: FuzzyNumber, v: FuzzyNumber) -> float:
    """Supremum over grid levels of the Hausdorff distance between alpha-cuts"""
    _check_grid(u, v)
    return float(max(np.max(np.abs(u.lower - v.lower)), np.max(np.abs(u.upper - v.upper))))


def norm(u: FuzzyNumber) -> float:
    """D(u, 0-bar)"""
    return float(max(np.max(np.abs(u.lower)), np.max(np.abs(u.upper))))


def leq(u: FuzzyNumber, v: FuzzyNumber) -> bool:
    """Partial order: both endpoints of every alpha-cut of u are <= those of v"""
    _check_grid(u, v)
    return bool(np.all(u.lower <= v.lower) and np.all(u.upper <= v.upper))


def leq_eps(u: FuzzyNumber, v: FuzzyNumber, eps: float) -> bool:
    """u <= v + eps-bar"""
    eps = _check_finite(eps, "Epsilon")
    if eps < 0:
        raise FuzzyArithmeticError(f"Epsilon must be nonnegative, got {eps}")
    return leq(u, add(v, make_crisp(eps, v.grid)))


def validate(u: FuzzyNumber, atol: float = 0.0) -> ValidationReport:
    """Check every fuzzy-number invariant at grid resolution"""
    violation = find_level_violation(u.lower, u.upper, atol)
    if violation is None:
        return ValidationReport(ok=True)
    return ValidationReport(
        ok=False,
        invariant=violation.invariant,
        level=violation.level,
        alpha=float(u.grid.levels[violation.level]),
    )


def is_crisp(u: FuzzyNumber) -> bool:
    return bool(np.all(u.lower == u.lower[0]) and np.all(u.upper == u.lower[0]))


def is_negative(u: FuzzyNumber) -> bool:
    """Membership vanishes on [0, inf): every grid alpha-cut lies left of 0"""
    return bool(np.all(u.upper < 0))


def membership(u: FuzzyNumber, t: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """
    Piecewise-linear membership reconstruction from the alpha-cuts

    Display helper only: left of the core the lower endpoints are inverted by
    linear interpolation, right of it the upper endpoints.
    """
    levels = u.grid.levels
    points = np.asarray(t, dtype=float)
    result = np.zeros(points.shape)

    in_core = (points >= u.lower[-1]) & (points <= u.upper[-1])
    rising = (points >= u.lower[0]) & (points < u.lower[-1])
    falling = (points > u.upper[-1]) & (points <= u.upper[0])

    result[in_core] = 1.0
    if rising.any():
        result[rising] = np.interp(points[rising], u.lower, levels)
    if falling.any():
        result[falling] = np.interp(points[falling], u.upper[::-1], levels[::-1])

    if np.ndim(t) == 0:
        return float(result)
    return result
