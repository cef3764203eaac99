"""
Fuzzy-Number-Valued Functions for FuzzyCesaro
Paired endpoint evaluators over an alpha grid plus the built-in catalog
"""

import dataclasses
import json
import re
from dataclasses import dataclass
from functools import partial
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from loguru import logger

from config.settings import settings
from core.expressions import Expr, evaluate, parse
from core.fuzzy import AlphaGrid, FuzzyNumber, find_level_violation

EndpointEvaluator = Callable[[np.ndarray, np.ndarray], np.ndarray]


class DomainError(ValueError):
    """Evaluation point lies left of the function's domain"""


class PointwiseViolationError(ValueError):
    """f(x) is not a fuzzy number at some sampled x"""

    def __init__(self, function: str, x: float, alpha: float, invariant: str):
        super().__init__(
            f"{function}: value at x={x:.17g} is not a fuzzy number "
            f"({invariant} fails at alpha={alpha:.6g})"
        )
        self.x = x
        self.alpha = alpha
        self.invariant = invariant


@dataclass(frozen=True)
class ClosedForm:
    """Endpoint formulas of a derived quantity; x stands for t"""
    lower_expr: str
    upper_expr: str

    def evaluate(self, t: float, grid: AlphaGrid) -> FuzzyNumber:
        return FuzzyNumber(
            grid,
            evaluate(parse(self.lower_expr), t, grid.levels),
            evaluate(parse(self.upper_expr), t, grid.levels),
        )

    def to_list(self) -> List[str]:
        return [self.lower_expr, self.upper_expr]


@dataclass(frozen=True, eq=False)
class FuzzyFunction:
    """f: [domain_start, inf) -> E1 given by its endpoint functions"""

    name: str
    grid: AlphaGrid
    lower_eval: EndpointEvaluator
    upper_eval: EndpointEvaluator
    domain_start: float = 0.0
    lower_expr: Optional[str] = None
    upper_expr: Optional[str] = None
    notes: str = ""
    closed_form_s: Optional[ClosedForm] = None
    closed_form_sigma: Optional[ClosedForm] = None

    def sample(self, xs: Union[float, Sequence[float], np.ndarray]) -> Tuple[np.ndarray, np.ndarray]:
        """
        Evaluate both endpoints on a block of x values

        Returns (lower, upper) arrays of shape (len(xs), levels). Every row is
        checked against the fuzzy-number invariants; the first violating
        (x, alpha) in scan order is reported.
        """
        xs = np.asarray(xs, dtype=float).reshape(-1)
        if np.any(xs < self.domain_start):
            bad = float(xs[np.argmax(xs < self.domain_start)])
            raise DomainError(f"{self.name}: x={bad} is left of the domain start {self.domain_start}")

        column = xs[:, None]
        levels = self.grid.levels[None, :]
        shape = (xs.size, len(self.grid))
        lower = np.array(np.broadcast_to(self.lower_eval(column, levels), shape), dtype=float)
        upper = np.array(np.broadcast_to(self.upper_eval(column, levels), shape), dtype=float)

        violation = find_level_violation(lower, upper, settings.validation_atol)
        if violation is not None:
            raise PointwiseViolationError(
                self.name,
                float(xs[violation.row]),
                float(self.grid.levels[violation.level]),
                violation.invariant,
            )
        return lower, upper

    def with_grid(self, grid: AlphaGrid) -> "FuzzyFunction":
        return dataclasses.replace(self, grid=grid)

    def manifest_entry(self) -> Dict:
        entry = {
            "name": self.name,
            "lower_expr": self.lower_expr,
            "upper_expr": self.upper_expr,
            "notes": self.notes,
        }
        if self.closed_form_s is not None:
            entry["closed_form_s"] = self.closed_form_s.to_list()
        if self.closed_form_sigma is not None:
            entry["closed_form_sigma"] = self.closed_form_sigma.to_list()
        return entry


def eval_at(f: FuzzyFunction, x: float) -> FuzzyNumber:
    """f(x) as a validated fuzzy number"""
    lower, upper = f.sample([x])
    return FuzzyNumber(f.grid, lower[0], upper[0])


def _as_expr(expr: Union[str, Expr]) -> Tuple[Expr, str]:
    if isinstance(expr, Expr):
        return expr, expr.to_source()
    return parse(expr), expr


def _as_closed_form(pair: Optional[Sequence[str]]) -> Optional[ClosedForm]:
    if pair is None:
        return None
    lower, upper = pair
    parse(lower)
    parse(upper)
    return ClosedForm(lower, upper)


def from_exprs(
    lower_expr: Union[str, Expr],
    upper_expr: Union[str, Expr],
    grid: Optional[AlphaGrid] = None,
    name: Optional[str] = None,
    notes: str = "",
    closed_form_s: Optional[Sequence[str]] = None,
    closed_form_sigma: Optional[Sequence[str]] = None,
) -> FuzzyFunction:
    """Build a fuzzy function whose endpoints evaluate DSL expressions"""
    grid = grid or AlphaGrid.uniform()
    lower, lower_text = _as_expr(lower_expr)
    upper, upper_text = _as_expr(upper_expr)
    return FuzzyFunction(
        name=name or f"[{lower_text}, {upper_text}]",
        grid=grid,
        lower_eval=partial(evaluate, lower),
        upper_eval=partial(evaluate, upper),
        lower_expr=lower_text,
        upper_expr=upper_text,
        notes=notes,
        closed_form_s=_as_closed_form(closed_form_s),
        closed_form_sigma=_as_closed_form(closed_form_sigma),
    )


# Built-in catalog (closed forms use x for t)
CATALOG_ENTRIES: List[Dict] = [
    {
        "name": "paper-example-1",
        "lower_expr": "cos(x) + alpha/(x+1)^2",
        "upper_expr": "cos(x) + (2-alpha)/(x+1)^2",
        "notes": "Divergent improper integral, Cesaro summable to u with [u]_alpha = [alpha, 2-alpha]",
        "closed_form_s": ["sin(x) + alpha*(1 - 1/(x+1))", "sin(x) + (2-alpha)*(1 - 1/(x+1))"],
        "closed_form_sigma": [
            "-cos(x)/x + 1/x + alpha*(1 - ln(x+1)/x)",
            "-cos(x)/x + 1/x + (2-alpha)*(1 - ln(x+1)/x)",
        ],
    },
    {
        "name": "paper-example-2",
        "lower_expr": "(2 - sin(x))*alpha",
        "upper_expr": "(2 - sin(x))*(2-alpha)",
        "notes": "x*f(x) >= 0-bar, so s is slowly decreasing; s grows like 2t",
        "closed_form_s": ["alpha*(2*x + cos(x) - 1)", "(2-alpha)*(2*x + cos(x) - 1)"],
        "closed_form_sigma": ["alpha*(x + sin(x)/x - 1)", "(2-alpha)*(x + sin(x)/x - 1)"],
    },
    {
        "name": "convergent-1",
        "lower_expr": "alpha/(1+x)^2",
        "upper_expr": "(2-alpha)/(1+x)^2",
        "notes": "Convergent improper integral with limit [alpha, 2-alpha]",
        "closed_form_s": ["alpha*(1 - 1/(1+x))", "(2-alpha)*(1 - 1/(1+x))"],
        "closed_form_sigma": ["alpha*(1 - ln(1+x)/x)", "(2-alpha)*(1 - ln(1+x)/x)"],
    },
    {
        "name": "pointwise-convergent",
        "lower_expr": "alpha + 1/(1+x)",
        "upper_expr": "(2-alpha) + 1/(1+x)",
        "notes": "f(t) tends to [alpha, 2-alpha], hence f is Cesaro summable to the same limit",
        "closed_form_s": ["alpha*x + ln(1+x)", "(2-alpha)*x + ln(1+x)"],
        "closed_form_sigma": [
            "alpha*x/2 + ((1+x)*ln(1+x) - x)/x",
            "(2-alpha)*x/2 + ((1+x)*ln(1+x) - x)/x",
        ],
    },
    {
        "name": "landau-negative",
        "lower_expr": "-1/(1+x)",
        "upper_expr": "-1/(1+x)",
        "notes": "Crisp, x*f(x) >= -1 for every x",
        "closed_form_s": ["-ln(1+x)", "-ln(1+x)"],
        "closed_form_sigma": ["-((1+x)*ln(1+x) - x)/x", "-((1+x)*ln(1+x) - x)/x"],
    },
]

CRISP_CONSTANT_PATTERN = re.compile(r"^crisp-constant\((?P<value>[^()]+)\)$")
CRISP_CONSTANTS = (0.0, 1.0)


def _constant_label(c: float) -> str:
    """Shortest label that parses back to exactly c"""
    short = f"{c:g}"
    return short if float(short) == c else repr(c)


def crisp_constant(c: float, grid: Optional[AlphaGrid] = None) -> FuzzyFunction:
    """The constant function c-bar"""
    c = float(c)
    if not np.isfinite(c):
        raise ValueError(f"Crisp constant must be finite, got {c}")
    literal = repr(c)
    return from_exprs(
        literal,
        literal,
        grid=grid,
        name=f"crisp-constant({_constant_label(c)})",
        notes="Crisp constant integrand; s(t) = c*t, sigma(t) = c*t/2",
        closed_form_s=[f"{literal}*x", f"{literal}*x"],
        closed_form_sigma=[f"{literal}*x/2", f"{literal}*x/2"],
    )


def _from_entry(entry: Dict, grid: Optional[AlphaGrid]) -> FuzzyFunction:
    missing = [key for key in ("name", "lower_expr", "upper_expr") if key not in entry]
    if missing:
        raise ValueError(f"Catalog entry is missing fields: {missing}")
    return from_exprs(
        entry["lower_expr"],
        entry["upper_expr"],
        grid=grid,
        name=entry["name"],
        notes=entry.get("notes", ""),
        closed_form_s=entry.get("closed_form_s"),
        closed_form_sigma=entry.get("closed_form_sigma"),
    )


def catalog(grid: Optional[AlphaGrid] = None) -> List[FuzzyFunction]:
    """Named built-in functions"""
    grid = grid or AlphaGrid.uniform()
    functions = [_from_entry(entry, grid) for entry in CATALOG_ENTRIES]
    functions.extend(crisp_constant(c, grid) for c in CRISP_CONSTANTS)
    return functions


def lookup(name: str, grid: Optional[AlphaGrid] = None) -> FuzzyFunction:
    """Find a catalog function by name; crisp-constant(<real>) is parametrised"""
    match = CRISP_CONSTANT_PATTERN.match(name.strip())
    if match:
        try:
            value = float(match.group("value"))
        except ValueError:
            raise ValueError(f"Invalid crisp constant in {name!r}") from None
        return crisp_constant(value, grid)

    for entry in CATALOG_ENTRIES:
        if entry["name"] == name:
            return _from_entry(entry, grid or AlphaGrid.uniform())

    known = [entry["name"] for entry in CATALOG_ENTRIES] + ["crisp-constant(<c>)"]
    raise ValueError(f"Unknown catalog function {name!r}; known: {', '.join(known)}")


def catalog_manifest(grid: Optional[AlphaGrid] = None) -> List[Dict]:
    return [f.manifest_entry() for f in catalog(grid)]


def load_catalog(path: Union[str, Path], grid: Optional[AlphaGrid] = None) -> List[FuzzyFunction]:
    """Read a JSON manifest: a list of {name, lower_expr, upper_expr, ...}"""
    with open(path, "r", encoding="utf-8") as manifest_file:
        entries = json.load(manifest_file)
    if not isinstance(entries, list):
        raise ValueError(f"Catalog manifest {path} must hold a JSON list")
    functions = [_from_entry(entry, grid or AlphaGrid.uniform()) for entry in entries]
    logger.info(f"Loaded {len(functions)} functions from {path}")
    return functions
