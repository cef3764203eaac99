"""
Command Handlers for FuzzyCesaro
Handles the analyze, check, export and catalog sub-commands
"""

import json
from pathlib import Path
from typing import Callable, Dict, List, Literal, Optional, Tuple

from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, model_validator

from config.settings import settings, CHECKER_NAMES
from core.fuzzy import AlphaGrid, FuzzyNumber, make_crisp
from core.functions import FuzzyFunction, catalog_manifest, from_exprs, load_catalog, lookup
from core.integration import IntegralTrace, IntegrationError, SamplingPlan, build_trace, function_trace
from core.summability import classify, classify_function
from core.tauberian import (
    CheckerOutcome, check_backward_slow_decrease, check_condition_doublestar,
    check_condition_star, check_landau, check_slow_decrease,
)
from cli.utils.data_processing import (
    analysis_table, catalog_table, checker_table, data_exporter, render_json, render_table,
)

COMMANDS = ("analyze", "check", "export", "catalog")
TRACE_CHECKERS = ("star", "doublestar", "slow_decrease", "backward_slow_decrease")


class RunConfig(BaseModel):
    """Validated invocation; every numeric range is checked before any computation"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    command: Literal["analyze", "check", "export", "catalog"]

    # function selector
    catalog: Optional[str] = None
    lower: Optional[str] = None
    upper: Optional[str] = None
    catalog_file: Optional[Path] = None
    function_mode: bool = False

    # plan and grid
    grid: int = Field(default_factory=lambda: settings.alpha_levels, ge=2)
    t_max: float = Field(default_factory=lambda: settings.t_max, gt=0.0, allow_inf_nan=False)
    n_steps: int = Field(default_factory=lambda: settings.n_steps, ge=2)
    quad_tol: float = Field(default_factory=lambda: settings.quad_tol, gt=0.0, allow_inf_nan=False)
    tol: float = Field(default_factory=lambda: settings.limit_tol, gt=0.0, allow_inf_nan=False)

    # checkers
    checkers: Tuple[str, ...] = ()
    eps: float = Field(default_factory=lambda: settings.checker_eps, gt=0.0, allow_inf_nan=False)
    lam: float = Field(default_factory=lambda: settings.checker_lambda, gt=1.0, allow_inf_nan=False)
    ell: float = Field(default_factory=lambda: settings.checker_ell, gt=0.0, lt=1.0)
    backward_lam: float = Field(default_factory=lambda: settings.checker_backward_lambda, gt=0.0, lt=1.0)
    t0: float = Field(default_factory=lambda: settings.checker_t0, ge=0.0, allow_inf_nan=False)
    stride: int = Field(default_factory=lambda: settings.scan_stride, ge=1)
    u0: Optional[float] = Field(default=None, allow_inf_nan=False)
    u_json: Optional[Path] = None
    x0: float = Field(default=0.0, ge=0.0, allow_inf_nan=False)

    # output
    output_format: Literal["json", "csv", "both"] = "json"
    out: Optional[Path] = None

    @model_validator(mode="after")
    def _check_selectors(self) -> "RunConfig":
        for flag, path in (("--catalog-file", self.catalog_file), ("--u-json", self.u_json)):
            if path is not None and not path.is_file():
                raise ValueError(f"{flag}: no such file {path}")
        if self.command == "catalog":
            return self
        expression = self.lower is not None or self.upper is not None
        if self.catalog and expression:
            raise ValueError("--catalog and --lower/--upper are mutually exclusive")
        if expression and (self.lower is None or self.upper is None):
            raise ValueError("--lower and --upper must be given together")
        if not self.catalog and not expression:
            raise ValueError("select a function with --catalog NAME or --lower EXPR --upper EXPR")
        if self.catalog_file is not None and not self.catalog:
            raise ValueError("--catalog-file needs --catalog NAME")
        if self.u0 is not None and self.u_json is not None:
            raise ValueError("--u0 and --u-json are mutually exclusive")
        unknown = [name for name in self.checkers if name != "all" and name not in CHECKER_NAMES]
        if unknown:
            raise ValueError(f"Unknown checkers: {unknown}")
        if "landau" in self.checkers and self.u0 is None and self.u_json is None:
            raise ValueError("--landau needs --u0 or --u-json")
        return self

    def plan(self) -> SamplingPlan:
        return SamplingPlan(t_max=self.t_max, n_steps=self.n_steps, quad_tol=self.quad_tol)

    def alpha_grid(self) -> AlphaGrid:
        return AlphaGrid.uniform(self.grid)

    def resolve_function(self) -> FuzzyFunction:
        grid = self.alpha_grid()
        if self.lower is not None:
            return from_exprs(self.lower, self.upper, grid=grid)
        if self.catalog_file is not None:
            for f in load_catalog(self.catalog_file, grid):
                if f.name == self.catalog:
                    return f
            raise ValueError(f"{self.catalog!r} not found in {self.catalog_file}")
        return lookup(self.catalog, grid)

    def landau_bound(self, grid: AlphaGrid) -> FuzzyNumber:
        if self.u_json is not None:
            with open(self.u_json, "r", encoding="utf-8") as f:
                u = FuzzyNumber.from_dict(json.load(f))
            if u.grid != grid:
                raise ValueError(f"u in {self.u_json} is not defined on the {len(grid)}-level grid")
            return u
        return make_crisp(self.u0, grid)

    def selected_checkers(self) -> Tuple[str, ...]:
        """Requested checkers in a fixed order; none requested means every trace checker"""
        requested = set(self.checkers) or set(TRACE_CHECKERS)
        if "all" in requested:
            requested = set(TRACE_CHECKERS)
            if self.u0 is not None or self.u_json is not None:
                requested.add("landau")
        return tuple(name for name in CHECKER_NAMES if name in requested)


def exit_code_for(error: BaseException) -> int:
    """Map an exception to the documented exit code"""
    if isinstance(error, IntegrationError):
        return 3
    if isinstance(error, OSError):
        return 4
    if isinstance(error, ValueError):
        return 2
    return 1


class CommandHandler:
    """Handles CLI sub-commands"""

    def __init__(self):
        self.handlers: Dict[str, Callable[[RunConfig], int]] = {
            "analyze": self.analyze_command,
            "check": self.check_command,
            "export": self.export_command,
            "catalog": self.catalog_command,
        }

    def execute(self, command: str, options: Dict) -> int:
        """Validate options, run one sub-command and return its exit code"""
        try:
            config = RunConfig(command=command, **options)
            return self.handlers[config.command](config)
        except Exception as e:
            code = exit_code_for(e)
            if code == 1:
                logger.exception(f"Unexpected failure in {command}: {e}")
            else:
                logger.error(f"{command} failed: {e}")
            return code

    def analyze_command(self, config: RunConfig) -> int:
        """Classify the integral and its Cesaro mean (or f itself with --function-mode)"""
        f = config.resolve_function()
        if config.function_mode:
            report = classify_function(f, config.plan(), config.tol)
        else:
            report = classify(f, config.plan(), config.tol)
        data = report.to_dict()
        self._emit(data, config, analysis_table(data))
        return 0

    def check_command(self, config: RunConfig) -> int:
        """Run the requested Tauberian checkers on a freshly built trace"""
        f = config.resolve_function()
        names = config.selected_checkers()
        plan = config.plan()

        trace: Optional[IntegralTrace] = None
        if any(name in TRACE_CHECKERS for name in names):
            trace = function_trace(f, plan) if config.function_mode else build_trace(f, plan)

        outcomes: List[CheckerOutcome] = [self._run_checker(name, config, f, trace) for name in names]
        data = {
            "function": f.name,
            "plan": plan.model_dump(),
            "checkers": [outcome.to_dict() for outcome in outcomes],
        }
        self._emit(data, config, checker_table(data["checkers"]))
        return 0

    def export_command(self, config: RunConfig) -> int:
        """Write the trace CSV/JSON (default location: settings.export_path)"""
        f = config.resolve_function()
        plan = config.plan()
        trace = function_trace(f, plan) if config.function_mode else build_trace(f, plan)
        output_format = config.output_format
        written = data_exporter.export_trace(trace, config.out, output_format)
        for path in written:
            print(path)
        return 0

    def catalog_command(self, config: RunConfig) -> int:
        """List the built-in catalog (or a user manifest with --catalog-file)"""
        grid = config.alpha_grid()
        if config.catalog_file is not None:
            manifest = [f.manifest_entry() for f in load_catalog(config.catalog_file, grid)]
        else:
            manifest = catalog_manifest(grid)
        self._emit(manifest, config, catalog_table(manifest))
        return 0

    def _run_checker(
        self, name: str, config: RunConfig, f: FuzzyFunction, trace: Optional[IntegralTrace]
    ) -> CheckerOutcome:
        if name == "star":
            return check_condition_star(trace, config.eps, config.lam, config.t0, config.stride)
        if name == "doublestar":
            return check_condition_doublestar(trace, config.eps, config.ell, config.t0, config.stride)
        if name == "slow_decrease":
            return check_slow_decrease(trace, config.eps, config.lam, config.t0, config.stride)
        if name == "backward_slow_decrease":
            return check_backward_slow_decrease(trace, config.eps, config.backward_lam, config.t0, config.stride)
        return check_landau(f, config.landau_bound(f.grid), config.x0, config.plan(), config.eps)

    def _emit(self, data, config: RunConfig, table):
        """JSON to --out (plus a summary table on stdout) or JSON to stdout"""
        if config.out is None:
            print(render_json(data), end="")
            return
        data_exporter.write_report(data, config.out, config.output_format, table)
        print(render_table(table), end="")


# Global command handler
command_handler = CommandHandler()


# Handler functions for the argument parser
def analyze(options: Dict) -> int:
    return command_handler.execute("analyze", options)

def check(options: Dict) -> int:
    return command_handler.execute("check", options)

def export(options: Dict) -> int:
    return command_handler.execute("export", options)

def catalog(options: Dict) -> int:
    return command_handler.execute("catalog", options)
