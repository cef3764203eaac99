"""
Data Processing Utilities for FuzzyCesaro
Writes traces and reports as CSV/JSON and renders the summary tables
"""

import json
import re
from pathlib import Path
from typing import Dict, List, Optional, Union

import pandas as pd
from loguru import logger

from config.settings import settings
from core.integration import IntegralTrace

EXPORT_FORMATS = ("json", "csv", "both")
CSV_FLOAT_FORMAT = "%.17g"


def render_json(data: Union[Dict, List]) -> str:
    """Stable JSON text: insertion order, repr floats, trailing newline"""
    return json.dumps(data, indent=2) + "\n"


def slugify(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]+", "_", name).strip("_") or "function"


def _targets(path: Path, output_format: str) -> Dict[str, Path]:
    if output_format not in EXPORT_FORMATS:
        raise ValueError(f"Unsupported export format: {output_format}")
    if output_format == "both":
        return {"csv": path.with_suffix(".csv"), "json": path.with_suffix(".json")}
    return {output_format: path}


class DataExporter:
    """Exports traces and reports to files"""

    def __init__(self, export_path: Optional[Union[str, Path]] = None):
        self.export_path = Path(export_path or settings.export_path)

    def default_path(self, trace: IntegralTrace) -> Path:
        """Deterministic file stem under the export directory"""
        return self.export_path / f"{slugify(trace.f_name)}_trace"

    def export_trace(self, trace: IntegralTrace, path: Optional[Path], output_format: str = "csv") -> List[Path]:
        """
        Write the trace as CSV, JSON or both

        CSV columns are exactly t, alpha, s_lower, s_upper, sigma_lower,
        sigma_upper with one row per (t, alpha); sigma is empty at t = 0.
        With "both", PATH.csv and PATH.json are written.
        """
        if path is None:
            path = self.default_path(trace)
            if output_format != "both":
                path = path.with_suffix(f".{output_format}")

        written = []
        for kind, target in _targets(Path(path), output_format).items():
            target.parent.mkdir(parents=True, exist_ok=True)
            if kind == "csv":
                self._export_to_csv(trace.to_frame(), target)
            else:
                self._export_to_json(trace.to_dict(), target)
            written.append(target)

        logger.info(f"Exported trace of {trace.f_name} ({trace.t.size} samples) to "
                    f"{', '.join(str(p) for p in written)}")
        return written

    def write_report(
        self, data: Union[Dict, List], path: Path, output_format: str = "json",
        table: Optional[pd.DataFrame] = None,
    ) -> List[Path]:
        """Report JSON (and the summary table as CSV for csv/both)"""
        written = []
        for kind, target in _targets(Path(path), output_format).items():
            target.parent.mkdir(parents=True, exist_ok=True)
            if kind == "json":
                self._export_to_json(data, target)
            else:
                if table is None:
                    raise ValueError("CSV output needs a summary table")
                self._export_to_csv(table, target)
            written.append(target)
        logger.info(f"Report written to {', '.join(str(p) for p in written)}")
        return written

    def _export_to_csv(self, frame: pd.DataFrame, filepath: Path):
        frame.to_csv(filepath, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")

    def _export_to_json(self, data: Union[Dict, List], filepath: Path):
        with open(filepath, "w", encoding="utf-8") as f:
            f.write(render_json(data))


# Summary tables for stdout

def analysis_table(report: Dict) -> pd.DataFrame:
    """One row per limit estimate and per checker outcome"""
    rows = []
    for key in ("integral_limit", "cesaro_limit"):
        estimate = report[key]
        rows.append({
            "item": key,
            "status": estimate["status"],
            "residual": estimate["residual"],
            "scale": estimate["scale"],
        })
    for outcome in report["checkers"]:
        witness = outcome.get("witness")
        rows.append({
            "item": outcome["name"],
            "status": outcome["outcome"],
            "residual": witness["margin"] if witness else None,
            "scale": outcome["params"]["range"][1],
        })
    return pd.DataFrame(rows, columns=["item", "status", "residual", "scale"])


def checker_table(outcomes: List[Dict]) -> pd.DataFrame:
    rows = []
    for outcome in outcomes:
        witness = outcome.get("witness") or {}
        rows.append({
            "checker": outcome["name"],
            "outcome": outcome["outcome"],
            "t": witness.get("t"),
            "x": witness.get("x"),
            "alpha": witness.get("alpha"),
            "margin": witness.get("margin"),
        })
    return pd.DataFrame(rows, columns=["checker", "outcome", "t", "x", "alpha", "margin"])


def catalog_table(manifest: List[Dict]) -> pd.DataFrame:
    return pd.DataFrame(
        [{"name": entry["name"], "lower": entry["lower_expr"], "upper": entry["upper_expr"]}
         for entry in manifest],
        columns=["name", "lower", "upper"],
    )


def render_table(frame: pd.DataFrame) -> str:
    if frame.empty:
        return "(empty)\n"
    return frame.to_string(index=False) + "\n"


# Global data exporter
data_exporter = DataExporter()
