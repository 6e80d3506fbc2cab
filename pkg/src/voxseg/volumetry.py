"""Mask volumetry and comparative case reports.

A report row compares a manually contoured mask against a tool-produced one:
overlap (DSC), symmetric Hausdorff distance, volumes, volume ratio, slice
span, and operator-recorded segmentation times with their ratio.  The final
row carries per-column means.  CSV output is byte-deterministic: ratios and
DSC at 2 decimals, HD in mm at 2 decimals, volumes as integers when the
voxel volume makes them integral.
"""

from __future__ import annotations

import json
import time
from contextlib import contextmanager
from dataclasses import dataclass, field

import numpy as np

from .errors import VoxsegError
from .grid import LabelVolume, require_binary
from .metrics import dice, hausdorff
from .nrrd_io import read_nrrd

CSV_COLUMNS = [
    "case_id",
    "mt_min",
    "tool_min",
    "slices",
    "time_ratio",
    "dsc",
    "hd_mm",
    "vol_manual_mm3",
    "vol_tool_mm3",
    "vol_ratio",
]


def mask_volume_mm3(mask: LabelVolume) -> float:
    """Foreground voxel count times the voxel volume."""
    arr = require_binary(mask)
    sx, sy, sz = mask.spacing
    return float(np.count_nonzero(arr)) * sx * sy * sz


def slice_span(mask: LabelVolume, axis: str = "z") -> int:
    """Number of slices perpendicular to ``axis`` containing foreground."""
    arr = require_binary(mask)
    if axis not in ("x", "y", "z"):
        raise ValueError(f"axis must be x, y or z, got {axis!r}")
    ax = {"x": 2, "y": 1, "z": 0}[axis]
    other = tuple(i for i in range(3) if i != ax)
    return int(np.count_nonzero(arr.any(axis=other)))


@contextmanager
def timer_scope(elapsed: dict, phase: str):
    """Record wall-clock duration of the enclosed block under ``phase``.

    Re-entering a phase accumulates; phases never opened stay absent.
    """
    t0 = time.perf_counter()
    try:
        yield
    finally:
        elapsed[phase] = elapsed.get(phase, 0.0) + (time.perf_counter() - t0)


class PhaseTimer:
    """Collects named wall-clock phases (init, iterate, refine, total)."""

    def __init__(self):
        self.elapsed: dict[str, float] = {}

    def scope(self, phase: str):
        return timer_scope(self.elapsed, phase)


@dataclass
class CaseReport:
    case_id: str
    manual_time_s: float | None = None
    tool_time_s: float | None = None
    slice_count: int | None = None
    time_ratio: float | None = None
    dsc: float | None = None
    hd_mm: float | None = None
    vol_manual_mm3: float | None = None
    vol_tool_mm3: float | None = None
    vol_ratio: float | None = None
    error: str | None = None


@dataclass
class ReportInput:
    case_id: str
    manual_path: str
    tool_path: str
    manual_time_s: float | None = None
    tool_time_s: float | None = None


@dataclass
class Report:
    cases: list[CaseReport] = field(default_factory=list)
    averages: CaseReport | None = None


def compute_case(
    case_id: str,
    manual: LabelVolume,
    tool: LabelVolume,
    manual_time_s: float | None = None,
    tool_time_s: float | None = None,
    axis: str = "z",
) -> CaseReport:
    hd = hausdorff(tool, manual)
    vol_manual = mask_volume_mm3(manual)
    vol_tool = mask_volume_mm3(tool)
    time_ratio = None
    if manual_time_s is not None and manual_time_s > 0 and tool_time_s is not None:
        time_ratio = tool_time_s / manual_time_s
    return CaseReport(
        case_id=case_id,
        manual_time_s=manual_time_s,
        tool_time_s=tool_time_s,
        slice_count=slice_span(manual, axis),
        time_ratio=time_ratio,
        dsc=dice(tool, manual),
        hd_mm=hd.h_sym,
        vol_manual_mm3=vol_manual,
        vol_tool_mm3=vol_tool,
        vol_ratio=(vol_tool / vol_manual) if vol_manual > 0 else None,
    )


def build_report(pairs: list[ReportInput], axis: str = "z") -> Report:
    """Per-case metrics plus a final per-column means row.

    A failing case is reported in place (``error`` set) and excluded from the
    means; it does not abort the batch.
    """
    report = Report()
    for pair in pairs:
        try:
            manual = read_nrrd(pair.manual_path, as_labels=True)
            tool = read_nrrd(pair.tool_path, as_labels=True)
            row = compute_case(
                pair.case_id, manual, tool, pair.manual_time_s, pair.tool_time_s, axis
            )
        except VoxsegError as exc:
            row = CaseReport(case_id=pair.case_id, error=f"{type(exc).__name__}: {exc}")
        report.cases.append(row)
    report.averages = _column_means(report.cases)
    return report


def _mean_or_none(values: list) -> float | None:
    present = [v for v in values if v is not None]
    return sum(present) / len(present) if present else None


def _column_means(cases: list[CaseReport]) -> CaseReport:
    ok = [c for c in cases if c.error is None]
    return CaseReport(
        case_id="averages",
        manual_time_s=_mean_or_none([c.manual_time_s for c in ok]),
        tool_time_s=_mean_or_none([c.tool_time_s for c in ok]),
        slice_count=None,
        time_ratio=_mean_or_none([c.time_ratio for c in ok]),
        dsc=_mean_or_none([c.dsc for c in ok]),
        hd_mm=_mean_or_none([c.hd_mm for c in ok]),
        vol_manual_mm3=_mean_or_none([c.vol_manual_mm3 for c in ok]),
        vol_tool_mm3=_mean_or_none([c.vol_tool_mm3 for c in ok]),
        vol_ratio=_mean_or_none([c.vol_ratio for c in ok]),
    )


def _fmt2(v: float | None) -> str:
    return "" if v is None else f"{v:.2f}"


def _fmt_minutes(seconds: float | None) -> str:
    return "" if seconds is None else f"{seconds / 60.0:.2f}"


def _fmt_mm3(v: float | None) -> str:
    if v is None:
        return ""
    if abs(v - round(v)) <= 1e-6:
        return str(int(round(v)))
    return f"{v:.2f}"


def _csv_cells(row: CaseReport, slices_mean: float | None = None) -> list[str]:
    if row.error is not None:
        return [row.case_id] + [""] * (len(CSV_COLUMNS) - 1)
    if row.case_id == "averages":
        slices = _fmt2(slices_mean)
        vol_m = "" if row.vol_manual_mm3 is None else str(int(round(row.vol_manual_mm3)))
        vol_t = "" if row.vol_tool_mm3 is None else str(int(round(row.vol_tool_mm3)))
    else:
        slices = "" if row.slice_count is None else str(row.slice_count)
        vol_m = _fmt_mm3(row.vol_manual_mm3)
        vol_t = _fmt_mm3(row.vol_tool_mm3)
    return [
        row.case_id,
        _fmt_minutes(row.manual_time_s),
        _fmt_minutes(row.tool_time_s),
        slices,
        _fmt2(row.time_ratio),
        _fmt2(row.dsc),
        _fmt2(row.hd_mm),
        vol_m,
        vol_t,
        _fmt2(row.vol_ratio),
    ]


def report_to_csv(report: Report) -> str:
    lines = [",".join(CSV_COLUMNS)]
    for row in report.cases:
        lines.append(",".join(_csv_cells(row)))
    if report.averages is not None:
        ok = [c for c in report.cases if c.error is None and c.slice_count is not None]
        slices_mean = _mean_or_none([float(c.slice_count) for c in ok])
        lines.append(",".join(_csv_cells(report.averages, slices_mean)))
    return "\n".join(lines) + "\n"


def _row_dict(row: CaseReport) -> dict:
    d = {
        "case_id": row.case_id,
        "mt_min": None if row.manual_time_s is None else row.manual_time_s / 60.0,
        "tool_min": None if row.tool_time_s is None else row.tool_time_s / 60.0,
        "slices": row.slice_count,
        "time_ratio": row.time_ratio,
        "dsc": row.dsc,
        "hd_mm": row.hd_mm,
        "vol_manual_mm3": row.vol_manual_mm3,
        "vol_tool_mm3": row.vol_tool_mm3,
        "vol_ratio": row.vol_ratio,
    }
    if row.error is not None:
        d["error"] = row.error
    return d


def report_to_json(report: Report) -> str:
    obj = {"cases": [_row_dict(c) for c in report.cases]}
    if report.averages is not None:
        avg = _row_dict(report.averages)
        ok = [c for c in report.cases if c.error is None and c.slice_count is not None]
        avg["slices"] = _mean_or_none([float(c.slice_count) for c in ok])
        obj["averages"] = avg
    return json.dumps(obj, separators=(",", ":"))
