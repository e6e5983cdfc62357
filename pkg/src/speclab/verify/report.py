"""Verification report container and its JSON/CSV forms."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

DEFAULT_TOL = 1e-10


def _clean(x):
    if isinstance(x, float):
        return x if math.isfinite(x) else None
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if hasattr(x, "item"):
        return _clean(x.item())
    return x


@dataclass
class Row:
    grid: dict
    measured: float
    bound: float | None = None

    @property
    def margin(self):
        return None if self.bound is None else self.bound - self.measured

    def passes(self, tol: float) -> bool:
        if self.bound is None:
            return True
        slack = abs(self.bound) * tol
        return bool(self.measured <= self.bound + slack)

    def to_dict(self) -> dict:
        return {"grid": _clean(self.grid), "measured": _clean(float(self.measured)),
                "bound": None if self.bound is None else _clean(float(self.bound)),
                "margin": None if self.margin is None else _clean(float(self.margin))}


@dataclass
class VerificationReport:
    check_id: str
    params: dict
    rows: list = field(default_factory=list)
    tol: float = DEFAULT_TOL
    stats: dict = field(default_factory=dict)
    runtime_seconds: float = 0.0

    @property
    def verdict(self) -> str:
        bounded = [r for r in self.rows if r.bound is not None]
        if not bounded:
            return "info"
        return "pass" if all(r.passes(self.tol) for r in bounded) else "fail"

    @property
    def passed(self) -> bool:
        return self.verdict != "fail"

    def failures(self):
        return [r for r in self.rows if not r.passes(self.tol)]

    def add(self, grid, measured, bound=None) -> Row:
        row = Row(dict(grid), float(measured), None if bound is None else float(bound))
        self.rows.append(row)
        return row

    def to_dict(self, include_runtime: bool = False) -> dict:
        out = {"check_id": self.check_id, "params": _clean(self.params),
               "rows": [r.to_dict() for r in self.rows], "verdict": self.verdict,
               "tol": self.tol, "stats": _clean(self.stats)}
        if include_runtime:
            out["runtime_seconds"] = self.runtime_seconds
        return out

    def to_json(self, include_runtime: bool = False) -> str:
        return json.dumps(self.to_dict(include_runtime), indent=1)


CSV_COLUMNS = ["check_id", "grid", "measured", "bound", "margin", "verdict"]


def _fmt(x):
    return "" if x is None else "%.17g" % x


def reports_to_csv(reports) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for rep in reports:
        verdict = rep.verdict
        for row in rep.rows:
            w.writerow([rep.check_id, json.dumps(_clean(row.grid), sort_keys=True),
                        _fmt(row.measured), _fmt(row.bound), _fmt(row.margin), verdict])
    return buf.getvalue()
