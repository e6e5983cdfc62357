"""Executable checks, the bracket chain and report containers."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

from . import checks as _checks  # noqa: F401  (registers the catalog)
from .catalog import CheckSpec, get_check, list_checks, run_check
from .chain import LINKS, bracket_chain_report
from .report import DEFAULT_TOL, Row, VerificationReport, reports_to_csv


def run_all(seed: int = 0, jobs: int | None = None, ids=None) -> list:
    """Run checks concurrently; results come back in catalog order."""
    ids = list(list_checks()) if ids is None else list(ids)
    jobs = jobs or min(4, os.cpu_count() or 1)
    if jobs <= 1:
        return [run_check(cid, {"seed": seed}) for cid in ids]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(lambda cid: run_check(cid, {"seed": seed}), ids))


__all__ = ["CheckSpec", "DEFAULT_TOL", "LINKS", "Row", "VerificationReport", "bracket_chain_report",
           "get_check", "list_checks", "reports_to_csv", "run_all", "run_check"]
