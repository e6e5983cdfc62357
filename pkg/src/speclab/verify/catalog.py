"""Registry of named checks."""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable

from ..errors import ArgumentError, UnknownCheckError
from ..rng import label_key
from .report import DEFAULT_TOL, VerificationReport


@dataclass(frozen=True)
class CheckSpec:
    check_id: str
    description: str
    module: str
    anchor: str
    defaults: dict = field(default_factory=dict)
    func: Callable | None = field(default=None, repr=False, compare=False)
    tol: float = DEFAULT_TOL


_REGISTRY: dict = {}


def check(check_id, description, module, anchor, tol=DEFAULT_TOL, **defaults):
    def wrap(func):
        if check_id in _REGISTRY:
            raise ValueError(f"duplicate check id {check_id}")
        params = {"seed": 0}
        params.update(defaults)
        _REGISTRY[check_id] = CheckSpec(check_id, description, module, anchor, params, func, tol)
        return func
    return wrap


def list_checks() -> dict:
    """check_id -> CheckSpec, in registration order."""
    return dict(_REGISTRY)


def get_check(check_id) -> CheckSpec:
    try:
        return _REGISTRY[check_id]
    except KeyError:
        raise UnknownCheckError(check_id, _REGISTRY) from None


def run_check(check_id: str, overrides: dict | None = None) -> VerificationReport:
    spec = get_check(check_id)
    params = dict(spec.defaults)
    for key, val in (overrides or {}).items():
        if key not in params:
            raise ArgumentError(f"check {check_id!r} has no parameter {key!r}; "
                                f"known: {', '.join(sorted(params))}")
        params[key] = val
    report = VerificationReport(check_id, params, tol=spec.tol)
    key = label_key(int(params["seed"]), check_id)
    start = time.perf_counter()
    spec.func(report, params, key)
    report.runtime_seconds = time.perf_counter() - start
    return report
