"""Check reports and their line-oriented JSON serialization."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

import numpy as np


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        obj = float(obj)
        return obj if np.isfinite(obj) else repr(obj)
    return obj


@dataclass
class CheckReport:
    """Outcome of one numerical check.

    ``max_violation`` is compared against ``tol`` to set ``passed``;
    failures are data, not exceptions.
    """

    check: str
    trials: int
    max_violation: float
    passed: bool
    tol: float | None = None
    witness: Any = None
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = {
            "check": self.check,
            "trials": self.trials,
            "max_violation": self.max_violation,
            "tol": self.tol,
            "pass": self.passed,
        }
        if self.witness is not None:
            d["witness"] = self.witness
        if self.details:
            d["details"] = self.details
        return _plain(d)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def dumps_line(obj) -> str:
    """One deterministic JSON line."""
    return json.dumps(_plain(obj), sort_keys=True)


def render(reports, summary_extra: dict | None = None) -> str:
    """Reports as JSON lines followed by a summary record."""
    lines = [r.to_json() for r in reports]
    summary = {
        "checks": len(reports),
        "failed": [r.check for r in reports if not r.passed],
        "pass": all(r.passed for r in reports),
        "max_violation": max((r.max_violation for r in reports), default=0.0),
    }
    if summary_extra:
        summary.update(summary_extra)
    lines.append(dumps_line({"summary": summary}))
    return "\n".join(lines) + "\n"
