"""Machine-readable run reports."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Any

import numpy as np


@dataclass
class Check:
    name: str
    passed: bool
    observed: Any
    tolerance: Any

    def as_dict(self) -> dict:
        return {"name": self.name, "pass": bool(self.passed), "observed": self.observed, "tolerance": self.tolerance}


def check_le(name: str, observed: float, bound: float) -> Check:
    return Check(name, bool(observed <= bound), observed, f"<= {bound!r}")


def check_in(name: str, observed: float, lo: float, hi: float) -> Check:
    return Check(name, bool(lo <= observed <= hi), observed, f"in [{lo!r}, {hi!r}]")


def check_lt(name: str, observed: float, other: float) -> Check:
    return Check(name, bool(observed < other), observed, f"< {other!r}")


def check_eq(name: str, observed: Any, expected: Any) -> Check:
    return Check(name, observed == expected, observed, f"== {expected!r}")


def to_jsonable(x: Any) -> Any:
    """Big integers become decimal strings, complex numbers ``{re, im}``."""
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else repr(x)
    if isinstance(x, (complex, np.complexfloating)):
        return {"re": float(x.real), "im": float(x.imag)}
    if isinstance(x, np.ndarray):
        return [to_jsonable(v) for v in x.tolist()]
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v) for v in x]
    if hasattr(x, "as_dict"):
        return to_jsonable(x.as_dict())
    raise TypeError(f"cannot serialise {type(x).__name__}")


@dataclass
class RunReport:
    command: str
    parameters: dict = field(default_factory=dict)
    results: dict = field(default_factory=dict)
    checks: list[Check] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def as_dict(self, deterministic: bool = False) -> dict:
        out = {
            "command": self.command,
            "parameters": to_jsonable(self.parameters),
            "results": to_jsonable(self.results),
            "checks": [to_jsonable(c.as_dict()) for c in self.checks],
            "ok": self.ok,
        }
        if not deterministic:
            out["timestamp"] = datetime.now(timezone.utc).isoformat()
        return out

    def to_json(self, deterministic: bool = False) -> str:
        return json.dumps(self.as_dict(deterministic), indent=2)

    def to_csv(self) -> str:
        """Tabular results as CSV; a ``rows`` result becomes the table body."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        rows = self.results.get("rows")
        if rows:
            keys = list(rows[0].keys())
            w.writerow(keys)
            for r in rows:
                w.writerow([_csv_cell(to_jsonable(r[k])) for k in keys])
        else:
            w.writerow(["key", "value"])
            for k, v in self.results.items():
                w.writerow([k, _csv_cell(to_jsonable(v))])
        for c in self.checks:
            w.writerow([f"check:{c.name}", "pass" if c.passed else "FAIL", _csv_cell(to_jsonable(c.observed)), c.tolerance])
        return buf.getvalue()


def _csv_cell(v: Any) -> str:
    if isinstance(v, (dict, list)):
        return json.dumps(v)
    return "" if v is None else str(v)
