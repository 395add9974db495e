"""Verification reports: named residual checks with pass/fail status."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__

SCHEMA_VERSION = 1

PASS, FAIL, VACUOUS, REFUSED = "pass", "fail", "vacuous", "refused"
PLUMBING = "plumbing"


@dataclass
class Check:
    name: str
    residual: float
    tolerance: float
    status: str
    anchor: str = PLUMBING
    notes: str = ""


@dataclass
class VerificationReport:
    suite: str
    checks: list[Check] = field(default_factory=list)
    fingerprint: str = ""
    mode: str = "float"
    engine_version: str = __version__

    def add(self, name, residual, tol, anchor=PLUMBING, notes="", vacuous=False) -> Check:
        residual = float(residual)
        if vacuous:
            status = VACUOUS
        else:
            status = PASS if (residual < tol or residual == 0.0) else FAIL
        check = Check(name, residual, float(tol), status, anchor, notes)
        self.checks.append(check)
        return check

    def refuse(self, name, anchor=PLUMBING, notes="") -> Check:
        check = Check(name, float("nan"), float("nan"), REFUSED, anchor, notes)
        self.checks.append(check)
        return check

    def extend(self, other: "VerificationReport", prefix: str = "") -> "VerificationReport":
        for c in other.checks:
            self.checks.append(Check(prefix + c.name, c.residual, c.tolerance, c.status, c.anchor, c.notes))
        return self

    @property
    def passed(self) -> bool:
        return all(c.status in (PASS, VACUOUS) for c in self.checks)

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.checks if c.status in (FAIL, REFUSED)]

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def __contains__(self, name: str) -> bool:
        return any(c.name == name for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "suite": self.suite,
            "model_fingerprint": self.fingerprint,
            "engine_version": self.engine_version,
            "arithmetic_mode": self.mode,
            "passed": self.passed,
            "checks": [_jsonable(asdict(c)) for c in self.checks],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def summary(self) -> str:
        lines = [f"== {self.suite} [{self.mode}] =="]
        for c in self.checks:
            res = "-" if c.status == REFUSED else f"{c.residual:.3e}"
            lines.append(f"  {c.status.upper():8s} {c.name:55s} residual={res} tol={c.tolerance:.1e}"
                         + (f"  ({c.notes})" if c.notes else ""))
        lines.append(f"  -> {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)


def _jsonable(d: dict) -> dict:
    out = {}
    for k, v in d.items():
        if isinstance(v, float) and v != v:
            out[k] = None
        else:
            out[k] = v
    return out


def fingerprint(*arrays) -> str:
    """Content hash of model data, stable across runs and arithmetic modes."""
    h = hashlib.sha256()
    for a in arrays:
        if isinstance(a, str):
            h.update(a.encode())
            continue
        arr = np.asarray(a)
        h.update(str(arr.shape).encode())
        for x in arr.flat:
            h.update(repr(round(float(x), 12)).encode())
    return h.hexdigest()[:16]


class RefusedError(RuntimeError):
    """A construction refused at a named gate."""

    def __init__(self, gate: str, report: VerificationReport | None = None, message: str = ""):
        self.gate = gate
        self.report = report
        super().__init__(f"refused at gate '{gate}'" + (f": {message}" if message else ""))
