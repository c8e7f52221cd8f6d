"""Structured check reports: named residuals with tolerances and verdicts.

Record names are stable equation-style tags (eq_21q, eq_32, ...) so that
downstream tooling can grep them without parsing prose.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

from .numerics import DEFAULT_TOL, InvalidInputError, Tolerance


@dataclass(frozen=True)
class CheckRecord:
    name: str
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.residual <= self.tolerance


@dataclass
class CheckReport:
    system: str
    tolerances: Tolerance = field(default_factory=lambda: DEFAULT_TOL)
    seeds: dict = field(default_factory=dict)
    records: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)

    def add(self, name: str, residual: float, tolerance: float) -> None:
        if any(r.name == name for r in self.records):
            raise InvalidInputError(f"duplicate check record {name!r}")
        self.records.append(
            CheckRecord(name=name, residual=float(residual),
                        tolerance=float(tolerance))
        )

    def merge(self, other: "CheckReport") -> None:
        for r in other.records:
            self.add(r.name, r.residual, r.tolerance)
        self.timings.update(other.timings)

    def record(self, name: str) -> CheckRecord:
        for r in self.records:
            if r.name == name:
                return r
        raise KeyError(name)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def to_dict(self) -> dict:
        return {
            "system": self.system,
            "passed": self.passed,
            "tolerances": {
                "rank_rel": self.tolerances.rank_rel,
                "weak_eq": self.tolerances.weak_eq,
                "surface": self.tolerances.surface,
            },
            "seeds": dict(self.seeds),
            "checks": [
                {
                    "name": r.name,
                    "residual": r.residual,
                    "tolerance": r.tolerance,
                    "pass": r.passed,
                }
                for r in self.records
            ],
            "timings": dict(self.timings),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    @staticmethod
    def from_dict(doc: dict) -> "CheckReport":
        tolerances = Tolerance(**doc["tolerances"])
        rep = CheckReport(
            system=doc["system"],
            tolerances=tolerances,
            seeds=dict(doc.get("seeds", {})),
            timings=dict(doc.get("timings", {})),
        )
        for c in doc["checks"]:
            rep.add(c["name"], c["residual"], c["tolerance"])
        return rep

    def summary_lines(self) -> list:
        lines = [f"system: {self.system}"]
        for r in self.records:
            verdict = "pass" if r.passed else "FAIL"
            lines.append(
                f"  {r.name:<14} residual {r.residual:11.4e}  "
                f"tol {r.tolerance:8.1e}  {verdict}"
            )
        lines.append(f"overall: {'pass' if self.passed else 'FAIL'}")
        return lines
