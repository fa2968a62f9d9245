"""Residual reports shared by all verification routines."""

from __future__ import annotations

import json
from dataclasses import dataclass, field


@dataclass
class Report:
    """Named residuals; a check passes iff every residual is zero.

    Symbolic residuals are stored as strings of exact polynomials or
    multivectors ("0" when they vanish); numeric ones as floats with the
    tolerance they were compared against.
    """

    name: str
    entries: list = field(default_factory=list)
    flags: dict = field(default_factory=dict)
    tolerance: float | None = None

    def add(self, label: str, residual) -> None:
        """Record an exact residual (Polynomial, Multivector or rational)."""
        zero = residual.is_zero() if hasattr(residual, "is_zero") else residual == 0
        self.entries.append({"label": label, "residual": str(residual), "ok": bool(zero)})

    def add_numeric(self, label: str, value: float, tol: float) -> None:
        self.entries.append({"label": label, "residual": float(value), "ok": bool(value <= tol)})

    def extend(self, other: "Report", prefix: str = "") -> None:
        for e in other.entries:
            self.entries.append(dict(e, label=prefix + e["label"]))
        for k, v in other.flags.items():
            self.flags.setdefault(prefix + k, v)

    @property
    def passed(self) -> bool:
        return all(e["ok"] for e in self.entries)

    def failures(self) -> list:
        return [e for e in self.entries if not e["ok"]]

    def to_dict(self) -> dict:
        d = {"name": self.name, "passed": self.passed, "entries": self.entries}
        if self.flags:
            d["flags"] = self.flags
        if self.tolerance is not None:
            d["tolerance"] = self.tolerance
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Report":
        return cls(d["name"], [dict(e) for e in d["entries"]], dict(d.get("flags", {})),
                   d.get("tolerance"))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, ensure_ascii=False)

    def table(self, show_all: bool = False) -> str:
        lines = [f"{self.name}: {'PASS' if self.passed else 'FAIL'}"]
        if self.tolerance is not None:
            lines.append(f"  tolerance {self.tolerance:g}")
        for k, v in self.flags.items():
            lines.append(f"  {k} = {v}")
        rows = self.entries if show_all else self.failures()
        for e in rows:
            mark = "ok  " if e["ok"] else "FAIL"
            r = e["residual"]
            r = f"{r:.3e}" if isinstance(r, float) else r
            lines.append(f"  [{mark}] {e['label']}: {r}")
        if not show_all:
            lines.append(f"  {len(self.entries)} residuals checked, {len(self.failures())} nonzero")
        return "\n".join(lines)


class VerificationError(ValueError):
    """A check that was asserted to pass did not; carries the report."""

    def __init__(self, report: Report, message: str | None = None):
        self.report = report
        super().__init__(message or report.table())
