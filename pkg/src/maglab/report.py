"""Small pass/fail reporting containers shared by the checking layers.

Kept separate so the geometry modules and the verification driver can both
use them without importing each other.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        tail = f" -- {self.detail}" if self.detail else ""
        return f"{tag} {self.name}{tail}"


@dataclass
class VerdictReport:
    title: str
    checks: list = field(default_factory=list)
    facts: dict = field(default_factory=dict)

    def add(self, name: str, passed: bool, detail: str = "") -> CheckResult:
        r = CheckResult(name, bool(passed), detail)
        self.checks.append(r)
        return r

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_text(self) -> str:
        lines = [self.title]
        lines += ["  " + c.line() for c in self.checks]
        for k in sorted(self.facts):
            lines.append(f"  note {k}: {self.facts[k]}")
        lines.append(f"  => {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)

    def to_json(self) -> str:
        obj = {
            "title": self.title,
            "passed": self.passed,
            "checks": [
                {"name": c.name, "passed": c.passed, "detail": c.detail}
                for c in self.checks
            ],
            "facts": self.facts,
        }
        return json.dumps(obj, sort_keys=True, indent=2, default=str)
