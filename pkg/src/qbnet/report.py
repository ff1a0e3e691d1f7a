"""Pass/fail records for numerical identity and inequality checks."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Check:
    label: str
    lhs: float
    rhs: float
    relation: str  # "==" or "<="
    tol: float

    @property
    def residual(self) -> float:
        if self.relation == "==":
            return abs(self.lhs - self.rhs)
        return max(0.0, self.lhs - self.rhs)

    @property
    def ok(self) -> bool:
        return self.residual <= self.tol

    def __str__(self):
        status = "PASS" if self.ok else "FAIL"
        return f"{status} {self.label}: {fmt(self.lhs)} {self.relation} {fmt(self.rhs)}"


@dataclass
class Report:
    checks: list[Check] = field(default_factory=list)

    def eq(self, label, lhs, rhs, tol=1e-8):
        self.checks.append(Check(label, float(lhs), float(rhs), "==", tol))

    def le(self, label, lhs, rhs, tol=1e-8):
        self.checks.append(Check(label, float(lhs), float(rhs), "<=", tol))

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.ok]

    def __str__(self):
        return "\n".join(str(c) for c in self.checks)

    def extend(self, other: "Report", prefix: str = "") -> "Report":
        for c in other.checks:
            self.checks.append(Check(prefix + c.label, c.lhs, c.rhs, c.relation, c.tol))
        return self


def fmt(x: float) -> str:
    """Nine decimals without a spurious minus sign on zero."""
    s = f"{float(x):.9f}"
    return s[1:] if s.startswith("-") and float(s) == 0 else s
