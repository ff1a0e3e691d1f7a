"""Executable protocol fixtures: a net, named reductions and expected values."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from ..density import DensityMatrix, h_rho, s_entropy
from ..netcore import QbNet
from ..recipe import Recipe
from ..report import Check, Report, fmt


@dataclass(frozen=True)
class Expectation:
    label: str
    compute: Callable[[], float]
    expected: float
    tol: float = 1e-9
    relation: str = "=="


@dataclass
class ProtocolFixture:
    name: str
    net: QbNet
    reductions: dict[str, Recipe] = field(default_factory=dict)
    expected: list[Expectation] = field(default_factory=list)
    tables: dict[str, list[str]] = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    subnets: dict[str, QbNet] = field(default_factory=dict)
    # reduction name -> subnet name, for recipes that act on a sub-net
    on: dict[str, str] = field(default_factory=dict)
    _cache: dict = field(default_factory=dict, repr=False)

    def density(self, key: str) -> DensityMatrix:
        if key not in self._cache:
            net = self.subnets[self.on[key]] if key in self.on else self.net
            self._cache[key] = self.reductions[key].apply(net)
        return self._cache[key]

    def all_nets(self) -> dict[str, QbNet]:
        return {self.name: self.net, **self.subnets}

    def expect(self, label, compute, expected, tol=1e-9, relation="=="):
        self.expected.append(Expectation(label, compute, float(expected), tol, relation))

    def expect_zero(self, label, compute, tol=1e-9):
        """``compute`` returns a residual that should vanish."""
        self.expect(label, compute, 0.0, tol)

    def expect_entropies(self, key: str, rows, tol: float = 1e-9):
        """``rows`` holds ``(expr, S value, H value)``; either value may be ``None``."""
        for expr, s_val, h_val in rows:
            if s_val is not None:
                self.expect(f"{key}: S({expr})", lambda e=expr: s_entropy(self.density(key), e), s_val, tol)
            if h_val is not None:
                self.expect(f"{key}: H({expr})", lambda e=expr: h_rho(self.density(key), e), h_val, tol)

    def run(self) -> Report:
        rep = Report()
        for e in self.expected:
            rep.checks.append(Check(f"{self.name}: {e.label}", float(e.compute()), e.expected, e.relation, e.tol))
        return rep

    def table_lines(self, key: str) -> list[str]:
        """One ``S`` and ``H`` line per expression of the named table."""
        rho = self.density(key)
        width = max(len(e) for e in self.tables[key])
        return [
            f"{e:<{width}}  S={fmt(s_entropy(rho, e))}  H={fmt(h_rho(rho, e))}"
            for e in self.tables[key]
        ]
