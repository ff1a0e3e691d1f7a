"""Reduction recipes such as ``esum(e,x); trace(b); project(f=2)``."""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .density import DensityMatrix, reduce_net
from .errors import FileFormatError, UnknownAxis
from .netcore import QbNet

_STEP = re.compile(r"^\s*(trace|esum|project)\s*\((.*)\)\s*$")
_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_']*$")


@dataclass(frozen=True)
class Recipe:
    steps: tuple[tuple[str, tuple], ...] = field(default_factory=tuple)

    @classmethod
    def of(cls, esum=(), trace=(), project=None) -> "Recipe":
        steps = []
        if esum:
            steps.append(("esum", tuple(esum)))
        if trace:
            steps.append(("trace", tuple(trace)))
        for n, k in (project or {}).items():
            steps.append(("project", (n, int(k))))
        return cls(tuple(steps))

    def split(self) -> tuple[list[str], list[str], dict[str, int]]:
        es, tr, pr = [], [], {}
        seen: set[str] = set()
        for op, args in self.steps:
            names = [args[0]] if op == "project" else list(args)
            for n in names:
                if n in seen:
                    raise UnknownAxis(f"node {n!r} is reduced twice")
                seen.add(n)
            if op == "esum":
                es += names
            elif op == "trace":
                tr += names
            else:
                pr[args[0]] = args[1]
        return es, tr, pr

    def apply(self, net: QbNet) -> DensityMatrix:
        es, tr, pr = self.split()
        return reduce_net(net, esum=es, trace=tr, project=pr)

    def __str__(self):
        parts = []
        for op, args in self.steps:
            if op == "project":
                parts.append(f"project({args[0]}={args[1]})")
            else:
                parts.append(f"{op}({','.join(args)})")
        return ";".join(parts)


def parse_recipe(text: str) -> Recipe:
    steps = []
    for raw in text.split(";"):
        if not raw.strip():
            continue
        m = _STEP.match(raw)
        if not m:
            raise FileFormatError(f"bad reduction step {raw.strip()!r}")
        op, body = m.group(1), m.group(2)
        items = [s.strip() for s in body.split(",") if s.strip()]
        if op == "project":
            if len(items) != 1 or "=" not in items[0]:
                raise FileFormatError(f"project takes one name=index pair, got {body!r}")
            name, _, idx = (s.strip() for s in items[0].partition("="))
            if not _NAME.match(name) or not idx.isdigit():
                raise FileFormatError(f"bad projection {items[0]!r}")
            steps.append((op, (name, int(idx))))
        else:
            if not items or any(not _NAME.match(n) for n in items):
                raise FileFormatError(f"bad node list in {raw.strip()!r}")
            steps.append((op, tuple(items)))
    return Recipe(tuple(steps))
