"""Graph structure, node matrices, stories and validation for QB and CB nets.

Node matrices are stored as 2-D arrays with one row per node state and one
column per joint parent state.  Parent tuples are ordered lexicographically
over the declared parent list (first parent slowest).  Composite node states
such as ``t = (t1, t2)`` use a flat row-major index over ``state_shape``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .errors import (
    CycleDetected,
    DimensionMismatch,
    NetStructureError,
    StoryCapExceeded,
)

NORM_TOL = 1e-9
STORY_CAP = 2**20


@dataclass(frozen=True)
class NodeSpec:
    name: str
    state_shape: tuple[int, ...]
    parents: tuple[str, ...] = ()

    def __post_init__(self):
        shape = (self.state_shape,) if isinstance(self.state_shape, int) else self.state_shape
        object.__setattr__(self, "state_shape", tuple(int(d) for d in shape))
        object.__setattr__(self, "parents", tuple(self.parents))
        if not self.name or not isinstance(self.name, str):
            raise NetStructureError("node name must be a non-empty string")
        if not self.state_shape or any(d < 1 for d in self.state_shape):
            raise NetStructureError(f"node {self.name!r}: state dimensions must be positive")
        if self.name in self.parents:
            raise NetStructureError(f"node {self.name!r} lists itself as a parent")
        if len(set(self.parents)) != len(self.parents):
            raise NetStructureError(f"node {self.name!r} has a repeated parent")

    @property
    def dim(self) -> int:
        return math.prod(self.state_shape)


class LabeledDag:
    """Ordered collection of nodes; arrows are implied by the parent lists."""

    def __init__(self, nodes: Iterable[NodeSpec]):
        self.nodes: tuple[NodeSpec, ...] = tuple(nodes)
        self._by_name: dict[str, NodeSpec] = {}
        for spec in self.nodes:
            if spec.name in self._by_name:
                raise NetStructureError(f"duplicate node name {spec.name!r}")
            self._by_name[spec.name] = spec
        for spec in self.nodes:
            for p in spec.parents:
                if p not in self._by_name:
                    raise NetStructureError(f"node {spec.name!r}: unknown parent {p!r}")
        self._children: dict[str, list[str]] = {s.name: [] for s in self.nodes}
        for spec in self.nodes:
            for p in spec.parents:
                self._children[p].append(spec.name)
        self._order = _kahn(self)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.nodes)

    def __contains__(self, name: str) -> bool:
        return name in self._by_name

    def __getitem__(self, name: str) -> NodeSpec:
        try:
            return self._by_name[name]
        except KeyError:
            raise NetStructureError(f"unknown node {name!r}") from None

    def children(self, name: str) -> tuple[str, ...]:
        return tuple(self._children[name])

    def parent_dims(self, name: str) -> tuple[int, ...]:
        return tuple(self._by_name[p].dim for p in self._by_name[name].parents)

    def story_count(self) -> int:
        return math.prod(s.dim for s in self.nodes)


def _kahn(dag: LabeledDag) -> tuple[str, ...]:
    indeg = {s.name: len(s.parents) for s in dag.nodes}
    placed: list[str] = []
    done: set[str] = set()
    # Repeatedly take the earliest-declared node whose parents are all placed.
    while len(placed) < len(dag.nodes):
        for spec in dag.nodes:
            if spec.name not in done and indeg[spec.name] == 0:
                placed.append(spec.name)
                done.add(spec.name)
                for c in dag._children[spec.name]:
                    indeg[c] -= 1
                break
        else:
            stuck = [s.name for s in dag.nodes if s.name not in done]
            raise CycleDetected(f"directed cycle among nodes {stuck}")
    return tuple(placed)


def topological_order(dag: LabeledDag) -> list[str]:
    """Parents before children; ties resolved by declaration order."""
    return list(dag._order)


def classify_nodes(dag: LabeledDag) -> tuple[frozenset[str], frozenset[str]]:
    """Return ``(internal, external)``; a node is internal iff it has a child."""
    internal = frozenset(n for n in dag.names if dag._children[n])
    return internal, frozenset(dag.names) - internal


class _Net:
    _dtype: type = complex

    def __init__(self, nodes: Iterable[NodeSpec], matrices: Mapping[str, np.ndarray]):
        self.dag = LabeledDag(nodes)
        mats: dict[str, np.ndarray] = {}
        for spec in self.dag.nodes:
            if spec.name not in matrices:
                raise DimensionMismatch(f"no matrix supplied for node {spec.name!r}")
            m = np.array(matrices[spec.name], dtype=self._dtype)
            if m.ndim == 1:
                m = m.reshape(-1, 1)
            want = (spec.dim, math.prod(self.dag.parent_dims(spec.name)))
            if m.shape != want:
                raise DimensionMismatch(
                    f"node {spec.name!r}: matrix shape {m.shape}, expected {want}"
                )
            m.setflags(write=False)
            mats[spec.name] = m
        extra = set(matrices) - set(self.dag.names)
        if extra:
            raise DimensionMismatch(f"matrices given for unknown nodes {sorted(extra)}")
        self.matrices: Mapping[str, np.ndarray] = mats

    @classmethod
    def build(cls, *entries):
        """Build from ``(name, state_shape, parents, matrix)`` tuples."""
        specs = [NodeSpec(n, s, tuple(p)) for n, s, p, _ in entries]
        return cls(specs, {n: m for n, _, _, m in entries})

    @property
    def names(self) -> tuple[str, ...]:
        return self.dag.names

    def spec(self, name: str) -> NodeSpec:
        return self.dag[name]

    def node_tensor(self, name: str) -> np.ndarray:
        """Node matrix reshaped to ``(dim, *parent_dims)``."""
        return self.matrices[name].reshape((self.dag[name].dim,) + self.dag.parent_dims(name))

    def extended(self, nodes: Iterable[NodeSpec], matrices: Mapping[str, np.ndarray]):
        """New net with extra nodes appended after the existing ones."""
        return type(self)(self.dag.nodes + tuple(nodes), {**self.matrices, **matrices})

    def __repr__(self):
        return f"{type(self).__name__}({', '.join(self.names)})"


class QbNet(_Net):
    _dtype = complex


class CbNet(_Net):
    _dtype = float


@dataclass(frozen=True)
class Story:
    """Complete assignment of node states.

    Values are flat indices or component tuples for composite nodes.
    """

    assignment: Mapping[str, int | tuple[int, ...]]

    def flat(self, dag: LabeledDag) -> dict[str, int]:
        out = {}
        missing = set(dag.names) - set(self.assignment)
        if missing:
            raise DimensionMismatch(f"story lacks nodes {sorted(missing)}")
        for name, value in self.assignment.items():
            out[name] = flat_index(dag[name], value)
        return out


def flat_index(spec: NodeSpec, value) -> int:
    if isinstance(value, (tuple, list)):
        if len(value) != len(spec.state_shape):
            raise DimensionMismatch(f"node {spec.name!r}: expected {len(spec.state_shape)} components")
        for v, d in zip(value, spec.state_shape):
            if not 0 <= int(v) < d:
                raise DimensionMismatch(f"node {spec.name!r}: component {v} out of range")
        return int(np.ravel_multi_index(tuple(int(v) for v in value), spec.state_shape))
    v = int(value)
    if not 0 <= v < spec.dim:
        raise DimensionMismatch(f"node {spec.name!r}: state {v} out of range 0..{spec.dim - 1}")
    return v


def _as_story(s) -> Story:
    return s if isinstance(s, Story) else Story(dict(s))


def _story_factors(net: _Net, s) -> Iterator:
    flat = _as_story(s).flat(net.dag)
    for spec in net.dag.nodes:
        col = 0
        for p in spec.parents:
            col = col * net.dag[p].dim + flat[p]
        yield net.matrices[spec.name][flat[spec.name], col]


def story_amplitude(net: QbNet, s) -> complex:
    return complex(np.prod(list(_story_factors(net, s))))


def story_probability(net: CbNet, s) -> float:
    return float(np.prod(list(_story_factors(net, s))))


def iter_stories(dag: LabeledDag) -> Iterator[dict[str, int]]:
    """Every story as ``{name: flat index}``, first node slowest."""
    if dag.story_count() > STORY_CAP:
        raise StoryCapExceeded(f"{dag.story_count()} stories exceed the cap of {STORY_CAP}")
    names = dag.names
    for combo in itertools.product(*(range(s.dim) for s in dag.nodes)):
        yield dict(zip(names, combo))


def parent_cb_net(net: QbNet) -> CbNet:
    return CbNet(net.dag.nodes, {n: np.abs(m) ** 2 for n, m in net.matrices.items()})


def contract(
    net: _Net,
    keep: Sequence[str] = (),
    weights: Mapping[str, np.ndarray] | None = None,
    tensors: Mapping[str, np.ndarray] | None = None,
) -> np.ndarray:
    """Sum the story product over every node not in ``keep``.

    A summed node ``n`` is weighted by ``weights[n]`` (a vector on its
    states, default all ones).  The result has one axis per kept node, in
    the order given.  ``tensors`` overrides node tensors (e.g. squared
    magnitudes) without building a new net.
    """
    weights = weights or {}
    keep = list(keep)
    unknown = [n for n in list(keep) + list(weights) if n not in net.dag]
    if unknown:
        raise NetStructureError(f"unknown nodes {unknown}")
    if set(keep) & set(weights):
        raise NetStructureError("a node cannot be both kept and weighted")
    out_size = math.prod(net.dag[n].dim for n in keep)
    if out_size > STORY_CAP:
        raise StoryCapExceeded(f"result with {out_size} entries exceeds the cap of {STORY_CAP}")
    label = {n: i for i, n in enumerate(net.names)}
    operands: list = []
    for spec in net.dag.nodes:
        t = tensors[spec.name] if tensors and spec.name in tensors else net.node_tensor(spec.name)
        operands += [t, [label[spec.name]] + [label[p] for p in spec.parents]]
    for name, vec in weights.items():
        vec = np.asarray(vec)
        if vec.shape != (net.dag[name].dim,):
            raise DimensionMismatch(f"weight vector for {name!r} has shape {vec.shape}")
        operands += [vec, [label[name]]]
    operands.append([label[n] for n in keep])
    return np.einsum(*operands, optimize="greedy")


@dataclass(frozen=True)
class Violation:
    node: str | None
    constraint: str
    residual: float

    def __str__(self):
        where = self.node if self.node is not None else "<net>"
        return f"{where}: {self.constraint} residual {self.residual:.3e}"


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)
    residuals: dict[tuple[str | None, str], float] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations

    def _record(self, node, constraint, residual, tol=NORM_TOL):
        self.residuals[(node, constraint)] = float(residual)
        if not residual < tol:
            self.violations.append(Violation(node, constraint, float(residual)))


def validate(net: _Net, tol: float = NORM_TOL) -> ValidationReport:
    """Check every normalization condition; report instead of raising."""
    rep = ValidationReport()
    quantum = isinstance(net, QbNet)
    for name, m in net.matrices.items():
        if quantum:
            rep._record(name, "column-norm", np.max(np.abs(np.sum(np.abs(m) ** 2, axis=0) - 1)), tol)
        else:
            rep._record(name, "negative-entry", max(0.0, -float(np.min(m))), tol)
            rep._record(name, "column-sum", np.max(np.abs(np.sum(m, axis=0) - 1)), tol)
    if quantum:
        sq = {n: np.abs(net.node_tensor(n)) ** 2 for n in net.names}
        rep._record(None, "story-norm", abs(float(np.real(contract(net, (), tensors=sq))) - 1), tol)
        _, external = classify_nodes(net.dag)
        ex = [n for n in net.names if n in external]
        psi = contract(net, ex)
        rep._record(None, "io-norm", abs(float(np.sum(np.abs(psi) ** 2)) - 1), tol)
    else:
        rep._record(None, "story-norm", abs(float(contract(net, ())) - 1), tol)
    return rep


# Matrix helpers used by net builders -------------------------------------


def copy_matrix(parent_shape: Sequence[int], component: int) -> np.ndarray:
    """Deterministic node that copies one component of a composite parent."""
    parent_shape = tuple(parent_shape)
    d = parent_shape[component]
    n = math.prod(parent_shape)
    m = np.zeros((d, n))
    for col, idx in enumerate(np.ndindex(*parent_shape)):
        m[idx[component], col] = 1.0
    return m


def delta_root(dim: int, state: int = 0) -> np.ndarray:
    """Root node fixed in one basis state."""
    m = np.zeros((dim, 1))
    m[state, 0] = 1.0
    return m
