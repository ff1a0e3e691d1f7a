"""Node-level probability tables of a QB net and of a density matrix."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from . import entexpr
from .density import DensityMatrix, reduce_net, reduce_to
from .errors import EmptyGamma, NotNormalized, UnknownAxis, ZeroDenominator
from .netcore import CbNet, QbNet, classify_nodes, contract, flat_index

NORM_TOL = 1e-10
NEG_TOL = 1e-12
DENOM_CUTOFF = 1e-12


@dataclass(frozen=True)
class ProbTable:
    """Joint distribution; ``values`` has one axis per variable."""

    variables: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != len(self.variables):
            raise ValueError("one array axis per variable is required")
        if v.size and v.min() < -NEG_TOL:
            raise NotNormalized(f"negative probability {v.min():.3e}")
        if abs(v.sum() - 1) > NORM_TOL:
            raise NotNormalized(f"probabilities sum to {v.sum():.12g}")
        v = np.clip(v, 0.0, None)
        v.setflags(write=False)
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "values", v)

    def __getitem__(self, assignment) -> float:
        if isinstance(assignment, Mapping):
            assignment = tuple(assignment[n] for n in self.variables)
        if not isinstance(assignment, tuple):
            assignment = (assignment,)
        return float(self.values[assignment])

    def marginal(self, names: Iterable[str]) -> "ProbTable":
        names = set(names)
        unknown = names - set(self.variables)
        if unknown:
            raise UnknownAxis(f"unknown variables {sorted(unknown)}")
        drop = tuple(i for i, n in enumerate(self.variables) if n not in names)
        kept = tuple(n for n in self.variables if n in names)
        return ProbTable(kept, self.values.sum(axis=drop))

    def entropy(self, expr) -> float:
        """Classical compound entropy of this table (all atoms must be variables)."""
        total = entexpr.expand(expr)
        missing = set(total.order) - set(self.variables)
        if missing:
            raise UnknownAxis(f"unknown variables {sorted(missing)}")
        return entexpr.evaluate(total, entexpr.marginal_entropy_fn(self.values, self.variables))

    def dump(self) -> str:
        lines = ["\t".join(self.variables) + "\tP"]
        for idx, p in np.ndenumerate(self.values):
            lines.append("\t".join(str(i) for i in idx) + f"\t{p:.9f}")
        return "\n".join(lines) + "\n"


def _ordered(names: Iterable[str], universe: tuple[str, ...]) -> tuple[str, ...]:
    names = set(names)
    unknown = names - set(universe)
    if unknown:
        raise UnknownAxis(f"unknown nodes {sorted(unknown)}")
    return tuple(n for n in universe if n in names)


def _table(rho: DensityMatrix) -> ProbTable:
    diag = np.clip(rho.diagonal(), 0.0, None)
    return ProbTable(rho.names, diag.reshape(rho.dims))


def p_gamma(net: QbNet, gamma: Iterable[str]) -> ProbTable:
    """Probability of observing the nodes in ``gamma``.

    Internal nodes outside ``gamma`` are entry-summed, external nodes
    outside it are traced, and the diagonal of the result is returned.
    """
    gamma = _ordered(gamma, net.names)
    if not gamma:
        raise EmptyGamma("gamma must name at least one node")
    internal, external = classify_nodes(net.dag)
    rho = reduce_net(
        net,
        esum=[n for n in net.names if n in internal and n not in gamma],
        trace=[n for n in net.names if n in external and n not in gamma],
    )
    return _table(rho)


def _condition(
    joint: ProbTable, g1: tuple[str, ...], g2: tuple[str, ...], x2: Mapping[str, object], dims
) -> ProbTable:
    if set(x2) != set(g2):
        raise UnknownAxis(f"conditioning values must cover exactly {list(g2)}")
    idx = []
    for n in joint.variables:
        if n in g2:
            idx.append(flat_index(dims[n], x2[n]) if not isinstance(dims[n], int) else _check(n, x2[n], dims[n]))
        else:
            idx.append(slice(None))
    slab = joint.values[tuple(idx)]
    denom = float(slab.sum())
    if denom < DENOM_CUTOFF:
        raise ZeroDenominator(f"conditioning event has probability {denom:.3e}")
    return ProbTable(g1, slab / denom)


def _check(name: str, value, dim: int) -> int:
    v = int(value)
    if not 0 <= v < dim:
        raise UnknownAxis(f"state {v} out of range for {name!r}")
    return v


def _split(g1, g2, universe) -> tuple[tuple[str, ...], tuple[str, ...]]:
    g2 = _ordered(g2, universe)
    g1 = tuple(n for n in _ordered(g1, universe) if n not in g2)
    if not g1 or not g2:
        raise EmptyGamma("both variable sets must be nonempty (after removing the overlap)")
    return g1, g2


def p_gamma_cond(net: QbNet, g1, g2, x2: Mapping[str, object]) -> ProbTable:
    """``P[g1 | g2 = x2]``; nodes of ``g1`` that are also in ``g2`` are dropped."""
    g1, g2 = _split(g1, g2, net.names)
    joint = p_gamma(net, set(g1) | set(g2))
    return _condition(joint, g1, g2, x2, {n: net.spec(n) for n in net.names})


def p_rho(rho: DensityMatrix, gamma: Iterable[str]) -> ProbTable:
    gamma = _ordered(gamma, rho.names)
    if not gamma:
        raise EmptyGamma("gamma must name at least one axis")
    return _table(reduce_to(rho, gamma))


def p_rho_cond(rho: DensityMatrix, g1, g2, x2: Mapping[str, object]) -> ProbTable:
    g1, g2 = _split(g1, g2, rho.names)
    joint = p_rho(rho, set(g1) | set(g2))
    return _condition(joint, g1, g2, x2, {a.node: a.dim for a in rho.axes})


@dataclass(frozen=True)
class ClosureReport:
    p_residual: float  # worst marginalization defect of the net-level family
    p_mu_residual: float  # same for the meta-density family
    worst_pair: tuple[tuple[str, ...], tuple[str, ...]] | None

    def closed(self, tol: float = 1e-10) -> tuple[bool, bool]:
        return self.p_residual < tol, self.p_mu_residual < tol


def closure_check(net: QbNet, max_nodes: int = 8) -> ClosureReport:
    """Worst ``|sum over g' of P[g + g'] - P[g]|`` over disjoint nonempty pairs."""
    names = net.names
    if len(names) > max_nodes:
        raise ValueError(f"closure check is exhaustive; at most {max_nodes} nodes")
    p_cache: dict[tuple[str, ...], ProbTable] = {}
    mu_cache: dict[tuple[str, ...], ProbTable] = {}

    def p(g):
        if g not in p_cache:
            p_cache[g] = p_gamma(net, g)
        return p_cache[g]

    def pmu(g):
        if g not in mu_cache:
            mu_cache[g] = _table(reduce_net(net, trace=[n for n in names if n not in g]))
        return mu_cache[g]

    subsets = [
        tuple(c) for r in range(1, len(names) + 1) for c in itertools.combinations(names, r)
    ]
    worst_p, worst_mu, worst_pair = 0.0, 0.0, None
    for g in subsets:
        for extra in subsets:
            if set(g) & set(extra):
                continue
            union = _ordered(set(g) | set(extra), names)
            for fam, cache_fn in (("p", p), ("mu", pmu)):
                res = float(np.max(np.abs(cache_fn(union).marginal(g).values - cache_fn(g).values)))
                if fam == "p" and res > worst_p:
                    worst_p, worst_pair = res, (g, extra)
                elif fam == "mu":
                    worst_mu = max(worst_mu, res)
    return ClosureReport(worst_p, worst_mu, worst_pair)


def cb_joint(net: CbNet) -> ProbTable:
    """Full joint distribution of a CB net, axes in declaration order."""
    return ProbTable(net.names, contract(net, net.names))


def cb_entropy(net: CbNet, expr) -> float:
    return cb_joint(net).entropy(expr)
