"""Classical example nets and data-processing inequalities on Markov chains."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..netcore import CbNet, NodeSpec, topological_order
from ..qprob import cb_entropy, cb_joint
from ..randomness import random_probability, random_stochastic, rng_from
from ..report import Report


@dataclass(frozen=True)
class CbExample:
    """A CB net plus entropy expressions that must vanish on it."""

    name: str
    net: CbNet
    constraints: tuple[str, ...]

    def residuals(self) -> dict[str, float]:
        out = {}
        for c in self.constraints:
            if c == "chain-rule":
                out[c] = chain_rule_residual(self.net)
            else:
                out[c] = cb_entropy(self.net, c)
        return out


def chain_rule_residual(net: CbNet) -> float:
    """``H(all) - sum_j H(x_j | x_1..x_{j-1})`` in topological order."""
    order = topological_order(net.dag)
    total = cb_entropy(net, ",".join(order))
    parts = 0.0
    for i, n in enumerate(order):
        expr = n if i == 0 else f"{n}|({','.join(order[:i])})"
        parts += cb_entropy(net, expr)
    return total - parts


def cb_examples(seed=0) -> list[CbExample]:
    """Diverging, converging, Markov and fully connected 3-node nets, random parameters."""
    rng = rng_from(seed)
    d = [int(x) for x in rng.integers(2, 4, size=3)]
    da, db, dc = d
    pa, pb = random_probability(da, rng), random_probability(db, rng)
    diverging = CbNet(
        [NodeSpec("b", (db,)), NodeSpec("a", (da,), ("b",)), NodeSpec("c", (dc,), ("b",))],
        {"b": pb.reshape(-1, 1), "a": random_stochastic(da, db, rng), "c": random_stochastic(dc, db, rng)},
    )
    converging = CbNet(
        [NodeSpec("a", (da,)), NodeSpec("c", (dc,)), NodeSpec("b", (db,), ("a", "c"))],
        {
            "a": pa.reshape(-1, 1),
            "c": random_probability(dc, rng).reshape(-1, 1),
            "b": random_stochastic(db, da * dc, rng),
        },
    )
    markov = CbNet(
        [NodeSpec("a", (da,)), NodeSpec("b", (db,), ("a",)), NodeSpec("c", (dc,), ("b",))],
        {"a": pa.reshape(-1, 1), "b": random_stochastic(db, da, rng), "c": random_stochastic(dc, db, rng)},
    )
    full = CbNet(
        [NodeSpec("a", (da,)), NodeSpec("b", (db,), ("a",)), NodeSpec("c", (dc,), ("a", "b"))],
        {"a": pa.reshape(-1, 1), "b": random_stochastic(db, da, rng), "c": random_stochastic(dc, da * db, rng)},
    )
    return [
        CbExample("diverging", diverging, ("(a:c)|b",)),
        CbExample("converging", converging, ("a:c",)),
        CbExample("markov", markov, ("(a:c)|b",)),
        CbExample("fully-connected", full, ("chain-rule",)),
    ]


def _chain_order(chain: CbNet) -> list[str]:
    order = topological_order(chain.dag)
    for i, n in enumerate(order):
        want = (order[i - 1],) if i else ()
        if chain.spec(n).parents != want:
            raise ValueError("net is not a simple Markov chain")
    return order


def reversed_conditional(joint: np.ndarray) -> np.ndarray:
    """``P(x | y)`` as a column-stochastic matrix from ``P(x, y)``; unseen ``y`` get uniform columns."""
    py = joint.sum(axis=0)
    out = np.full(joint.shape, 1.0 / joint.shape[0])
    seen = py > 0
    out[:, seen] = joint[:, seen] / py[seen]
    return out


def time_reversed_chain(chain: CbNet) -> CbNet:
    """Extend ``q1 -> q2 -> q3`` by ``q3 -> q2' -> q1'`` with the reversed conditionals."""
    q1, q2, q3 = _chain_order(chain)[:3]
    j = cb_joint(chain)
    p12 = j.marginal([q1, q2]).values  # axes (q1, q2)
    p23 = j.marginal([q2, q3]).values  # axes (q2, q3)
    d1, d2 = chain.spec(q1).dim, chain.spec(q2).dim
    return chain.extended(
        [NodeSpec(q2 + "'", (d2,), (q3,)), NodeSpec(q1 + "'", (d1,), (q2 + "'",))],
        {q2 + "'": reversed_conditional(p23), q1 + "'": reversed_conditional(p12)},
    )


def dp_inequality_check(chain: CbNet, tol: float = 1e-10) -> Report:
    """Fixed-sender and fixed-receiver inequalities plus the time-reversal identities."""
    order = _chain_order(chain)
    if len(order) not in (3, 4):
        raise ValueError("chains of length 3 or 4 are supported")
    h = lambda e: cb_entropy(chain, e)
    rep = Report()
    q1, q2, q3 = order[:3]
    rep.eq(f"H({q1}|{q1}) = 0", h(f"{q1}|{q1}"), 0.0, tol)
    rep.le(f"H({q1}|{q1}) <= H({q1}|{q2})", h(f"{q1}|{q1}"), h(f"{q1}|{q2}"), tol)
    rep.le(f"H({q1}|{q2}) <= H({q1}|{q3})", h(f"{q1}|{q2}"), h(f"{q1}|{q3}"), tol)
    rep.eq(f"H({q1}) = H({q1}:{q1})", h(q1), h(f"{q1}:{q1}"), tol)
    rep.le(f"H({q1}:{q2}) <= H({q1}:{q1})", h(f"{q1}:{q2}"), h(f"{q1}:{q1}"), tol)
    rep.le(f"H({q1}:{q3}) <= H({q1}:{q2})", h(f"{q1}:{q3}"), h(f"{q1}:{q2}"), tol)
    rep.le(f"H({q3}|{q2}) <= H({q3}|{q1})", h(f"{q3}|{q2}"), h(f"{q3}|{q1}"), tol)
    rep.le(f"H({q3}:{q1}) <= H({q3}:{q2})", h(f"{q3}:{q1}"), h(f"{q3}:{q2}"), tol)
    if len(order) == 4:
        q4 = order[3]
        rep.le(f"H({q1}:{q4}) <= H({q1}:{q3})", h(f"{q1}:{q4}"), h(f"{q1}:{q3}"), tol)
        rep.le(f"H({q1}:{q3}) <= H({q2}:{q3})", h(f"{q1}:{q3}"), h(f"{q2}:{q3}"), tol)
        rep.le(f"H({q1}:{q4}) <= H({q2}:{q4})", h(f"{q1}:{q4}"), h(f"{q2}:{q4}"), tol)
        rep.le(f"H({q2}:{q4}) <= H({q2}:{q3})", h(f"{q2}:{q4}"), h(f"{q2}:{q3}"), tol)
        rep.le(f"H({q1}:{q4}) <= H({q2}:{q3})", h(f"{q1}:{q4}"), h(f"{q2}:{q3}"), tol)
    rev = time_reversed_chain(chain)
    hr = lambda e: cb_entropy(rev, e)
    p2, p1 = q2 + "'", q1 + "'"
    rep.eq(f"H({q3}:{p2}) = H({q3}:{q2})", hr(f"{q3}:{p2}"), h(f"{q3}:{q2}"), tol)
    rep.eq(f"H({q3}:{p1}) = H({q3}:{q1})", hr(f"{q3}:{p1}"), h(f"{q3}:{q1}"), tol)
    rep.le(f"H({q3}:{p1}) <= H({q3}:{p2})", hr(f"{q3}:{p1}"), hr(f"{q3}:{p2}"), tol)
    return rep


def copy_chain(dims: int, length: int, seed=0) -> CbNet:
    """Chain whose nodes all copy a random root distribution."""
    rng = rng_from(seed)
    names = [f"q{i + 1}" for i in range(length)]
    specs = [NodeSpec(n, (dims,), (names[i - 1],) if i else ()) for i, n in enumerate(names)]
    mats = {n: (np.eye(dims) if i else random_probability(dims, rng, zeros=False).reshape(-1, 1)) for i, n in enumerate(names)}
    return CbNet(specs, mats)
