"""Seeded random instances for property checks and demos."""

from __future__ import annotations

import numpy as np

from .netcore import CbNet, NodeSpec


def rng_from(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def random_unitary(d: int, rng) -> np.ndarray:
    """Haar-distributed unitary from the QR factorization of a complex Gaussian matrix."""
    rng = rng_from(rng)
    z = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_state(d: int, rng) -> np.ndarray:
    rng = rng_from(rng)
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return v / np.linalg.norm(v)


def random_density(d: int, rng, rank: int | None = None) -> np.ndarray:
    """Random density matrix ``G G^H / tr``; rank defaults to a random value in ``1..d``."""
    rng = rng_from(rng)
    k = rank if rank is not None else int(rng.integers(1, d + 1))
    g = rng.normal(size=(d, k)) + 1j * rng.normal(size=(d, k))
    m = g @ g.conj().T
    m = (m + m.conj().T) / 2
    return m / np.trace(m).real


def random_probability(n: int, rng, zeros: bool = True) -> np.ndarray:
    """Random distribution; with ``zeros`` some entries may vanish exactly."""
    rng = rng_from(rng)
    p = rng.dirichlet(np.full(n, 0.7))
    if zeros and n > 1 and rng.random() < 0.2:
        p[rng.integers(n)] = 0.0
        if p.sum() == 0:
            p[0] = 1.0
        p = p / p.sum()
    return p


def random_stochastic(rows: int, cols: int, rng, zeros: bool = True) -> np.ndarray:
    rng = rng_from(rng)
    return np.stack([random_probability(rows, rng, zeros) for _ in range(cols)], axis=1)


def random_cb_net(rng, max_nodes: int = 4, max_states: int = 3) -> CbNet:
    """Random DAG over ``n0, n1, ...``; arrows only from earlier to later nodes."""
    rng = rng_from(rng)
    n = int(rng.integers(1, max_nodes + 1))
    dims = [int(rng.integers(2, max_states + 1)) for _ in range(n)]
    specs, mats = [], {}
    for i in range(n):
        parents = tuple(f"n{j}" for j in range(i) if rng.random() < 0.5)
        cols = int(np.prod([dims[int(p[1:])] for p in parents])) if parents else 1
        specs.append(NodeSpec(f"n{i}", (dims[i],), parents))
        mats[f"n{i}"] = random_stochastic(dims[i], cols, rng)
    return CbNet(specs, mats)


def random_markov_chain(length: int, rng, max_states: int = 3, names=None) -> CbNet:
    rng = rng_from(rng)
    names = list(names or [f"q{i + 1}" for i in range(length)])
    dims = [int(rng.integers(2, max_states + 1)) for _ in range(length)]
    specs, mats = [], {}
    for i, name in enumerate(names):
        parents = (names[i - 1],) if i else ()
        specs.append(NodeSpec(name, (dims[i],), parents))
        mats[name] = random_stochastic(dims[i], dims[i - 1] if i else 1, rng)
    return CbNet(specs, mats)
