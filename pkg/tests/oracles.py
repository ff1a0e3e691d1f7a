"""Brute-force reference implementations used only by the tests.

Nothing here calls the library's contraction, reduction or eigensolver
code: stories are enumerated with itertools, dense matrices are built
explicitly and spectra come from numpy.linalg.
"""

from __future__ import annotations

import itertools
import math

import numpy as np


def stories(net):
    names = [s.name for s in net.dag.nodes]
    dims = [s.dim for s in net.dag.nodes]
    for combo in itertools.product(*(range(d) for d in dims)):
        yield dict(zip(names, combo))


def amplitude(net, story) -> complex:
    """Product of node-matrix entries, parent columns in row-major order."""
    out = 1.0 + 0j
    for spec in net.dag.nodes:
        col = 0
        for p in spec.parents:
            col = col * net.dag[p].dim + story[p]
        out *= net.matrices[spec.name][story[spec.name], col]
    return out


def meta_vector(net) -> np.ndarray:
    return np.array([amplitude(net, s) for s in stories(net)], dtype=complex)


def dims_of(net, names):
    return [net.dag[n].dim for n in names]


def dense_project(rho: np.ndarray, dims: list[int], axis: int, vec) -> tuple[np.ndarray, list[int]]:
    """Unnormalized <vec| rho |vec> on ``axis``, by explicit reshaping."""
    k = len(dims)
    t = rho.reshape(dims + dims)
    v = np.asarray(vec, dtype=complex)
    t = np.moveaxis(t, [axis, k + axis], [0, 1])
    t = np.tensordot(v.conj(), t, axes=([0], [0]))
    t = np.tensordot(v, t, axes=([0], [0]))
    rest = dims[:axis] + dims[axis + 1 :]
    n = math.prod(rest)
    return t.reshape(n, n), rest


def dense_trace(rho: np.ndarray, dims: list[int], axis: int) -> tuple[np.ndarray, list[int]]:
    k = len(dims)
    t = rho.reshape(dims + dims)
    t = np.trace(t, axis1=axis, axis2=k + axis)
    rest = dims[:axis] + dims[axis + 1 :]
    n = math.prod(rest)
    return t.reshape(n, n), rest


def brute_reduce(net, esum=(), trace=(), project=None) -> tuple[np.ndarray, list[str], float]:
    """Build the full meta density matrix, then reduce one axis at a time.

    Returns the normalized matrix, surviving names and the normalization constant.
    """
    names = [s.name for s in net.dag.nodes]
    psi = meta_vector(net)
    rho = np.outer(psi, psi.conj())
    dims = dims_of(net, names)
    steps = [(n, "esum", None) for n in esum] + [(n, "trace", None) for n in trace]
    steps += [(n, "project", k) for n, k in (project or {}).items()]
    for name, op, arg in steps:
        i = names.index(name)
        if op == "trace":
            rho, dims = dense_trace(rho, dims, i)
        else:
            d = dims[i]
            vec = np.full(d, 1 / math.sqrt(d)) if op == "esum" else np.eye(d)[arg]
            rho, dims = dense_project(rho, dims, i, vec)
        names.pop(i)
    tr = float(np.trace(rho).real)
    return (rho / tr if tr > 0 else rho), names, tr


def entropy(rho) -> float:
    w = np.linalg.eigvalsh(np.asarray(rho))
    w = w[w > 1e-15]
    return float(-np.sum(w * np.log2(w)))


def shannon(p) -> float:
    p = np.asarray(p, dtype=float).ravel()
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)))


def chi_sum_probability(net, gamma) -> dict[tuple, float]:
    """Sum amplitudes over internal nodes outside ``gamma``, square, sum the external rest."""
    names = [s.name for s in net.dag.nodes]
    has_child = {p for s in net.dag.nodes for p in s.parents}
    internal = [n for n in names if n in has_child and n not in gamma]
    external = [n for n in names if n not in has_child and n not in gamma]
    amp: dict[tuple, complex] = {}
    for s in stories(net):
        key = (tuple(s[g] for g in gamma), tuple(s[e] for e in external))
        amp[key] = amp.get(key, 0) + amplitude(net, s)
    prob: dict[tuple, float] = {}
    for (g, _), a in amp.items():
        prob[g] = prob.get(g, 0.0) + abs(a) ** 2
    total = sum(prob.values())
    return {g: p / total for g, p in prob.items()}


def haar_unitary(d: int, rng) -> np.ndarray:
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_rho(d: int, rng) -> np.ndarray:
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    m = g @ g.conj().T
    return m / np.trace(m).real


def matrix_log2(m) -> np.ndarray:
    w, v = np.linalg.eigh(m)
    return (v * np.log2(w)) @ v.conj().T


def random_qb_net(rng, max_nodes: int = 4, max_dim: int = 3):
    """Random DAG over ``n0, n1, ...`` with unit-norm complex columns."""
    from qbnet.netcore import NodeSpec, QbNet

    n = int(rng.integers(1, max_nodes + 1))
    dims = [int(rng.integers(1, max_dim + 1)) for _ in range(n)]
    specs, mats = [], {}
    for i in range(n):
        parents = tuple(f"n{j}" for j in range(i) if rng.random() < 0.5)
        cols = math.prod(dims[int(p[1:])] for p in parents)
        m = rng.normal(size=(dims[i], cols)) + 1j * rng.normal(size=(dims[i], cols))
        specs.append(NodeSpec(f"n{i}", (dims[i],), parents))
        mats[f"n{i}"] = m / np.linalg.norm(m, axis=0)
    return QbNet(specs, mats)


def sqrtm_psd(f) -> np.ndarray:
    w, v = np.linalg.eigh(np.asarray(f))
    w = np.where(w < 1e-14 * max(1.0, w.max()), 0.0, w)
    return (v * np.sqrt(w)) @ v.conj().T


def random_pom_elements(d: int, m: int, rng) -> list[np.ndarray]:
    """``F_b = V_b^H V_b`` for the row blocks of a random isometry."""
    k = max(1, -(-d // m))
    g = rng.normal(size=(m * k, d)) + 1j * rng.normal(size=(m * k, d))
    q, _ = np.linalg.qr(g)
    blocks = q.reshape(m, k, d)
    return [blk.conj().T @ blk for blk in blocks]


def subsystem_entropy(rho: np.ndarray, names: list[str], dims: list[int], keep) -> float:
    """Entropy of ``keep`` after tracing every other axis out of ``rho``."""
    names, dims = list(names), list(dims)
    for n in [n for n in names if n not in keep]:
        i = names.index(n)
        rho, dims = dense_trace(rho, dims, i)
        names.pop(i)
    return entropy(rho)


def classical_joint(net) -> dict[tuple, float]:
    """Story probabilities of a classical net: products of conditional table entries."""
    names = [s.name for s in net.dag.nodes]
    return {tuple(s[n] for n in names): float(amplitude(net, s).real) for s in stories(net)}


def classical_h(joint: dict[tuple, float], idx) -> float:
    marg: dict[tuple, float] = {}
    for k, p in joint.items():
        key = tuple(k[i] for i in idx)
        marg[key] = marg.get(key, 0.0) + p
    return shannon(list(marg.values()))


def constraint_residual(p: Pom, u: np.ndarray, general: bool) -> float:
    """Worst deviation of U|q,0[,0]> from sum_b sqrt(F_b)|q>|b>[|b>] over basis inputs."""
    d, m = p.dim, p.outcomes
    anc = m * m if general else m
    roots = [sqrtm_psd(f) for f in p.elements]
    worst = 0.0
    for q in range(d):
        want = np.zeros((d, anc), dtype=complex)
        for b, r in enumerate(roots):
            want[:, b * m + b if general else b] = r[:, q]
        got = u[:, q * anc].reshape(d, anc)
        worst = max(worst, float(np.max(np.abs(got - want))))
    return worst


def direct_entropy(joint, names, expr):
    """Canonical expressions written out from marginals, without the expander."""
    def h(*vs):
        drop = tuple(i for i, n in enumerate(names) if n not in vs)
        return shannon(joint.sum(axis=drop) if drop else joint)

    x, y, z = names[:3]
    return {
        "x|y": h(x, y) - h(y),
        "x:y": h(x) + h(y) - h(x, y),
        "(x:y)|z": h(x, z) + h(y, z) - h(x, y, z) - h(z),
        "(x,y):z": h(x, y) + h(z) - h(x, y, z),
        # H(z) plus the conditional mutual information I(x:y|z)
        "(x:y),z": h(z) + (h(x, z) + h(y, z) - h(x, y, z) - h(z)),
    }[expr]


CANONICAL = ["x|y", "x:y", "(x:y)|z", "(x,y):z", "(x:y),z"]


def random_joint(rng, k):
    shape = tuple(int(rng.integers(2, 4)) for _ in range(k))
    p = rng.dirichlet(np.full(int(np.prod(shape)), 0.6)).reshape(shape)
    return p


def set_of(expr, sets):
    """Union, intersection and difference of plain sets following a parse tree."""
    from qbnet.entexpr import Atom, Colon, Comma

    if isinstance(expr, Atom):
        return sets[expr.name]
    left, right = set_of(expr.left, sets), set_of(expr.right, sets)
    if isinstance(expr, Comma):
        return left | right
    if isinstance(expr, Colon):
        return left & right
    return left - right
