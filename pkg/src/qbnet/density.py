"""Labelled density matrices, reductions, entropies and purification.

Reductions of a net's meta density matrix are evaluated by contracting the
node tensors directly (:func:`reduce_net`), so the full meta state never
has to be materialized.  Projections and entry sums act on the pure meta
state first; partial traces are applied last.  Because reductions on
distinct axes commute, any recipe order gives the same operator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import entexpr
from .eig import EigenDecomposition, check_hermitian, jacobi_eigh
from .report import fmt
from .errors import (
    DimensionMismatch,
    EmptyResult,
    NotNormalized,
    NotPsd,
    StoryCapExceeded,
    UnknownAxis,
    ZeroProbability,
)
from .netcore import (
    STORY_CAP,
    NodeSpec,
    QbNet,
    classify_nodes,
    contract,
    copy_matrix,
)

TRACE_TOL = 1e-9
EIG_CLIP = 1e-9
ZERO_PROB = 1e-12
DENSE_CAP = 2**12


@dataclass(frozen=True)
class Axis:
    node: str
    dim: int


def _axes(axes) -> tuple[Axis, ...]:
    return tuple(a if isinstance(a, Axis) else Axis(*a) for a in axes)


class DensityMatrix:
    """Hermitian unit-trace operator on a labelled tensor product.

    Construction checks shape, Hermiticity and trace.  Positivity needs an
    eigendecomposition and is checked by :meth:`check_positive`.
    """

    def __init__(self, axes, data, *, tol: float = TRACE_TOL):
        self.axes = _axes(axes)
        names = [a.node for a in self.axes]
        if len(set(names)) != len(names):
            raise DimensionMismatch(f"repeated axis names {names}")
        n = math.prod(a.dim for a in self.axes)
        arr = np.array(data, dtype=complex)
        if arr.shape != (n, n):
            raise DimensionMismatch(f"matrix shape {arr.shape} does not match axes ({n}x{n})")
        check_hermitian(arr, tol)
        tr = np.trace(arr).real
        if abs(tr - 1) > tol:
            raise NotNormalized(f"trace is {tr:.12g}, expected 1")
        arr.setflags(write=False)
        self.data = arr

    @classmethod
    def pure(cls, axes, vec) -> "DensityMatrix":
        v = np.asarray(vec, dtype=complex).ravel()
        return cls(axes, np.outer(v, v.conj()))

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(a.node for a in self.axes)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(a.dim for a in self.axes)

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def tensor(self) -> np.ndarray:
        return self.data.reshape(self.dims + self.dims)

    def diagonal(self) -> np.ndarray:
        return np.real(np.diag(self.data)).copy()

    def check_positive(self, tol: float = EIG_CLIP) -> None:
        lo = float(hermitian_eig(self).eigenvalues[-1])
        if lo < -tol:
            raise NotPsd(f"eigenvalue {lo:.3e} below -{tol:g}")

    def __repr__(self):
        return f"DensityMatrix(axes={list(self.names)}, dim={self.dim})"


@dataclass(frozen=True)
class MetaState:
    """Pure state vector over labelled axes (row-major, first axis slowest)."""

    axes: tuple[Axis, ...]
    amplitudes: np.ndarray

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(a.node for a in self.axes)

    def density(self) -> DensityMatrix:
        return DensityMatrix.pure(self.axes, self.amplitudes)


def _net_axes(net: QbNet, names: Iterable[str]) -> tuple[Axis, ...]:
    return tuple(Axis(n, net.spec(n).dim) for n in names)


def meta_state(net: QbNet) -> MetaState:
    if net.dag.story_count() > STORY_CAP:
        raise StoryCapExceeded(f"{net.dag.story_count()} stories exceed the cap of {STORY_CAP}")
    vec = contract(net, net.names).ravel()
    norm = float(np.linalg.norm(vec))
    if abs(norm - 1) > TRACE_TOL:
        raise NotNormalized(f"meta state has norm {norm:.12g}")
    return MetaState(_net_axes(net, net.names), vec)


def meta_density(net: QbNet) -> DensityMatrix:
    """Dense rank-1 meta density matrix; limited to small nets."""
    if net.dag.story_count() > DENSE_CAP:
        raise StoryCapExceeded(
            f"{net.dag.story_count()} stories exceed the dense cap of {DENSE_CAP}; use reduce_net"
        )
    return meta_state(net).density()


def average_vector(dim: int) -> np.ndarray:
    return np.full(dim, 1 / math.sqrt(dim))


def _basis_vector(dim: int, k: int) -> np.ndarray:
    if not 0 <= k < dim:
        raise DimensionMismatch(f"basis index {k} out of range 0..{dim - 1}")
    v = np.zeros(dim)
    v[k] = 1.0
    return v


def _projection_vector(dim: int, target) -> np.ndarray:
    if isinstance(target, (int, np.integer)):
        return _basis_vector(dim, int(target))
    v = np.asarray(target, dtype=complex)
    if v.shape != (dim,):
        raise DimensionMismatch(f"projection vector has shape {v.shape}, axis dim is {dim}")
    return v


def _check_names(have: Sequence[str], want: Iterable[str]) -> list[str]:
    want = list(want)
    missing = [n for n in want if n not in have]
    if missing:
        raise UnknownAxis(f"unknown axes {missing}; available {list(have)}")
    return want


def partial_trace(rho: DensityMatrix, nodes: Iterable[str]) -> DensityMatrix:
    nodes = set(_check_names(rho.names, nodes))
    if not nodes:
        return rho
    keep = [i for i, n in enumerate(rho.names) if n not in nodes]
    if not keep:
        raise EmptyResult("cannot trace out every axis")
    k = len(rho.axes)
    rows = list(range(k))
    cols = [i + k if i in keep else i for i in range(k)]
    out = [i for i in keep] + [i + k for i in keep]
    t = np.einsum(rho.tensor(), rows + cols, out)
    axes = [rho.axes[i] for i in keep]
    n = math.prod(a.dim for a in axes)
    return DensityMatrix(axes, t.reshape(n, n))


def reduce_to(rho: DensityMatrix, nodes: Iterable[str]) -> DensityMatrix:
    """Trace out everything except ``nodes``."""
    keep = set(_check_names(rho.names, nodes))
    return partial_trace(rho, [n for n in rho.names if n not in keep])


def _project_unnormalized(rho: DensityMatrix, node: str, vec) -> tuple[list[Axis], np.ndarray]:
    i = rho.names.index(node)
    v = _projection_vector(rho.axes[i].dim, vec)
    k = len(rho.axes)
    t = np.tensordot(v.conj(), rho.tensor(), axes=([0], [i]))
    t = np.tensordot(t, v, axes=([k - 1 + i], [0]))
    axes = [a for j, a in enumerate(rho.axes) if j != i]
    n = math.prod(a.dim for a in axes)
    return axes, t.reshape(n, n)


def project_reduce(rho: DensityMatrix, node: str, vec) -> DensityMatrix:
    """Normalized ``<vec| rho |vec>`` on the remaining axes.

    ``vec`` is a state vector on the node axis or a basis index.
    """
    _check_names(rho.names, [node])
    if len(rho.axes) == 1:
        raise EmptyResult("projecting the only axis leaves nothing")
    axes, m = _project_unnormalized(rho, node, vec)
    k = float(np.trace(m).real)
    if k < ZERO_PROB:
        raise ZeroProbability(f"projection of {node!r} has probability {k:.3e}")
    return DensityMatrix(axes, m / k)


def esum(rho: DensityMatrix, nodes: Iterable[str]) -> DensityMatrix:
    for n in _check_names(rho.names, nodes):
        rho = project_reduce(rho, n, average_vector(rho.axes[rho.names.index(n)].dim))
    return rho


def reduce_net(
    net: QbNet,
    esum: Iterable[str] = (),
    trace: Iterable[str] = (),
    project: Mapping[str, object] | None = None,
) -> DensityMatrix:
    """Reduce the meta density matrix of ``net`` without building it.

    ``project`` maps node names to a basis index or a state vector.  Every
    node not mentioned stays as an axis of the result, in declaration order.
    The zero-probability cutoff applies to the product of all
    normalization constants.
    """
    esum, trace = list(esum), list(trace)
    project = dict(project or {})
    mentioned = esum + trace + list(project)
    _check_names(net.names, mentioned)
    if len(set(mentioned)) != len(mentioned):
        raise UnknownAxis("a node may be reduced only once")
    weights = {n: average_vector(net.spec(n).dim) for n in esum}
    for n, target in project.items():
        weights[n] = _projection_vector(net.spec(n).dim, target).conj()
    kept = [n for n in net.names if n not in weights]
    survivors = [n for n in kept if n not in trace]
    if not survivors:
        raise EmptyResult("the reduction leaves no axes")
    psi = contract(net, kept, weights)
    k = float(np.sum(np.abs(psi) ** 2))
    if k < ZERO_PROB:
        raise ZeroProbability(f"reduction has probability {k:.3e}")
    psi = psi / math.sqrt(k)
    tr_axes = [kept.index(n) for n in trace]
    sv_axes = [kept.index(n) for n in survivors]
    dims = [net.spec(n).dim for n in survivors]
    n_sv = math.prod(dims)
    m = np.transpose(psi, sv_axes + tr_axes).reshape(n_sv, -1)
    return DensityMatrix(_net_axes(net, survivors), m @ m.conj().T)


def observed_density(net: QbNet, keep: Iterable[str]) -> DensityMatrix:
    """Entry-sum internal nodes and trace external nodes, except ``keep``."""
    keep = set(_check_names(net.names, keep))
    internal, _ = classify_nodes(net.dag)
    others = [n for n in net.names if n not in keep]
    return reduce_net(
        net,
        esum=[n for n in others if n in internal],
        trace=[n for n in others if n not in internal],
    )


def output_amplitudes(net: QbNet) -> tuple[tuple[Axis, ...], np.ndarray]:
    """Unnormalized vector ``sum over internal nodes of A`` on the external axes."""
    _, external = classify_nodes(net.dag)
    ex = [n for n in net.names if n in external]
    return _net_axes(net, ex), contract(net, ex).ravel()


def rho_out(net: QbNet) -> DensityMatrix:
    internal, _ = classify_nodes(net.dag)
    return reduce_net(net, esum=[n for n in net.names if n in internal])


def hermitian_eig(rho) -> EigenDecomposition:
    data = rho.data if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    return jacobi_eigh(data)


def entropy_of_spectrum(w: np.ndarray, clip: float = EIG_CLIP) -> float:
    w = np.asarray(w, dtype=float)
    if w.size and w.min() < -clip:
        raise NotPsd(f"eigenvalue {w.min():.3e} below -{clip:g}")
    return entexpr.shannon_entropy(np.where(w < 0, 0.0, w))


def von_neumann_entropy(rho) -> float:
    return entropy_of_spectrum(hermitian_eig(rho).eigenvalues)


def _joint_callback(rho: DensityMatrix, kind: str):
    cache: dict[frozenset, float] = {}

    def joint(atoms: frozenset[str]) -> float:
        if atoms not in cache:
            sub = reduce_to(rho, atoms)
            if kind == "S":
                cache[atoms] = von_neumann_entropy(sub)
            else:
                cache[atoms] = entexpr.shannon_entropy(np.clip(sub.diagonal(), 0, None))
        return cache[atoms]

    return joint


def _entropy(rho: DensityMatrix, expr, kind: str) -> float:
    total = expr if isinstance(expr, entexpr.SignedJointSum) else entexpr.expand(expr)
    _check_names(rho.names, total.order)
    return entexpr.evaluate(total, _joint_callback(rho, kind))


def s_entropy(rho: DensityMatrix, expr) -> float:
    """Von Neumann entropy of a compound expression (string, AST or expansion)."""
    return _entropy(rho, expr, "S")


def h_rho(rho: DensityMatrix, expr) -> float:
    """Classical entropy of the diagonal distributions for a compound expression."""
    return _entropy(rho, expr, "H")


def coherence(rho: DensityMatrix, nodes: Iterable[str]) -> float:
    sub = reduce_to(rho, nodes)
    return entexpr.shannon_entropy(np.clip(sub.diagonal(), 0, None)) - von_neumann_entropy(sub)


def purify(rho: DensityMatrix, ancilla: str = "ancilla") -> MetaState:
    """Pure state on ``axes(rho) + [ancilla]`` whose ancilla trace is ``rho``.

    Uses ``alpha = U sqrt(Lambda)`` from the eigendecomposition; the ancilla
    has the full dimension of ``rho``.
    """
    if ancilla in rho.names:
        raise DimensionMismatch(f"ancilla name {ancilla!r} collides with an axis")
    alpha = purification_matrix(rho.data)
    return MetaState(rho.axes + (Axis(ancilla, rho.dim),), alpha.ravel())


def purification_matrix(beta: np.ndarray) -> np.ndarray:
    """``alpha`` with ``alpha @ alpha^H == beta``."""
    dec = jacobi_eigh(beta)
    w = dec.eigenvalues
    if w.size and w.min() < -EIG_CLIP:
        raise NotPsd(f"eigenvalue {w.min():.3e} below -{EIG_CLIP:g}")
    # Eigenvalues at rounding level would otherwise contribute sqrt-sized noise.
    w = np.where(w < 1e-14 * max(1.0, float(w.max(initial=0.0))), 0.0, w)
    return dec.eigenvectors * np.sqrt(w)


def mixed_state_net(beta, names: tuple[str, str, str] = ("j", "q", "r")) -> QbNet:
    """Net ``j -> q, j -> r`` whose entry-summed, r-traced state on q is ``beta``."""
    beta = np.asarray(beta.data if isinstance(beta, DensityMatrix) else beta, dtype=complex)
    DensityMatrix([("_", beta.shape[0])], beta)
    alpha = purification_matrix(beta)
    d = beta.shape[0]
    j, q, r = names
    return QbNet(
        [NodeSpec(j, (d, d)), NodeSpec(q, (d,), (j,)), NodeSpec(r, (d,), (j,))],
        {j: alpha.reshape(-1, 1), q: copy_matrix((d, d), 0), r: copy_matrix((d, d), 1)},
    )


def matrix_dump(m) -> str:
    """TSV lines ``row col re im`` in row-major order."""
    data = m.data if isinstance(m, DensityMatrix) else np.asarray(m, dtype=complex)
    lines = []
    for (i, j), z in np.ndenumerate(data):
        lines.append(f"{i}\t{j}\t{fmt(z.real)}\t{fmt(z.imag)}")
    return "\n".join(lines) + "\n"
