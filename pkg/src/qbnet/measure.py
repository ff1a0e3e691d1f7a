"""Probability operator measures, their dilations and measurement nets."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .density import DensityMatrix, observed_density
from .eig import jacobi_eigh
from .errors import DimensionMismatch, NetStructureError, NotPsd, NotUnitarizable
from .netcore import NodeSpec, QbNet, copy_matrix, delta_root
from .qprob import ProbTable

POM_TOL = 1e-9
GS_SKIP = 1e-10

ORTHOGONAL_PROJECTOR = "orthogonal-projector"
GENERAL = "general"
_VARIANTS = {ORTHOGONAL_PROJECTOR: ORTHOGONAL_PROJECTOR, "a": ORTHOGONAL_PROJECTOR, GENERAL: GENERAL, "b": GENERAL}


@dataclass(frozen=True)
class Pom:
    dim: int
    elements: tuple[np.ndarray, ...]

    def __post_init__(self):
        els = []
        for f in self.elements:
            f = np.array(f, dtype=complex)
            if f.shape != (self.dim, self.dim):
                raise DimensionMismatch(f"POM element of shape {f.shape}, expected {(self.dim, self.dim)}")
            f.setflags(write=False)
            els.append(f)
        if not els:
            raise DimensionMismatch("a POM needs at least one element")
        object.__setattr__(self, "elements", tuple(els))

    @classmethod
    def of(cls, elements: Sequence) -> "Pom":
        els = [np.asarray(f, dtype=complex) for f in elements]
        return cls(els[0].shape[0], tuple(els))

    @property
    def outcomes(self) -> int:
        return len(self.elements)


@dataclass(frozen=True)
class PomReport:
    hermitian: float
    negativity: float
    completeness: float

    @property
    def ok(self) -> bool:
        return max(self.hermitian, self.negativity, self.completeness) < POM_TOL


def validate_pom(p: Pom) -> PomReport:
    herm = max(float(np.max(np.abs(f - f.conj().T))) for f in p.elements)
    neg = 0.0
    for f in p.elements:
        w = jacobi_eigh((f + f.conj().T) / 2).eigenvalues
        neg = max(neg, -float(w[-1]))
    comp = float(np.max(np.abs(sum(p.elements) - np.eye(p.dim))))
    return PomReport(herm, neg, comp)


@dataclass(frozen=True)
class PomClass:
    orthogonal: bool
    pure: bool
    von_neumann: bool


def _is_projector(f: np.ndarray, tol: float = POM_TOL) -> bool:
    return float(np.max(np.abs(f @ f - f))) < tol


def classify_pom(p: Pom, tol: float = POM_TOL) -> PomClass:
    els = p.elements
    orth = all(
        np.linalg.norm(els[i] @ els[j], 2) < tol
        for i in range(len(els))
        for j in range(len(els))
        if i != j
    )
    pure = all(_is_projector(f, tol) and abs(np.trace(f).real - 1) < tol for f in els)
    return PomClass(orth, pure, orth and pure)


def is_projective(p: Pom, tol: float = POM_TOL) -> bool:
    """Mutually orthogonal projectors (any ranks)."""
    return classify_pom(p, tol).orthogonal and all(_is_projector(f, tol) for f in p.elements)


def measure_probs(rho: DensityMatrix, p: Pom, outcome: str = "b") -> ProbTable:
    if rho.dim != p.dim or len(rho.axes) != 1:
        raise DimensionMismatch(f"need a single-axis state of dim {p.dim}, got {rho.dims}")
    probs = np.array([np.trace(rho.data @ f).real for f in p.elements])
    return ProbTable((outcome,), probs)


def sqrt_psd(f) -> np.ndarray:
    f = np.asarray(f, dtype=complex)
    dec = jacobi_eigh(f)
    w = dec.eigenvalues
    if w.size and w.min() < -POM_TOL:
        raise NotPsd(f"eigenvalue {w.min():.3e} below -{POM_TOL:g}")
    v = dec.eigenvectors
    # zero out rounding-level eigenvalues: their square roots would be ~1e-8 noise
    w = np.where(w < 1e-14 * max(1.0, float(w.max(initial=0.0))), 0.0, w)
    return (v * np.sqrt(w)) @ v.conj().T


def _complete_unitary(fixed: dict[int, np.ndarray], n: int) -> np.ndarray:
    """Place ``fixed`` columns and fill the rest by Gram-Schmidt on canonical vectors."""
    basis = [fixed[k] for k in sorted(fixed)]
    gram = np.array(basis) @ np.array(basis).conj().T if basis else np.zeros((0, 0))
    if basis and float(np.max(np.abs(gram - np.eye(len(basis))))) > POM_TOL:
        raise NotUnitarizable("constrained columns are not orthonormal")
    extra = []
    for k in range(n):
        if len(basis) + len(extra) == n:
            break
        w = np.zeros(n, dtype=complex)
        w[k] = 1.0
        for _ in range(2):  # second pass restores orthogonality lost to rounding
            for u in basis + extra:
                w = w - (u.conj() @ w) * u
        norm = float(np.linalg.norm(w))
        if norm < GS_SKIP:
            continue
        extra.append(w / norm)
    if len(basis) + len(extra) != n:
        raise NotUnitarizable("orthonormal completion fell short")
    u = np.zeros((n, n), dtype=complex)
    free = [k for k in range(n) if k not in fixed]
    for k, col in fixed.items():
        u[:, k] = col
    for k, col in zip(free, extra):
        u[:, k] = col
    return u


def _variant(variant: str) -> str:
    try:
        return _VARIANTS[variant]
    except KeyError:
        raise ValueError(f"unknown dilation variant {variant!r}") from None


def dilation_unitary(p: Pom, variant: str = GENERAL) -> np.ndarray:
    """Unitary that writes the outcome ``b`` into pointer register(s).

    The orthogonal-projector variant acts on ``(q, b)`` and maps
    ``|phi, 0>`` to ``sum_b sqrt(F_b)|phi> |b>``.  The general variant acts
    on ``(q, b, x)`` and maps ``|phi, 0, 0>`` to
    ``sum_b sqrt(F_b)|phi> |b> |b>``.  Index order is row-major with ``q``
    slowest.
    """
    variant = _variant(variant)
    d, m = p.dim, p.outcomes
    if variant == ORTHOGONAL_PROJECTOR and not is_projective(p):
        raise ValueError("the orthogonal-projector dilation needs mutually orthogonal projectors")
    roots = [sqrt_psd(f) for f in p.elements]
    anc = m if variant == ORTHOGONAL_PROJECTOR else m * m
    n = d * anc
    fixed = {}
    for q in range(d):
        col = np.zeros(n, dtype=complex)
        for b, r in enumerate(roots):
            pointer = b if variant == ORTHOGONAL_PROJECTOR else b * m + b
            col[np.arange(d) * anc + pointer] = r[:, q]
        fixed[q * anc] = col
    return _complete_unitary(fixed, n)


def default_variant(p: Pom) -> str:
    return ORTHOGONAL_PROJECTOR if is_projective(p) else GENERAL


def pom_net(p: Pom, prep: QbNet, q: str = "q", variant: str | None = None) -> QbNet:
    """Append a dilated measurement of ``p`` on node ``q`` of ``prep``.

    New nodes: pointer roots ``b`` (and ``x`` for the general variant), the
    interaction node ``t`` and its component copies ``q_f``, ``b_f``
    (and ``x_f``).
    """
    variant = _variant(variant) if variant else default_variant(p)
    if q not in prep.dag:
        raise NetStructureError(f"prep net has no node {q!r}")
    if prep.spec(q).dim != p.dim:
        raise DimensionMismatch(f"node {q!r} has dim {prep.spec(q).dim}, POM has dim {p.dim}")
    general = variant == GENERAL
    d, m = p.dim, p.outcomes
    pointers = ["b", "x"] if general else ["b"]
    shape = (d, m, m) if general else (d, m)
    finals = ["q_f", "b_f", "x_f"][: len(shape)]
    clash = set(pointers + ["t"] + finals) & set(prep.names)
    if clash:
        raise NetStructureError(f"prep net already uses names {sorted(clash)}")
    specs = [NodeSpec(b, (m,)) for b in pointers]
    specs.append(NodeSpec("t", shape, tuple([q] + pointers)))
    specs += [NodeSpec(f, (shape[i],), ("t",)) for i, f in enumerate(finals)]
    mats = {b: delta_root(m) for b in pointers}
    mats["t"] = dilation_unitary(p, variant)
    mats.update({f: copy_matrix(shape, i) for i, f in enumerate(finals)})
    return prep.extended(specs, mats)


def pom_net_density(net: QbNet) -> DensityMatrix:
    """State of the pointer ``b_f`` after entry-summing internals and tracing externals."""
    return observed_density(net, ["b_f"])


def basis_pom(d: int) -> Pom:
    return Pom(d, tuple(np.diag(np.eye(d)[k]).astype(complex) for k in range(d)))


def trine_states() -> list[np.ndarray]:
    s = np.sqrt(3) / 2
    return [np.array([1.0, 0.0]), np.array([-0.5, s]), np.array([-0.5, -s])]


def trine_pom() -> Pom:
    return Pom(2, tuple((2 / 3) * (np.eye(2) - np.outer(v, v)) for v in trine_states()))
