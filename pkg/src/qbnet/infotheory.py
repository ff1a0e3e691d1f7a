"""Signal ensembles, Holevo information and accessible information."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import entexpr
from .density import (
    DensityMatrix,
    observed_density,
    purification_matrix,
    reduce_net,
    s_entropy,
    h_rho,
    reduce_to,
    von_neumann_entropy,
)
from .errors import DimensionMismatch, NotNormalized
from .measure import GENERAL, Pom, measure_probs, pom_net, trine_pom, trine_states
from .netcore import NodeSpec, QbNet, copy_matrix
from .qprob import ProbTable
from .report import Check, Report

WEIGHT_TOL = 1e-10


@dataclass(frozen=True)
class Ensemble:
    weights: np.ndarray
    signals: np.ndarray  # shape (n, d, d)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float).ravel()
        sig = np.array([np.asarray(s.data if isinstance(s, DensityMatrix) else s, dtype=complex) for s in self.signals])
        if sig.ndim != 3 or sig.shape[1] != sig.shape[2] or sig.shape[0] != w.size:
            raise DimensionMismatch("need one square signal matrix per weight, all of one dimension")
        if w.min() < 0 or abs(w.sum() - 1) > WEIGHT_TOL:
            raise NotNormalized(f"weights must be non-negative and sum to 1 (sum {w.sum():.12g})")
        for s in sig:
            DensityMatrix([("q", sig.shape[1])], s).check_positive()
        w.setflags(write=False)
        sig.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "signals", sig)

    @classmethod
    def pure(cls, weights, states) -> "Ensemble":
        states = [np.asarray(v, dtype=complex) for v in states]
        return cls(weights, np.array([np.outer(v, v.conj()) for v in states]))

    @property
    def dim(self) -> int:
        return self.signals.shape[1]

    @property
    def size(self) -> int:
        return self.signals.shape[0]

    def tensor(self, other: "Ensemble") -> "Ensemble":
        """Product ensemble with signals ``rho_a (x) sigma_a'``, labels in row-major order."""
        w = np.outer(self.weights, other.weights).ravel()
        sig = [np.kron(a, b) for a in self.signals for b in other.signals]
        return Ensemble(w, np.array(sig))


def ensemble_avg(e: Ensemble, axis: str = "q") -> DensityMatrix:
    return DensityMatrix([(axis, e.dim)], np.einsum("a,aij->ij", e.weights, e.signals))


def holevo(e: Ensemble) -> float:
    avg = von_neumann_entropy(ensemble_avg(e))
    return avg - float(sum(w * von_neumann_entropy(s) for w, s in zip(e.weights, e.signals)))


@dataclass(frozen=True)
class ChannelTable:
    prior: np.ndarray  # P(a)
    conditional: np.ndarray  # P(b|a), rows indexed by a

    def __post_init__(self):
        rows = self.conditional.sum(axis=1)
        if np.max(np.abs(rows - 1)) > 1e-9:
            raise NotNormalized("each row of P(b|a) must sum to 1")

    def joint(self) -> ProbTable:
        return ProbTable(("a", "b"), self.prior[:, None] * self.conditional)

    def posterior(self) -> np.ndarray:
        """``P(a|b)`` by Bayes' rule; columns with ``P(b)=0`` are left at zero."""
        j = self.prior[:, None] * self.conditional
        pb = j.sum(axis=0)
        return np.divide(j, pb, out=np.zeros_like(j), where=pb > 0)


def channel(e: Ensemble, p: Pom) -> ChannelTable:
    if p.dim != e.dim:
        raise DimensionMismatch(f"POM dim {p.dim} differs from signal dim {e.dim}")
    cond = np.array([measure_probs(DensityMatrix([("q", e.dim)], s), p).values for s in e.signals])
    return ChannelTable(e.weights.copy(), np.clip(cond, 0, None))


def mutual_info(t: ChannelTable) -> float:
    return t.joint().entropy("a:b")


# Nets realizing an ensemble ------------------------------------------------


def _signal_matrix(e: Ensemble) -> np.ndarray:
    """Column ``a`` holds the flattened purification amplitudes of signal ``a``."""
    return np.stack([purification_matrix(s).ravel() for s in e.signals], axis=1)


def scalar_weight_net(e: Ensemble) -> QbNet:
    """Nodes ``a -> j -> (q, r)`` with root amplitudes ``sqrt(w_a)``.

    The net generally violates the external-node norm condition; its
    prescribed reduction (:func:`scalar_weight_density`) still yields the
    ensemble average.
    """
    d, n = e.dim, e.size
    return QbNet(
        [NodeSpec("a", (n,)), NodeSpec("j", (d, d), ("a",)), NodeSpec("q", (d,), ("j",)), NodeSpec("r", (d,), ("j",))],
        {
            "a": np.sqrt(e.weights).reshape(-1, 1),
            "j": _signal_matrix(e),
            "q": copy_matrix((d, d), 0),
            "r": copy_matrix((d, d), 1),
        },
    )


def scalar_weight_density(net: QbNet) -> DensityMatrix:
    return reduce_net(net, esum=["j"], trace=["a", "r"])


def orthogonal_weight_net(e: Ensemble) -> QbNet:
    """Nodes ``j' -> (a, r')``, ``a -> j -> (q, r)`` with ``j'`` carrying ``sqrt(w) delta``."""
    d, n = e.dim, e.size
    jw = np.zeros((n, n))
    jw[np.arange(n), np.arange(n)] = np.sqrt(e.weights)
    return QbNet(
        [
            NodeSpec("j'", (n, n)),
            NodeSpec("a", (n,), ("j'",)),
            NodeSpec("r'", (n,), ("j'",)),
            NodeSpec("j", (d, d), ("a",)),
            NodeSpec("q", (d,), ("j",)),
            NodeSpec("r", (d,), ("j",)),
        ],
        {
            "j'": jw.reshape(-1, 1),
            "a": copy_matrix((n, n), 0),
            "r'": copy_matrix((n, n), 1),
            "j": _signal_matrix(e),
            "q": copy_matrix((d, d), 0),
            "r": copy_matrix((d, d), 1),
        },
    )


def orthogonal_weight_density(net: QbNet) -> DensityMatrix:
    """``sigma`` on ``(a, q)``: entry-sum ``j', j`` and trace ``r', r``."""
    return reduce_net(net, esum=["j'", "j"], trace=["r'", "r"])


# Accessible information search ----------------------------------------------


def _block(d: int, m: int) -> int:
    return -(-d // m)  # rows per outcome so that the isometry has at least d rows


def pom_from_isometry(v: np.ndarray, m: int) -> Pom:
    d = v.shape[1]
    vb = v.reshape(m, -1, d)
    return Pom(d, tuple(blk.conj().T @ blk for blk in vb))


def _info_and_grad(v, m, signals, w, want_grad=True):
    d = v.shape[1]
    vb = v.reshape(m, -1, d)
    vr = np.einsum("bkd,ade->abke", vb, signals)
    cond = np.einsum("abke,bke->ab", vr, vb.conj()).real
    cond = np.clip(cond, 0.0, None)
    joint = w[:, None] * cond
    pb = joint.sum(axis=0)
    ratio = np.divide(cond, pb[None, :], out=np.ones_like(cond), where=(joint > 0) & (pb[None, :] > 0))
    logr = np.log2(ratio)
    info = float(np.sum(joint * logr))
    if not want_grad:
        return info, None
    grad = np.einsum("a,ab,abke->bke", w, logr, vr).reshape(v.shape)
    return info, grad


def _retract(x: np.ndarray) -> np.ndarray:
    u, _, vh = np.linalg.svd(x, full_matrices=False)
    return u @ vh


def _ascend(v, m, signals, w, iterations, grad_tol=1e-10):
    """Riemannian gradient ascent on the isometries with Armijo backtracking."""
    f, g = _info_and_grad(v, m, signals, w)
    step = 1.0
    for _ in range(iterations):
        vg = v.conj().T @ g
        xi = g - v @ ((vg + vg.conj().T) / 2)
        slope = float(np.sum(np.abs(xi) ** 2))
        if slope < grad_tol**2:
            break
        step = min(step * 2.0, 1e3)
        while step > 1e-14:
            cand = _retract(v + step * xi)
            fc, _ = _info_and_grad(cand, m, signals, w, want_grad=False)
            if fc >= f + 1e-4 * step * slope:
                break
            step /= 2
        else:
            break
        v = cand
        f, g = _info_and_grad(v, m, signals, w)
    return v, f


@dataclass
class SearchTrace:
    restart_values: list[float] = field(default_factory=list)
    baseline_values: list[float] = field(default_factory=list)


def maximize_accessible_info(
    e: Ensemble,
    outcomes: int | None = None,
    restarts: int = 8,
    seed: int = 0,
    baselines: Sequence[Pom] = (),
    iterations: int = 400,
    trace: SearchTrace | None = None,
) -> tuple[Pom, float]:
    """Best mutual information found over POMs with ``outcomes`` elements.

    Each restart draws a random isometry from its own child seed and climbs
    the mutual information along the isometry manifold.  The POM elements
    are ``V_b^H V_b`` for row blocks ``V_b``.  Baseline POMs are scored as
    extra candidates.  Ties keep the earliest candidate.
    """
    d = e.dim
    m = outcomes or d * d
    if m < 1:
        raise ValueError("need at least one outcome")
    k = _block(d, m)
    signals, w = e.signals, e.weights
    best_pom, best = None, -np.inf
    streams = np.random.SeedSequence(seed).spawn(restarts)
    for ss in streams:
        rng = np.random.default_rng(ss)
        g = rng.normal(size=(m * k, d)) + 1j * rng.normal(size=(m * k, d))
        v, _ = _ascend(_retract(g), m, signals, w, iterations)
        pom = pom_from_isometry(v, m)
        val = mutual_info(channel(e, pom))
        if trace is not None:
            trace.restart_values.append(val)
        if val > best:
            best_pom, best = pom, val
    for pom in baselines:
        val = mutual_info(channel(e, pom))
        if trace is not None:
            trace.baseline_values.append(val)
        if val > best:
            best_pom, best = pom, val
    if best_pom is None:
        # No restarts and no baselines: the trivial one-outcome measurement.
        best_pom = Pom(d, (np.eye(d, dtype=complex),))
        best = mutual_info(channel(e, best_pom))
    return best_pom, float(best)


# Holevo-bound net -------------------------------------------------------------


def holevo_net_check(e: Ensemble, p: Pom, tol: float = 1e-8) -> Report:
    """Run the measured signal net and compare its entropies with the Holevo quantity."""
    chi = holevo(e)
    prep = orthogonal_weight_net(e)
    sigma = orthogonal_weight_density(prep)
    net = pom_net(p, prep, q="q", variant=GENERAL)
    rho_f = observed_density(net, ["a", "q_f", "b_f", "x_f"])
    rep = Report()
    rep.eq("S_sigma(a:q) = chi", s_entropy(sigma, "a:q"), chi, tol)
    rep.eq("S_sigma(a) = H(w)", s_entropy(sigma, "a"), entexpr.shannon_entropy(e.weights), tol)
    rep.eq("S_f(a) = S_sigma(a)", s_entropy(rho_f, "a"), s_entropy(sigma, "a"), tol)
    rep.eq("S_f(b_f,q_f,x_f) = S_sigma(q)", s_entropy(rho_f, "b_f,q_f,x_f"), s_entropy(sigma, "q"), tol)
    rep.eq("S_f(a,b_f,q_f,x_f) = S_sigma(a,q)", s_entropy(rho_f, "a,b_f,q_f,x_f"), s_entropy(sigma, "a,q"), tol)
    rep.eq("S_f(a:(b_f,q_f,x_f)) = chi", s_entropy(rho_f, "a:(b_f,q_f,x_f)"), chi, tol)
    s_ab = s_entropy(rho_f, "a:b_f")
    rep.le("S_f(a:b_f) <= S_f(a:(b_f,q_f,x_f))", s_ab, s_entropy(rho_f, "a:(b_f,q_f,x_f)"), tol)
    rep.eq("H_f(a:b_f) = S_f(a:b_f)", h_rho(rho_f, "a:b_f"), s_ab, tol)
    info = mutual_info(channel(e, p))
    rep.eq("H_f(a:b_f) = H(a:b) of the channel", h_rho(rho_f, "a:b_f"), info, tol)
    rep.le("H(a:b) <= chi", info, chi, tol)
    ab = reduce_to(rho_f, ["a", "b_f"])
    joint = channel(e, p).joint().values.ravel()
    rep.eq("tr_{q_f,x_f} rho_f = diag P(a,b)", float(np.max(np.abs(ab.data - np.diag(joint)))), 0.0, tol)
    return rep


def commuting_ensemble_check(weights, spectra, basis) -> tuple[float, float]:
    """Holevo quantity and classical mutual information for signals sharing ``basis``.

    Returns both values; they coincide when the signals commute.
    """
    basis = np.asarray(basis, dtype=complex)
    signals = [(basis * np.asarray(s)) @ basis.conj().T for s in spectra]
    e = Ensemble(weights, np.array(signals))
    joint = np.asarray(weights)[:, None] * np.asarray(spectra, dtype=float)
    classical = ProbTable(("a", "b"), joint).entropy("a:b")
    return holevo(e), classical


__all__ = [
    "ChannelTable",
    "Check",
    "Ensemble",
    "Report",
    "SearchTrace",
    "channel",
    "commuting_ensemble_check",
    "double_trine_ensemble",
    "ensemble_avg",
    "holevo",
    "holevo_net_check",
    "maximize_accessible_info",
    "mutual_info",
    "orthogonal_weight_density",
    "orthogonal_weight_net",
    "pom_from_isometry",
    "scalar_weight_density",
    "scalar_weight_net",
    "trine_ensemble",
    "trine_product_pom",
]


def trine_ensemble() -> Ensemble:
    """Three equiprobable real qubit states at 120 degrees."""
    return Ensemble.pure(np.full(3, 1 / 3), trine_states())


def double_trine_ensemble() -> Ensemble:
    """Each trine state sent twice, as ``v (x) v`` on two qubits."""
    return Ensemble.pure(np.full(3, 1 / 3), [np.kron(v, v) for v in trine_states()])


def trine_product_pom() -> Pom:
    """Trine measurement applied to each qubit separately (9 outcomes)."""
    t = trine_pom().elements
    return Pom(4, tuple(np.kron(a, b) for a in t for b in t))
