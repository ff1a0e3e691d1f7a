"""Two-qubit protocol nets built on a spin-singlet source: pair, eraser, teleportation, dense coding."""

from __future__ import annotations

import math

import numpy as np

from ..density import (
    DensityMatrix,
    _project_unnormalized,
    coherence,
    output_amplitudes,
    project_reduce,
    reduce_to,
)
from ..entexpr import shannon_entropy
from ..errors import DimensionMismatch, NotNormalized
from ..netcore import NodeSpec, QbNet, contract, copy_matrix, validate
from ..recipe import Recipe
from .fixture import ProtocolFixture

SQ2 = math.sqrt(2.0)
ALPHA_TOL = 1e-10

SINGLET = np.array([0.0, 1.0, -1.0, 0.0]) / SQ2  # amplitude on e = (e1, e2), e1 slowest


def _source(x: str = "x", y: str = "y") -> tuple[list[NodeSpec], dict[str, np.ndarray]]:
    specs = [NodeSpec("e", (2, 2)), NodeSpec(x, (2,), ("e",)), NodeSpec(y, (2,), ("e",))]
    mats = {"e": SINGLET.reshape(-1, 1), x: copy_matrix((2, 2), 0), y: copy_matrix((2, 2), 1)}
    return specs, mats


def bell_unitary() -> np.ndarray:
    """``<Bell(f) | a, x>``; rows are ``f = (f1, f2)``, columns ``(a, x)``, first index slowest."""
    u = np.zeros((4, 4))
    for f1, f2, a, x in np.ndindex(2, 2, 2, 2):
        v = float(a == 0 and x == f1) + (-1) ** f2 * float(a == 1 and x == 1 - f1)
        u[2 * f1 + f2, 2 * a + x] = v / SQ2
    return u


def teleport_receiver() -> np.ndarray:
    """Correction applied at the receiving end, rows ``b``, columns ``(f, y)``."""
    u = bell_unitary()
    r = np.zeros((2, 8))
    for b, f, y in np.ndindex(2, 4, 2):
        f1, f2 = divmod(f, 2)
        r[b, 2 * f + y] = u[f, 2 * b + (1 - y)] * (-1) ** (1 - y) * (-1) ** (f1 * f2) * SQ2
    return r


def dense_sender() -> np.ndarray:
    """Encoder on the sender's half, rows ``t``, columns ``(a, x)`` with ``a`` a flat pair."""
    u = bell_unitary()
    r = np.zeros((2, 8))
    for t, a, x in np.ndindex(2, 4, 2):
        r[t, 2 * a + x] = u[a, 2 * t + (1 - x)] * (-1) ** x * SQ2
    return r


def _amplitudes(alpha, n: int) -> np.ndarray:
    a = np.asarray(alpha, dtype=complex).ravel()
    if a.shape != (n,):
        raise DimensionMismatch(f"expected {n} amplitudes, got {a.size}")
    norm = float(np.sum(np.abs(a) ** 2))
    if abs(norm - 1) > ALPHA_TOL:
        raise NotNormalized(f"input amplitudes have squared norm {norm:.12g}")
    return a


def _column_residual(m: np.ndarray) -> float:
    """Deviation of ``m^H m`` from the identity (orthonormal columns)."""
    return float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[1]))))


def _expect_valid(fx: ProtocolFixture) -> None:
    for name, net in fx.all_nets().items():
        fx.expect_zero(
            f"{name} validates",
            lambda n=net: max(validate(n).residuals.values()),
        )


def _max_abs(a) -> float:
    return float(np.max(np.abs(a)))


def epr_net() -> ProtocolFixture:
    specs, mats = _source()
    net = QbNet(specs, mats)
    fx = ProtocolFixture("epr", net)
    fx.reductions["rho"] = Recipe.of(esum=["e"])
    for k in (0, 1):
        fx.reductions[f"rho(y={k})"] = Recipe.of(esum=["e"], project={"y": k})
    fx.tables["rho"] = ["x", "y", "x,y", "x|y", "y|x", "x:y"]
    fx.expect_entropies(
        "rho",
        [("x", 1, 1), ("y", 1, 1), ("x,y", 0, 1), ("x|y", -1, 0), ("y|x", -1, 0), ("x:y", 2, 1)],
    )
    v = np.array([0.0, 1.0, -1.0, 0.0])
    fx.expect_zero("rho matrix pattern", lambda: _max_abs(fx.density("rho").data - np.outer(v, v) / 2))
    for drop in ("x", "y"):
        fx.expect_zero(
            f"rho traced over {drop} is I/2",
            lambda d=drop: _max_abs(reduce_to(fx.density("rho"), ["y" if d == "x" else "x"]).data - np.eye(2) / 2),
        )
    for k in (0, 1):
        key = f"rho(y={k})"
        want = np.diag([0.0, 1.0]) if k == 0 else np.diag([1.0, 0.0])
        fx.expect_zero(f"{key} is a basis projector", lambda key=key, w=want: _max_abs(fx.density(key).data - w))
        fx.expect_entropies(key, [("x", 0, 0)])
    _expect_valid(fx)
    return fx


def eraser_net() -> ProtocolFixture:
    specs, mats = _source()
    h = np.array([[1.0, 1.0], [1.0, -1.0]]) / SQ2
    net = QbNet(specs + [NodeSpec("r", (2,), ("y",))], {**mats, "r": h})
    fx = ProtocolFixture("eraser", net)
    fx.reductions["rho"] = Recipe.of(esum=["e", "y"])
    for k in (0, 1):
        fx.reductions[f"rho(r={k})"] = Recipe.of(esum=["e", "y"], project={"r": k})
    fx.tables["rho"] = ["x", "r", "x,r", "x|r", "r|x", "x:r"]
    fx.expect_entropies(
        "rho",
        [("x", 1, 1), ("r", 1, 1), ("x,r", 0, 2), ("x|r", -1, 1), ("r|x", -1, 1), ("x:r", 2, 0)],
    )
    v = np.array([1.0, -1.0, -1.0, -1.0])
    fx.expect_zero("rho matrix pattern", lambda: _max_abs(fx.density("rho").data - np.outer(v, v) / 4))
    plus, minus = np.array([1.0, 1.0]) / SQ2, np.array([1.0, -1.0]) / SQ2
    for k in (0, 1):
        key = f"rho(r={k})"
        target = minus if k == 0 else plus
        fx.expect_zero(
            f"{key} is an X-basis projector",
            lambda key=key, t=target: _max_abs(fx.density(key).data - np.outer(t, t)),
        )

        def doubled(k=k):
            _, m = _project_unnormalized(fx.density("rho"), "r", k)
            return _max_abs(2 * m - project_reduce(fx.density("rho"), "r", k).data)

        fx.expect_zero(f"{key}: 2<r|rho|r> equals the normalized projection", doubled)
        fx.expect_entropies(key, [("x", 0, 1)])
        fx.expect(f"{key}: coherence of x", lambda key=key: coherence(fx.density(key), ["x"]), 1.0)
    fx.expect_zero("projection order does not matter", lambda: delayed_choice_residual(fx.density("rho")), 1e-12)
    _expect_valid(fx)
    return fx


def _sandwich(t: np.ndarray, axis: int, k: int, rank: int) -> np.ndarray:
    """``<k| t |k>`` on one axis of an operator tensor with ``rank`` ket axes."""
    t = np.take(t, k, axis=axis + rank)
    return np.take(t, k, axis=axis)


def delayed_choice_residual(rho: DensityMatrix, first: str = "x", second: str = "r") -> float:
    """Largest gap between projecting ``first`` then ``second`` and the reverse."""
    i, j = rho.names.index(first), rho.names.index(second)
    k = len(rho.axes)
    worst = 0.0
    for a in range(rho.axes[i].dim):
        for b in range(rho.axes[j].dim):
            t = rho.tensor()
            one = _sandwich(t, j, b, k)
            one = _sandwich(one, i if i < j else i - 1, a, k - 1)
            two = _sandwich(t, i, a, k)
            two = _sandwich(two, j if j < i else j - 1, b, k - 1)
            worst = max(worst, _max_abs(one - two))
    return worst


def input_entropy(alpha) -> float:
    return shannon_entropy(np.abs(np.asarray(alpha).ravel()) ** 2)


def teleport_transfer() -> np.ndarray:
    """Transfer tensor ``T[x, y, a, f, b]`` assembled from the node matrices (independent of the input amplitudes)."""
    psi = SINGLET.reshape(2, 2)
    u = bell_unitary().reshape(4, 2, 2)  # f, a, x
    r = teleport_receiver().reshape(2, 4, 2)  # b, f, y
    return np.einsum("bfy,fax,xy->xyafb", r, u, psi)


def teleport_transfer_residuals() -> dict[str, float]:
    k = teleport_transfer()
    sign = np.array([(-1) ** (f1 * f2) for f1, f2 in np.ndindex(2, 2)])
    eye = np.eye(2)
    return {
        "sum_xy T": _max_abs(k.sum(axis=(0, 1)) - np.einsum("f,ab->afb", sign / 2, eye)),
        "sum_xyf T": _max_abs(k.sum(axis=(0, 1, 3)) - eye),
        "sum_xy |T|^2": _max_abs((np.abs(k) ** 2).sum(axis=(0, 1)) - np.einsum("f,ab->afb", np.full(4, 0.25), eye)),
        "sum_xyf |T|^2": _max_abs((np.abs(k) ** 2).sum(axis=(0, 1, 3)) - eye),
    }


def teleport_net(alpha=(1.0, 0.0)) -> ProtocolFixture:
    alpha = _amplitudes(alpha, 2)
    specs, mats = _source()
    specs += [NodeSpec("a", (2,)), NodeSpec("f", (2, 2), ("a", "x")), NodeSpec("b", (2,), ("f", "y"))]
    mats.update(a=alpha.reshape(-1, 1), f=bell_unitary(), b=teleport_receiver())
    net = QbNet(specs, mats)
    h_in = input_entropy(alpha)
    fx = ProtocolFixture("teleport", net, params={"alpha": alpha, "H_in": h_in})
    for label, res in teleport_transfer_residuals().items():
        fx.expect_zero(f"transfer tensor {label}", lambda res=res: res, 1e-12)
    fx.expect_zero("Bell unitary has orthonormal columns", lambda: _column_residual(bell_unitary()), 1e-12)
    fx.expect_zero("receiver has orthonormal columns per (f, y)", lambda: _column_norms(teleport_receiver()), 1e-12)

    def per_branch():
        amp = 2 * contract(net, ["f", "b"])
        signs = [(-1) ** (f1 * f2) for f1, f2 in np.ndindex(2, 2)]
        return max(_max_abs(amp[f] - s * alpha) for f, s in enumerate(signs))

    fx.expect_zero("psi_out(f) = (-1)^(f1 f2) psi'_in", per_branch, 1e-10)
    fx.expect_zero("psi_out = psi'_in", lambda: _max_abs(output_amplitudes(net)[1] - alpha), 1e-10)

    fx.reductions["sigma"] = Recipe.of(esum=["e", "x", "y"])
    phi_f = np.array([(-1) ** (f1 * f2) / 2 for f1, f2 in np.ndindex(2, 2)])
    phi = np.einsum("a,f,ab->afb", alpha, phi_f, np.eye(2)).ravel()
    fx.expect_zero(
        "sigma factorizes into input copy and sign pattern",
        lambda: _max_abs(fx.density("sigma").data - np.outer(phi, phi.conj())),
    )
    fx.reductions["case a"] = Recipe.of(esum=["e", "x", "y"], trace=["b"])
    fx.tables["case a"] = ["a", "f", "a,f", "a|f", "f|a", "a:f"]
    fx.expect_entropies(
        "case a",
        [
            ("a", h_in, h_in),
            ("f", 0, 2),
            ("a,f", h_in, h_in + 2),
            ("a|f", h_in, h_in),
            ("f|a", 0, 2),
            ("a:f", 0, 0),
        ],
    )
    for k in range(4):
        fx.reductions[f"case b f={k}"] = Recipe.of(esum=["e", "x", "y"], project={"f": k})
    fx.reductions["case b trace"] = Recipe.of(esum=["e", "x", "y"], trace=["f"])
    fx.reductions["case b esum"] = Recipe.of(esum=["e", "x", "y", "f"])
    phi_ab = np.einsum("a,ab->ab", alpha, np.eye(2)).ravel()
    for key in [f"case b f={k}" for k in range(4)] + ["case b trace", "case b esum"]:
        fx.expect_zero(
            f"{key} equals the input copy",
            lambda key=key: _max_abs(fx.density(key).data - np.outer(phi_ab, phi_ab.conj())),
        )
    fx.tables["case b f=0"] = ["a", "b", "a,b", "a|b", "b|a", "a:b"]
    fx.expect_entropies(
        "case b f=0",
        [
            ("a", h_in, h_in),
            ("b", h_in, h_in),
            ("a,b", 0, h_in),
            ("a|b", -h_in, 0),
            ("b|a", -h_in, 0),
            ("a:b", 2 * h_in, h_in),
        ],
    )
    _expect_valid(fx)
    return fx


def _column_norms(m: np.ndarray) -> float:
    return float(np.max(np.abs(np.sum(np.abs(m) ** 2, axis=0) - 1)))


def dense_transfer() -> np.ndarray:
    """Transfer tensor ``T[x, y, a, t, b]`` for the dense-coding net, ``a`` and ``b`` flat pairs."""
    psi = SINGLET.reshape(2, 2)
    r = dense_sender().reshape(2, 4, 2)  # t, a, x
    u = bell_unitary().reshape(4, 2, 2)  # b, t, y
    return np.einsum("bty,tax,xy->xyatb", u, r, psi)


def dense_transfer_residuals() -> dict[str, float]:
    k = dense_transfer()
    want = np.zeros((4, 2, 4))
    same = np.zeros((4, 2, 4))
    for a1, a2, t, b1, b2 in np.ndindex(2, 2, 2, 2, 2):
        if a1 == b1:
            want[2 * a1 + a2, t, 2 * b1 + b2] = 0.5 * (1 if t == 0 else (-1) ** (a2 + b2))
            same[2 * a1 + a2, t, 2 * b1 + b2] = 0.25
    sq = np.abs(k) ** 2
    return {
        "sum_xy T": _max_abs(k.sum(axis=(0, 1)) - want),
        "sum_xyt T": _max_abs(k.sum(axis=(0, 1, 3)) - np.eye(4)),
        "sum_xy |T|^2": _max_abs(sq.sum(axis=(0, 1)) - same),
        "sum_xytb |T|^2": _max_abs(sq.sum(axis=(0, 1, 3, 4)) - 1),
    }


def dense_coding_net(alpha=(0.5, 0.5, 0.5, 0.5)) -> ProtocolFixture:
    alpha = _amplitudes(alpha, 4)
    specs, mats = _source()
    specs += [NodeSpec("a", (2, 2)), NodeSpec("t", (2,), ("a", "x")), NodeSpec("b", (2, 2), ("t", "y"))]
    mats.update(a=alpha.reshape(-1, 1), t=dense_sender(), b=bell_unitary())
    net = QbNet(specs, mats)
    p = np.abs(alpha) ** 2
    h_in = shannon_entropy(p)
    h_1 = shannon_entropy(p.reshape(2, 2).sum(axis=1))
    fx = ProtocolFixture("densecode", net, params={"alpha": alpha, "H_in": h_in, "H_in_1": h_1})
    for label, res in dense_transfer_residuals().items():
        fx.expect_zero(f"transfer tensor {label}", lambda res=res: res, 1e-12)
    fx.expect_zero("sender has unit columns per (a, x)", lambda: _column_norms(dense_sender()), 1e-12)
    fx.expect_zero("Bell unitary has orthonormal columns", lambda: _column_residual(bell_unitary()), 1e-12)
    fx.expect_zero("psi_out = psi'_in", lambda: _max_abs(output_amplitudes(net)[1] - alpha), 1e-10)

    fx.reductions["sigma"] = Recipe.of(esum=["e", "x", "y"])
    phi = np.zeros((4, 2, 4), dtype=complex)
    for a1, a2, t, b2 in np.ndindex(2, 2, 2, 2):
        phi[2 * a1 + a2, t, 2 * a1 + b2] = 0.5 * (1 if t == 0 else (-1) ** (a2 + b2)) * alpha[2 * a1 + a2]
    phi = phi.ravel()
    fx.expect_zero("sigma is the predicted pure state", lambda: _max_abs(fx.density("sigma").data - np.outer(phi, phi.conj())))

    fx.reductions["case a"] = Recipe.of(esum=["e", "x", "y"], trace=["b"])
    fx.tables["case a"] = ["a", "t", "a,t", "a|t", "t|a", "a:t"]
    fx.expect_entropies(
        "case a",
        [
            ("a", h_in, h_in),
            ("t", 1, 1),
            ("a,t", 1 + h_1, 1 + h_in),
            ("a|t", h_1, h_in),
            ("t|a", 1 + h_1 - h_in, 1),
            ("a:t", h_in - h_1, 0),
        ],
    )
    fx.reductions["case b"] = Recipe.of(esum=["e", "x", "y", "t"])
    phi_ab = np.einsum("a,ab->ab", alpha, np.eye(4)).ravel()
    fx.expect_zero(
        "case b equals the input copy",
        lambda: _max_abs(fx.density("case b").data - np.outer(phi_ab, phi_ab.conj())),
    )
    fx.tables["case b"] = ["a", "b", "a,b", "a|b", "b|a", "a:b"]
    fx.expect_entropies(
        "case b",
        [
            ("a", h_in, h_in),
            ("b", h_in, h_in),
            ("a,b", 0, h_in),
            ("a|b", -h_in, 0),
            ("b|a", -h_in, 0),
            ("a:b", 2 * h_in, h_in),
        ],
    )
    _expect_valid(fx)
    return fx
