"""Open-system nets: a system meeting its environment once or twice, and two colliding mixtures."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..density import s_entropy
from ..errors import DimensionMismatch, NotNormalized
from ..netcore import NodeSpec, QbNet, copy_matrix
from ..randomness import random_state, random_unitary, rng_from
from ..recipe import Recipe
from .fixture import Expectation, ProtocolFixture
from .quantum import _column_residual, _expect_valid

TOL = 1e-8


def _check_unit(v: np.ndarray, what: str) -> np.ndarray:
    n = float(np.sum(np.abs(v) ** 2))
    if abs(n - 1) > 1e-10:
        raise NotNormalized(f"{what} has squared norm {n:.12g}")
    return v


@dataclass(frozen=True)
class SysEnvParams:
    """Joint system/reference amplitudes ``alpha[q, r]``, one environment state and one unitary per step."""

    alpha: np.ndarray
    betas: tuple[np.ndarray, ...]
    unitaries: tuple[np.ndarray, ...]

    def __post_init__(self):
        a = np.asarray(self.alpha, dtype=complex)
        if a.ndim != 2:
            raise DimensionMismatch("alpha must be a (system, reference) matrix")
        _check_unit(a, "alpha")
        betas = tuple(_check_unit(np.asarray(b, dtype=complex).ravel(), "beta") for b in self.betas)
        us = tuple(np.asarray(u, dtype=complex) for u in self.unitaries)
        if len(betas) != len(us) or not betas:
            raise DimensionMismatch("one environment state per unitary is required")
        for b, u in zip(betas, us):
            n = a.shape[0] * b.size
            if u.shape != (n, n):
                raise DimensionMismatch(f"unitary of shape {u.shape}, expected {(n, n)}")
            if _column_residual(u) > 1e-10:
                raise NotNormalized("interaction matrix is not unitary")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "betas", betas)
        object.__setattr__(self, "unitaries", us)

    @property
    def steps(self) -> int:
        return len(self.betas)

    @classmethod
    def random(cls, steps: int, seed=0, dq: int = 2, dr: int = 2, de: int = 2) -> "SysEnvParams":
        rng = rng_from(seed)
        alpha = random_state(dq * dr, rng).reshape(dq, dr)
        betas = tuple(random_state(de, rng) for _ in range(steps))
        us = tuple(random_unitary(dq * de, rng) for _ in range(steps))
        return cls(alpha, betas, us)

    @classmethod
    def trivial(cls, steps: int, dq: int = 2, dr: int = 2, de: int = 2, seed=0) -> "SysEnvParams":
        """Identity interactions and product environment states."""
        rng = rng_from(seed)
        alpha = random_state(dq * dr, rng).reshape(dq, dr)
        betas = tuple(random_state(de, rng) for _ in range(steps))
        return cls(alpha, betas, tuple(np.eye(dq * de) for _ in range(steps)))


def _source(alpha: np.ndarray, q: str) -> tuple[list[NodeSpec], dict]:
    dq, dr = alpha.shape
    specs = [NodeSpec("j", (dq, dr)), NodeSpec(q, (dq,), ("j",)), NodeSpec("r", (dr,), ("j",))]
    return specs, {"j": alpha.reshape(-1, 1), q: copy_matrix((dq, dr), 0), "r": copy_matrix((dq, dr), 1)}


def _interaction(specs, mats, q_in, e, beta, u, t, q_out, e_out, dq):
    de = beta.size
    specs += [
        NodeSpec(e, (de,)),
        NodeSpec(t, (dq, de), (q_in, e)),
        NodeSpec(q_out, (dq,), (t,)),
        NodeSpec(e_out, (de,), (t,)),
    ]
    mats.update({e: beta.reshape(-1, 1), t: u, q_out: copy_matrix((dq, de), 0), e_out: copy_matrix((dq, de), 1)})


def sys_env_net(steps: int = 1, params: SysEnvParams | None = None, seed=0) -> ProtocolFixture:
    """System ``q`` entangled with a reference ``r`` meets a fresh environment ``steps`` times."""
    if steps not in (1, 2):
        raise ValueError("steps must be 1 or 2")
    params = params or SysEnvParams.random(steps, seed)
    if params.steps != steps:
        raise DimensionMismatch(f"parameters describe {params.steps} steps, not {steps}")
    dq = params.alpha.shape[0]
    if steps == 1:
        return _single(params, dq)
    return _double(params, dq)


def _single(p: SysEnvParams, dq: int) -> ProtocolFixture:
    specs, mats = _source(p.alpha, "q")
    sub = QbNet(list(specs), dict(mats))
    _interaction(specs, mats, "q", "e", p.betas[0], p.unitaries[0], "t", "qf", "ef", dq)
    fx = ProtocolFixture("sysenv1", QbNet(specs, mats), params={"params": p}, subnets={"sysenv1 start": sub})
    fx.reductions["rho0"] = Recipe.of(esum=["j"])
    fx.on["rho0"] = "sysenv1 start"
    fx.reductions["rho"] = Recipe.of(esum=["j", "q", "e", "t"])
    s0 = lambda e: s_entropy(fx.density("rho0"), e)
    s = lambda e: s_entropy(fx.density("rho"), e)
    fx.expect_zero("S_rho0(r,q) = 0", lambda: s0("r,q"), TOL)
    fx.expect_zero("S_rho(r,qf,ef) = 0", lambda: s("r,qf,ef"), TOL)
    fx.expected.append(_le("S_rho(r|ef) <= S_rho(r)", lambda: s("r|ef") - s("r")))
    fx.expect("S_rho(r,ef) = S_rho(qf)", lambda: s("r,ef") - s("qf"), 0, TOL)
    fx.expect("S_rho(r) = S_rho0(r)", lambda: s("r") - s0("r"), 0, TOL)
    fx.expect("S_rho0(r) = S_rho0(q)", lambda: s0("r") - s0("q"), 0, TOL)
    fx.expected.append(
        _le("S_rho(qf) - S_rho(ef) <= S_rho0(q)", lambda: s("qf") - s("ef") - s0("q"))
    )
    fx.tables["rho"] = ["qf", "ef", "r", "r,ef", "r|ef", "qf,ef"]
    _expect_valid(fx)
    return fx


def _le(label: str, gap) -> Expectation:
    """Inequality expressed as ``gap <= 0``."""
    return Expectation(label, gap, 0.0, TOL, "<=")


def _double(p: SysEnvParams, dq: int) -> ProtocolFixture:
    specs, mats = _source(p.alpha, "q1")
    net0 = QbNet(list(specs), dict(mats))
    _interaction(specs, mats, "q1", "e1", p.betas[0], p.unitaries[0], "t1", "q2", "e1f", dq)
    net1 = QbNet(list(specs), dict(mats))
    _interaction(specs, mats, "q2", "e2", p.betas[1], p.unitaries[1], "t2", "q3", "e2f", dq)
    net2 = QbNet(specs, mats)
    fx = ProtocolFixture(
        "sysenv2", net2, params={"params": p}, subnets={"sysenv2 step0": net0, "sysenv2 step1": net1}
    )
    fx.reductions["rho0"] = Recipe.of(esum=["j"])
    fx.reductions["rho1"] = Recipe.of(esum=["j", "q1", "e1", "t1"])
    fx.reductions["rho2"] = Recipe.of(esum=["j", "q1", "e1", "t1", "q2", "e2", "t2"])
    # sigma keeps the system copies q1, q2, q3 as measured axes
    fx.reductions["sigma0"] = Recipe.of(esum=["j"])
    fx.reductions["sigma1"] = Recipe.of(esum=["j", "e1", "t1"])
    fx.reductions["sigma2"] = Recipe.of(esum=["j", "e1", "t1", "e2", "t2"])
    fx.on.update({"rho0": "sysenv2 step0", "rho1": "sysenv2 step1", "sigma0": "sysenv2 step0", "sigma1": "sysenv2 step1"})
    s = lambda key, e: s_entropy(fx.density(key), e)
    fx.expect_zero("S_rho0(r,q1) = 0", lambda: s("rho0", "r,q1"), TOL)
    fx.expect_zero("S_rho1(r,e1f,q2) = 0", lambda: s("rho1", "r,e1f,q2"), TOL)
    fx.expect_zero("S_rho2(r,e1f,e2f,q3) = 0", lambda: s("rho2", "r,e1f,e2f,q3"), TOL)
    fx.expected += [
        _le("S_rho2(r|e1f,e2f) <= S_rho2(r|e1f)", lambda: s("rho2", "r|(e1f,e2f)") - s("rho2", "r|e1f")),
        _le("S_rho2(r|e1f) <= S_rho2(r)", lambda: s("rho2", "r|e1f") - s("rho2", "r")),
        _le(
            "S_rho2(q3) - S_rho2(e1f,e2f) <= S_rho1(q2) - S_rho1(e1f)",
            lambda: s("rho2", "q3") - s("rho2", "e1f,e2f") - s("rho1", "q2") + s("rho1", "e1f"),
        ),
        _le("S_rho1(q2) - S_rho1(e1f) <= S_rho0(q1)", lambda: s("rho1", "q2") - s("rho1", "e1f") - s("rho0", "q1")),
    ]
    fx.expect_zero("S_sigma0(q1|q1) = 0", lambda: s("sigma0", "q1|q1"), TOL)
    fx.expected.append(
        _le("S_sigma1(q1|q2) <= S_sigma2(q1|q3,e2f)", lambda: s("sigma1", "q1|q2") - s("sigma2", "q1|(q3,e2f)"))
    )
    fx.expected.append(
        _le("S_sigma1(q1|q2) <= S_sigma2(q1|q3)", lambda: s("sigma1", "q1|q2") - s("sigma2", "q1|q3"))
    )
    fx.expected.append(
        _le("S_sigma2(q1|q3,e2f) <= S_sigma2(q1|q3)", lambda: s("sigma2", "q1|(q3,e2f)") - s("sigma2", "q1|q3"))
    )
    fx.tables["rho2"] = ["q3", "e1f,e2f", "r", "r|e1f", "r|(e1f,e2f)"]
    _expect_valid(fx)
    return fx


@dataclass(frozen=True)
class TwoMixParams:
    alpha1: np.ndarray  # (q1, r1)
    alpha2: np.ndarray  # (q2, r2)
    unitary: np.ndarray  # rows (q1f, q2f), columns (q1, q2)

    def __post_init__(self):
        a1 = _check_unit(np.atleast_2d(np.asarray(self.alpha1, dtype=complex)), "alpha1")
        a2 = _check_unit(np.atleast_2d(np.asarray(self.alpha2, dtype=complex)), "alpha2")
        u = np.asarray(self.unitary, dtype=complex)
        n = a1.shape[0] * a2.shape[0]
        if u.shape != (n, n):
            raise DimensionMismatch(f"unitary of shape {u.shape}, expected {(n, n)}")
        if _column_residual(u) > 1e-10:
            raise NotNormalized("interaction matrix is not unitary")
        object.__setattr__(self, "alpha1", a1)
        object.__setattr__(self, "alpha2", a2)
        object.__setattr__(self, "unitary", u)

    @classmethod
    def random(cls, seed=0, d1: int = 2, d2: int = 2, r1: int = 2, r2: int = 2) -> "TwoMixParams":
        rng = rng_from(seed)
        return cls(
            random_state(d1 * r1, rng).reshape(d1, r1),
            random_state(d2 * r2, rng).reshape(d2, r2),
            random_unitary(d1 * d2, rng),
        )


def two_mixtures_net(params: TwoMixParams | None = None, seed=0) -> ProtocolFixture:
    """Two purified mixtures ``q1`` and ``q2`` scatter once through a joint unitary."""
    p = params or TwoMixParams.random(seed)
    specs, mats, subs = [], {}, {}
    for lam, alpha in ((1, p.alpha1), (2, p.alpha2)):
        d, r = alpha.shape
        j, q, rr = f"j{lam}", f"q{lam}", f"r{lam}"
        own = [NodeSpec(j, (d, r)), NodeSpec(q, (d,), (j,)), NodeSpec(rr, (r,), (j,))]
        own_m = {j: alpha.reshape(-1, 1), q: copy_matrix((d, r), 0), rr: copy_matrix((d, r), 1)}
        subs[f"twomix part{lam}"] = QbNet(own, own_m)
        specs += own
        mats.update(own_m)
    d1, d2 = p.alpha1.shape[0], p.alpha2.shape[0]
    specs += [
        NodeSpec("t", (d1, d2), ("q1", "q2")),
        NodeSpec("q1f", (d1,), ("t",)),
        NodeSpec("q2f", (d2,), ("t",)),
    ]
    mats.update(t=p.unitary, q1f=copy_matrix((d1, d2), 0), q2f=copy_matrix((d1, d2), 1))
    fx = ProtocolFixture("twomix", QbNet(specs, mats), params={"params": p}, subnets=subs)
    fx.reductions["rho"] = Recipe.of(esum=["j1", "q1", "j2", "q2", "t"])
    for lam in (1, 2):
        fx.reductions[f"rho{lam}"] = Recipe.of(esum=[f"j{lam}"])
        fx.on[f"rho{lam}"] = f"twomix part{lam}"
    s = lambda key, e: s_entropy(fx.density(key), e)
    fx.expect_zero("S_rho(r1,r2,q1f,q2f) = 0", lambda: s("rho", "r1,r2,q1f,q2f"), TOL)
    fx.expect("S_rho(q1f,r1) = S_rho(q2f,r2)", lambda: s("rho", "q1f,r1") - s("rho", "q2f,r2"), 0, 1e-9)
    for lam in (1, 2):
        qf, r, q, key = f"q{lam}f", f"r{lam}", f"q{lam}", f"rho{lam}"
        fx.expect_zero(f"S_rho{lam}({q},{r}) = 0", lambda key=key, q=q, r=r: s(key, f"{q},{r}"), TOL)
        fx.expect(
            f"S_rho({r}) = S_rho{lam}({q})", lambda r=r, q=q, key=key: s("rho", r) - s(key, q), 0, TOL
        )
        fx.expected.append(
            _le(
                f"|S_rho({qf}) - S_rho{lam}({q})| <= S_rho(q1f,r1)",
                lambda qf=qf, q=q, key=key: abs(s("rho", qf) - s(key, q)) - s("rho", "q1f,r1"),
            )
        )
        fx.expected.append(
            _le(
                f"S_rho(q1f,r1) <= S_rho({qf}) + S_rho{lam}({q})",
                lambda qf=qf, q=q, key=key: s("rho", "q1f,r1") - s("rho", qf) - s(key, q),
            )
        )
    fx.tables["rho"] = ["q1f", "q2f", "r1", "r2", "q1f,r1", "q2f,r2"]
    _expect_valid(fx)
    return fx
