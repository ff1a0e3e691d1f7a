"""Seeded property suites: entropy identities and inequalities, data processing, protocol fixtures.

Each suite returns a :class:`Report` with one line per property, holding the
worst instance seen over all trials.
"""

from __future__ import annotations

import math

import numpy as np

from .density import DensityMatrix, hermitian_eig, h_rho, reduce_to, s_entropy, von_neumann_entropy
from .entexpr import shannon_entropy
from .protocols import (
    SysEnvParams,
    TwoMixParams,
    cb_examples,
    dense_coding_net,
    dp_inequality_check,
    standard_fixtures,
    sys_env_net,
    teleport_net,
    two_mixtures_net,
)
from .qprob import cb_joint
from .randomness import (
    random_cb_net,
    random_density,
    random_markov_chain,
    random_probability,
    random_state,
    random_unitary,
    rng_from,
)
from .report import Check, Report

CLASSICAL_TOL = 1e-9
QUANTUM_TOL = 1e-8


def worst_per_label(checks) -> Report:
    """Collapse repeated labels to the check with the largest residual."""
    worst: dict[str, Check] = {}
    for c in checks:
        if c.label not in worst or c.residual > worst[c.label].residual:
            worst[c.label] = c
    return Report(list(worst.values()))


def _pick_vars(names, rng) -> tuple[str, str, str | None]:
    names = list(names)
    order = [names[i] for i in rng.permutation(len(names))]
    if len(order) == 1:
        return order[0], order[0], None
    if len(order) == 2:
        return order[0], order[1], None
    return order[0], order[1], order[2]


def _entropy_rows(h, x: str, y: str, z: str | None, direct, log_n: float, tol: float, quantum: bool) -> list[Check]:
    """Identities and inequalities shared by the classical and quantum entropies."""
    out = [
        Check("conditional = joint - marginal", h(f"{x}|{y}"), direct([x, y]) - direct([y]), "==", tol),
        Check("mutual = sum of marginals - joint", h(f"{x}:{y}"), direct([x]) + direct([y]) - direct([x, y]), "==", tol),
        Check("0 <= single-node entropy", -h(x), 0.0, "<=", tol),
        Check("single-node entropy <= log2 N", h(x), log_n, "<=", tol),
        Check("subadditivity: 0 <= mutual information", -h(f"{x}:{y}"), 0.0, "<=", tol),
        Check("joint <= sum of marginals", h(f"{x},{y}"), h(x) + h(y), "<=", tol),
    ]
    if quantum:
        out += [
            Check("triangle (Araki-Lieb): |S(X) - S(Y)| <= S(X,Y)", abs(h(x) - h(y)), h(f"{x},{y}"), "<=", tol),
        ]
    else:
        out += [
            Check("0 <= conditional entropy", -h(f"{x}|{y}"), 0.0, "<=", tol),
            Check("H(Y) <= H(X,Y)", h(y), h(f"{x},{y}"), "<=", tol),
        ]
    if z is not None:
        out += [
            Check("intersection distributes over union", h(f"({x},{y}):{z}"), h(f"({x}:{z}),({y}:{z})"), "==", tol),
            Check("union distributes over intersection", h(f"({x}:{y}),{z}"), h(f"({x},{z}):({y},{z})"), "==", tol),
            Check("strong subadditivity", h(f"{x}|({y},{z})"), h(f"{x}|{y}"), "<=", tol),
        ]
    return out


def _classical_mixture_checks(rng, tol: float) -> list[Check]:
    n, k = int(rng.integers(2, 5)), int(rng.integers(2, 4))
    w = random_probability(k, rng)
    ps = np.array([random_probability(n, rng) for _ in range(k)])
    mix = w @ ps
    avg = float(sum(wi * shannon_entropy(p) for wi, p in zip(w, ps)))
    p, q = random_probability(n, rng), random_probability(n, rng, zeros=False)
    support = p > 0
    gibbs = float(np.sum(p[support] * np.log2(q[support] / p[support])))
    return [
        Check("Gibbs inequality", gibbs, 0.0, "<=", tol),
        Check("convexity: average entropy <= entropy of mixture", avg, shannon_entropy(mix), "<=", tol),
        Check("grouping bound on the mixture", shannon_entropy(mix), avg + shannon_entropy(w), "<=", tol),
    ]


def classical_table_suite(trials: int = 100, seed=0) -> Report:
    rng = rng_from(seed)
    checks: list[Check] = []
    for _ in range(trials):
        net = random_cb_net(rng, max_nodes=4, max_states=3)
        joint = cb_joint(net)
        x, y, z = _pick_vars(net.names, rng)
        direct = lambda names: shannon_entropy(joint.marginal(names).values.ravel())
        log_n = math.log2(net.spec(x).dim)
        checks += _entropy_rows(joint.entropy, x, y, z, direct, log_n, CLASSICAL_TOL, quantum=False)
        checks += _classical_mixture_checks(rng, CLASSICAL_TOL)
    return worst_per_label(checks)


def _matrix_fn(m: np.ndarray, fn) -> np.ndarray:
    dec = hermitian_eig(m)
    return (dec.eigenvectors * fn(dec.eigenvalues)) @ dec.eigenvectors.conj().T


def relative_entropy_gap(rho: np.ndarray, sigma: np.ndarray) -> float:
    """``-tr(rho (log2 rho - log2 sigma))``; ``sigma`` must be full rank."""
    dec = hermitian_eig(rho)
    w = np.clip(dec.eigenvalues, 0, None)
    safe = np.where(w > 0, w, 1.0)
    rho_log_rho = (dec.eigenvectors * (w * np.log2(safe))) @ dec.eigenvectors.conj().T
    log_sigma = _matrix_fn(sigma, np.log2)
    return float(-np.trace(rho_log_rho - rho @ log_sigma).real)


def _quantum_trial(rng, tol: float) -> list[Check]:
    k = int(rng.integers(2, 4))
    names = ["x", "y", "z"][:k]
    d = 2**k
    rho = DensityMatrix([(n, 2) for n in names], random_density(d, rng))
    x, y, z = _pick_vars(names, rng)
    s = lambda e: s_entropy(rho, e)
    direct = lambda ns: von_neumann_entropy(reduce_to(rho, ns))
    out = _entropy_rows(s, x, y, z, direct, 1.0, tol, quantum=True)
    out.append(Check("S(X) <= H_rho(X)", s(x), h_rho(rho, x), "<=", tol))
    u = random_unitary(d, rng)
    rotated = u @ rho.data @ u.conj().T
    out.append(Check("unitary invariance", von_neumann_entropy(rotated), von_neumann_entropy(rho.data), "==", tol))
    spectrum = random_probability(d, rng)
    built = (u * spectrum) @ u.conj().T
    out.append(Check("S equals Shannon entropy of the spectrum", von_neumann_entropy(built), shannon_entropy(spectrum), "==", tol))
    out.append(Check("S(rho) <= H(diagonal)", von_neumann_entropy(rho.data), shannon_entropy(np.clip(rho.diagonal(), 0, None)), "<=", tol))
    # mixture of non-orthogonal pure states
    m = int(rng.integers(2, 4))
    p = random_probability(m, rng)
    kets = [random_state(2, rng) for _ in range(m)]
    mixed = sum(pi * np.outer(v, v.conj()) for pi, v in zip(p, kets))
    out.append(Check("S(sum p_j |j><j|) <= H(p)", von_neumann_entropy(mixed), shannon_entropy(p), "<=", tol))
    sigma = random_density(d, rng, rank=d)
    out.append(Check("Gibbs (relative entropy) inequality", relative_entropy_gap(rho.data, sigma), 0.0, "<=", tol))
    w = random_probability(m, rng)
    parts = [random_density(d, rng) for _ in range(m)]
    mix = sum(wi * r for wi, r in zip(w, parts))
    avg = float(sum(wi * von_neumann_entropy(r) for wi, r in zip(w, parts)))
    out.append(Check("concavity: average S <= S of mixture", avg, von_neumann_entropy(mix), "<=", tol))
    out.append(Check("Lanford-Robinson upper bound", von_neumann_entropy(mix), avg + shannon_entropy(w), "<=", tol))
    return out


def quantum_table_suite(trials: int = 100, seed=0) -> Report:
    rng = rng_from(seed)
    checks: list[Check] = []
    for _ in range(trials):
        checks += _quantum_trial(rng, QUANTUM_TOL)
    return worst_per_label(checks)


def table1_suite(trials: int = 100, seed=0) -> Report:
    seeds = np.random.SeedSequence(seed).spawn(2)
    rep = Report()
    rep.extend(classical_table_suite(trials, np.random.default_rng(seeds[0])), "classical: ")
    rep.extend(quantum_table_suite(trials, np.random.default_rng(seeds[1])), "quantum: ")
    return rep


def dp_suite(trials: int = 200, seed=0) -> Report:
    """``trials`` random 3-chains and ``trials // 2`` random 4-chains."""
    rng = rng_from(seed)
    checks: list[Check] = []
    for length, count in ((3, trials), (4, max(1, trials // 2))):
        for _ in range(count):
            rep = dp_inequality_check(random_markov_chain(length, rng), tol=1e-10)
            checks += [Check(f"{length}-chain: {c.label}", c.lhs, c.rhs, c.relation, c.tol) for c in rep.checks]
    return worst_per_label(checks)


def cb_example_suite(trials: int = 50, seed=0) -> Report:
    rng = rng_from(seed)
    checks = []
    for _ in range(trials):
        for ex in cb_examples(rng):
            for expr, v in ex.residuals().items():
                checks.append(Check(f"{ex.name}: {expr} vanishes", v, 0.0, "==", 1e-10))
    return worst_per_label(checks)


def protocols_suite(trials: int = 0, seed=0) -> Report:
    """Every fixture once, then ``trials`` extra random instances of the parameterized ones."""
    rng = rng_from(seed)
    rep = Report()
    for fx in standard_fixtures(rng):
        rep.extend(fx.run())
    if trials:
        checks: list[Check] = []
        for _ in range(trials):
            for fx in (
                teleport_net(random_state(2, rng)),
                dense_coding_net(random_state(4, rng)),
                sys_env_net(1, SysEnvParams.random(1, rng)),
                sys_env_net(2, SysEnvParams.random(2, rng)),
                two_mixtures_net(TwoMixParams.random(rng)),
            ):
                checks += [Check(f"random {c.label}", c.lhs, c.rhs, c.relation, c.tol) for c in fx.run().checks]
        rep.extend(worst_per_label(checks))
    rep.extend(cb_example_suite(max(1, trials or 5), rng), "cb examples: ")
    return rep


SUITES = {"table1": table1_suite, "dp": dp_suite, "protocols": protocols_suite}
