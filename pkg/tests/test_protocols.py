import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import brute_reduce, classical_h, classical_joint, dims_of, entropy, shannon, subsystem_entropy
from qbnet.density import s_entropy
from qbnet.errors import DimensionMismatch, NotNormalized
from qbnet.netcore import validate
from qbnet.protocols import (
    SysEnvParams,
    TwoMixParams,
    cb_examples,
    chain_rule_residual,
    copy_chain,
    dense_coding_net,
    dp_inequality_check,
    epr_net,
    eraser_net,
    standard_fixtures,
    sys_env_net,
    teleport_net,
    time_reversed_chain,
    two_mixtures_net,
)
from qbnet.protocols.quantum import (
    bell_unitary,
    delayed_choice_residual,
    dense_transfer_residuals,
    teleport_transfer_residuals,
)
from qbnet.randomness import random_markov_chain, random_state, random_unitary

seeds = st.integers(0, 2**32 - 1)


def marginal(joint, idx):
    out = {}
    for k, p in joint.items():
        key = tuple(k[i] for i in idx)
        out[key] = out.get(key, 0.0) + p
    return out


def oracle_s(net, esum=(), trace=(), project=None):
    rho, names, _ = brute_reduce(net, esum, trace, project)
    dims = dims_of(net, names)
    return lambda *keep: subsystem_entropy(rho, names, dims, keep)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_every_fixture_passes(seed):
    for fx in standard_fixtures(seed):
        rep = fx.run()
        assert rep.ok, "\n".join(map(str, rep.failures()))
        for net in fx.all_nets().values():
            assert validate(net).ok


def test_fixture_tables_are_printable():
    for fx in standard_fixtures(0):
        for key in fx.tables:
            lines = fx.table_lines(key)
            assert len(lines) == len(fx.tables[key])
            assert all(" S=" in ln and " H=" in ln for ln in lines)


class TestPair:
    def test_tables_match_oracle(self):
        s = oracle_s(epr_net().net, esum=["e"])
        assert s("x") == pytest.approx(1) and s("x", "y") == pytest.approx(0, abs=1e-12)
        s = oracle_s(eraser_net().net, esum=["e", "y"])
        assert s("x", "r") == pytest.approx(0, abs=1e-12) and s("r") == pytest.approx(1)

    def test_delayed_choice(self):
        fx = eraser_net()
        assert delayed_choice_residual(fx.density("rho")) < 1e-12


class TestTeleport:
    def test_transfer_identities(self):
        assert max(teleport_transfer_residuals().values()) < 1e-12
        assert max(dense_transfer_residuals().values()) < 1e-12
        u = bell_unitary()
        np.testing.assert_allclose(u.T @ u, np.eye(4), atol=1e-15)

    @given(seeds)
    def test_case_a_against_oracle(self, seed):
        alpha = random_state(2, np.random.default_rng(seed))
        fx = teleport_net(alpha)
        h_in = shannon(np.abs(alpha) ** 2)
        s = oracle_s(fx.net, esum=["e", "x", "y"], trace=["b"])
        rho = fx.density("case a")
        assert s_entropy(rho, "a") == pytest.approx(s("a"), abs=1e-9) == pytest.approx(h_in, abs=1e-9)
        assert s_entropy(rho, "a,f") == pytest.approx(s("a", "f"), abs=1e-9)
        assert abs(s_entropy(rho, "a:f")) < 1e-9
        assert fx.run().ok

    def test_basis_input(self):
        fx = teleport_net((0, 1))
        assert fx.params["H_in"] == 0
        assert fx.run().ok

    def test_bad_amplitudes(self):
        with pytest.raises(NotNormalized):
            teleport_net((1, 1))
        with pytest.raises(DimensionMismatch):
            teleport_net((1, 0, 0))
        with pytest.raises(DimensionMismatch):
            dense_coding_net((1, 0))


class TestDenseCoding:
    @given(seeds)
    def test_against_oracle(self, seed):
        alpha = random_state(4, np.random.default_rng(seed))
        fx = dense_coding_net(alpha)
        p = np.abs(alpha) ** 2
        s = oracle_s(fx.net, esum=["e", "x", "y", "t"])
        rho = fx.density("case b")
        assert s_entropy(rho, "a:b") == pytest.approx(s("a") + s("b") - s("a", "b"), abs=1e-9)
        assert s_entropy(rho, "a:b") == pytest.approx(2 * shannon(p), abs=1e-9)
        assert fx.run().ok


class TestEnvironment:
    @given(seeds)
    def test_single_step_against_oracle(self, seed):
        fx = sys_env_net(1, seed=seed)
        s = oracle_s(fx.net, esum=["j", "q", "e", "t"])
        rho = fx.density("rho")
        assert s_entropy(rho, "r,qf,ef") == pytest.approx(0, abs=1e-8)
        assert s("r", "qf", "ef") == pytest.approx(0, abs=1e-8)
        assert s_entropy(rho, "r,ef") == pytest.approx(s("r", "ef"), abs=1e-9)
        assert s_entropy(rho, "qf") == pytest.approx(s("qf"), abs=1e-9)

    def test_identity_interaction_leaves_system_alone(self):
        for steps in (1, 2):
            fx = sys_env_net(steps, SysEnvParams.trivial(steps, seed=4))
            assert fx.run().ok
        fx = sys_env_net(1, SysEnvParams.trivial(1, seed=4))
        rho, rho0 = fx.density("rho"), fx.density("rho0")
        assert s_entropy(rho, "qf") == pytest.approx(s_entropy(rho0, "q"), abs=1e-9)
        assert s_entropy(rho, "ef") == pytest.approx(0, abs=1e-9)

    def test_params_validation(self):
        p = SysEnvParams.random(1, seed=0)
        with pytest.raises(NotNormalized):
            SysEnvParams(p.alpha * 2, p.betas, p.unitaries)
        with pytest.raises(NotNormalized):
            SysEnvParams(p.alpha, p.betas, (np.full((4, 4), 0.5),))
        with pytest.raises(DimensionMismatch):
            SysEnvParams(p.alpha, p.betas, (np.eye(3),))
        with pytest.raises(DimensionMismatch):
            sys_env_net(2, p)
        with pytest.raises(ValueError):
            sys_env_net(3)

    @given(seeds)
    def test_two_mixtures(self, seed):
        fx = two_mixtures_net(seed=seed)
        assert fx.run().ok
        s = oracle_s(fx.net, esum=["j1", "q1", "j2", "q2", "t"])
        assert s_entropy(fx.density("rho"), "q1f,r1") == pytest.approx(s("q1f", "r1"), abs=1e-9)

    def test_two_mixtures_without_scattering(self):
        rng = np.random.default_rng(9)
        p = TwoMixParams(random_state(4, rng).reshape(2, 2), random_state(4, rng).reshape(2, 2), np.eye(4))
        fx = two_mixtures_net(p)
        rho = fx.density("rho")
        assert s_entropy(rho, "q1f,r1") == pytest.approx(0, abs=1e-9)
        assert s_entropy(rho, "q1f") == pytest.approx(s_entropy(fx.density("rho1"), "q1"), abs=1e-9)
        p = TwoMixParams.random(0)
        with pytest.raises(NotNormalized):
            TwoMixParams(p.alpha1, p.alpha2, 2 * p.unitary)


class TestClassical:
    @given(seeds)
    def test_examples_vanish(self, seed):
        for ex in cb_examples(seed):
            for expr, v in ex.residuals().items():
                assert abs(v) < 1e-10, (ex.name, expr)

    def test_converging_net_is_not_conditionally_independent(self):
        # a and c become dependent once b is known, for generic parameters
        conv = next(ex for ex in cb_examples(3) if ex.name == "converging")
        j = classical_joint(conv.net)
        names = list(conv.net.names)
        ia, ib, ic = (names.index(n) for n in "abc")
        cond = classical_h(j, [ia, ib]) + classical_h(j, [ic, ib]) - classical_h(j, [ia, ib, ic]) - classical_h(j, [ib])
        assert cond > 1e-6

    @given(seeds)
    def test_chain_rule_on_random_chain(self, seed):
        assert abs(chain_rule_residual(random_markov_chain(4, seed))) < 1e-10

    @given(seeds, st.sampled_from([3, 4]))
    def test_dp_inequalities(self, seed, length):
        rep = dp_inequality_check(random_markov_chain(length, seed))
        assert rep.ok, "\n".join(map(str, rep.failures()))

    def test_copy_chain_saturates(self):
        chain = copy_chain(3, 4, seed=2)
        j = classical_joint(chain)
        h1 = classical_h(j, [0])
        for k in (1, 2, 3):
            mi = h1 + classical_h(j, [k]) - classical_h(j, [0, k])
            assert mi == pytest.approx(h1, abs=1e-12)
        assert dp_inequality_check(chain).ok

    @given(seeds)
    def test_time_reversal_joint(self, seed):
        chain = random_markov_chain(3, seed)
        rev = time_reversed_chain(chain)
        j = classical_joint(rev)
        names = list(rev.names)
        q3, p2, p1 = names.index("q3"), names.index("q2'"), names.index("q1'")
        orig = classical_joint(chain)
        # the reversed copy reproduces the original joint distribution
        for idx_r, idx_o in (([q3, p2], [2, 1]), ([q3, p1], [2, 0]), ([q3, p2, p1], [2, 1, 0])):
            got, want = marginal(j, idx_r), marginal(orig, idx_o)
            assert got.keys() == want.keys()
            assert all(abs(got[k] - want[k]) < 1e-12 for k in got)

    def test_rejects_long_chains(self):
        with pytest.raises(ValueError):
            dp_inequality_check(random_markov_chain(5, 0))
