import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import amplitude, random_qb_net, stories
from qbnet.errors import CycleDetected, DimensionMismatch, NetStructureError, StoryCapExceeded
from qbnet.netcore import (
    CbNet,
    LabeledDag,
    NodeSpec,
    QbNet,
    classify_nodes,
    contract,
    copy_matrix,
    delta_root,
    iter_stories,
    parent_cb_net,
    story_amplitude,
    story_probability,
    topological_order,
    validate,
)
from qbnet.protocols import epr_net, standard_fixtures
from qbnet.randomness import random_cb_net

H = np.array([[1, 1], [1, -1]]) / math.sqrt(2)


def chain(mats=None):
    mats = mats or {"a": delta_root(2), "b": np.eye(2)}
    return QbNet([NodeSpec("a", 2), NodeSpec("b", 2, ("a",))], mats)


class TestStructure:
    def test_chain_order(self):
        dag = LabeledDag([NodeSpec("a", 2), NodeSpec("b", 2, ("a",)), NodeSpec("c", 2, ("b",))])
        assert topological_order(dag) == ["a", "b", "c"]

    def test_single_node(self):
        assert topological_order(LabeledDag([NodeSpec("z", 3)])) == ["z"]

    def test_diverging_tie_break(self):
        dag = LabeledDag([NodeSpec("a", 2), NodeSpec("b", 2, ("a",)), NodeSpec("c", 2, ("a",))])
        assert topological_order(dag) == ["a", "b", "c"]

    def test_declared_out_of_order(self):
        dag = LabeledDag([NodeSpec("c", 2, ("b",)), NodeSpec("b", 2, ("a",)), NodeSpec("a", 2)])
        assert topological_order(dag) == ["a", "b", "c"]

    def test_cycle_rejected(self):
        with pytest.raises(CycleDetected):
            LabeledDag([NodeSpec("a", 2, ("b",)), NodeSpec("b", 2, ("a",))])

    @pytest.mark.parametrize(
        "nodes",
        [
            [NodeSpec("a", 2), NodeSpec("a", 2)],
            [NodeSpec("a", 2, ("ghost",))],
        ],
    )
    def test_bad_structure(self, nodes):
        with pytest.raises(NetStructureError):
            LabeledDag(nodes)

    def test_self_parent_and_bad_dims(self):
        with pytest.raises(NetStructureError):
            NodeSpec("a", 2, ("a",))
        with pytest.raises(NetStructureError):
            NodeSpec("a", (2, 0))

    def test_classify(self):
        internal, external = classify_nodes(LabeledDag([NodeSpec("a", 2), NodeSpec("b", 2, ("a",))]))
        assert internal == {"a"} and external == {"b"}
        full = LabeledDag([NodeSpec("a", 2), NodeSpec("b", 2, ("a",)), NodeSpec("c", 2, ("a", "b"))])
        assert classify_nodes(full) == ({"a", "b"}, {"c"})
        assert classify_nodes(LabeledDag([NodeSpec("solo", 4)])) == (set(), {"solo"})

    @given(st.integers(0, 2**32 - 1))
    def test_classify_partitions(self, seed):
        dag = random_cb_net(np.random.default_rng(seed)).dag
        internal, external = classify_nodes(dag)
        assert not internal & external
        assert internal | external == set(dag.names)
        for n in dag.names:
            assert (n in internal) == bool(dag.children(n))

    def test_matrix_shape_checked(self):
        with pytest.raises(DimensionMismatch):
            chain({"a": delta_root(2), "b": np.eye(3)})
        with pytest.raises(DimensionMismatch):
            chain({"a": delta_root(2)})


class TestStories:
    def test_deterministic_chain(self):
        net = chain()
        assert story_amplitude(net, {"a": 0, "b": 0}) == 1
        assert story_amplitude(net, {"a": 0, "b": 1}) == 0
        cb = parent_cb_net(net)
        assert story_probability(cb, {"a": 0, "b": 0}) == 1
        assert story_probability(cb, {"a": 0, "b": 1}) == 0

    def test_epr_amplitudes(self):
        net = epr_net().net
        assert story_amplitude(net, {"e": (0, 1), "x": 0, "y": 1}) == pytest.approx(1 / math.sqrt(2), abs=1e-15)
        assert story_amplitude(net, {"e": (1, 0), "x": 1, "y": 0}) == pytest.approx(-1 / math.sqrt(2), abs=1e-15)
        cb = parent_cb_net(net)
        assert story_probability(cb, {"e": (0, 1), "x": 0, "y": 1}) == pytest.approx(0.5)
        np.testing.assert_allclose(cb.matrices["e"].ravel(), [0, 0.5, 0.5, 0])

    def test_uniform_root(self):
        cb = CbNet([NodeSpec("r", 5)], {"r": np.full(5, 0.2)})
        assert all(story_probability(cb, s) == pytest.approx(0.2) for s in iter_stories(cb.dag))

    def test_out_of_range_story(self):
        with pytest.raises(DimensionMismatch):
            story_amplitude(chain(), {"a": 2, "b": 0})
        with pytest.raises(DimensionMismatch):
            story_amplitude(chain(), {"a": 0})

    def test_parent_cb_of_hadamard(self):
        net = chain({"a": delta_root(2), "b": H})
        np.testing.assert_allclose(parent_cb_net(net).matrices["b"], np.full((2, 2), 0.5))
        np.testing.assert_array_equal(parent_cb_net(chain()).matrices["b"], np.eye(2))

    @given(st.integers(0, 2**32 - 1))
    def test_contract_matches_enumeration(self, seed):
        net = random_qb_net(np.random.default_rng(seed))
        vec = contract(net, net.names).ravel()
        brute = np.array([amplitude(net, s) for s in stories(net)])
        np.testing.assert_allclose(vec, brute, atol=1e-12)
        lib = np.array([story_amplitude(net, s) for s in iter_stories(net.dag)])
        np.testing.assert_allclose(lib, brute, atol=1e-12)

    @given(st.integers(0, 2**32 - 1))
    def test_story_norm_is_one(self, seed):
        net = random_qb_net(np.random.default_rng(seed), max_nodes=5)
        total = sum(abs(amplitude(net, s)) ** 2 for s in stories(net))
        assert abs(total - 1) < 1e-10
        cb = parent_cb_net(net)
        for s in stories(net):
            assert story_probability(cb, s) == pytest.approx(abs(amplitude(net, s)) ** 2, abs=1e-12)

    def test_story_cap(self):
        big = CbNet([NodeSpec(f"n{i}", 2) for i in range(21)], {f"n{i}": [0.5, 0.5] for i in range(21)})
        with pytest.raises(StoryCapExceeded):
            next(iter_stories(big.dag))

    def test_contract_weights(self):
        net = chain({"a": np.array([[0.6], [0.8]]), "b": H})
        w = np.array([1.0, 0.0])
        np.testing.assert_allclose(contract(net, ["b"], weights={"a": w}), 0.6 * H[:, 0])


class TestValidate:
    def test_protocol_nets_validate(self):
        for fx in standard_fixtures(3):
            for name, net in fx.all_nets().items():
                rep = validate(net)
                assert rep.ok, (name, [str(v) for v in rep.violations])

    def test_scaled_column_is_flagged(self):
        m = np.eye(2)
        m[:, 1] *= 2
        rep = validate(chain({"a": delta_root(2), "b": m}))
        assert not rep.ok
        assert ("b", "column-norm") in {(v.node, v.constraint) for v in rep.violations}
        assert "b: column-norm" in str(rep.violations[0])

    def test_cb_validation(self):
        bad = CbNet([NodeSpec("a", 2)], {"a": [0.7, 0.7]})
        assert {v.constraint for v in validate(bad).violations} >= {"column-sum"}
        neg = CbNet([NodeSpec("a", 2)], {"a": [1.2, -0.2]})
        assert "negative-entry" in {v.constraint for v in validate(neg).violations}
        assert validate(random_cb_net(np.random.default_rng(1))).ok

    def test_copy_matrix_is_deterministic(self):
        m = copy_matrix((2, 3), 1)
        assert m.shape == (3, 6)
        assert np.all(m.sum(axis=0) == 1)
        assert m[2, 5] == 1 and m[0, 3] == 1
