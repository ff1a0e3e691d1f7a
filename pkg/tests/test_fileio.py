import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import meta_vector, random_pom_elements, random_qb_net, random_rho
from qbnet.errors import FileFormatError, NotNormalized
from qbnet.fileio import (
    format_complex,
    format_ensemble,
    format_matrix_tsv,
    format_net,
    format_pom,
    parse_complex,
    parse_ensemble,
    parse_matrix_tsv,
    parse_net,
    parse_pom,
    read_net,
    write_net,
)
from qbnet.infotheory import Ensemble, double_trine_ensemble, trine_ensemble
from qbnet.measure import Pom, trine_pom
from qbnet.protocols import standard_fixtures

seeds = st.integers(0, 2**32 - 1)

EPR_TEXT = """\
# singlet pair
[node e]
states = 2x2
matrix =
0
0.7071067811865476
-0.7071067811865476
0

[node x]
states = 2
parents = e
matrix =
1 1 0 0
0 0 1 1
"""


@pytest.mark.parametrize(
    "text, value",
    [("1", 1), ("-0.5", -0.5), ("0.5+0.25i", 0.5 + 0.25j), ("1e-3-2i", 0.001 - 2j), (".5", 0.5), ("+2.-1.5E1i", 2 - 15j)],
)
def test_complex_literals(text, value):
    assert parse_complex(text) == value


@pytest.mark.parametrize("text", ["i", "1+i", "abc", "1+2j", "1 +2i", "--1", ""])
def test_bad_complex_literals(text):
    with pytest.raises(FileFormatError):
        parse_complex(text)


@given(st.complex_numbers(allow_nan=False, allow_infinity=False))
def test_complex_round_trip(z):
    assert parse_complex(format_complex(z)) == z


def test_parse_small_net():
    net = parse_net(EPR_TEXT)
    assert net.names == ("e", "x")
    assert net.spec("e").state_shape == (2, 2)
    np.testing.assert_allclose(net.matrices["x"], [[1, 1, 0, 0], [0, 0, 1, 1]])


def test_all_fixture_nets_round_trip(tmp_path):
    for fx in standard_fixtures(3):
        for name, net in fx.all_nets().items():
            path = tmp_path / f"{name.replace(' ', '_')}.net"
            write_net(net, path)
            back = read_net(path)
            assert back.names == net.names
            for n in net.names:
                assert back.spec(n) == net.spec(n)
            np.testing.assert_array_equal(meta_vector(back), meta_vector(net))


@given(seeds)
def test_random_net_round_trip(seed):
    net = random_qb_net(np.random.default_rng(seed))
    back = parse_net(format_net(net))
    np.testing.assert_array_equal(meta_vector(back), meta_vector(net))


@pytest.mark.parametrize(
    "text, line, column",
    [
        ("states = 2\n", 1, 1),
        ("[node a]\nstates = 2\nmatrix =\n1 0.5+x\n", 4, 3),
        ("[node a]\nstates = 2x0\nmatrix =\n1\n", 2, 10),
        ("[nod a]\n", 1, 1),
        ("[node a]\nstates = 2\nwhatever\n", 3, 1),
        ("[node a]\nstates = 2\nparents = 1b\nmatrix =\n1\n", 3, 11),
        ("[node a]\n  states = 2\n  matrix =\n  1\n  0\n  zz\n", 6, 3),
    ],
)
def test_errors_carry_positions(text, line, column):
    with pytest.raises(FileFormatError) as info:
        parse_net(text)
    assert (info.value.line, info.value.column) == (line, column)
    assert f"line {line}, column {column}" in str(info.value)


@pytest.mark.parametrize(
    "text",
    [
        "",
        "# nothing\n",
        "[node a]\nmatrix =\n1\n",
        "[node a]\nstates = 2\n",
        "[node a]\nstates = 2\nmatrix =\n1 0\n1\n",
        "[node a]\nstates = 2\nparents = b\nmatrix =\n1\n0\n",
        "[node a]\nstates = 3\nmatrix =\n1\n0\n",
    ],
)
def test_structural_errors(text):
    with pytest.raises(FileFormatError):
        parse_net(text)


def test_tsv_round_trip():
    m = random_rho(3, np.random.default_rng(0))
    np.testing.assert_array_equal(parse_matrix_tsv(format_matrix_tsv(m)), m)
    with pytest.raises(FileFormatError):
        parse_matrix_tsv("0 0 1 0\n0 1 0 0\n1 0 0 0\n")
    with pytest.raises(FileFormatError):
        parse_matrix_tsv("0 0 1 0\n0 0 0 0\n1 0 0 0\n1 1 1 0\n")
    with pytest.raises(FileFormatError):
        parse_matrix_tsv("0 0 1\n")


def test_pom_round_trip():
    for p in (trine_pom(), Pom.of(random_pom_elements(3, 4, np.random.default_rng(1)))):
        back = parse_pom(format_pom(p))
        assert back.outcomes == p.outcomes
        for a, b in zip(back.elements, p.elements):
            np.testing.assert_array_equal(a, b)


def test_ensemble_round_trip():
    rng = np.random.default_rng(2)
    cases = [trine_ensemble(), double_trine_ensemble(), Ensemble([0.25, 0.75], np.array([random_rho(3, rng) for _ in range(2)]))]
    for e in cases:
        back = parse_ensemble(format_ensemble(e))
        np.testing.assert_array_equal(back.weights, e.weights)
        np.testing.assert_array_equal(np.array(back.signals), np.array(e.signals))


def test_ensemble_file_errors():
    good = format_ensemble(trine_ensemble())
    with pytest.raises(FileFormatError):
        parse_ensemble(good.replace("signals", "outcomes"))
    with pytest.raises(FileFormatError):
        parse_ensemble("dim 2, signals 1\n")
    with pytest.raises(FileFormatError):
        parse_ensemble("dim 1, signals 2\n0.5 0.5\n0 0 1 0\n")
    with pytest.raises(FileFormatError):
        parse_ensemble("dim 1, signals 1\n0.5 0.5\n0 0 1 0\n")
    with pytest.raises(NotNormalized):
        parse_ensemble("dim 1, signals 2\n0.5 0.6\n0 0 1 0\n0 0 1 0\n")
