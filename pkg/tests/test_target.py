from collections import Counter

import pytest
from hypothesis import given, strategies as st

from qpassprof.target import (
    GateCost,
    Target,
    TargetError,
    from_edges,
    grid_target,
    line_target,
    load_target,
    loads_target,
    resolve_target,
    save_target,
    shipped_target_path,
)


def test_line():
    assert line_target(3).coupling == {(0, 1), (1, 2)}
    assert line_target(1).coupling == frozenset()


def test_grid_small():
    t = grid_target(2, 2)
    assert t.num_qubits == 4 and len(t.coupling) == 4


@pytest.mark.parametrize("rows,cols", [(3, 4), (1, 5), (5, 1), (4, 4), (7, 8)])
def test_grid_edge_count(rows, cols):
    assert len(grid_target(rows, cols).coupling) == rows * (cols - 1) + cols * (rows - 1)


@pytest.mark.parametrize("make", [lambda: line_target(0), lambda: grid_target(0, 3), lambda: grid_target(2, 0)])
def test_zero_dimension(make):
    with pytest.raises(TargetError, match="invalid size"):
        make()


@given(st.integers(1, 30))
def test_line_connected(n):
    assert line_target(n).is_connected()


@given(st.integers(1, 8), st.integers(1, 8))
def test_grid_connected(r, c):
    assert grid_target(r, c).is_connected()


def test_defaults():
    t = line_target(4)
    assert t.basis == {"CX", "RZ", "SX", "X"}
    assert t.cost("CX", (1, 2)).duration == 10
    assert t.cost("RZ", (3,)).duration == 1
    assert t.edge_error(1, 2) == pytest.approx(0.001 * (1 + 3 / 4))
    assert t.cost("CX", (0, 2)) is None
    assert t.gate_costs[("SX", None)] == GateCost(1, 0.0001)
    assert ("CX", (0, 1)) in t.gate_costs


def test_minimal_file():
    t = loads_target("qubits 2\nedge 0 1\n")
    assert t.num_qubits == 2 and t.coupling == {(0, 1)}


def test_out_of_range_edge():
    with pytest.raises(TargetError, match="coupling"):
        loads_target("qubits 3\nedge 0 5\n")


def test_self_loop():
    with pytest.raises(TargetError, match="self-loop"):
        loads_target("qubits 3\nedge 1 1\n")


def test_bad_error_rate_names_field():
    with pytest.raises(TargetError, match="error"):
        loads_target("qubits 2\nedge 0 1 10 1.5\n")


def test_negative_duration_names_field():
    with pytest.raises(TargetError, match="duration"):
        loads_target("qubits 2\ngate1q X -1 0.1\n")


def test_parse_error_line_number():
    with pytest.raises(TargetError, match="line 3"):
        loads_target("qubits 2\n# c\nedge 0\n")


def test_unknown_directive():
    with pytest.raises(TargetError, match="line 1"):
        loads_target("qbits 2\n")


def test_comments_and_basis():
    t = loads_target("# demo\nqubits 3  # three\nbasis CX RZ SX X H\nedge 0 1 12 0.01\ngate1q H 2 0.002\n")
    assert t.name == "demo"
    assert "H" in t.basis
    assert t.cost("CX", (1, 0)) == GateCost(12, 0.01)
    assert t.cost("H", (2,)) == GateCost(2, 0.002)


@st.composite
def targets(draw):
    n = draw(st.integers(1, 9))
    pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    costs = {e: GateCost(draw(st.integers(0, 100)), draw(st.floats(0, 1))) for e in chosen}
    g1 = {g: GateCost(draw(st.integers(0, 5)), draw(st.floats(0, 1))) for g in ("RZ", "SX", "X")}
    return Target(n, costs, g1, frozenset({"CX", "RZ", "SX", "X"}), "t")


@given(targets())
def test_round_trip(t):
    text = t.to_text()
    back = loads_target(text)
    assert back == t
    assert back.to_text() == text  # bit-exact


def test_file_round_trip(tmp_path):
    t = grid_target(3, 3)
    save_target(t, tmp_path / "g.target")
    assert load_target(tmp_path / "g.target") == t


def test_shipped_eagle_like():
    path = shipped_target_path("eagle-like")
    t = load_target(path)
    assert t.num_qubits >= 100
    deg = Counter()
    for a, b in t.coupling:
        deg[a] += 1
        deg[b] += 1
    assert max(deg.values()) <= 3
    assert t.is_connected()
    assert len(t.coupling) == 144
    assert t.to_text() == path.read_text()


def test_resolve():
    assert resolve_target("line:5") == line_target(5)
    assert resolve_target("grid:2x4") == grid_target(2, 4)
    assert resolve_target("eagle-like.target").num_qubits == 127
    with pytest.raises(TargetError):
        resolve_target("no-such-device")


def test_disconnected_allowed_from_file():
    t = from_edges(4, [(0, 1), (2, 3)])
    assert not t.is_connected()
