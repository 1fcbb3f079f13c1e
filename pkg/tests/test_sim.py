import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qpassprof.circuit import Circuit, Instruction, box, build_ghz, build_qft, cp, cx, h, rz, swap, sx, x
from qpassprof.sim import (
    SimulationError,
    equal_up_to_phase,
    equivalence_report,
    equivalent,
    gate_matrix,
    simulate,
    unitary,
)

from conftest import circuits

S2 = 1 / math.sqrt(2)


def kron_oracle(circuit):
    """Dense unitary built from explicit Kronecker products (qubit 0 = LSB)."""
    n = circuit.num_qubits
    u = np.eye(2 ** n, dtype=complex)
    for inst in circuit:
        if inst.name == "DELAY":
            continue
        g = gate_matrix(inst)
        full = np.zeros((2 ** n, 2 ** n), dtype=complex)
        qs = inst.qubits
        k = len(qs)
        for col in range(2 ** n):
            sub = 0
            for i, q in enumerate(qs):  # first listed qubit is the high bit of the small matrix
                sub |= (col >> q & 1) << (k - 1 - i)
            for r in range(2 ** k):
                row = col
                for i, q in enumerate(qs):
                    bit = r >> (k - 1 - i) & 1
                    row = (row & ~(1 << q)) | (bit << q)
                full[row, col] += g[r, sub]
        u = full @ u
    return u


def test_ghz3():
    psi = simulate(build_ghz(3))
    expected = np.zeros(8)
    expected[[0, 7]] = S2
    assert np.allclose(psi, expected, atol=1e-12)


def test_qft1():
    assert np.allclose(simulate(build_qft(1)), [S2, S2])


def test_qft2_uniform():
    assert np.allclose(simulate(build_qft(2)), np.full(4, 0.5))
    dft = np.array([[np.exp(2j * np.pi * j * k / 4) for k in range(4)] for j in range(4)]) / 2
    assert np.allclose(dft[:, 0], simulate(build_qft(2)))


def test_qubit0_is_lsb():
    assert np.argmax(np.abs(simulate(Circuit(3, (x(0),))))) == 1
    assert np.argmax(np.abs(simulate(Circuit(3, (x(2),))))) == 4


def test_cx_control_first():
    # control q0 set -> target q1 flips: |01> (index 1) -> |11> (index 3)
    assert np.argmax(np.abs(simulate(Circuit(2, (cx(0, 1),)), initial=1))) == 3


def test_delay_identity():
    c = Circuit(1, (Instruction("DELAY", (0,), (5,)),))
    assert np.allclose(unitary(c), np.eye(2))


class TestEquivalent:
    def test_reflexive(self):
        assert equivalent(build_qft(4), build_qft(4))

    def test_h_translation(self):
        assert equivalent(Circuit(1, (h(0),)), Circuit(1, (rz(math.pi / 2, 0), sx(0), rz(math.pi / 2, 0))))

    def test_cx_direction(self):
        rep = equivalence_report(Circuit(2, (cx(0, 1),)), Circuit(2, (cx(1, 0),)))
        assert not rep.equivalent and rep.failing_input is not None

    def test_permutation(self):
        c1 = Circuit(2, (x(0),))
        c2 = Circuit(2, (x(0), swap(0, 1)))
        assert equivalent(c1, c2, perm=[1, 0])
        assert not equivalent(c1, c2)

    def test_ancilla_must_return_to_zero(self):
        c1 = Circuit(1, (x(0),))
        assert equivalent(c1, Circuit(2, (x(0),)))
        assert not equivalent(c1, Circuit(2, (x(0), x(1))))

    def test_relative_phase_detected(self):
        assert not equivalent(Circuit(1, (h(0),)), Circuit(1, (h(0), rz(0.5, 0))))

    def test_global_phase_ignored(self):
        rep = equivalence_report(Circuit(1, (x(0),)), Circuit(1, (sx(0), sx(0))))
        assert rep.equivalent and abs(rep.phase) == pytest.approx(1)

    @given(circuits(max_qubits=4, max_gates=15), st.data())
    def test_symmetric_with_inverse_perm(self, c, data):
        perm = data.draw(st.permutations(range(c.num_qubits)))
        moved = c.replace(tuple(c.instructions) + tuple(_perm_swaps(perm)))
        # c followed by swaps puts logical v at perm[v]
        assert equivalent(c, moved, perm)
        inv = [0] * len(perm)
        for v, p in enumerate(perm):
            inv[p] = v
        assert equivalent(moved, c, inv)

    @given(circuits(max_qubits=4, max_gates=15), circuits(max_qubits=4, max_gates=15))
    def test_agrees_with_unitary(self, a, b):
        if a.num_qubits != b.num_qubits:
            return
        assert equivalent(a, b) == equal_up_to_phase(unitary(a), unitary(b), tol=1e-8)


def _perm_swaps(perm):
    """SWAP sequence moving the state on wire v to wire perm[v]."""
    where = list(range(len(perm)))  # where[v] = wire currently holding v
    holder = list(range(len(perm)))  # holder[w] = logical on wire w
    out = []
    for v, p in enumerate(perm):
        w = where[v]
        if w != p:
            out.append(swap(w, p))
            u = holder[p]
            holder[p], holder[w] = v, u
            where[v], where[u] = p, w
    return out


class TestUnitary:
    def test_empty(self):
        assert np.allclose(unitary(Circuit(1)), np.eye(2))

    def test_x(self):
        assert np.allclose(unitary(Circuit(1, (x(0),))), [[0, 1], [1, 0]])

    @pytest.mark.parametrize("theta", [math.pi, math.pi / 2, 0.3])
    def test_cp_decomposition(self, theta):
        dec = Circuit(2, (rz(theta / 2, 0), cx(0, 1), rz(-theta / 2, 1), cx(0, 1), rz(theta / 2, 1)))
        assert equal_up_to_phase(np.diag([1, 1, 1, np.exp(1j * theta)]), unitary(dec))
        assert np.allclose(unitary(Circuit(2, (cp(theta, 0, 1),))), np.diag([1, 1, 1, np.exp(1j * theta)]))

    @given(circuits(max_qubits=4, max_gates=20))
    def test_unitary_and_matches_kron_oracle(self, c):
        u = unitary(c)
        assert np.max(np.abs(u.conj().T @ u - np.eye(2 ** c.num_qubits))) <= 1e-10
        assert np.allclose(u, kron_oracle(c), atol=1e-12)


@given(circuits(max_qubits=6, max_gates=40))
def test_norm_preserved_per_gate(c):
    for k in range(len(c) + 1):
        psi = simulate(c.replace(c.instructions[:k]))
        assert abs(np.linalg.norm(psi) - 1) <= 1e-12 * max(k, 1)


class TestLimits:
    def test_simulate_limit(self):
        with pytest.raises(SimulationError, match="size limit"):
            simulate(Circuit(13))

    def test_unitary_limit(self):
        with pytest.raises(SimulationError, match="size limit"):
            unitary(Circuit(7))

    def test_sweep_limit(self):
        with pytest.raises(SimulationError, match="size limit"):
            equivalent(Circuit(11), Circuit(11))

    def test_box(self):
        with pytest.raises(SimulationError, match="BOX"):
            simulate(Circuit(2, (box("qft", [0, 1]),)))

    def test_twelve_qubits_ok(self):
        assert abs(simulate(build_ghz(12))[-1]) == pytest.approx(S2)
