"""Statevector simulation and the equivalence oracle used to certify passes.

Qubit 0 is the least significant bit of a basis-state index.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .circuit import Circuit, Instruction

MAX_SIM_QUBITS = 12
MAX_UNITARY_QUBITS = 6
MAX_SWEEP_QUBITS = 10
PHASE_EPS = 1e-10

_S2 = 1 / np.sqrt(2)
H_MAT = np.array([[_S2, _S2], [_S2, -_S2]], dtype=complex)
X_MAT = np.array([[0, 1], [1, 0]], dtype=complex)
SX_MAT = 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]])
CX_MAT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
SWAP_MAT = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)


class SimulationError(ValueError):
    pass


def rz_matrix(theta: float) -> np.ndarray:
    return np.array([[np.exp(-0.5j * theta), 0], [0, np.exp(0.5j * theta)]])


def cp_matrix(theta: float) -> np.ndarray:
    return np.diag([1, 1, 1, np.exp(1j * theta)]).astype(complex)


def gate_matrix(inst: Instruction) -> np.ndarray:
    """Local operator; for 2-qubit gates the first listed qubit is the high bit."""
    name = inst.name
    if name == "H":
        return H_MAT
    if name == "X":
        return X_MAT
    if name == "SX":
        return SX_MAT
    if name == "RZ":
        return rz_matrix(inst.params[0])
    if name == "DELAY":
        return np.eye(2, dtype=complex)
    if name == "CX":
        return CX_MAT
    if name == "SWAP":
        return SWAP_MAT
    if name == "CP":
        return cp_matrix(inst.params[0])
    if name == "BOX":
        raise SimulationError(f"unexpanded BOX({inst.label}) cannot be simulated")
    raise SimulationError(f"no matrix for {name}")


def _apply(state: np.ndarray, inst: Instruction, n: int) -> np.ndarray:
    """``state`` has shape (2,)*n + (batch,); axis ``n-1-q`` holds qubit ``q``."""
    if inst.name == "DELAY":
        return state
    k = len(inst.qubits)
    op = gate_matrix(inst).reshape((2,) * (2 * k))
    axes = [n - 1 - q for q in inst.qubits]
    out = np.tensordot(op, state, axes=(list(range(k, 2 * k)), axes))
    # tensordot puts the gate's output axes first; move them back in place
    return np.moveaxis(out, list(range(k)), axes)


def _evolve(circuit: Circuit, columns: np.ndarray, n: int) -> np.ndarray:
    batch = columns.shape[1]
    state = columns.reshape((2,) * n + (batch,))
    for inst in circuit.instructions:
        state = _apply(state, inst, n)
    return state.reshape(2 ** n, batch)


def _check_size(circuit: Circuit, limit: int, what: str) -> None:
    if circuit.num_qubits > limit:
        raise SimulationError(f"size limit: {what} supports at most {limit} qubits, got {circuit.num_qubits}")
    for inst in circuit.instructions:
        if inst.name == "BOX":
            raise SimulationError(f"unexpanded BOX({inst.label}) cannot be simulated")


def simulate(circuit: Circuit, initial: int = 0) -> np.ndarray:
    """Statevector after applying ``circuit`` to basis state ``|initial>``."""
    _check_size(circuit, MAX_SIM_QUBITS, "simulate")
    n = circuit.num_qubits
    psi = np.zeros((2 ** n, 1), dtype=complex)
    psi[initial, 0] = 1.0
    return _evolve(circuit, psi, n)[:, 0]


def unitary(circuit: Circuit) -> np.ndarray:
    _check_size(circuit, MAX_UNITARY_QUBITS, "unitary")
    n = circuit.num_qubits
    return _evolve(circuit, np.eye(2 ** n, dtype=complex), n)


def _spread(index: int, positions: Sequence[int]) -> int:
    """Move bit ``i`` of ``index`` to bit ``positions[i]``."""
    out = 0
    for i, p in enumerate(positions):
        if index >> i & 1:
            out |= 1 << p
    return out


@dataclass
class EquivalenceReport:
    equivalent: bool
    max_deviation: float
    failing_input: int | None
    phase: complex


def equivalence_report(
    c1: Circuit,
    c2: Circuit,
    perm: Sequence[int] | None = None,
    tol: float = 1e-8,
    initial_layout: Sequence[int] | None = None,
) -> EquivalenceReport:
    """Compare ``c1`` with ``c2`` column by column over every basis input of ``c1``.

    ``initial_layout[v]`` is the qubit of ``c2`` that receives input qubit
    ``v`` of ``c1`` (default identity) and ``perm[v]`` the qubit of ``c2``
    that holds output qubit ``v`` (default: same as the input placement).
    Extra qubits of ``c2`` start in ``|0>`` and must return there.  A single
    global phase, taken from the first amplitude above ``1e-10`` of the first
    input, is shared by all columns.
    """
    n1, n2 = c1.num_qubits, c2.num_qubits
    _check_size(c1, MAX_SWEEP_QUBITS, "equivalent")
    _check_size(c2, MAX_SIM_QUBITS, "equivalent")
    if n2 < n1:
        raise SimulationError(f"second circuit has fewer qubits ({n2}) than the first ({n1})")
    initial_layout = list(range(n1)) if initial_layout is None else list(initial_layout)[:n1]
    perm = list(initial_layout) if perm is None else list(perm)[:n1]
    dim1, dim2 = 2 ** n1, 2 ** n2
    inputs = np.zeros((dim2, dim1), dtype=complex)
    for x in range(dim1):
        inputs[_spread(x, initial_layout), x] = 1.0
    out2 = _evolve(c2, inputs, n2)
    out1 = _evolve(c1, np.eye(dim1, dtype=complex), n1)
    expected = np.zeros((dim2, dim1), dtype=complex)
    rows = [_spread(j, perm) for j in range(dim1)]
    expected[rows, :] = out1
    ref = expected[:, 0]
    k = int(np.argmax(np.abs(ref) > PHASE_EPS))
    if abs(out2[k, 0]) <= PHASE_EPS:
        phase = 1.0 + 0j
    else:
        phase = out2[k, 0] / ref[k]
        phase /= abs(phase)
    dev = np.abs(out2 - phase * expected)
    col_dev = dev.max(axis=0)
    max_dev = float(col_dev.max())
    ok = max_dev <= tol
    failing = None if ok else int(np.argmax(col_dev > tol))
    return EquivalenceReport(ok, max_dev, failing, complex(phase))


def equivalent(c1: Circuit, c2: Circuit, perm: Sequence[int] | None = None, tol: float = 1e-8,
               initial_layout: Sequence[int] | None = None) -> bool:
    return equivalence_report(c1, c2, perm, tol, initial_layout).equivalent


def equal_up_to_phase(u: np.ndarray, v: np.ndarray, tol: float = 1e-9) -> bool:
    """Matrix comparison modulo a global phase."""
    flat_u, flat_v = u.ravel(), v.ravel()
    k = int(np.argmax(np.abs(flat_u)))
    if abs(flat_v[k]) < PHASE_EPS:
        return False
    phase = flat_v[k] / flat_u[k]
    phase /= abs(phase)
    return bool(np.max(np.abs(phase * u - v)) <= tol)
