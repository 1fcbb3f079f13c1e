import math

import pytest
from hypothesis import settings, strategies as st

from qpassprof.circuit import Circuit, Instruction

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

# criterion number -> (passed, detail); filled by test_acceptance
ACCEPTANCE_RESULTS: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")


angles = st.floats(min_value=-2 * math.pi, max_value=2 * math.pi, allow_nan=False)


@st.composite
def instructions(draw, n, names=("H", "X", "SX", "RZ", "CX", "CP", "SWAP")):
    name = draw(st.sampled_from([g for g in names if n >= 2 or g in ("H", "X", "SX", "RZ")]))
    if name in ("H", "X", "SX"):
        return Instruction(name, (draw(st.integers(0, n - 1)),))
    if name == "RZ":
        return Instruction(name, (draw(st.integers(0, n - 1)),), (draw(angles),))
    a, b = draw(st.lists(st.integers(0, n - 1), min_size=2, max_size=2, unique=True))
    if name == "CP":
        return Instruction(name, (a, b), (draw(angles),))
    return Instruction(name, (a, b))


@st.composite
def circuits(draw, min_qubits=1, max_qubits=4, max_gates=25, names=("H", "X", "SX", "RZ", "CX", "CP", "SWAP")):
    n = draw(st.integers(min_qubits, max_qubits))
    gates = draw(st.lists(instructions(n, names), max_size=max_gates))
    return Circuit(n, tuple(gates), "random")


def random_circuit(rng, n, size, names=("H", "X", "SX", "RZ", "CX", "CP", "SWAP")):
    """Seeded generator for bulk checks outside hypothesis."""
    out = []
    pool = [g for g in names if n >= 2 or g in ("H", "X", "SX", "RZ")]
    for _ in range(size):
        name = pool[rng.integers(len(pool))]
        if name in ("H", "X", "SX"):
            out.append(Instruction(name, (int(rng.integers(n)),)))
        elif name == "RZ":
            # a few exact negations so cancellations actually occur
            theta = float(rng.choice([math.pi / 2, -math.pi / 2, rng.uniform(-4, 4)]))
            out.append(Instruction(name, (int(rng.integers(n)),), (theta,)))
        else:
            a, b = (int(v) for v in rng.choice(n, 2, replace=False))
            out.append(Instruction(name, (a, b), (float(rng.uniform(-4, 4)),) if name == "CP" else ()))
    return Circuit(n, tuple(out), "random")


def compiled_equivalence(circuit, result):
    from qpassprof.sim import equivalence_report

    layout = result.layout
    n = circuit.num_qubits
    return equivalence_report(circuit, result.circuit, layout.final[:n], 1e-8, layout.initial[:n])


@pytest.fixture(scope="session")
def eagle():
    from qpassprof.target import resolve_target

    return resolve_target("eagle-like")
