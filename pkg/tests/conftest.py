import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from qcamsim import kernels  # noqa: E402
from qcamsim import statevec as sv  # noqa: E402
from qcamsim.circuits import Sequence  # noqa: E402


# criterion number -> summary line, filled by test_acceptance
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[number])


@pytest.fixture(params=sorted(kernels.BACKENDS))
def backend(request):
    """Run the test once per kernel backend."""
    previous = kernels.get_backend()
    kernels.set_backend(request.param)
    yield request.param
    kernels.set_backend(previous)


def random_state(q, rng):
    v = rng.normal(size=1 << q) + 1j * rng.normal(size=1 << q)
    return sv.QuantumState(q, v / np.linalg.norm(v))


def random_op(q, rng):
    """A random GateOp of any kind acting inside a q-qubit register (q >= 3)."""
    qubits = [int(x) for x in rng.permutation(q)]
    kind = rng.choice(["H", "X", "RY", "CX", "MCX", "MCZ", "PUCR", "CPUCR"])
    if kind == "H":
        op = sv.h(qubits[0])
    elif kind == "X":
        op = sv.x(qubits[0])
    elif kind == "RY":
        op = sv.ry(qubits[0], rng.uniform(-2 * math.pi, 2 * math.pi),
                   qubits[1:1 + rng.integers(0, 2)])
    elif kind == "CX":
        op = sv.cx(qubits[0], qubits[1])
    elif kind == "MCX":
        op = sv.mcx(qubits[1:1 + rng.integers(1, q)], qubits[0])
    elif kind == "MCZ":
        op = sv.mcz(qubits[:rng.integers(1, q + 1)])
    else:
        extra = int(kind == "CPUCR")
        n = int(rng.integers(0, min(3, q - extra - 1) + 1))
        d = int(rng.integers(1, q - n - extra + 1))
        address, data = qubits[:n], qubits[n:n + d]
        angles = rng.uniform(-math.pi, math.pi, size=(1 << n, d))
        op = sv.pucr(address, data, angles)
        if kind == "CPUCR":
            op = op.controlled(qubits[n + d])
    if rng.random() < 0.3:
        op = op.dagger()
    return op


def random_sequence(n, d, rng):
    return Sequence(tuple(int(v) for v in rng.integers(0, 1 << d, 1 << n)), d)
