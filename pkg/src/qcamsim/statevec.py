"""Dense statevector engine.

Conventions
-----------
* Qubit 0 is the least significant bit of the amplitude index, so ``X`` on
  qubit 0 of ``|00>`` gives basis index 1.
* Gates mutate the state in place; :func:`apply` returns the same object.
* A measured bit-string key is written most-significant first, with the
  *last* listed qubit leftmost, i.e. ``int(key, 2)`` has ``qubits[0]`` as its
  LSB. Measuring qubits ``[0, 1]`` of basis index 1 gives ``"01"``.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import kernels

MAX_QUBITS = 28

KINDS = ("H", "X", "RY", "CX", "MCX", "MCZ", "PUCR", "CPUCR")
# kinds whose unitary is its own inverse
_SELF_INVERSE = {"H", "X", "CX", "MCX", "MCZ"}

_HADAMARD = np.array([[1, 1], [1, -1]], dtype=np.complex128) / math.sqrt(2)


class CapacityError(ValueError):
    """Requested register exceeds the configured qubit capacity."""


def state_bytes(q: int) -> int:
    return 16 * (1 << q)


def _check_capacity(q: int, max_qubits: int | None) -> None:
    cap = MAX_QUBITS if max_qubits is None else max_qubits
    if q < 1 or q > cap:
        raise CapacityError(
            f"{q} qubits requested, capacity is 1..{cap}; a {q}-qubit state "
            f"needs 16*2^{q} = {state_bytes(q)} bytes of amplitudes"
        )


def ry_matrix(angle: float) -> np.ndarray:
    c, s = math.cos(angle / 2), math.sin(angle / 2)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


@dataclass(frozen=True, eq=False)
class GateOp:
    """One gate application.

    For ``PUCR`` the ``controls`` are the address qubits (address bit ``b`` is
    ``controls[b]``) and ``targets[t]`` is the data qubit rotated by angle
    column ``t``. ``CPUCR`` prepends one gating control to that list.
    ``MCZ`` is symmetric in its qubits; by convention the last one is stored
    as the target.
    """

    kind: str
    targets: tuple[int, ...]
    controls: tuple[int, ...] = ()
    params: np.ndarray | tuple = ()
    adjoint: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        object.__setattr__(self, "controls", tuple(int(c) for c in self.controls))
        qubits = self.targets + self.controls
        if len(set(qubits)) != len(qubits):
            raise ValueError(f"{self.kind}: repeated qubit or overlapping controls/targets {qubits}")
        if any(q < 0 for q in qubits):
            raise ValueError(f"{self.kind}: negative qubit index")
        if self.kind in ("PUCR", "CPUCR"):
            angles = np.array(self.params, dtype=np.float64, ndmin=2)
            n = len(self.address_qubits)
            if angles.shape != (1 << n, len(self.targets)):
                raise ValueError(
                    f"{self.kind}: angle matrix shape {angles.shape} does not match "
                    f"address width {n} and data width {len(self.targets)} "
                    f"(expected {(1 << n, len(self.targets))})"
                )
            if self.kind == "CPUCR" and not self.controls:
                raise ValueError("CPUCR needs a gating control")
            angles.setflags(write=False)
            object.__setattr__(self, "params", angles)
            return
        if len(self.targets) != 1:
            raise ValueError(f"{self.kind} takes exactly one target")
        if self.kind == "CX" and len(self.controls) != 1:
            raise ValueError("CX takes exactly one control")
        if self.kind == "MCX" and not self.controls:
            raise ValueError("MCX needs at least one control")
        if self.kind == "RY":
            params = tuple(float(p) for p in np.atleast_1d(self.params))
            if len(params) != 1:
                raise ValueError("RY takes one angle")
            object.__setattr__(self, "params", params)
        else:
            object.__setattr__(self, "params", ())

    @property
    def address_qubits(self) -> tuple[int, ...]:
        if self.kind == "PUCR":
            return self.controls
        if self.kind == "CPUCR":
            return self.controls[1:]
        return ()

    @property
    def gate_controls(self) -> tuple[int, ...]:
        if self.kind == "PUCR":
            return ()
        if self.kind == "CPUCR":
            return self.controls[:1]
        return self.controls

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.controls + self.targets

    @property
    def angles(self) -> np.ndarray:
        return self.params

    def dagger(self) -> "GateOp":
        if self.kind in _SELF_INVERSE:
            return self
        return replace(self, adjoint=not self.adjoint)

    def controlled(self, ctrl: int) -> "GateOp":
        """The same gate with one extra control qubit."""
        if self.kind in ("X", "CX", "MCX"):
            kind = "CX" if self.kind == "X" else "MCX"
            return GateOp(kind, self.targets, (ctrl,) + self.controls)
        if self.kind == "PUCR":
            return replace(self, kind="CPUCR", controls=(ctrl,) + self.controls)
        if self.kind == "CPUCR":
            raise ValueError("CPUCR supports a single gating control")
        return replace(self, controls=(ctrl,) + self.controls)

    def __repr__(self):
        name = f"ADJOINT({self.kind})" if self.adjoint else self.kind
        extra = f", angle={self.params[0]:.6g}" if self.kind == "RY" else ""
        return f"GateOp({name}, controls={self.controls}, targets={self.targets}{extra})"


def h(q): return GateOp("H", (q,))
def x(q): return GateOp("X", (q,))
def ry(q, angle, controls=()): return GateOp("RY", (q,), tuple(controls), (angle,))
def cx(c, t): return GateOp("CX", (t,), (c,))
def mcx(controls, t): return GateOp("MCX", (t,), tuple(controls))


def mcz(qubits):
    qubits = tuple(qubits)
    return GateOp("MCZ", qubits[-1:], qubits[:-1])


def pucr(address, data, angles):
    return GateOp("PUCR", tuple(data), tuple(address), angles)


@dataclass
class QuantumState:
    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.amplitudes.shape != (1 << self.num_qubits,):
            raise ValueError("amplitude vector length must be 2**num_qubits")

    def copy(self) -> "QuantumState":
        return QuantumState(self.num_qubits, self.amplitudes.copy())

    def norm(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def probabilities(self) -> np.ndarray:
        a = self.amplitudes
        return a.real**2 + a.imag**2

    def dumps(self, cutoff: float = 1e-12) -> str:
        """Text dump: a header line, then ``index real imag`` per amplitude above cutoff."""
        buf = io.StringIO()
        buf.write(f"# qcamsim statevector num_qubits={self.num_qubits}\n")
        for i in np.flatnonzero(np.abs(self.amplitudes) >= cutoff):
            z = self.amplitudes[i]
            buf.write(f"{i} {float(z.real)!r} {float(z.imag)!r}\n")
        return buf.getvalue()

    @classmethod
    def loads(cls, text: str) -> "QuantumState":
        lines = text.splitlines()
        header = lines[0]
        if not header.startswith("# qcamsim statevector num_qubits="):
            raise ValueError("not a qcamsim statevector dump")
        q = int(header.rsplit("=", 1)[1])
        amps = np.zeros(1 << q, dtype=np.complex128)
        for line in lines[1:]:
            if line.strip():
                i, re, im = line.split()
                amps[int(i)] = complex(float(re), float(im))
        return cls(q, amps)


def new_state(q: int, max_qubits: int | None = None) -> QuantumState:
    _check_capacity(q, max_qubits)
    amps = np.zeros(1 << q, dtype=np.complex128)
    amps[0] = 1.0
    return QuantumState(q, amps)


def basis_state(q: int, index: int, max_qubits: int | None = None) -> QuantumState:
    _check_capacity(q, max_qubits)
    amps = np.zeros(1 << q, dtype=np.complex128)
    amps[index] = 1.0
    return QuantumState(q, amps)


def apply(state: QuantumState, op: GateOp) -> QuantumState:
    """Apply ``op`` to ``state`` in place and return it."""
    q = state.num_qubits
    if any(i >= q for i in op.qubits):
        raise IndexError(f"{op!r} touches a qubit outside the {q}-qubit state")
    k = kernels.backend()
    psi = state.amplitudes
    kind = op.kind
    if kind == "H":
        k.apply_matrix(psi, op.targets[0], op.controls, _HADAMARD)
    elif kind in ("X", "CX", "MCX"):
        k.apply_x(psi, op.targets[0], op.controls)
    elif kind == "RY":
        angle = -op.params[0] if op.adjoint else op.params[0]
        k.apply_matrix(psi, op.targets[0], op.controls, ry_matrix(angle))
    elif kind == "MCZ":
        k.phase_flip(psi, op.qubits)
    else:
        angles = -op.angles if op.adjoint else op.angles
        k.apply_pucr(psi, op.address_qubits, op.targets, angles, op.gate_controls)
    return state


def apply_all(state: QuantumState, ops) -> QuantumState:
    for op in ops:
        apply(state, op)
    return state


def inner_product(a: QuantumState, b: QuantumState) -> complex:
    """<a|b>."""
    if a.num_qubits != b.num_qubits:
        raise ValueError(f"dimension mismatch: {a.num_qubits} vs {b.num_qubits} qubits")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


@dataclass
class ShotCounts:
    qubits: tuple[int, ...]
    counts: dict[str, int]
    total_shots: int
    seed: int | None = field(default=None, compare=False)

    def __post_init__(self):
        if sum(self.counts.values()) != self.total_shots:
            raise ValueError("counts do not sum to total_shots")
        width = len(self.qubits)
        if any(len(key) != width for key in self.counts):
            raise ValueError(f"every key must have width {width}")

    def int_counts(self) -> dict[int, int]:
        return {int(key, 2): n for key, n in self.counts.items()}

    def frequency(self, key: str) -> float:
        return self.counts.get(key, 0) / self.total_shots


def marginal_probabilities(state: QuantumState, qubits) -> np.ndarray:
    """Probability of each outcome over ``qubits``, indexed with qubits[0] as LSB."""
    qubits = tuple(int(q) for q in qubits)
    if not qubits:
        raise ValueError("no qubits to measure")
    if len(set(qubits)) != len(qubits):
        raise ValueError("measured qubits must be distinct")
    if any(q < 0 or q >= state.num_qubits for q in qubits):
        raise IndexError("measured qubit outside the state")
    return kernels.backend().marginal_probs(state.amplitudes, qubits)


def sample(state: QuantumState, qubits, shots: int, seed: int) -> ShotCounts:
    """Draw ``shots`` i.i.d. measurements of ``qubits`` from one seeded stream."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    qubits = tuple(int(q) for q in qubits)
    probs = marginal_probabilities(state, qubits)
    cdf = np.cumsum(probs)
    cdf /= cdf[-1]
    rng = np.random.default_rng(seed)
    draws = np.searchsorted(cdf, rng.random(shots), side="right")
    np.minimum(draws, len(cdf) - 1, out=draws)
    values, counts = np.unique(draws, return_counts=True)
    width = len(qubits)
    table = {format(int(v), f"0{width}b"): int(c) for v, c in zip(values, counts)}
    return ShotCounts(qubits, table, shots, seed)
