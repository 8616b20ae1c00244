"""Circuit values for NEQR loading, matching oracles and Grover search.

Register layout, low qubit indices first::

    addr_a | addr_b | data_a | data_b | anc | (ctrl)

Address registers hold the integer address with their first qubit as LSB.
Data registers hold the integer value of the bit-string the same way, so bit
``j`` of a depth-``d`` bit-string (``j = 0`` is the leftmost, most
significant bit) sits on qubit ``start + d - 1 - j``.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from . import statevec
from .statevec import GateOp, QuantumState, cx, h, mcz, pucr, ry, x


def is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class BitString:
    value: int
    depth: int

    def __post_init__(self):
        if self.depth < 0 or not 0 <= self.value < (1 << self.depth):
            raise ValueError(f"value {self.value} does not fit in {self.depth} bits")

    @classmethod
    def from_bits(cls, bits: str) -> "BitString":
        return cls(int(bits, 2) if bits else 0, len(bits))

    @property
    def bits(self) -> tuple[int, ...]:
        """Bits left to right; index 0 is the most significant."""
        return tuple((self.value >> (self.depth - 1 - j)) & 1 for j in range(self.depth))

    def __str__(self):
        return format(self.value, f"0{self.depth}b") if self.depth else ""


@dataclass(frozen=True)
class Sequence:
    """Ordered bit-strings of one shared depth, stored as integers."""

    values: tuple[int, ...]
    depth: int

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(int(v) for v in self.values))
        if not self.values:
            raise ValueError("empty sequence")
        limit = 1 << self.depth
        bad = [v for v in self.values if not 0 <= v < limit]
        if bad:
            raise ValueError(f"values {bad[:4]} do not fit in depth {self.depth}")

    @classmethod
    def from_bitstrings(cls, items) -> "Sequence":
        items = list(items)
        depths = {b.depth for b in items}
        if len(depths) != 1:
            raise ValueError(f"mixed bit depths {sorted(depths)}")
        return cls(tuple(b.value for b in items), depths.pop())

    def __len__(self):
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def __iter__(self):
        return iter(self.values)

    def item(self, i: int) -> BitString:
        return BitString(self.values[i], self.depth)

    @property
    def address_width(self) -> int:
        if not is_power_of_two(len(self)):
            raise ValueError(f"sequence length {len(self)} is not a power of 2; pad it first")
        return len(self).bit_length() - 1


@dataclass(frozen=True)
class Register:
    name: str
    start: int
    width: int

    @property
    def qubits(self) -> tuple[int, ...]:
        return tuple(range(self.start, self.start + self.width))


@dataclass(frozen=True)
class RegisterLayout:
    """Widths of the QCAM registers. Total is n_a + n_b + 2d + anc + ctrl."""

    n_a: int
    n_b: int
    d: int
    anc: int = 1
    ctrl: int = 0

    def registers(self) -> tuple[Register, ...]:
        regs, start = [], 0
        for name, width in (("addr_a", self.n_a), ("addr_b", self.n_b), ("data_a", self.d),
                            ("data_b", self.d), ("anc", self.anc), ("ctrl", self.ctrl)):
            if width:
                regs.append(Register(name, start, width))
                start += width
        return tuple(regs)

    def __getitem__(self, name: str) -> tuple[int, ...]:
        for reg in self.registers():
            if reg.name == name:
                return reg.qubits
        return ()

    @property
    def total(self) -> int:
        return self.n_a + self.n_b + 2 * self.d + self.anc + self.ctrl

    @property
    def address(self) -> tuple[int, ...]:
        return self["addr_a"] + self["addr_b"]

    def data_bits(self, name: str) -> tuple[int, ...]:
        """Qubits of a data register ordered by bit-string position (MSB first)."""
        return tuple(reversed(self[name]))


@dataclass(frozen=True)
class Circuit:
    registers: tuple[Register, ...]
    ops: tuple[GateOp, ...]

    def __post_init__(self):
        object.__setattr__(self, "registers", tuple(self.registers))
        object.__setattr__(self, "ops", tuple(self.ops))
        start = 0
        for reg in self.registers:
            if reg.start != start or reg.width < 1:
                raise ValueError("registers must be contiguous, non-empty and start at 0")
            start += reg.width
        names = [r.name for r in self.registers]
        if len(set(names)) != len(names):
            raise ValueError("duplicate register names")
        for op in self.ops:
            if any(q >= start for q in op.qubits):
                raise ValueError(f"{op!r} lies outside the declared registers")

    @classmethod
    def on_layout(cls, layout: RegisterLayout, ops) -> "Circuit":
        return cls(layout.registers(), tuple(ops))

    @property
    def num_qubits(self) -> int:
        return sum(r.width for r in self.registers)

    def register(self, name: str) -> Register:
        for reg in self.registers:
            if reg.name == name:
                return reg
        raise KeyError(name)

    def adjoint(self) -> "Circuit":
        return Circuit(self.registers, tuple(op.dagger() for op in reversed(self.ops)))

    def count_ops(self) -> Counter:
        return Counter(_kind_name(op) for op in self.ops)

    def to_dict(self) -> dict:
        return {
            "registers": [{"name": r.name, "width": r.width} for r in self.registers],
            "ops": [_op_to_dict(op) for op in self.ops],
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_dict(cls, data: dict) -> "Circuit":
        regs, start = [], 0
        for r in data["registers"]:
            regs.append(Register(r["name"], start, int(r["width"])))
            start += int(r["width"])
        return cls(tuple(regs), tuple(_op_from_dict(o) for o in data["ops"]))

    @classmethod
    def from_json(cls, text: str) -> "Circuit":
        return cls.from_dict(json.loads(text))


def _kind_name(op: GateOp) -> str:
    return f"ADJOINT({op.kind})" if op.adjoint else op.kind


def _op_to_dict(op: GateOp) -> dict:
    if op.kind in ("PUCR", "CPUCR"):
        params = [float(v) for v in op.angles.reshape(-1)]
    else:
        params = [float(v) for v in op.params]
    return {"kind": _kind_name(op), "controls": list(op.controls),
            "targets": list(op.targets), "params": params}


def _op_from_dict(d: dict) -> GateOp:
    kind, adjoint = d["kind"], False
    if kind.startswith("ADJOINT(") and kind.endswith(")"):
        kind, adjoint = kind[len("ADJOINT("):-1], True
    controls, targets = tuple(d.get("controls", ())), tuple(d["targets"])
    params = d.get("params", ())
    if kind in ("PUCR", "CPUCR"):
        n = len(controls) - (1 if kind == "CPUCR" else 0)
        params = np.asarray(params, dtype=np.float64).reshape(1 << n, len(targets))
    return GateOp(kind, targets, controls, params, adjoint)


def angles_from_bits(seq: Sequence) -> np.ndarray:
    """Rotation angle per (address, bit): 0 for a 0 bit, pi for a 1 bit."""
    if not is_power_of_two(len(seq)):
        raise ValueError(f"sequence length {len(seq)} is not a power of 2")
    values = np.asarray(seq.values, dtype=np.int64)[:, None]
    shifts = np.arange(seq.depth - 1, -1, -1, dtype=np.int64)[None, :]
    return np.pi * ((values >> shifts) & 1).astype(np.float64)


def load_op(seq: Sequence, address, data_bits) -> GateOp:
    """pUCR writing ``seq`` into the data qubits (listed MSB first) for each address."""
    return pucr(tuple(address), tuple(data_bits), angles_from_bits(seq))


def build_qbart(seq: Sequence) -> Circuit:
    n, d = seq.address_width, seq.depth
    regs = tuple(r for r in (Register("addr", 0, n), Register("data", n, d)) if r.width)
    address = tuple(range(n))
    data_bits = tuple(range(n + d - 1, n - 1, -1))
    ops = [h(q) for q in address] + [load_op(seq, address, data_bits)]
    return Circuit(regs, ops)


def matching_oracle_ops(data_a, data_b, anc: int) -> list[GateOp]:
    """O_B, O_A, O_B^dagger: phase -1 iff the two data registers are equal."""
    if len(data_a) != len(data_b) or not data_a:
        raise ValueError("matching oracle needs two equal, non-empty data registers")
    o_b = [cx(ca, cb) for ca, cb in zip(data_a, data_b)]
    flip = [x(q) for q in (*data_b, anc)]
    return o_b + flip + [mcz((*data_b, anc))] + flip + o_b[::-1]


def build_matching_oracle(d: int) -> Circuit:
    if d < 1:
        raise ValueError("bit depth must be >= 1")
    layout = RegisterLayout(0, 0, d)
    ops = matching_oracle_ops(layout["data_a"], layout["data_b"], layout["anc"][0])
    return Circuit.on_layout(layout, ops)


def diffuser_ops(address) -> list[GateOp]:
    """H X MCZ X H over the address qubits, then a -1 global phase.

    H X MCZ X H equals I - 2|+><+|; the trailing RY(2*pi) = -I turns it into
    the reflection 2|+><+| - I exactly. With no address qubits the
    reflection is the 1x1 identity, so no gates are emitted.
    """
    address = tuple(address)
    if not address:
        return []
    hs = [h(q) for q in address]
    xs = [x(q) for q in address]
    return hs + xs + [mcz(address)] + xs + hs + [ry(address[0], 2 * math.pi)]


def build_diffuser(n_a: int, n_b: int) -> Circuit:
    if n_a < 0 or n_b < 0 or n_a + n_b < 1:
        raise ValueError("combined address register must be non-empty")
    layout = RegisterLayout(n_a, n_b, 0, anc=0)
    return Circuit.on_layout(layout, diffuser_ops(layout.address))


def qcam_layout(a: Sequence, b: Sequence, ctrl: int = 0) -> RegisterLayout:
    if a.depth != b.depth:
        raise ValueError(f"bit depths differ ({a.depth} vs {b.depth}); pad the sequences first")
    if a.depth < 1:
        raise ValueError("bit depth must be >= 1")
    return RegisterLayout(a.address_width, b.address_width, a.depth, anc=1, ctrl=ctrl)


def grover_oracle_ops(a: Sequence, b: Sequence, layout: RegisterLayout,
                      control: int | None = None, full_control: bool = False) -> list[GateOp]:
    """Load both sequences, mark equal data, unload.

    With ``control`` set, the oracle is applied only when that qubit is 1. By
    default only the central MCZ is controlled: every other gate is undone by
    its mirror image, so the rest cancels when the control is 0.
    ``full_control`` controls every gate instead.
    """
    load_a = load_op(a, layout["addr_a"], layout.data_bits("data_a"))
    load_b = load_op(b, layout["addr_b"], layout.data_bits("data_b"))
    mark = matching_oracle_ops(layout["data_a"], layout["data_b"], layout["anc"][0])
    ops = [load_a, load_b, *mark, load_b.dagger(), load_a.dagger()]
    if control is None:
        return ops
    if full_control:
        return [op.controlled(control) for op in ops]
    return [op.controlled(control) if op.kind == "MCZ" else op for op in ops]


def build_grover_oracle(a: Sequence, b: Sequence) -> Circuit:
    layout = qcam_layout(a, b)
    return Circuit.on_layout(layout, grover_oracle_ops(a, b, layout))


def grover_iterator_ops(a: Sequence, b: Sequence, layout: RegisterLayout) -> list[GateOp]:
    """G = O_D O_G: the oracle acts first."""
    return grover_oracle_ops(a, b, layout) + diffuser_ops(layout.address)


def build_grover_iterator(a: Sequence, b: Sequence) -> Circuit:
    layout = qcam_layout(a, b)
    return Circuit.on_layout(layout, grover_iterator_ops(a, b, layout))


def build_qcam_circuit(a: Sequence, b: Sequence, k: int) -> Circuit:
    """Uniform address superposition, k Grover iterations, then a final data load."""
    if k < 0:
        raise ValueError("iteration count must be >= 0")
    layout = qcam_layout(a, b)
    ops = [h(q) for q in layout.address]
    ops += grover_iterator_ops(a, b, layout) * k
    ops += [load_op(a, layout["addr_a"], layout.data_bits("data_a")),
            load_op(b, layout["addr_b"], layout.data_bits("data_b"))]
    return Circuit.on_layout(layout, ops)


def pucr_critical_depth(n: int, d: int) -> int:
    """Entangling-cycle depth of the braided pUCR, ceil(2^n d / min(n, d))."""
    if n < 1 or d < 1:
        raise ValueError("n and d must be >= 1")
    return -(-(d << n) // min(n, d))


def decompose_pucr(op: GateOp) -> list[GateOp]:
    """Naive pUCR: one multi-controlled RY per (address value, data qubit)."""
    if op.kind not in ("PUCR", "CPUCR"):
        raise ValueError("not a pUCR gate")
    address = op.address_qubits
    angles = -op.angles if op.adjoint else op.angles
    out = []
    for i in range(angles.shape[0]):
        zeros = [x(q) for b, q in enumerate(address) if not (i >> b) & 1]
        for col, target in enumerate(op.targets):
            if angles[i, col] != 0.0:
                out += zeros + [ry(target, angles[i, col], op.gate_controls + address)] + zeros
    return out


def run(circuit: Circuit, max_qubits: int | None = None,
        state: QuantumState | None = None) -> QuantumState:
    """Execute on |0...0> (or on a copy of ``state``) and return the result."""
    if state is None:
        state = statevec.new_state(circuit.num_qubits, max_qubits)
    else:
        if state.num_qubits != circuit.num_qubits:
            raise ValueError("state width does not match the circuit")
        state = state.copy()
    return statevec.apply_all(state, circuit.ops)
