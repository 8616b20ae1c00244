"""Hardware-efficient quantum counting.

The Grover phase follows from one overlap, theta = arccos <+|O_G|+>, with
|+> the uniform superposition over all N address pairs. Then
M = N sin^2(theta/2) and the iteration count is round((pi - theta) / (2 theta)).

Two measurement circuits estimate the overlap:

* ``squared``: H, O_G, H on the address register; the all-zero probability
  is |<+|O_G|+>|^2. Only valid when M <= N/2 (overlap >= 0).
* ``hadamard``: a Hadamard test with one extra control qubit; <X> on the
  control is Re <+|O_G|+>, sign included.

``exact`` reads the overlap straight off the simulator.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import statevec
from .circuits import Circuit, Sequence, grover_oracle_ops, qcam_layout, run
from .statevec import h

VARIANTS = ("squared", "hadamard", "exact")


class NoSolutionsError(ValueError):
    """theta == 0: the oracle marks nothing, so there is no iteration count."""


class ClampWarning(UserWarning):
    """A finite-shot estimate fell outside its valid range and was clamped."""


def build_heqc_squared(a: Sequence, b: Sequence) -> Circuit:
    layout = qcam_layout(a, b)
    hs = [h(q) for q in layout.address]
    return Circuit.on_layout(layout, hs + grover_oracle_ops(a, b, layout) + hs)


def build_heqc_hadamard(a: Sequence, b: Sequence, full_control: bool = False) -> Circuit:
    """Hadamard test on O_G; the control is the top qubit (register ``ctrl``)."""
    layout = qcam_layout(a, b, ctrl=1)
    ctrl = layout["ctrl"][0]
    ops = [h(ctrl)] + [h(q) for q in layout.address]
    ops += grover_oracle_ops(a, b, layout, control=ctrl, full_control=full_control)
    ops += [h(q) for q in layout.address] + [h(ctrl)]
    return Circuit.on_layout(layout, ops)


def run_heqc_squared(a: Sequence, b: Sequence, shots: int, seed: int,
                     max_qubits: int | None = None) -> float:
    """Fraction of shots reading all zeros on the address register."""
    circuit = build_heqc_squared(a, b)
    layout = qcam_layout(a, b)
    state = run(circuit, max_qubits=max_qubits)
    counts = statevec.sample(state, layout.address, shots, seed)
    return counts.frequency("0" * len(layout.address))


def run_heqc_hadamard(a: Sequence, b: Sequence, shots: int, seed: int,
                      max_qubits: int | None = None, full_control: bool = False) -> float:
    """Empirical <X> of the Hadamard-test control, estimating Re <+|O_G|+>."""
    circuit = build_heqc_hadamard(a, b, full_control=full_control)
    ctrl = circuit.register("ctrl").start
    state = run(circuit, max_qubits=max_qubits)
    counts = statevec.sample(state, [ctrl], shots, seed)
    return counts.frequency("0") - counts.frequency("1")


def exact_overlap(a: Sequence, b: Sequence, max_qubits: int | None = None) -> float:
    """<+|O_G|+> from the simulated statevector (data and ancilla start at 0)."""
    layout = qcam_layout(a, b)
    plus = statevec.new_state(layout.total, max_qubits)
    statevec.apply_all(plus, [h(q) for q in layout.address])
    image = statevec.apply_all(plus.copy(), grover_oracle_ops(a, b, layout))
    return statevec.inner_product(plus, image).real


def _clamp(value: float, lo: float, hi: float, what: str) -> tuple[float, bool]:
    if math.isnan(value):
        raise ValueError(f"{what} is NaN")
    if value < lo or value > hi:
        warnings.warn(f"{what}={value!r} outside [{lo}, {hi}], clamped", ClampWarning, stacklevel=3)
        return min(max(value, lo), hi), True
    return value, False


def theta_from_overlap(c: float, variant: str = "hadamard") -> float:
    """Grover phase from a measured quantity.

    ``squared`` takes p0 and returns arccos(sqrt(p0)) in [0, pi/2];
    ``hadamard`` and ``exact`` take the overlap and return arccos(c) in [0, pi].
    """
    if variant == "squared":
        p0, _ = _clamp(float(c), 0.0, 1.0, "p0")
        return math.acos(math.sqrt(p0))
    if variant in ("hadamard", "exact"):
        c, _ = _clamp(float(c), -1.0, 1.0, "overlap")
        return math.acos(c)
    raise ValueError(f"unknown variant {variant!r}")


def solutions_from_theta(theta: float, n_total: int) -> float:
    return n_total * math.sin(theta / 2) ** 2


def iterations_from_theta(theta: float) -> int:
    """round((pi - theta) / (2 theta)), halves rounded away from zero."""
    if theta == 0.0:
        raise NoSolutionsError("theta is 0: no solutions, no Grover iterations defined")
    if not 0.0 < theta <= math.pi:
        raise ValueError(f"theta={theta!r} outside (0, pi]")
    ratio = (math.pi - theta) / (2 * theta)
    if not math.isfinite(ratio):
        raise ValueError(f"theta={theta!r} is too small for a finite iteration count")
    return int(math.floor(ratio + 0.5))


def success_probability(theta: float, k: int) -> float:
    """Probability of measuring a solution after k iterations from |+>."""
    return math.sin((2 * k + 1) * theta / 2) ** 2


@dataclass
class HeqcEstimate:
    variant: str
    overlap: float
    theta: float
    m_est: float
    k: int
    n_total: int
    shots: int | None
    seed: int | None
    raw: float
    clamped: bool = False
    no_solutions: bool = False

    def to_dict(self) -> dict:
        out = {"variant": self.variant, "shots": self.shots, "seed": self.seed}
        out["p0" if self.variant == "squared" else "x_expect"] = self.raw
        out.update(theta=self.theta, m_est=self.m_est, k=self.k)
        return out

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)


def estimate_from_raw(raw: float, variant: str, n_total: int,
                      shots: int | None = None, seed: int | None = None) -> HeqcEstimate:
    """Turn a measured p0 / <X> / exact overlap into theta, M and k."""
    lo = 0.0 if variant == "squared" else -1.0
    clamped = not lo <= raw <= 1.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ClampWarning)
        theta = theta_from_overlap(raw, variant)
    if clamped:
        warnings.warn(f"{variant} estimate {raw!r} clamped", ClampWarning, stacklevel=2)
    overlap = math.cos(theta)
    m_est = solutions_from_theta(theta, n_total)
    try:
        k, none = iterations_from_theta(theta), False
    except NoSolutionsError:
        k, none = 0, True
    return HeqcEstimate(variant, overlap, theta, m_est, k, n_total, shots, seed, float(raw),
                        clamped, none)


def heqc_pipeline(a: Sequence, b: Sequence, shots: int = 2000, seed: int = 0,
                  variant: str = "hadamard", max_qubits: int | None = None) -> HeqcEstimate:
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; choose from {VARIANTS}")
    n_total = len(a) * len(b)
    if variant == "exact":
        raw = exact_overlap(a, b, max_qubits)
        # an identity oracle must give theta == 0 exactly, not sqrt(round-off)
        if abs(raw - 1.0) < 1e-12:
            raw = 1.0
        raw = max(raw, -1.0)
        return estimate_from_raw(raw, variant, n_total)
    if variant == "squared":
        raw = run_heqc_squared(a, b, shots, seed, max_qubits)
    else:
        raw = run_heqc_hadamard(a, b, shots, seed, max_qubits)
    return estimate_from_raw(raw, variant, n_total, shots, seed)


def grover_plane(a: Sequence, b: Sequence, max_qubits: int | None = None):
    """|alpha> and |beta> embedded in the full register (work qubits at 0).

    Returns ``(alpha, beta, marked)`` where ``marked`` is the boolean mask of
    solution address pairs, indexed by ``i + (j << n_a)``. ``alpha`` is None
    when every pair is a solution, ``beta`` is None when none is.
    """
    layout = qcam_layout(a, b)
    n_addr = layout.n_a + layout.n_b
    i = np.arange(1 << n_addr)
    av = np.asarray(a.values)[i & ((1 << layout.n_a) - 1)]
    bv = np.asarray(b.values)[i >> layout.n_a]
    marked = av == bv

    def embed(mask):
        if not mask.any():
            return None
        state = statevec.new_state(layout.total, max_qubits)
        state.amplitudes[0] = 0.0
        state.amplitudes[i[mask]] = 1 / math.sqrt(mask.sum())
        return state

    return embed(~marked), embed(marked), marked


__all__ = [
    "ClampWarning", "HeqcEstimate", "NoSolutionsError", "VARIANTS", "build_heqc_hadamard",
    "build_heqc_squared", "estimate_from_raw", "exact_overlap", "grover_plane",
    "heqc_pipeline", "iterations_from_theta", "run_heqc_hadamard", "run_heqc_squared",
    "solutions_from_theta", "success_probability", "theta_from_overlap",
]
