"""Statevector simulation of Grover-based content-addressable matching (QCAM),
hardware-efficient quantum counting, and k-mer Jaccard similarity."""

from .circuits import (BitString, Circuit, RegisterLayout, Sequence, build_diffuser,
                       build_grover_iterator, build_grover_oracle, build_matching_oracle,
                       build_qbart, build_qcam_circuit, pucr_critical_depth, run)
from .kernels import get_backend, set_backend
from .statevec import CapacityError, GateOp, QuantumState, new_state

__version__ = "0.1.0"

__all__ = [
    "BitString", "CapacityError", "Circuit", "GateOp", "QuantumState", "RegisterLayout",
    "Sequence", "build_diffuser", "build_grover_iterator", "build_grover_oracle",
    "build_matching_oracle", "build_qbart", "build_qcam_circuit", "get_backend", "new_state",
    "pucr_critical_depth", "run", "set_backend",
]
