"""QCAM search: find address pairs (i, j) with a[i] == b[j] by Grover sampling."""

from __future__ import annotations

import functools
import json
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import statevec
from .circuits import BitString, Sequence, build_qcam_circuit, is_power_of_two, qcam_layout, run

log = logging.getLogger(__name__)


def _next_pow2(n: int) -> int:
    return 1 << (n - 1).bit_length()


def _check_depths(a: Sequence, b: Sequence) -> None:
    if a.depth != b.depth:
        raise ValueError(f"bit depths differ ({a.depth} vs {b.depth})")


def pad_sequences(a: Sequence, b: Sequence, keep_depth: bool = False) -> tuple[Sequence, Sequence]:
    """Pad both sequences to power-of-2 lengths without creating matches.

    Default scheme: if either length needs padding, both move to depth d+1.
    Real items keep a leading 0 bit, pads of ``a`` are ``1`` followed by d
    zeros and pads of ``b`` are ``1`` followed by d ones.

    With ``keep_depth`` the depth is kept when two unused values exist: a pad
    for ``a`` that is absent from ``b`` and a different pad for ``b`` that is
    absent from ``a``. Otherwise it falls back to the default scheme.
    """
    _check_depths(a, b)
    na, nb = _next_pow2(len(a)), _next_pow2(len(b))
    if na == len(a) and nb == len(b):
        return a, b
    d = a.depth
    if keep_depth:
        pads = _unused_pads(a, b)
        if pads is not None:
            pad_a, pad_b = pads
            return (Sequence(a.values + (pad_a,) * (na - len(a)), d),
                    Sequence(b.values + (pad_b,) * (nb - len(b)), d))
    if d < 1:
        raise ValueError("cannot pad depth-0 sequences without spurious matches")
    pad_a, pad_b = 1 << d, (1 << (d + 1)) - 1
    return (Sequence(a.values + (pad_a,) * (na - len(a)), d + 1),
            Sequence(b.values + (pad_b,) * (nb - len(b)), d + 1))


def _unused_pads(a: Sequence, b: Sequence):
    used_a, used_b = set(a.values), set(b.values)
    free_for_a = [v for v in range(1 << a.depth) if v not in used_b]
    free_for_b = [v for v in range(1 << a.depth) if v not in used_a]
    for pa in free_for_a:
        for pb in free_for_b:
            if pa != pb:
                return pa, pb
    return None


def brute_force_matches(a: Sequence, b: Sequence) -> set[tuple[int, int]]:
    """All (i, j) with a[i] == b[j], by double loop."""
    _check_depths(a, b)
    return {(i, j) for i, ai in enumerate(a) for j, bj in enumerate(b) if ai == bj}


@functools.lru_cache(maxsize=None)
def _rectangles(m: int, len_a: int, len_b: int):
    """Fewest blocks (s, t) with sum(s) <= len_a, sum(t) <= len_b, sum(s*t) == m."""
    if m == 0:
        return ()
    best = None
    for s in range(min(len_a, m), 0, -1):
        for t in range(min(len_b, m // s), 0, -1):
            rest = _rectangles(m - s * t, len_a - s, len_b - t)
            if rest is not None and (best is None or len(rest) + 1 < len(best)):
                best = ((s, t),) + rest
                if len(best) == 1:
                    return best
    return best


def plant_matches(n_a: int, n_b: int, d: int, m: int, rng) -> tuple[Sequence, Sequence]:
    """Random sequences of lengths 2^n_a, 2^n_b with exactly ``m`` matching pairs.

    The match set of two sequences is a disjoint union of blocks, one per
    shared value occurring ``s`` times in ``a`` and ``t`` times in ``b``. The
    fewest blocks summing to ``m`` are found by search, each gets its own
    value, and the remaining slots take values private to one side.
    """
    rng = np.random.default_rng(rng)
    len_a, len_b, space = 1 << n_a, 1 << n_b, 1 << d
    if not 0 <= m <= len_a * len_b:
        raise ValueError(f"cannot plant {m} matches in {len_a}x{len_b} pairs")
    blocks = _rectangles(m, len_a, len_b)
    if blocks is None:
        raise ValueError(f"{m} matches are unreachable with lengths {len_a} and {len_b}")
    fill_a = len_a - sum(s for s, _ in blocks)
    fill_b = len_b - sum(t for _, t in blocks)
    if len(blocks) + (fill_a > 0) + (fill_b > 0) > space:
        raise ValueError(f"depth {d} has too few values to plant {m} matches")

    values = rng.permutation(space)
    marked, rest = values[:len(blocks)], values[len(blocks):]
    lo, hi = int(fill_a > 0), len(rest) - int(fill_b > 0)
    cut = int(rng.integers(lo, hi + 1)) if fill_a and fill_b else (hi if fill_a else lo)
    a = [v for v, (s, _) in zip(marked, blocks) for _ in range(s)]
    b = [v for v, (_, t) in zip(marked, blocks) for _ in range(t)]
    a = rng.permutation(np.concatenate([a, rng.choice(rest[:cut], fill_a)]) if fill_a else a)
    b = rng.permutation(np.concatenate([b, rng.choice(rest[cut:], fill_b)]) if fill_b else b)
    sa, sb = Sequence(tuple(int(v) for v in a), d), Sequence(tuple(int(v) for v in b), d)
    assert len(brute_force_matches(sa, sb)) == m
    return sa, sb


def default_shot_budget(m_est: float) -> int:
    """Coupon-collector sizing: max(300, ceil(50 M ln(M+1)))."""
    m_est = max(0.0, float(m_est))
    return max(300, math.ceil(50 * m_est * math.log(m_est + 1)))


@dataclass(frozen=True)
class MatchRecord:
    addr_a: int
    addr_b: int
    data_a: BitString
    data_b: BitString
    count: int


@dataclass
class QcamResult:
    records: list[MatchRecord]
    rejected: int
    shots: int
    k: int
    seed: int
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if sum(r.count for r in self.records) + self.rejected != self.shots:
            raise ValueError("record counts plus rejected must equal shots")

    @property
    def verified_shots(self) -> int:
        return self.shots - self.rejected

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "shots": self.shots,
            "seed": self.seed,
            "matches": [{"i": r.addr_a, "j": r.addr_b, "value": str(r.data_a), "count": r.count}
                        for r in self.records],
            "rejected": self.rejected,
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)


def run_qcam(a: Sequence, b: Sequence, k: int, shots: int, seed: int,
             max_qubits: int | None = None) -> QcamResult:
    """Run k Grover iterations, measure all four registers, verify every shot."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    layout = qcam_layout(a, b)
    circuit = build_qcam_circuit(a, b, k)
    state = run(circuit, max_qubits=max_qubits)
    measured = layout.address + layout["data_a"] + layout["data_b"]
    counts = statevec.sample(state, measured, shots, seed)
    del state

    n_a, n_b, d = layout.n_a, layout.n_b, layout.d
    records, rejected = [], 0
    for key, count in sorted(counts.int_counts().items()):
        i = key & ((1 << n_a) - 1)
        j = (key >> n_a) & ((1 << n_b) - 1)
        da = (key >> (n_a + n_b)) & ((1 << d) - 1)
        db = (key >> (n_a + n_b + d)) & ((1 << d) - 1)
        if a[i] == b[j] == da == db:
            records.append(MatchRecord(i, j, BitString(da, d), BitString(db, d), count))
        else:
            rejected += count
    records.sort(key=lambda r: (r.addr_a, r.addr_b))
    log.debug("qcam k=%d shots=%d: %d verified pairs, %d rejected shots",
              k, shots, len(records), rejected)
    return QcamResult(records, rejected, shots, k, seed)


def collect_matches(result: QcamResult) -> set[tuple[int, int]]:
    return {(r.addr_a, r.addr_b) for r in result.records}


def search_matches(a: Sequence, b: Sequence, *, seed: int = 0, shots: int | None = None,
                   heqc_shots: int = 2000, variant: str = "hadamard",
                   keep_depth: bool = False, max_qubits: int | None = None):
    """Pad, estimate the iteration count with HEQC, then run QCAM.

    Returns ``(result, estimate, padded_a, padded_b)``. When HEQC sees no
    solutions the Grover circuit is skipped and ``result`` is empty.
    """
    from .heqc import heqc_pipeline

    pa, pb = pad_sequences(a, b, keep_depth=keep_depth)
    est = heqc_pipeline(pa, pb, shots=heqc_shots, seed=seed, variant=variant,
                        max_qubits=max_qubits)
    if est.no_solutions:
        result = QcamResult([], 0, 0, 0, seed + 1, {"skipped": "no solutions estimated"})
        return result, est, pa, pb
    n_shots = shots if shots is not None else default_shot_budget(est.m_est)
    result = run_qcam(pa, pb, est.k, n_shots, seed + 1, max_qubits=max_qubits)
    return result, est, pa, pb


__all__ = [
    "MatchRecord", "QcamResult", "brute_force_matches", "collect_matches",
    "default_shot_budget", "is_power_of_two", "pad_sequences", "plant_matches",
    "run_qcam", "search_matches",
]
