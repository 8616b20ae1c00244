"""Acceptance criteria, one test each.

Every test records a PASS/FAIL line (with the measured numbers and runtime)
that is printed in the terminal summary, then asserts. Runtime limits are
part of each criterion.
"""

import math
import time
from contextlib import contextmanager
from pathlib import Path

import numpy as np
import pytest

from conftest import ACCEPTANCE, random_op, random_sequence, random_state
from qcamsim import statevec as sv
from qcamsim.circuits import (Sequence, build_grover_iterator, build_matching_oracle,
                              build_qbart, decompose_pucr, run)
from qcamsim.cli import ExperimentConfig, sweep_rows
from qcamsim.dna import (JaccardConfig, generate_dna, jaccard_qcam, jaccard_report_classical,
                         mutate, read_fasta)
from qcamsim.heqc import (build_heqc_hadamard, exact_overlap, grover_plane,
                          iterations_from_theta, success_probability)
from qcamsim.qcam import (brute_force_matches, collect_matches, pad_sequences, plant_matches,
                          run_qcam)

WORKED_EXAMPLE = Path(__file__).parent / "data" / "worked_example.fa"

# (n per side, depth, M values) for N = 16, 64, 256
GEOMETRY_CASES = [(n, d, m) for n, d in ((2, 3), (3, 4), (4, 4))
                  for m in sorted({1, (1 << 2 * n) // 8, (1 << 2 * n) // 4, (1 << 2 * n) // 2})]


@contextmanager
def criterion(number, title, limit_s):
    """Time the body and record one line; the body fills ``info``."""
    info = {"ok": False, "detail": ""}
    start = time.perf_counter()
    try:
        yield info
    finally:
        elapsed = time.perf_counter() - start
        in_time = limit_s is None or elapsed < limit_s
        ok = info["ok"] and in_time
        limit = f" (limit {limit_s:.0f}s)" if limit_s else ""
        ACCEPTANCE[number] = (f"{'PASS' if ok else 'FAIL'}  criterion {number}: {title}: "
                              f"{info['detail']} [{elapsed:.1f}s{limit}]")
    assert info["ok"], info["detail"]
    assert in_time, f"took {elapsed:.1f}s, limit {limit_s}s"


def test_criterion_1_qbart_exact():
    with criterion(1, "QBArt statevector equals the NEQR amplitudes", 10) as info:
        rng = np.random.default_rng(101)
        worst = 0.0
        for _ in range(200):
            n, d = int(rng.integers(0, 5)), int(rng.integers(1, 6))
            seq = random_sequence(n, d, rng)
            expected = np.zeros(1 << (n + d), dtype=complex)
            for i, y in enumerate(seq):
                expected[i | (y << n)] = 1 / math.sqrt(len(seq))
            worst = max(worst, np.max(np.abs(run(build_qbart(seq)).amplitudes - expected)))
        info["ok"] = worst < 1e-10
        info["detail"] = f"200 sequences, max |error| = {worst:.1e}"


def test_criterion_2_matching_truth_table():
    with criterion(2, "matching oracle flips exactly the matches", 5) as info:
        mismatches = checked = 0
        for d in (1, 2, 3):
            circuit = build_matching_oracle(d)
            for x in range(1 << d):
                for y in range(1 << d):
                    index = x | (y << d)
                    out = run(circuit, state=sv.basis_state(circuit.num_qubits, index))
                    expected = np.zeros_like(out.amplitudes)
                    expected[index] = -1 if x == y else 1
                    mismatches += np.max(np.abs(out.amplitudes - expected)) > 1e-12
                    checked += 1
        info["ok"] = mismatches == 0
        info["detail"] = f"{checked} basis pairs, {mismatches} mismatches"


def test_criterion_3_grover_geometry():
    with criterion(3, "Grover iterator is a rotation by theta in the solution plane", 30) as info:
        worst_rot = worst_overlap = 0.0
        for n, d, m in GEOMETRY_CASES:
            a, b = plant_matches(n, n, d, m, np.random.default_rng([n, m]))
            big_n = 1 << 2 * n
            theta = 2 * math.asin(math.sqrt(m / big_n))
            alpha, beta, _ = grover_plane(a, b)
            g = build_grover_iterator(a, b)
            ga, gb = run(g, state=alpha), run(g, state=beta)
            block = np.array([[sv.inner_product(alpha, ga), sv.inner_product(alpha, gb)],
                              [sv.inner_product(beta, ga), sv.inner_product(beta, gb)]])
            rot = np.array([[math.cos(theta), -math.sin(theta)],
                            [math.sin(theta), math.cos(theta)]])
            worst_rot = max(worst_rot, np.max(np.abs(block - rot)))
            worst_overlap = max(worst_overlap,
                                abs(exact_overlap(a, b) - (big_n - 2 * m) / big_n))
        info["ok"] = worst_rot < 1e-9 and worst_overlap < 1e-10
        info["detail"] = (f"{len(GEOMETRY_CASES)} instances, rotation error {worst_rot:.1e}, "
                          f"overlap error {worst_overlap:.1e}")


def test_criterion_4_phase_sweep():
    with criterion(4, "HEQC sweep recovers theta at N=256, M=1..8", 300) as info:
        _, summary = sweep_rows(ExperimentConfig(seed=0, repeats=21, variant="squared"))
        worst = max(abs(mean - true) / (3 * stderr)
                    for _, _, mean, _, stderr, true in summary)
        exact_rows, _ = sweep_rows(ExperimentConfig(seed=0, repeats=1, variant="exact"))
        exact_err = max(abs(row[2] - row[3]) for row in exact_rows)
        info["ok"] = worst < 1 and exact_err < 1e-9
        info["detail"] = (f"worst |mean-true| = {worst:.2f} x 3 stderr over "
                          f"{len(summary)} M values; exact-variant error {exact_err:.1e}")


def test_criterion_5_iteration_contract():
    with criterion(5, "chosen iteration count succeeds with probability >= 0.5", None) as info:
        shots, worst_p, worst_z = 2000, 1.0, 0.0
        for n, d, m in GEOMETRY_CASES:
            a, b = plant_matches(n, n, d, m, np.random.default_rng([n, m]))
            theta = 2 * math.asin(math.sqrt(m / (1 << 2 * n)))
            k = iterations_from_theta(theta)
            p = success_probability(theta, k)
            worst_p = min(worst_p, p)
            frac = run_qcam(a, b, k, shots, seed=n * 1000 + m).verified_shots / shots
            sigma = math.sqrt(p * (1 - p) / shots)
            z = abs(frac - p) / sigma if sigma > 1e-12 else (0.0 if abs(frac - p) < 1e-9 else math.inf)
            worst_z = max(worst_z, z)
        info["ok"] = worst_p >= 0.5 and worst_z < 5
        info["detail"] = (f"min analytic success {worst_p:.3f}, worst empirical deviation "
                          f"{worst_z:.2f} sigma")


@pytest.mark.slow
def test_criterion_6_jaccard_end_to_end():
    with criterion(6, "quantum Jaccard equals classical on every seed", 600) as info:
        results = []
        for length, k in ((16, 2), (32, 3)):
            for seed in range(10):
                a = generate_dna(length, seed)
                b = mutate(a, 0.1, seed + 1000)
                q = jaccard_qcam(a, b, k, JaccardConfig(seed=seed))
                c = jaccard_report_classical(a, b, k)
                results.append((length, k, q.meta["qubits"], q.jaccard == c.jaccard
                                and q.matched_kmers == c.matched_kmers))
        bad = [r for r in results if not r[3]]
        qubits = sorted({(r[0], r[1], r[2]) for r in results})
        info["ok"] = not bad
        info["detail"] = (f"{len(results) - len(bad)}/{len(results)} exact; qubits per config "
                          + ", ".join(f"len {l} k={k}: {q}" for l, k, q in qubits))


def test_criterion_7_worked_example_replay():
    with criterion(7, "classical replay of the printed 4-mer example", 1) as info:
        a, b = read_fasta(WORKED_EXAMPLE)
        r = jaccard_report_classical(a, b, 4)
        got = (r.size_a, r.size_b, r.size_intersection, round(r.jaccard, 3))
        info["ok"] = got == (56, 55, 36, 0.480)
        info["detail"] = (f"|A|={got[0]} |B|={got[1]} |AnB|={got[2]} J={r.jaccard:.4f} "
                          f"(expected 56/55/36/0.480)")


def test_criterion_8_property_suites():
    with criterion(8, "property suites, >= 100 cases each", None) as info:
        rng = np.random.default_rng(808)
        violations = {}

        def count(name, bad):
            violations[name] = violations.get(name, 0) + int(bool(bad))

        for _ in range(150):
            q = int(rng.integers(3, 7))
            s = random_state(q, rng)
            for _ in range(4):
                sv.apply(s, random_op(q, rng))
            count("norm", abs(s.norm() - 1) > 1e-10)

            op = random_op(q, rng)
            s = random_state(q, rng)
            before = s.amplitudes.copy()
            sv.apply_all(s, [op, op.dagger()])
            count("adjoint", np.max(np.abs(s.amplitudes - before)) > 1e-10)

            n, d = int(rng.integers(1, 4)), int(rng.integers(1, 4))
            qubits = [int(v) for v in rng.permutation(n + d + 1)]
            op = sv.pucr(qubits[:n], qubits[n:n + d], rng.uniform(-math.pi, math.pi, (1 << n, d)))
            if rng.random() < 0.5:
                op = op.controlled(qubits[-1])
            s1 = random_state(n + d + 1, rng)
            s2 = sv.apply_all(s1.copy(), decompose_pucr(op))
            sv.apply(s1, op)
            count("pucr", np.max(np.abs(s1.amplitudes - s2.amplitudes)) > 1e-9)

            dd = int(rng.integers(1, 4))
            a = tuple(int(v) for v in rng.integers(0, 1 << dd, int(rng.integers(1, 10))))
            b = tuple(int(v) for v in rng.integers(0, 1 << dd, int(rng.integers(1, 10))))
            sa, sb = Sequence(a, dd), Sequence(b, dd)
            pa, pb = pad_sequences(sa, sb, keep_depth=bool(rng.integers(0, 2)))
            count("padding", brute_force_matches(pa, pb) != brute_force_matches(sa, sb))

            n_a, n_b, dd = (int(v) for v in rng.integers(1, 3, 3))
            a, b = random_sequence(n_a, dd, rng), random_sequence(n_b, dd, rng)
            s1 = run(build_heqc_hadamard(a, b)).amplitudes
            s2 = run(build_heqc_hadamard(a, b, full_control=True)).amplitudes
            count("controlled oracle", np.max(np.abs(s1 - s2)) > 1e-9)

            a = random_sequence(int(rng.integers(0, 3)), int(rng.integers(1, 4)), rng)
            b = random_sequence(int(rng.integers(0, 3)), a.depth, rng)
            found = collect_matches(run_qcam(a, b, int(rng.integers(0, 4)), 64,
                                             seed=int(rng.integers(1 << 31))))
            count("qcam soundness", not found <= brute_force_matches(a, b))
        info["ok"] = not any(violations.values())
        info["detail"] = ", ".join(f"{k} {v}/150" for k, v in violations.items()) + " violations"
