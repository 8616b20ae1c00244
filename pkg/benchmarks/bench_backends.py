"""Compare the numba and numpy kernel backends.

Times each kernel on a random state and one full Grover iteration of a
planted QCAM instance, for a few register sizes. Usage:

    python3 benchmarks/bench_backends.py [--qubits 12 16 20] [--repeat 5]
"""

import argparse
import math
import timeit

import numpy as np

from qcamsim import kernels
from qcamsim import statevec as sv
from qcamsim.circuits import build_grover_iterator, run
from qcamsim.qcam import plant_matches


def kernel_cases(q, rng):
    qubits = [int(v) for v in rng.permutation(q)]
    n = min(4, (q - 1) // 2)
    d = min(6, q - n - 1)
    angles = rng.uniform(-math.pi, math.pi, (1 << n, d))
    return {
        "H": [sv.h(qubits[0])],
        "CX": [sv.cx(qubits[0], qubits[1])],
        "MCZ(4)": [sv.mcz(qubits[:4])],
        "RY ctrl": [sv.ry(qubits[0], 0.3, qubits[1:3])],
        f"PUCR {n}x{d}": [sv.pucr(qubits[:n], qubits[n:n + d], angles)],
    }


def grover_instance(q):
    # n_a + n_b + 2d + 1 = q with n_a = n_b = n, d >= n
    n = max(1, (q - 1) // 4)
    d = (q - 1 - 2 * n) // 2
    a, b = plant_matches(n, n, d, 1, np.random.default_rng(0))
    return build_grover_iterator(a, b)


def time_ops(name, state, ops, repeat):
    kernels.set_backend(name)
    sv.apply_all(state.copy(), ops)  # warm-up and JIT compilation
    return min(timeit.repeat(lambda: sv.apply_all(state, ops), number=1, repeat=repeat))


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("--qubits", type=int, nargs="+", default=[12, 16, 20])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)
    backends = [b for b in ("numba", "numpy") if b in kernels.BACKENDS]
    rng = np.random.default_rng(1)

    print(f"{'case':<22}{'q':>4}" + "".join(f"{b + ' ms':>12}" for b in backends) + f"{'ratio':>8}")
    for q in args.qubits:
        v = rng.normal(size=1 << q) + 1j * rng.normal(size=1 << q)
        state = sv.QuantumState(q, v / np.linalg.norm(v))
        cases = kernel_cases(q, rng)
        g = grover_instance(q)
        if g.num_qubits <= q:
            cases[f"Grover iter ({g.num_qubits}q)"] = None
        for label, ops in cases.items():
            times = []
            for name in backends:
                if ops is None:
                    s = sv.new_state(g.num_qubits)
                    kernels.set_backend(name)
                    run(g, state=s)
                    t = min(timeit.repeat(lambda: run(g, state=s), number=1, repeat=args.repeat))
                else:
                    t = time_ops(name, state, ops, args.repeat)
                times.append(t * 1e3)
            ratio = times[-1] / times[0] if len(times) == 2 else float("nan")
            print(f"{label:<22}{q:>4}" + "".join(f"{t:>12.3f}" for t in times) + f"{ratio:>8.1f}")
    kernels.set_backend(backends[0])


if __name__ == "__main__":
    main()
