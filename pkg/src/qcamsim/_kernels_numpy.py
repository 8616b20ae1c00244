"""Vectorized numpy kernels, same contract as the numba ones.

The statevector is viewed as a rank-q tensor of shape (2,)*q. Because qubit 0
is the least significant index bit, qubit ``j`` lives on axis ``q - 1 - j``.
"""

import numpy as np


def _tensor(psi):
    q = psi.shape[0].bit_length() - 1
    return psi.reshape((2,) * q), q


def _index(q, fixed):
    idx = [slice(None)] * q
    for qubit, value in fixed.items():
        idx[q - 1 - int(qubit)] = value
    return idx


def apply_matrix(psi, target, controls, mat):
    t, q = _tensor(psi)
    idx = _index(q, {c: 1 for c in controls})
    ax = q - 1 - int(target)
    idx[ax] = 0
    s0 = tuple(idx)
    idx[ax] = 1
    s1 = tuple(idx)
    a = t[s0].copy()
    b = t[s1].copy()
    t[s0] = mat[0, 0] * a + mat[0, 1] * b
    t[s1] = mat[1, 0] * a + mat[1, 1] * b


def apply_x(psi, target, controls):
    t, q = _tensor(psi)
    idx = _index(q, {c: 1 for c in controls})
    ax = q - 1 - int(target)
    idx[ax] = 0
    s0 = tuple(idx)
    idx[ax] = 1
    s1 = tuple(idx)
    a = t[s0].copy()
    t[s0] = t[s1]
    t[s1] = a


def phase_flip(psi, qubits):
    t, q = _tensor(psi)
    t[tuple(_index(q, {c: 1 for c in qubits}))] *= -1


def apply_pucr(psi, address, data, angles, controls):
    t, q = _tensor(psi)
    half = np.asarray(angles, dtype=np.float64) / 2.0
    cos_half, sin_half = np.cos(half), np.sin(half)
    n = len(address)
    for addr in range(1 << n):
        fixed = {c: 1 for c in controls}
        fixed.update({address[b]: (addr >> b) & 1 for b in range(n)})
        for col, target in enumerate(data):
            c, s = cos_half[addr, col], sin_half[addr, col]
            if s == 0.0 and c == 1.0:
                continue
            idx = _index(q, fixed)
            ax = q - 1 - int(target)
            idx[ax] = 0
            s0 = tuple(idx)
            idx[ax] = 1
            s1 = tuple(idx)
            a = t[s0].copy()
            b = t[s1].copy()
            t[s0] = c * a - s * b
            t[s1] = s * a + c * b


def marginal_probs(psi, qubits):
    t, q = _tensor(psi)
    probs = t.real**2 + t.imag**2
    keep = [q - 1 - int(x) for x in qubits]
    drop = tuple(ax for ax in range(q) if ax not in keep)
    reduced = probs.sum(axis=drop) if drop else probs
    # remaining axes are in ascending axis order; reorder so qubits[0] is the LSB
    remaining = sorted(keep)
    order = [remaining.index(ax) for ax in reversed(keep)]
    return np.ascontiguousarray(np.transpose(reduced, order)).reshape(-1)
