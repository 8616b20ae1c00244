"""Loop kernels compiled with numba.

All kernels mutate ``psi`` in place. Qubit ``j`` is bit ``j`` of the basis
index (little-endian). Control sets are passed as bit masks.
"""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def _matrix(psi, target, ctrl_mask, m00, m01, m10, m11):
    bit = np.int64(1) << target
    low = bit - 1
    for k in range(psi.shape[0] >> 1):
        i0 = ((k & ~low) << 1) | (k & low)
        if (i0 & ctrl_mask) != ctrl_mask:
            continue
        i1 = i0 | bit
        a = psi[i0]
        b = psi[i1]
        psi[i0] = m00 * a + m01 * b
        psi[i1] = m10 * a + m11 * b


@njit(cache=True, nogil=True)
def _swap(psi, target, ctrl_mask):
    bit = np.int64(1) << target
    low = bit - 1
    for k in range(psi.shape[0] >> 1):
        i0 = ((k & ~low) << 1) | (k & low)
        if (i0 & ctrl_mask) != ctrl_mask:
            continue
        i1 = i0 | bit
        tmp = psi[i0]
        psi[i0] = psi[i1]
        psi[i1] = tmp


@njit(cache=True, nogil=True)
def _phase_flip(psi, mask):
    for i in range(psi.shape[0]):
        if (i & mask) == mask:
            psi[i] = -psi[i]


@njit(cache=True, nogil=True)
def _pucr(psi, address, data, cos_half, sin_half, ctrl_mask):
    n = address.shape[0]
    for col in range(data.shape[0]):
        bit = np.int64(1) << data[col]
        low = bit - 1
        for k in range(psi.shape[0] >> 1):
            i0 = ((k & ~low) << 1) | (k & low)
            if (i0 & ctrl_mask) != ctrl_mask:
                continue
            addr = 0
            for b in range(n):
                addr |= ((i0 >> address[b]) & 1) << b
            s = sin_half[addr, col]
            c = cos_half[addr, col]
            if s == 0.0 and c == 1.0:
                continue
            i1 = i0 | bit
            a = psi[i0]
            b1 = psi[i1]
            psi[i0] = c * a - s * b1
            psi[i1] = s * a + c * b1


@njit(cache=True, nogil=True)
def _marginal(psi, qubits):
    m = qubits.shape[0]
    out = np.zeros(np.int64(1) << m)
    for i in range(psi.shape[0]):
        z = psi[i]
        p = z.real * z.real + z.imag * z.imag
        if p == 0.0:
            continue
        key = 0
        for b in range(m):
            key |= ((i >> qubits[b]) & 1) << b
        out[key] += p
    return out


def _mask(qubits):
    mask = 0
    for q in qubits:
        mask |= 1 << int(q)
    return np.int64(mask)


def apply_matrix(psi, target, controls, mat):
    _matrix(psi, np.int64(target), _mask(controls),
            complex(mat[0, 0]), complex(mat[0, 1]),
            complex(mat[1, 0]), complex(mat[1, 1]))


def apply_x(psi, target, controls):
    _swap(psi, np.int64(target), _mask(controls))


def phase_flip(psi, qubits):
    _phase_flip(psi, _mask(qubits))


def apply_pucr(psi, address, data, angles, controls):
    half = np.asarray(angles, dtype=np.float64) / 2.0
    _pucr(psi,
          np.asarray(address, dtype=np.int64).reshape(-1),
          np.asarray(data, dtype=np.int64).reshape(-1),
          np.ascontiguousarray(np.cos(half)),
          np.ascontiguousarray(np.sin(half)),
          _mask(controls))


def marginal_probs(psi, qubits):
    return _marginal(psi, np.asarray(qubits, dtype=np.int64))
