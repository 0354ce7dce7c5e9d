# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled gate-sequence kernel; same contract as ``_kernels_py``."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def apply_gate_sequence(const cnp.intp_t[:, ::1] src1,
                        const double complex[:, ::1] c1,
                        const cnp.intp_t[:, ::1] src2,
                        const double complex[:, ::1] c2,
                        gates,
                        psi):
    cdef cnp.intp_t[::1] seq = np.ascontiguousarray(gates, dtype=np.intp)
    a_arr = np.array(psi, dtype=np.complex128, copy=True, order="C")
    b_arr = np.empty_like(a_arr)
    cdef double complex[:, ::1] cur = a_arr
    cdef double complex[:, ::1] nxt = b_arr
    cdef double complex[:, ::1] tmp
    cdef Py_ssize_t dim = cur.shape[0], ncol = cur.shape[1]
    cdef Py_ssize_t t, j, k, g, s1, s2
    cdef double complex w1, w2
    with nogil:
        for t in range(seq.shape[0]):
            g = seq[t]
            for j in range(dim):
                s1 = src1[g, j]
                s2 = src2[g, j]
                w1 = c1[g, j]
                w2 = c2[g, j]
                for k in range(ncol):
                    nxt[j, k] = w1 * cur[s1, k] + w2 * cur[s2, k]
            tmp = cur
            cur = nxt
            nxt = tmp
    return np.asarray(cur)
