# cython: boundscheck=False, wraparound=False, cdivision=True
"""Fused single-pass version of ``_kernels_py.realization_gains``.

One sweep over the antennas builds the training sample, despreads it into
the precoder row and accumulates every Gram product, so no (M, eta) or
(M, K) temporaries are materialized.
"""
import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free

cnp.import_array()

ctypedef double complex cplx


def realization_gains(const cplx[:, :, ::1] G, const cplx[:, ::1] g_w, const cplx[:, :, ::1] N,
                      const cplx[:, :, ::1] Phi, const cplx[:, ::1] phi_w,
                      double sqrt_etap, double sqrt_etaq, const double[::1] scale):
    cdef Py_ssize_t n = G.shape[0], M = G.shape[1], K = G.shape[2], eta = Phi.shape[1]
    Gk_arr = np.zeros((n, K, K), dtype=np.complex128)
    ge_arr = np.zeros((n, K), dtype=np.complex128)
    gn_arr = np.zeros((n, K), dtype=np.float64)
    cdef cplx[:, :, ::1] Gk = Gk_arr
    cdef cplx[:, ::1] ge = ge_arr
    cdef double[:, ::1] gn = gn_arr
    cdef cplx* y = <cplx*> malloc(eta * sizeof(cplx))
    cdef cplx* w = <cplx*> malloc(K * sizeof(cplx))
    cdef Py_ssize_t t, m, j, k, i
    cdef cplx acc, gconj, gm
    if y == NULL or w == NULL:
        free(y); free(w)
        raise MemoryError()
    try:
        with nogil:
            for t in range(n):
                for m in range(M):
                    gm = g_w[t, m]
                    for j in range(eta):
                        acc = 0
                        for k in range(K):
                            acc = acc + G[t, m, k] * Phi[t, j, k]
                        y[j] = sqrt_etap * acc + sqrt_etaq * gm * phi_w[t, j] + N[t, m, j]
                    for i in range(K):
                        acc = 0
                        for j in range(eta):
                            acc = acc + y[j] * Phi[t, j, i].conjugate()
                        w[i] = scale[i] * acc
                    gconj = gm.conjugate()
                    for k in range(K):
                        acc = G[t, m, k].conjugate()
                        gn[t, k] += acc.real * acc.real + acc.imag * acc.imag
                        for i in range(K):
                            Gk[t, k, i] = Gk[t, k, i] + acc * w[i]
                    for i in range(K):
                        ge[t, i] = ge[t, i] + gconj * w[i]
    finally:
        free(y)
        free(w)
    return Gk_arr, ge_arr, gn_arr
