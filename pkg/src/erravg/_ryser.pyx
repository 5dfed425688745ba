# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled Ryser permanent for complex matrices (Gray-code column updates)."""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def ryser_permanent(cnp.complex128_t[:, :] a):
    """Permanent of a square complex matrix, O(2^n * n).

    Iterates subsets of columns in Gray-code order so each step updates the
    running row sums with a single column add or subtract.
    """
    cdef Py_ssize_t n = a.shape[0]
    if a.shape[1] != n:
        raise ValueError("matrix must be square")
    if n == 0:
        return 1.0 + 0.0j

    cdef cnp.ndarray[cnp.complex128_t, ndim=1] sums_arr = np.zeros(n, dtype=np.complex128)
    cdef cnp.complex128_t[:] sums = sums_arr
    cdef double complex total = 0.0
    cdef double complex prod
    cdef unsigned long long k, gray, prev_gray = 0, diff
    cdef unsigned long long limit = 1ULL << n
    cdef Py_ssize_t i, j, popcount = 0

    for k in range(1, limit):
        gray = k ^ (k >> 1)
        diff = gray ^ prev_gray
        j = 0
        while not (diff >> j) & 1ULL:
            j += 1
        if (gray >> j) & 1ULL:
            for i in range(n):
                sums[i] = sums[i] + a[i, j]
            popcount += 1
        else:
            for i in range(n):
                sums[i] = sums[i] - a[i, j]
            popcount -= 1
        prod = 1.0
        for i in range(n):
            prod = prod * sums[i]
        if (n - popcount) & 1:
            total = total - prod
        else:
            total = total + prod
        prev_gray = gray

    return complex(total)
