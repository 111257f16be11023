# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the loops in _kernels_py."""

from libc.stdlib cimport malloc, calloc, free
from libc.stdint cimport int64_t


cdef long _count_fermat(long n, long ell):
    cdef long x, c, affine = 0
    cdef long *cubes = <long *> calloc(ell, sizeof(long))
    if cubes == NULL:
        raise MemoryError()
    for x in range(ell):
        c = (x * x) % ell
        cubes[(c * x) % ell] += 1
    n = n % ell
    for x in range(ell):
        c = (x * x) % ell
        c = (c * x) % ell
        affine += cubes[(n - c + ell) % ell]
    affine += cubes[ell - 1]
    free(cubes)
    return affine


def count_fermat(n, long ell):
    return _count_fermat(n % ell, ell)


def ap_batch(n, primes):
    out = []
    cdef long ell
    for ell in primes:
        if ell == 3 or n % ell == 0 or ell % 3 == 2:
            out.append(0)
        else:
            out.append(ell + 1 - _count_fermat(n % ell, ell))
    return out


def an_table(ap, bad, long M):
    cdef long i, j, m, ell, k, r
    cdef long *spf = <long *> malloc(max(M, 1) * sizeof(long))
    if spf == NULL:
        raise MemoryError()
    for i in range(M):
        spf[i] = i
    i = 2
    while i * i < M:
        if spf[i] == i:
            j = i * i
            while j < M:
                if spf[j] == j:
                    spf[j] = i
                j += i
        i += 1
    badset = set(bad)
    an = [0] * M
    if M > 1:
        an[1] = 1
    for m in range(2, M):
        ell = spf[m]
        k = 0
        r = m
        while r % ell == 0:
            r //= ell
            k += 1
        if r > 1:
            an[m] = an[r] * an[m // r]
        elif ell in badset:
            an[m] = ap[ell] ** k
        elif k == 1:
            an[m] = ap[ell]
        else:
            an[m] = ap[ell] * an[m // ell] - ell * an[m // (ell * ell)]
    free(spf)
    return an


def series_mul(a, b, long length):
    """Truncated product; the caller guarantees every partial sum fits in int64."""
    cdef long la = min(len(a), length), lb = min(len(b), length)
    cdef long i, j, top
    cdef int64_t ai
    cdef int64_t *A = <int64_t *> malloc(max(la, 1) * sizeof(int64_t))
    cdef int64_t *B = <int64_t *> malloc(max(lb, 1) * sizeof(int64_t))
    cdef int64_t *C = <int64_t *> calloc(max(length, 1), sizeof(int64_t))
    if A == NULL or B == NULL or C == NULL:
        free(A); free(B); free(C)
        raise MemoryError()
    for i in range(la):
        A[i] = a[i]
    for j in range(lb):
        B[j] = b[j]
    for i in range(la):
        ai = A[i]
        if ai != 0:
            top = min(lb, length - i)
            for j in range(top):
                C[i + j] += ai * B[j]
    out = [C[i] for i in range(length)]
    free(A); free(B); free(C)
    return out
