# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the hot series loops.

Mirrors ``_pykernels`` (same names, signatures, and truncation rules); the
two are cross-checked in tests/test_backend_parity.py.  The tau expansion
uses 128-bit accumulators, which the bound analysis in lfun keeps well
inside range for the supported table lengths.
"""

from libc.math cimport exp, log, sqrt, M_PI, INFINITY
from libc.stdlib cimport malloc, free

cdef extern from "complex.h":
    double complex cexp(double complex) nogil

BACKEND_NAME = "c"

DEF MAX_LATTICE_TERMS = 5_000_000

ctypedef long long i64

cdef extern from *:
    ctypedef long long i128 "__int128"


def neumaier_sum(values):
    """Compensated (Neumaier) sum of an iterable of numbers, as complex."""
    cdef double sr = 0.0, cr = 0.0, si = 0.0, ci = 0.0
    cdef double t
    cdef double complex z
    for v in values:
        z = v
        t = sr + z.real
        if (sr if sr >= 0 else -sr) >= (z.real if z.real >= 0 else -z.real):
            cr += (sr - t) + z.real
        else:
            cr += (z.real - t) + sr
        sr = t
        t = si + z.imag
        if (si if si >= 0 else -si) >= (z.imag if z.imag >= 0 else -z.imag):
            ci += (si - t) + z.imag
        else:
            ci += (z.imag - t) + si
        si = t
    return complex(sr + cr, si + ci)


def gauss_poly_lattice_sum(double scale, coeffs, double tail_tol):
    """sum_{k>=1} (P(k*scale) + P(-k*scale)) * exp(-pi*(k*scale)^2).

    Only the even part of P survives the +-k pairing; see the Python twin
    for the truncation rule.
    """
    if not (0.0 < scale < INFINITY):
        raise ValueError("scale must be positive and finite")
    cdef int ncap = 9
    cdef double complex even[9]
    cdef int nev = 0, j
    cdef double amax = 0.0
    cdef int deg = len(coeffs) - 1
    if deg >= 2 * ncap:
        raise ValueError("polynomial degree too large for kernel")
    for j in range(len(coeffs)):
        amax += abs(coeffs[j])
        if j % 2 == 0:
            even[nev] = coeffs[j]
            nev += 1
    cdef bint any_even = False
    for j in range(nev):
        if even[j] != 0:
            any_even = True
    if not any_even:
        return 0j, 0
    cdef double x_stop = sqrt(deg / (2.0 * M_PI)) + 0.5
    if x_stop < 1.0:
        x_stop = 1.0
    cdef double sr = 0.0, cr = 0.0, si = 0.0, ci = 0.0
    cdef double t, x, y, w, arg, bound, xb
    cdef double complex pe, term
    cdef long k = 0
    cdef int quiet = 0
    while True:
        k += 1
        x = k * scale
        arg = M_PI * x * x
        w = exp(-arg) if arg < 745.0 else 0.0
        if w != 0.0:
            y = x * x
            pe = 0
            for j in range(nev - 1, -1, -1):
                pe = pe * y + even[j]
            term = 2.0 * w * pe
            t = sr + term.real
            if (sr if sr >= 0 else -sr) >= (term.real if term.real >= 0 else -term.real):
                cr += (sr - t) + term.real
            else:
                cr += (term.real - t) + sr
            sr = t
            t = si + term.imag
            if (si if si >= 0 else -si) >= (term.imag if term.imag >= 0 else -term.imag):
                ci += (si - t) + term.imag
            else:
                ci += (term.imag - t) + si
            si = t
        if x >= x_stop:
            if w == 0.0:
                bound = 0.0
            else:
                xb = x if x > 1.0 else 1.0
                bound = 2.0 * amax * xb ** deg * w
            if bound < tail_tol:
                quiet += 1
                if quiet >= 2:
                    return complex(sr + cr, si + ci), k
            else:
                quiet = 0
        if k >= MAX_LATTICE_TERMS:
            raise RuntimeError("lattice sum did not terminate (scale too small)")


def euler_product(primes, coeffs, s):
    """prod_p 1/poly_p(p^{-s}); ascending local coefficients per prime row."""
    cdef double complex ss = s
    cdef double complex res = 1.0
    cdef double complex x, val
    cdef Py_ssize_t i, j, n = len(primes)
    for i in range(n):
        p = primes[i]
        x = cexp(-ss * log(<double>p))
        row = coeffs[i]
        val = 0
        for j in range(len(row) - 1, -1, -1):
            val = val * x + row[j]
        if abs(val) < 1e-300:
            raise ZeroDivisionError(f"local factor vanishes at p={p}")
        res /= val
    return res


cdef object _int128_to_py(i128 v):
    cdef bint neg = v < 0
    if neg:
        v = -v
    cdef unsigned long long lo = <unsigned long long>(v & <i128>0xFFFFFFFFFFFFFFFF)
    cdef unsigned long long hi = <unsigned long long>(v >> 64)
    res = (int(hi) << 64) | int(lo)
    return -res if neg else res


def eta24_coefficients(int n):
    """tau(1..n) by seven sparse-times-dense passes with the pentagonal-like
    series J = sum_k (-1)^k (2k+1) q^{k(k+1)/2}, all in 128-bit integers."""
    if n < 1:
        raise ValueError("need n >= 1")
    cdef int nspark = 0, k = 0
    while k * (k + 1) // 2 < n:
        nspark += 1
        k += 1
    cdef i64 *je = <i64 *>malloc(nspark * sizeof(i64))
    cdef i64 *jc = <i64 *>malloc(nspark * sizeof(i64))
    cdef i128 *d = <i128 *>malloc(n * sizeof(i128))
    cdef i128 *acc = <i128 *>malloc(n * sizeof(i128))
    if je == NULL or jc == NULL or d == NULL or acc == NULL:
        free(je); free(jc); free(d); free(acc)
        raise MemoryError()
    cdef int i, t, rounds
    cdef i64 e, c
    cdef i128 m, limit, cc
    cdef i128 *swap
    try:
        k = 0
        for i in range(nspark):
            je[i] = k * (k + 1) // 2
            jc[i] = (2 * k + 1) if k % 2 == 0 else -(2 * k + 1)
            k += 1
        for i in range(n):
            d[i] = 0
        for i in range(nspark):
            d[je[i]] = jc[i]
        limit = (<i128>1) << 115
        for rounds in range(7):
            for i in range(n):
                acc[i] = 0
            for t in range(nspark):
                e = je[t]
                cc = jc[t]
                for i in range(n - e):
                    acc[i + e] += cc * d[i]
            swap = d; d = acc; acc = swap
            for i in range(n):
                m = d[i] if d[i] >= 0 else -d[i]
                if m > limit:
                    raise OverflowError("tau expansion exceeded the 128-bit safety bound")
        return [_int128_to_py(d[i]) for i in range(n)]
    finally:
        free(je); free(jc); free(d); free(acc)
