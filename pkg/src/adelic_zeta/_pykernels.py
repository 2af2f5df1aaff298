"""Pure-Python reference kernels.

Same call signatures as the compiled module ``_ckernels``; ``_backend``
picks one of the two at import time.  These implementations favour clarity
and exactness over speed, and double as an independent cross-check of the
compiled code paths (see tests/test_backend_parity.py).
"""

import cmath
import math

BACKEND_NAME = "python"

_MAX_LATTICE_TERMS = 5_000_000


def neumaier_sum(values):
    """Compensated (Neumaier) sum of an iterable of numbers, as complex.

    Running error stays O(eps) independent of length or cancellation
    pattern, unlike the naive left fold.
    """
    sr = cr = si = ci = 0.0
    for v in values:
        z = complex(v)
        t = sr + z.real
        if abs(sr) >= abs(z.real):
            cr += (sr - t) + z.real
        else:
            cr += (z.real - t) + sr
        sr = t
        t = si + z.imag
        if abs(si) >= abs(z.imag):
            ci += (si - t) + z.imag
        else:
            ci += (z.imag - t) + si
        si = t
    return complex(sr + cr, si + ci)


def gauss_poly_lattice_sum(scale, coeffs, tail_tol):
    """sum_{k>=1} (P(k*scale) + P(-k*scale)) * exp(-pi*(k*scale)^2).

    P is the polynomial with (complex) ``coeffs`` in ascending order.  Odd
    powers cancel between +k and -k, so only the even part is evaluated;
    in particular an odd P gives exactly 0.  Returns (value, kmax) where
    kmax is the last lattice index included.  Truncation: stop once past
    the hump of x^deg*exp(-pi x^2) with two consecutive term bounds below
    ``tail_tol``.
    """
    if not (0.0 < scale < math.inf):
        raise ValueError("scale must be positive and finite")
    even = list(coeffs[0::2])
    if not any(abs(c) != 0.0 for c in even):
        return 0j, 0
    deg = len(coeffs) - 1
    amax = sum(abs(c) for c in coeffs)
    # beyond x_stop the term bound 2*amax*max(1,x)^deg*exp(-pi x^2) decreases
    x_stop = max(1.0, math.sqrt(deg / (2.0 * math.pi)) + 0.5)
    sr = cr = si = ci = 0.0
    k = 0
    quiet = 0
    while True:
        k += 1
        x = k * scale
        w = math.exp(-math.pi * x * x) if math.pi * x * x < 745.0 else 0.0
        if w != 0.0:
            y = x * x
            pe = 0j
            for c in reversed(even):
                pe = pe * y + c
            term = 2.0 * w * pe
            t = sr + term.real
            if abs(sr) >= abs(term.real):
                cr += (sr - t) + term.real
            else:
                cr += (term.real - t) + sr
            sr = t
            t = si + term.imag
            if abs(si) >= abs(term.imag):
                ci += (si - t) + term.imag
            else:
                ci += (term.imag - t) + si
            si = t
        if x >= x_stop:
            bound = 0.0 if w == 0.0 else 2.0 * amax * max(1.0, x) ** deg * w
            if bound < tail_tol:
                quiet += 1
                if quiet >= 2:
                    return complex(sr + cr, si + ci), k
            else:
                quiet = 0
        if k >= _MAX_LATTICE_TERMS:
            raise RuntimeError("lattice sum did not terminate (scale too small)")


def euler_product(primes, coeffs, s):
    """prod_p 1/poly_p(p^{-s}); ``coeffs[i]`` are the ascending coefficients
    of the local polynomial at ``primes[i]``.

    Primes must come sorted ascending so the accumulation order (and hence
    the rounding pattern) is deterministic across backends.
    """
    s = complex(s)
    res = 1.0 + 0.0j
    for i in range(len(primes)):
        p = primes[i]
        x = cmath.exp(-s * math.log(p))
        row = coeffs[i]
        val = 0j
        for j in range(len(row) - 1, -1, -1):
            val = val * x + complex(row[j])
        if abs(val) < 1e-300:
            raise ZeroDivisionError(f"local factor vanishes at p={p}")
        res /= val
    return res


def _square_truncated(a, length):
    """Coefficients of (sum a_i X^i)^2 up to X^(length-1), exact integers.

    Kronecker substitution: evaluate at X = 2^b with b wide enough that the
    product's balanced digits do not interfere, square one big integer, and
    read the signed digits back off with a carry chain.
    """
    amax = max((abs(x) for x in a), default=0)
    if amax == 0:
        return [0] * length
    b = 2 * amax.bit_length() + len(a).bit_length() + 2
    b = ((b + 7) // 8) * 8
    w = b // 8
    pos = bytearray(len(a) * w)
    neg = bytearray(len(a) * w)
    for i, c in enumerate(a):
        if c > 0:
            pos[i * w : i * w + w] = int(c).to_bytes(w, "little")
        elif c < 0:
            neg[i * w : i * w + w] = int(-c).to_bytes(w, "little")
    big = int.from_bytes(bytes(pos), "little") - int.from_bytes(bytes(neg), "little")
    sq = big * big
    nbytes = max((sq.bit_length() + 7) // 8, length * w) + 16
    raw = sq.to_bytes(nbytes, "little")
    out = []
    half = 1 << (b - 1)
    full = 1 << b
    carry = 0
    for i in range(length):
        d = int.from_bytes(raw[i * w : i * w + w], "little") + carry
        if d >= half:
            d -= full
            carry = 1
        else:
            carry = 0
        out.append(d)
    return out


def eta24_coefficients(n):
    """tau(1..n): q-expansion of the 24th power of the eta quotient.

    The generating square root chain J = sum_k (-1)^k (2k+1) q^{k(k+1)/2}
    satisfies J^8 = sum tau(m) q^{m-1}; three truncated squarings give the
    exact integer coefficients.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    j = [0] * n
    k = 0
    while k * (k + 1) // 2 < n:
        j[k * (k + 1) // 2] = (2 * k + 1) if k % 2 == 0 else -(2 * k + 1)
        k += 1
    j2 = _square_truncated(j, n)
    j4 = _square_truncated(j2, n)
    return _square_truncated(j4, n)
