"""Exact layer at a fixed prime: Hermite coset enumeration for rank <= 2,
the spherical transform of compactly supported and radial bi-invariant
functions, symmetric Laurent data, local Euler factors, and truncated
traces.

Arithmetic that only involves integer powers of p^(1/2) stays exact via
``SqrtP`` (elements a + b*sqrt(p) with rational a, b); mixed expressions
degrade to complex floats.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Mapping, Sequence

from .numkit import PoleError

__all__ = [
    "SqrtP",
    "SatakeParam",
    "SymLaurent",
    "HeckeFn",
    "CosetEnumeration",
    "modulus_delta",
    "enumerate_cosets",
    "satake_transform",
    "satake_truncated_radial",
    "eval_character",
    "local_factor",
    "local_factor_series",
    "trace_truncated",
    "convolve",
    "twist",
    "dominant_tuples",
]

_MAX_COSET_ENTRY = 4  # public enumeration bound on |lambda_i|


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


def _check_prime(p: int) -> int:
    if not isinstance(p, int) or not _is_prime(p):
        raise ValueError(f"p must be a prime integer (got {p!r})")
    return p


class SqrtP:
    """Exact scalar a + b*sqrt(p) with rational a, b.

    Closed under +, -, * and comparison with rationals; conversion to
    complex/float is the only lossy operation.  Mixing two SqrtP values
    with different p is rejected rather than approximated.
    """

    __slots__ = ("p", "a", "b")

    def __init__(self, p: int, a=0, b=0):
        self.p = _check_prime(p)
        self.a = Fraction(a)
        self.b = Fraction(b)

    @classmethod
    def half_power(cls, p: int, k: int) -> "SqrtP":
        """p^(k/2) for integer k (k may be negative)."""
        if k % 2 == 0:
            return cls(p, a=Fraction(p) ** (k // 2))
        return cls(p, b=Fraction(p) ** ((k - 1) // 2))

    def _coerce(self, other):
        if isinstance(other, SqrtP):
            if other.p != self.p and not (other.b == 0 or self.b == 0):
                raise ValueError("cannot mix sqrt(p) scalars for different p")
            return other
        if isinstance(other, Rational):
            return SqrtP(self.p, a=Fraction(other))
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return complex(self) + other
        p = self.p if self.b != 0 or o.b == 0 else o.p
        return SqrtP(p, self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return SqrtP(self.p, -self.a, -self.b)

    def __sub__(self, other):
        return self + (-other if isinstance(other, SqrtP) else -Fraction(other) if isinstance(other, Rational) else -other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return complex(self) * other
        p = self.p if self.b != 0 or o.b == 0 else o.p
        return SqrtP(p, self.a * o.a + self.b * o.b * p, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, SqrtP):
            if self.b == 0 and other.b == 0:
                return self.a == other.a
            return self.p == other.p and self.a == other.a and self.b == other.b
        if isinstance(other, Rational):
            return self.b == 0 and self.a == Fraction(other)
        if isinstance(other, (float, complex)):
            return complex(self) == complex(other)
        return NotImplemented

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.p, self.a, self.b))

    def __complex__(self):
        return complex(float(self))

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(self.p)

    def __repr__(self):
        if self.b == 0:
            return f"SqrtP({self.p}, {self.a})"
        return f"SqrtP({self.p}, {self.a}, {self.b})"


def _scalar_is_zero(x) -> bool:
    return x == 0


def _scalar_to_complex(x) -> complex:
    if isinstance(x, SqrtP):
        return complex(x)
    if isinstance(x, Rational):
        return complex(float(x))
    return complex(x)


def dominant(v: Sequence[int]) -> tuple[int, ...]:
    """The weakly decreasing reordering (dominant representative) of v."""
    return tuple(sorted(v, reverse=True))


def dominant_tuples(n: int, max_total: int, min_entry: int = 0):
    """All weakly decreasing n-tuples with entries >= min_entry and sum of
    (entry - min_entry) <= max_total, in lexicographic order."""

    def rec(prefix, remaining, cap):
        if len(prefix) == n:
            yield tuple(prefix)
            return
        for v in range(min(cap, min_entry + remaining), min_entry - 1, -1):
            yield from rec(prefix + [v], remaining - (v - min_entry), v)

    yield from rec([], max_total, max_total + min_entry)


@dataclass(frozen=True)
class SatakeParam:
    """Unordered multiset of n nonzero complex eigenvalues at the prime p,
    stored in the canonical (|chi|, arg chi) order; ``norm`` is max |chi_j|."""

    n: int
    p: int
    chi: tuple[complex, ...]

    def __post_init__(self):
        _check_prime(self.p)
        if self.n < 1 or len(self.chi) != self.n:
            raise ValueError("need n >= 1 eigenvalues matching n")
        vals = tuple(complex(c) for c in self.chi)
        if any(v == 0 for v in vals):
            raise ValueError("Satake eigenvalues must be nonzero")
        object.__setattr__(
            self, "chi", tuple(sorted(vals, key=lambda z: (abs(z), cmath.phase(z))))
        )

    @property
    def norm(self) -> float:
        return max(abs(c) for c in self.chi)


class SymLaurent:
    """Symmetric-group-invariant function on Z^n with finite support,
    stored by dominant representative: ``coeffs[lam]`` is the value on the
    whole orbit of lam (orbit-sum semantics for the associated Laurent
    polynomial sum_lam c_lam m_lam)."""

    __slots__ = ("n", "coeffs")

    def __init__(self, n: int, coeffs: Mapping[tuple[int, ...], object]):
        if n < 1:
            raise ValueError("need n >= 1")
        clean = {}
        for lam, c in coeffs.items():
            lam = tuple(int(x) for x in lam)
            if len(lam) != n:
                raise ValueError(f"weight {lam} has wrong length for n={n}")
            if lam != dominant(lam):
                raise ValueError(f"weight {lam} is not dominant")
            if not _scalar_is_zero(c):
                clean[lam] = c
        self.n = n
        self.coeffs = clean

    @classmethod
    def one(cls, n: int) -> "SymLaurent":
        return cls(n, {(0,) * n: 1})

    @classmethod
    def orbit(cls, lam: Sequence[int], coeff=1) -> "SymLaurent":
        lam = tuple(int(x) for x in lam)
        return cls(len(lam), {dominant(lam): coeff})

    def monomials(self) -> dict[tuple[int, ...], object]:
        """Expand to the full coefficient function mu -> value."""
        out = {}
        for lam, c in self.coeffs.items():
            for mu in set(itertools.permutations(lam)):
                out[mu] = c
        return out

    def __add__(self, other: "SymLaurent") -> "SymLaurent":
        if self.n != other.n:
            raise ValueError("rank mismatch")
        merged = dict(self.coeffs)
        for lam, c in other.coeffs.items():
            merged[lam] = merged[lam] + c if lam in merged else c
        return SymLaurent(self.n, merged)

    def __mul__(self, other):
        if not isinstance(other, SymLaurent):
            return SymLaurent(
                self.n, {lam: c * other for lam, c in self.coeffs.items()}
            )
        if self.n != other.n:
            raise ValueError("rank mismatch")
        a = self.monomials()
        b = other.monomials()
        prod: dict[tuple[int, ...], object] = {}
        for mu1, c1 in a.items():
            for mu2, c2 in b.items():
                nu = tuple(x + y for x, y in zip(mu1, mu2))
                c = c1 * c2
                prod[nu] = prod[nu] + c if nu in prod else c
        out = {nu: c for nu, c in prod.items() if nu == dominant(nu)}
        return SymLaurent(self.n, out)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, SymLaurent):
            return NotImplemented
        if self.n != other.n:
            return False
        keys = set(self.coeffs) | set(other.coeffs)
        for k in keys:
            a = self.coeffs.get(k, 0)
            b = other.coeffs.get(k, 0)
            if not a == b:
                return False
        return True

    def __hash__(self):
        return hash((self.n, frozenset(self.coeffs)))

    def __repr__(self):
        items = ", ".join(f"{lam}: {c!r}" for lam, c in sorted(self.coeffs.items()))
        return f"SymLaurent(n={self.n}, {{{items}}})"


@dataclass(frozen=True)
class HeckeFn:
    """Bi-invariant function at p: either finitely supported on double
    cosets (coeffs keyed by dominant weight) or the radial family
    1_{integral} |det|^sigma tagged by its growth exponent."""

    n: int
    p: int
    coeffs: Mapping[tuple[int, ...], object] = field(default_factory=dict)
    radial_exponent: object = None

    def __post_init__(self):
        _check_prime(self.p)
        if self.n < 1:
            raise ValueError("need n >= 1")
        if self.radial_exponent is not None and self.coeffs:
            raise ValueError("a HeckeFn is finite or radial, not both")
        clean = {}
        for lam, c in dict(self.coeffs).items():
            lam = tuple(int(x) for x in lam)
            if len(lam) != self.n:
                raise ValueError("weight length mismatch")
            if lam != dominant(lam):
                raise ValueError(f"support weight {lam} must be dominant")
            if not _scalar_is_zero(c):
                clean[lam] = c
        object.__setattr__(self, "coeffs", clean)

    @classmethod
    def double_coset(cls, n: int, p: int, lam: Sequence[int]) -> "HeckeFn":
        return cls(n, p, {dominant(lam): 1})

    @classmethod
    def unit(cls, n: int, p: int) -> "HeckeFn":
        return cls(n, p, {(0,) * n: 1})

    @classmethod
    def radial(cls, n: int, p: int, sigma) -> "HeckeFn":
        return cls(n, p, {}, radial_exponent=sigma)

    @property
    def is_finite(self) -> bool:
        return self.radial_exponent is None


@dataclass(frozen=True)
class CosetEnumeration:
    """Right-coset representatives of one double coset at p (rank <= 2),
    as explicit upper-triangular matrices with exact rational entries;
    ``depth`` records the modulus p^depth that the off-diagonal entries
    were reduced by."""

    n: int
    p: int
    lam: tuple[int, ...]
    representatives: tuple
    depth: int


def _ord_p(x, p: int):
    """p-adic valuation of a rational; None encodes +infinity (x == 0)."""
    x = Fraction(x)
    if x == 0:
        return None
    k = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        k += 1
    while den % p == 0:
        den //= p
        k -= 1
    return k


def modulus_delta(a: Sequence, p: int) -> Fraction:
    """Product of |a_j|^(n+1-2j) over j=1..n, for diagonal entries that are
    exact rational powers of p (up to sign); returns an exact Fraction."""
    _check_prime(p)
    n = len(a)
    if n < 1:
        raise ValueError("need at least one diagonal entry")
    total = 0
    for j, aj in enumerate(a, start=1):
        x = Fraction(aj)
        k = _ord_p(x, p)
        if k is None or abs(x) != Fraction(p) ** k:
            raise ValueError(f"entry {aj!r} is not an exact power of {p}")
        # |a_j|_p = p^(-k)
        total += -k * (n + 1 - 2 * j)
    return Fraction(p) ** total


@lru_cache(maxsize=None)
def _order_classes(p: int, m: int):
    """Representative classes of the (m,0) double coset grouped by
    (diag order a, diag order c, off-diagonal order t, count).

    t = None encodes a zero off-diagonal entry.  Classes satisfy the
    primitivity filter min(a, c, t) == 0, so the matrices have elementary
    divisors exactly (p^m, 1).
    """
    classes = []
    for a in range(m + 1):
        c = m - a
        # b runs mod p^a; bucket by its exact order
        for t in list(range(a)) + [None]:
            if t is None:
                count = 1
            elif t == a - 1:
                count = p - 1 if a >= 1 else 0
            else:
                count = p ** (a - t) - p ** (a - t - 1)
            if count <= 0:
                continue
            teff = math.inf if t is None else t
            if min(a, c, teff) != 0:
                continue
            classes.append((a, c, t, count))
    return tuple(classes)


def enumerate_cosets(p: int, lam: Sequence[int], n: int = 2) -> CosetEnumeration:
    """Explicit right-coset representatives of K diag(p^lam) K.

    Rank 1 is the single scaled unit; rank 2 yields the Hermite forms
    [[p^a, b], [0, p^c]] (a + c = lam1 + lam2, b mod p^a) whose elementary
    divisors are exactly lam.  Entries are exact rationals; negative
    weights give denominators.
    """
    _check_prime(p)
    lam = tuple(int(x) for x in lam)
    if len(lam) != n:
        raise ValueError("weight length must equal the rank")
    if lam != dominant(lam):
        raise ValueError("weight must be dominant")
    if any(abs(x) > _MAX_COSET_ENTRY for x in lam):
        raise ValueError(f"entries must satisfy |lam_i| <= {_MAX_COSET_ENTRY}")
    if n == 1:
        rep = ((Fraction(p) ** lam[0],),)
        return CosetEnumeration(1, p, lam, (rep,), depth=1)
    if n != 2:
        raise ValueError("explicit enumeration is implemented for rank <= 2")
    m = lam[0] - lam[1]
    shift = Fraction(p) ** lam[1]
    reps = []
    for a in range(m + 1):
        c = m - a
        pa = p**a
        for b in range(pa):
            t = _ord_p(b, p) if b else None
            teff = math.inf if t is None else t
            if min(a, c, teff) != 0:
                continue
            reps.append(
                (
                    (shift * pa, shift * b),
                    (Fraction(0), shift * p**c),
                )
            )
    return CosetEnumeration(2, p, lam, tuple(reps), depth=m + 1)


def _half_delta(p: int, mu: tuple[int, int]) -> SqrtP:
    """delta^(1/2) at diag(p^mu1, p^mu2) for rank 2: p^((mu2 - mu1)/2)."""
    return SqrtP.half_power(p, mu[1] - mu[0])


def _diag_counts(p: int, lam: tuple[int, int]) -> dict[tuple[int, int], int]:
    """How many representatives of K diag(p^lam) K have a given diagonal."""
    m = lam[0] - lam[1]
    out: dict[tuple[int, int], int] = {}
    for a, c, _t, count in _order_classes(p, m):
        key = (a + lam[1], c + lam[1])
        out[key] = out.get(key, 0) + count
    return out


def satake_transform(f: HeckeFn) -> SymLaurent:
    """Spherical transform of a finitely supported bi-invariant function:
    (Sf)(mu) = delta^(1/2)(p^mu) * (number of Hermite representatives of
    each support coset with diagonal p^mu), summed with f's coefficients.

    Exact output: counts times half-integer powers of p.  Rank <= 2.
    """
    if not f.is_finite:
        raise ValueError("use satake_truncated_radial for the radial family")
    if f.n == 1:
        return SymLaurent(1, {lam: c for lam, c in f.coeffs.items()})
    if f.n != 2:
        raise ValueError("spherical transform is implemented for rank <= 2")
    p = f.p
    acc: dict[tuple[int, int], object] = {}
    for lam, c in f.coeffs.items():
        counts = _diag_counts(p, lam)
        for mu, cnt in counts.items():
            if mu != dominant(mu):
                # value check happens on the dominant representative
                continue
            val = c * cnt * _half_delta(p, mu)
            acc[mu] = acc[mu] + val if mu in acc else val
        # invariance audit: the two orderings of each orbit must agree
        for mu, cnt in counts.items():
            if mu == dominant(mu):
                continue
            md = dominant(mu)
            if not cnt * _half_delta(p, mu) == counts.get(md, 0) * _half_delta(p, md):
                raise AssertionError("Weyl invariance violated in transform")
    return SymLaurent(2, acc)


def _as_fraction_exponent(sigma):
    if isinstance(sigma, Rational):
        return Fraction(sigma)
    if isinstance(sigma, float):
        return Fraction(sigma)
    return None


def satake_truncated_radial(sigma, d: int, n: int = 2, p: int = 2) -> SymLaurent:
    """Spherical transform of 1_{integral} |det|^sigma, tabulated on the
    dominant weights mu >= 0 with |mu| <= d.

    Computed by summing Hermite-diagonal counts over all integral cosets
    of each determinant [the same counting route as satake_transform], so
    the constancy at sigma = (n-1)/2 is an output, not an input.  When
    2*sigma is an integer the table is exact (SqrtP scalars).
    """
    _check_prime(p)
    if d < 0:
        raise ValueError("depth d must be >= 0")
    if n == 1:
        sig = _as_fraction_exponent(sigma)
        out = {}
        for m in range(d + 1):
            if sig is not None and (2 * sig * m).denominator == 1:
                out[(m,)] = SqrtP.half_power(p, -int(2 * sig * m))
            else:
                out[(m,)] = complex(p) ** (-complex(sigma) * m)
        return SymLaurent(1, out)
    if n != 2:
        raise ValueError("radial transform is implemented for rank <= 2")
    sig = _as_fraction_exponent(sigma)
    out = {}
    for mu in dominant_tuples(2, d):
        if sum(mu) > d:
            continue
        total = 0
        for j in range(0, sum(mu) // 2 + 1):
            lam = (sum(mu) - j, j)
            if lam != dominant(lam):
                continue
            total += _diag_counts(p, lam).get(mu, 0)
        if total == 0:
            continue
        if sig is not None and (2 * sig * sum(mu)).denominator == 1:
            radial_part = SqrtP.half_power(p, -int(2 * sig * sum(mu)))
        else:
            radial_part = complex(p) ** (-complex(sigma) * sum(mu))
        out[mu] = total * _half_delta(p, mu) * radial_part
    return SymLaurent(2, out)


def eval_character(g: SymLaurent, chi: SatakeParam) -> complex:
    """Evaluate the orbit-sum Laurent polynomial at a Satake parameter."""
    if g.n != chi.n:
        raise ValueError("rank mismatch")
    total = 0j
    for mu, c in g.monomials().items():
        term = _scalar_to_complex(c)
        for x, m in zip(chi.chi, mu):
            term *= x**m
        total += term
    return total


def local_factor(chi: SatakeParam, s: complex) -> complex:
    """prod_j (1 - chi_j p^{-s})^{-1}; PoleError when a factor vanishes."""
    s = complex(s)
    x = complex(chi.p) ** (-s)
    res = 1.0 + 0.0j
    for c in chi.chi:
        den = 1.0 - c * x
        if abs(den) < 1e-13 * max(1.0, abs(c * x)):
            raise PoleError(f"local factor pole: 1 - chi*p^-s vanished for chi={c}")
        res /= den
    return res


def local_factor_series(chi: SatakeParam, d: int) -> list[complex]:
    """First d+1 coefficients of prod_j (1 - chi_j X)^{-1}: the complete
    homogeneous sums h_k(chi)."""
    if d < 0:
        raise ValueError("need d >= 0")
    coeffs = [1.0 + 0.0j] + [0.0j] * d
    for c in chi.chi:
        # multiply by 1/(1 - c X) via the running recurrence
        for k in range(1, d + 1):
            coeffs[k] = coeffs[k] + c * coeffs[k - 1]
    return coeffs


def trace_truncated(chi: SatakeParam, d: int) -> complex:
    """sum of m_lam(chi) over dominant lam >= 0 with |lam| <= d; converges
    to the local factor at s = 0 when the parameter norm is < 1."""
    if d < 0:
        raise ValueError("need d >= 0")
    total = 0j
    for lam in dominant_tuples(chi.n, d):
        if sum(lam) > d:
            continue
        for mu in set(itertools.permutations(lam)):
            term = 1.0 + 0.0j
            for x, m in zip(chi.chi, mu):
                term *= x**m
            total += term
    return total


def twist(chi: SatakeParam, s: complex) -> SatakeParam:
    """Unramified twist: multiply every eigenvalue by p^{-s}."""
    factor = complex(chi.p) ** (-complex(s))
    return SatakeParam(chi.n, chi.p, tuple(c * factor for c in chi.chi))


def convolve(f: HeckeFn, g: HeckeFn) -> HeckeFn:
    """Convolution of finitely supported bi-invariant functions at the same
    prime (rank <= 2), computed from explicit coset representatives and
    exact Smith classification of x^{-1} diag(p^nu)."""
    if f.n != g.n or f.p != g.p:
        raise ValueError("operands must share rank and prime")
    if not (f.is_finite and g.is_finite):
        raise ValueError("convolution needs finite support")
    if f.n == 1:
        out: dict[tuple[int, ...], object] = {}
        for (a,), ca in f.coeffs.items():
            for (b,), cb in g.coeffs.items():
                key = (a + b,)
                c = ca * cb
                out[key] = out[key] + c if key in out else c
        return HeckeFn(1, f.p, out)
    if f.n != 2:
        raise ValueError("convolution is implemented for rank <= 2")
    p = f.p
    if not f.coeffs or not g.coeffs:
        return HeckeFn(2, p, {})
    g1max = max(mu[0] for mu in g.coeffs)
    g2min = min(mu[1] for mu in g.coeffs)
    out = {}
    for lam, cf in f.coeffs.items():
        m = lam[0] - lam[1]
        for mu, cg in g.coeffs.items():
            tot = lam[0] + lam[1] + mu[0] + mu[1]
            for nu1 in range((tot + 1) // 2, lam[0] + g1max + 1):
                nu = (nu1, tot - nu1)
                if nu != dominant(nu) or nu[1] < lam[1] + g2min:
                    continue
                count_here = 0
                for a0, c0, t0, count in _order_classes(p, m):
                    d1 = a0 + lam[1]
                    d2 = c0 + lam[1]
                    toff = None if t0 is None else t0 + lam[1]
                    y1 = nu[0] - d1
                    y2 = nu[1] - d2
                    yoff = math.inf if toff is None else toff + nu[1] - d1 - d2
                    k1 = min(y1, y2, yoff)
                    kappa = (y1 + y2 - k1, k1)
                    if kappa == mu:
                        count_here += count
                if count_here:
                    c = cf * cg * count_here
                    out[nu] = out[nu] + c if nu in out else c
    return HeckeFn(2, p, out)
