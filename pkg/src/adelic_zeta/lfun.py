"""Global objects built from local data: integer coefficient tables (with
the exact weight-12 cusp form expansion), Euler products over sieved
primes, an Euler-Maclaurin zeta evaluator, and the two completed functions
used throughout: the completed zeta and the completed weight-12 cusp form
L-function, both via incomplete-theta integral representations that make
the s <-> 1-s (resp. s <-> 12-s) symmetry exact by construction.
"""

from __future__ import annotations

import cmath
import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from ._backend import kernels
from .numkit import (
    NonConvergenceError,
    PoleError,
    QuadratureSpec,
    gamma,
    integrate_finite,
    sum_compensated,
)

__all__ = [
    "primes_up_to",
    "CoeffTable",
    "tau_coefficients",
    "sigma_k",
    "zeta_em",
    "GammaFactor",
    "EulerProduct",
    "EulerProductValue",
    "zeta_product",
    "delta_product",
    "to_normalization",
    "euler_product_eval",
    "dirichlet_partial_sum",
    "completed_lambda_zeta",
    "completed_lambda_delta",
    "format_euler_product",
    "parse_euler_product",
]

_MAX_TAU = 100_000
_MAX_SIEVE = 400_000


@lru_cache(maxsize=8)
def primes_up_to(n: int) -> tuple[int, ...]:
    """All primes <= n by a boolean sieve (n capped to keep tables desk-sized)."""
    if n < 2:
        return ()
    if n > _MAX_SIEVE:
        raise ValueError(f"sieve bound capped at {_MAX_SIEVE}")
    mask = np.ones(n + 1, dtype=bool)
    mask[:2] = False
    for p in range(2, int(n**0.5) + 1):
        if mask[p]:
            mask[p * p :: p] = False
    return tuple(int(p) for p in np.nonzero(mask)[0])


@dataclass(frozen=True)
class CoeffTable:
    """Exact integer Dirichlet coefficients a_1..a_N (anchored at a_1 = 1)."""

    values: tuple[int, ...]

    def __post_init__(self):
        if not self.values:
            raise ValueError("empty coefficient table")
        if self.values[0] != 1:
            raise ValueError("tables are normalized with a_1 = 1")
        if any(not isinstance(v, int) for v in self.values):
            raise ValueError("coefficients must be exact integers")

    def __len__(self) -> int:
        return len(self.values)

    def a(self, n: int) -> int:
        if not (1 <= n <= len(self.values)):
            raise IndexError(f"coefficient a_{n} outside table of length {len(self)}")
        return self.values[n - 1]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "a_n"])
        for i, v in enumerate(self.values, start=1):
            w.writerow([i, v])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "CoeffTable":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or [c.strip() for c in rows[0]] != ["n", "a_n"]:
            raise ValueError("expected header 'n,a_n'")
        vals = []
        for i, row in enumerate(rows[1:], start=1):
            if len(row) != 2 or int(row[0]) != i:
                raise ValueError(f"row {i} malformed or out of order")
            vals.append(int(row[1]))
        return cls(tuple(vals))


def tau_coefficients(n: int) -> CoeffTable:
    """tau(1..n) as exact integers via the backend eta-power kernel.

    Wide (128-bit / bignum) arithmetic throughout; n is capped where the
    compiled path's overflow analysis is valid.
    """
    if not (1 <= n <= _MAX_TAU):
        raise ValueError(f"n must lie in [1, {_MAX_TAU}]")
    return CoeffTable(tuple(kernels.eta24_coefficients(n)))


def sigma_k(n: int, k: int) -> int:
    """Sum of k-th powers of the divisors of n."""
    if n < 1:
        raise ValueError("need n >= 1")
    return sum(d**k for d in range(1, n + 1) if n % d == 0)


@lru_cache(maxsize=None)
def _bernoulli(m: int) -> Fraction:
    """B_m in the B_1 = -1/2 convention, by the defining recurrence."""
    if m == 0:
        return Fraction(1)
    total = Fraction(0)
    for j in range(m):
        total += Fraction(math.comb(m + 1, j)) * _bernoulli(j)
    return -total / (m + 1)


def zeta_em(s: complex, terms: int = 100, order: int = 10) -> complex:
    """Riemann zeta by Euler-Maclaurin: truncated Dirichlet sum plus the
    standard boundary and Bernoulli corrections.

    With the defaults this is accurate below 1e-12 absolutely for
    Re s >= 0, |Im s| <= 60.  Left of Re s = 0 the truncation remainder
    stays negligible but cancellation across the growing head terms sets
    an absolute floor near terms^(1 - Re s) * eps, so accuracy degrades
    smoothly (about 1e-7 by Re s = -5).  Raises PoleError near s = 1.
    """
    s = complex(s)
    if abs(s - 1.0) < 1e-8:
        raise PoleError("zeta pole at s = 1")
    if terms < 2 or order < 1:
        raise ValueError("need terms >= 2 and order >= 1")
    if s.real < 1 - 2 * order:
        raise ValueError("order too small for this far left of the critical strip")
    n_arr = np.arange(1, terms + 1, dtype=float)
    head = sum_compensated(list(np.exp(-s * np.log(n_arr))))
    big_n = float(terms)
    tail = big_n ** (1.0 - s) / (s - 1.0) - 0.5 * big_n ** (-s)
    corr = 0j
    rising = s  # s (s+1) ... accumulated
    power = big_n ** (-s - 1.0)
    for k in range(1, order + 1):
        b2k = _bernoulli(2 * k)
        corr += (float(b2k) / math.factorial(2 * k)) * rising * power
        rising *= (s + 2 * k - 1) * (s + 2 * k)
        power /= big_n * big_n
    return complex(head) + tail + corr


@dataclass(frozen=True)
class GammaFactor:
    """Archimedean factor base^(scale*s) * prod gamma(t_scale*s + t_shift).

    base is a positive real stored symbolically as 'pi' or '2pi' so text
    round-trips are exact.
    """

    base: str
    scale: Fraction
    terms: tuple[tuple[Fraction, Fraction], ...]

    def base_value(self) -> float:
        if self.base == "pi":
            return math.pi
        if self.base == "2pi":
            return 2.0 * math.pi
        raise ValueError(f"unknown base {self.base!r}")

    def value(self, s: complex) -> complex:
        s = complex(s)
        out = cmath.exp(s * float(self.scale) * math.log(self.base_value()))
        for a, b in self.terms:
            out *= gamma(float(a) * s + float(b))
        return out


@dataclass(frozen=True)
class EulerProduct:
    """Descriptor of a degree-d Euler product: per-prime local polynomial
    coefficients (ascending in x = p^-s), archimedean factor, functional
    equation data, and which normalization the variable s lives in.

    weight is the motivic weight: the unitary variable is
    s_unitary = s_arithmetic - weight/2.
    """

    label: str
    degree: int
    local_coeffs: Callable[[int], Sequence[complex]]
    gamma_factor: GammaFactor
    fe_center: float
    fe_sign: int
    normalization: str
    weight: int = 0

    def __post_init__(self):
        if self.degree < 1:
            raise ValueError("degree must be >= 1")
        if self.normalization not in ("arithmetic", "unitary"):
            raise ValueError("normalization must be arithmetic or unitary")
        if self.fe_sign not in (-1, 1):
            raise ValueError("functional equation sign must be +-1")

    @property
    def abscissa(self) -> float:
        """Right edge beyond which the product converges absolutely."""
        shift = 0.0 if self.normalization == "unitary" else self.weight / 2.0
        return 1.0 + shift


def zeta_product() -> EulerProduct:
    """The Riemann zeta Euler product (weight 0: both normalizations agree)."""
    return EulerProduct(
        label="zeta",
        degree=1,
        local_coeffs=lambda p: (1.0, -1.0),
        gamma_factor=GammaFactor("pi", Fraction(-1, 2), ((Fraction(1, 2), Fraction(0)),)),
        fe_center=0.5,
        fe_sign=1,
        normalization="unitary",
        weight=0,
    )


def delta_product(table: CoeffTable, normalization: str = "arithmetic") -> EulerProduct:
    """Degree-2 Euler product of the weight-12 level-1 cusp form, built from
    an exact coefficient table (local polynomial 1 - a_p x + p^11 x^2)."""
    if normalization == "arithmetic":

        def local(p: int):
            return (1.0, -float(table.a(p)), float(p) ** 11)

        center = 6.0
    elif normalization == "unitary":

        def local(p: int):
            ap = table.a(p) / float(p) ** 5.5
            return (1.0, -ap, 1.0)

        center = 0.5
    else:
        raise ValueError("normalization must be arithmetic or unitary")
    return EulerProduct(
        label="delta",
        degree=2,
        local_coeffs=local,
        gamma_factor=GammaFactor("2pi", Fraction(-1), ((Fraction(1), Fraction(0)),)),
        fe_center=center,
        fe_sign=1,
        normalization=normalization,
        weight=11,
    )


def to_normalization(L: EulerProduct, normalization: str) -> EulerProduct:
    """Rewrite the descriptor in the other variable: s_unitary =
    s_arithmetic - weight/2; local coefficients pick up p^(k*weight/2)."""
    if normalization not in ("arithmetic", "unitary"):
        raise ValueError("normalization must be arithmetic or unitary")
    if normalization == L.normalization:
        return L
    sign = 1.0 if normalization == "arithmetic" else -1.0
    shift = sign * L.weight / 2.0
    old = L.local_coeffs

    def local(p: int):
        row = old(p)
        return tuple(c * float(p) ** (shift * k) for k, c in enumerate(row))

    return EulerProduct(
        label=L.label,
        degree=L.degree,
        local_coeffs=local,
        gamma_factor=L.gamma_factor,
        fe_center=L.fe_center + shift,
        fe_sign=L.fe_sign,
        normalization=normalization,
        weight=L.weight,
    )


@dataclass(frozen=True)
class EulerProductValue:
    value: complex
    tail_log_bound: float
    primes_used: int


def euler_product_eval(L: EulerProduct, s: complex, prime_bound: int) -> EulerProductValue:
    """Finite Euler product over p <= prime_bound, with the integral-test
    tail estimate degree * P^(1-sigma)/(sigma-1) on |log| of the omitted
    factors (sigma the unitary-normalized real part).

    Raises PoleError outside the half-plane of absolute convergence.
    """
    s = complex(s)
    sigma = s.real - (0.0 if L.normalization == "unitary" else L.weight / 2.0)
    if sigma <= 1.0:
        raise PoleError(
            f"Euler product for {L.label} diverges at Re s = {s.real:g} "
            f"(unitary real part {sigma:g} <= 1)"
        )
    ps = primes_up_to(prime_bound)
    if not ps:
        raise ValueError("prime_bound below 2")
    prime_arr = np.array(ps, dtype=np.int64)
    coeff_rows = np.array([L.local_coeffs(int(p)) for p in ps], dtype=complex)
    value = kernels.euler_product(prime_arr, coeff_rows, s)
    tail = L.degree * prime_bound ** (1.0 - sigma) / (sigma - 1.0)
    return EulerProductValue(complex(value), float(tail), len(ps))


def dirichlet_partial_sum(table: CoeffTable, s: complex, n_terms: int | None = None) -> complex:
    """sum a_n n^-s over the table (arithmetic normalization); a slow
    independent cross-check for the Euler product route."""
    s = complex(s)
    n_terms = len(table) if n_terms is None else min(n_terms, len(table))
    n_arr = np.arange(1, n_terms + 1, dtype=float)
    a_arr = np.array(table.values[:n_terms], dtype=float)
    return complex(sum_compensated(list(a_arr * np.exp(-s * np.log(n_arr)))))


_LAMBDA_SPEC = QuadratureSpec(
    target_abs_tol=2e-13, max_refinements=14, transform="finite_gauss"
)


def _cutoff(decay_rate: float, growth: float, tol: float = 1e-18) -> float:
    """Smallest v with exp(-decay_rate*e^v + growth*v) below tol, stepped
    by quarters so nearby inputs share panel layouts."""
    target = -math.log(tol)
    v = 1.0
    while decay_rate * math.exp(v) - growth * v < target:
        v += 0.25
        if v > 12.0:
            raise NonConvergenceError("integral cutoff search ran away")
    return v


def _omega_zeta(y: np.ndarray) -> np.ndarray:
    """omega(y) = sum_{m>=1} exp(-pi m^2 y) for y >= 1 (4 terms suffice
    below 1e-19 there)."""
    out = np.zeros_like(y)
    for m in range(1, 5):
        out += np.exp(-math.pi * m * m * y)
    return out


def completed_lambda_zeta(s: complex, abs_tol: float = 1e-12) -> complex:
    """Completed zeta pi^(-s/2) gamma(s/2) zeta(s) by the incomplete-theta
    representation

        -1/s - 1/(1-s) + int_0^inf omega(e^v) (e^(vs/2) + e^(v(1-s)/2)) dv,

    which is entire apart from the two explicit poles and symmetric under
    s <-> 1-s exactly as written.  Accurate to ~1e-12 absolutely for
    |Re s| <= 40, |Im s| <= 60 (beyond that the s=40 magnitudes make the
    *relative* double-precision floor dominate).
    """
    s = complex(s)
    if abs(s) < 1e-8 or abs(s - 1.0) < 1e-8:
        raise PoleError("completed zeta has poles at s = 0 and s = 1")
    growth = max(abs(s.real), abs(1.0 - s.real)) / 2.0 + 1.0
    v_max = _cutoff(math.pi, growth)

    def integrand(v: np.ndarray) -> np.ndarray:
        return _omega_zeta(np.exp(v)) * (
            np.exp(0.5 * s * v) + np.exp(0.5 * (1.0 - s) * v)
        )

    spec = QuadratureSpec(
        target_abs_tol=min(abs_tol, 2e-13) if abs_tol else 2e-13,
        max_refinements=14,
        transform="finite_gauss",
    )
    quad = integrate_finite(integrand, 0.0, v_max, spec, vectorized=True)
    # pole terms grouped so the sum is commutative in s <-> 1-s and the
    # reflection symmetry holds bitwise, not just to rounding
    return quad.value - (1.0 / s + 1.0 / (1.0 - s))


@lru_cache(maxsize=1)
def _default_delta_table() -> CoeffTable:
    return tau_coefficients(64)


def _delta_series(y: np.ndarray, table: CoeffTable) -> np.ndarray:
    """q-expansion of the cusp form on the imaginary axis: sum tau(m)
    exp(-2 pi m y), truncated once the tail is below 1e-19 at min(y)."""
    ymin = float(np.min(y))
    out = np.zeros_like(y)
    for m in range(1, len(table) + 1):
        w = table.a(m)
        if abs(w) * math.exp(-2.0 * math.pi * m * ymin) < 1e-19 and m > 2:
            break
        out += w * np.exp(-2.0 * math.pi * m * y)
    else:
        raise ValueError("coefficient table too short for requested accuracy")
    return out


def completed_lambda_delta(
    s: complex, table: CoeffTable | None = None, abs_tol: float = 1e-12
) -> complex:
    """Completed L-function of the weight-12 cusp form,
    (2 pi)^(-s) gamma(s) L(s), via

        int_0^inf Delta(e^v) (e^(sv) + e^((12-s)v)) dv

    (entire; exactly symmetric under s <-> 12-s as written).  Valid for
    |Im s| <= 50 and |Re s|, |12 - Re s| <= 40 at ~1e-12 absolute accuracy.
    """
    s = complex(s)
    table = table or _default_delta_table()
    growth = max(abs(s.real), abs(12.0 - s.real), 1.0)
    v_max = _cutoff(2.0 * math.pi, growth)

    def integrand(v: np.ndarray) -> np.ndarray:
        return _delta_series(np.exp(v), table) * (
            np.exp(s * v) + np.exp((12.0 - s) * v)
        )

    spec = QuadratureSpec(
        target_abs_tol=min(abs_tol, 2e-13) if abs_tol else 2e-13,
        max_refinements=14,
        transform="finite_gauss",
    )
    quad = integrate_finite(integrand, 0.0, v_max, spec, vectorized=True)
    return quad.value


_BLOCK_HEADER = "[adelic-zeta:euler-product:v1]"


def format_euler_product(L: EulerProduct) -> str:
    """Versioned key-value text block describing the descriptor (the local
    polynomial is identified by its label; delta needs a coefficient table
    at parse time)."""
    lines = [
        _BLOCK_HEADER,
        f"label = {L.label}",
        f"degree = {L.degree}",
        f"normalization = {L.normalization}",
        f"weight = {L.weight}",
        f"fe_center = {L.fe_center!r}",
        f"fe_sign = {L.fe_sign}",
        f"gamma_base = {L.gamma_factor.base}",
        f"gamma_scale = {L.gamma_factor.scale}",
        "gamma_terms = "
        + "; ".join(f"{a}*s+{b}" for a, b in L.gamma_factor.terms),
    ]
    return "\n".join(lines) + "\n"


def parse_euler_product(text: str, table: CoeffTable | None = None) -> EulerProduct:
    """Inverse of format_euler_product for the shipped labels."""
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if not lines or lines[0] != _BLOCK_HEADER:
        raise ValueError(f"expected block header {_BLOCK_HEADER}")
    kv = {}
    for ln in lines[1:]:
        key, _, val = ln.partition("=")
        kv[key.strip()] = val.strip()
    try:
        label = kv["label"]
        norm = kv["normalization"]
    except KeyError as exc:
        raise ValueError(f"block is missing key {exc.args[0]!r}") from None
    if label == "zeta":
        base = zeta_product()
    elif label == "delta":
        if table is None:
            raise ValueError("parsing a delta block requires a coefficient table")
        base = delta_product(table, normalization=norm)
    else:
        raise ValueError(f"unknown label {label!r}")
    out = to_normalization(base, norm)
    try:
        if int(kv["degree"]) != out.degree or int(kv["fe_sign"]) != out.fe_sign:
            raise ValueError("block is inconsistent with the labelled family")
        if abs(float(kv["fe_center"]) - out.fe_center) > 1e-12:
            raise ValueError("functional-equation center mismatch")
    except KeyError as exc:
        raise ValueError(f"block is missing key {exc.args[0]!r}") from None
    return out
