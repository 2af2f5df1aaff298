"""Hecke double cosets, the spherical transform, and local factors.

The coset-count oracle enumerates upper-triangular integer matrices
directly and classifies them by Smith normal form, independently of the
order-class counting in the implementation.
"""

import itertools
import math
import random
from fractions import Fraction

import pytest

from adelic_zeta.satake import (
    HeckeFn,
    SatakeParam,
    SqrtP,
    SymLaurent,
    convolve,
    dominant,
    dominant_tuples,
    enumerate_cosets,
    eval_character,
    local_factor,
    local_factor_series,
    modulus_delta,
    satake_transform,
    satake_truncated_radial,
    trace_truncated,
    twist,
)


def snf_count_oracle(p: int, lam: tuple[int, int]) -> int:
    """Count Hermite forms [[p^a, b], [0, p^c]] (a+c = |lam|, 0 <= b < p^a)
    whose Smith normal form is diag(p^lam1, p^lam2), by brute force."""
    total_val = lam[0] + lam[1]
    count = 0
    for a in range(total_val + 1):
        c = total_val - a
        x, z = p**a, p**c
        for b in range(p**a):
            d1 = math.gcd(math.gcd(x, b), z)
            d2 = (x * z) // d1
            if (d2, d1) == (p ** lam[0], p ** lam[1]):
                count += 1
    return count


class TestSqrtP:
    def test_ring_ops(self):
        r = SqrtP(2, 1, 1)  # 1 + sqrt(2)
        s = SqrtP(2, 1, -1)
        assert r * s == SqrtP(2, -1)  # (1+r)(1-r) = 1 - 2
        assert r + s == 2
        assert r - r == 0

    def test_half_power(self):
        assert SqrtP.half_power(2, 2) == 2
        assert SqrtP.half_power(2, 0) == 1
        h = SqrtP.half_power(2, 1)
        assert h * h == 2
        assert SqrtP.half_power(3, -2) == Fraction(1, 3)
        assert abs(complex(SqrtP.half_power(5, 3)) - 5**1.5) < 1e-12

    def test_mixing_primes_rejected(self):
        with pytest.raises(ValueError):
            SqrtP(2, 0, 1) + SqrtP(3, 0, 1)

    def test_rational_interop(self):
        assert SqrtP(2, Fraction(3, 2)) == Fraction(3, 2)
        assert hash(SqrtP(2, Fraction(3, 2))) == hash(SqrtP(7, Fraction(3, 2)))


class TestDominant:
    def test_dominant_sorts(self):
        assert dominant((0, 2, -1)) == (2, 0, -1)

    def test_tuples_enumeration(self):
        got = set(dominant_tuples(2, 2))
        assert got == {(0, 0), (1, 0), (1, 1), (2, 0)}

    def test_tuples_respect_min_entry(self):
        # budget counts entry - min_entry, so the floor tuple costs zero
        got = set(dominant_tuples(2, 1, min_entry=-1))
        assert got == {(-1, -1), (0, -1)}
        got2 = set(dominant_tuples(2, 2, min_entry=-1))
        assert got2 == {(-1, -1), (0, -1), (0, 0), (1, -1)}


class TestCosets:
    @pytest.mark.parametrize("p", [2, 3, 5])
    def test_degree_p_plus_one(self, p):
        assert len(enumerate_cosets(p, (1, 0)).representatives) == p + 1

    @pytest.mark.parametrize("p", [2, 3])
    @pytest.mark.parametrize("lam", [(1, 0), (2, 0), (2, 1), (3, 1), (2, 2), (3, 0)])
    def test_counts_match_snf_oracle(self, p, lam):
        got = len(enumerate_cosets(p, lam).representatives)
        assert got == snf_count_oracle(p, lam)

    def test_representatives_are_upper_triangular_with_right_det(self):
        enum = enumerate_cosets(3, (2, 1))
        for m in enum.representatives:
            (a, b), (c, d) = m
            assert c == 0
            assert a * d == Fraction(3) ** 3

    def test_negative_cocharacter(self):
        # lam = (0, -1) is the inverse coset; counts mirror (1, 0)
        assert len(enumerate_cosets(2, (0, -1)).representatives) == 3

    def test_dominance_required(self):
        with pytest.raises(ValueError):
            enumerate_cosets(2, (0, 1))

    def test_composite_p_rejected(self):
        with pytest.raises(ValueError):
            enumerate_cosets(4, (1, 0))


class TestModulusDelta:
    def test_known_values(self):
        assert modulus_delta((Fraction(2), Fraction(1)), 2) == Fraction(1, 2)
        assert modulus_delta((Fraction(1), Fraction(2)), 2) == Fraction(2)
        assert modulus_delta((Fraction(9), Fraction(3)), 3) == Fraction(1, 27) * Fraction(9)

    def test_rejects_non_power(self):
        with pytest.raises(ValueError):
            modulus_delta((Fraction(6), Fraction(1)), 2)


class TestSatakeTransform:
    def test_unit_maps_to_one(self):
        assert satake_transform(HeckeFn.unit(2, 3)) == SymLaurent.one(2)

    def test_hecke_operator_image(self):
        # S(T_p) = sqrt(p) * m_(1,0)
        for p in (2, 3):
            got = satake_transform(HeckeFn.double_coset(2, p, (1, 0)))
            assert got == SymLaurent.orbit((1, 0), SqrtP.half_power(p, 1))

    def test_central_element_image(self):
        # 1_{pI} is central: image is the single orbit (1,1) with coeff 1
        got = satake_transform(HeckeFn.double_coset(2, 5, (1, 1)))
        assert got == SymLaurent.orbit((1, 1), 1)

    def test_homomorphism_on_seeded_pairs(self):
        rng = random.Random(424242)
        lams = [(1, 0), (1, 1), (2, 0), (2, 1), (0, -1), (1, -1)]
        for _ in range(5):
            la, lb = rng.choice(lams), rng.choice(lams)
            f = HeckeFn.double_coset(2, 2, la)
            g = HeckeFn.double_coset(2, 2, lb)
            lhs = satake_transform(convolve(f, g))
            rhs = satake_transform(f) * satake_transform(g)
            assert lhs == rhs, (la, lb)

    def test_tp_squared_decomposition(self):
        # T_p * T_p = T_{p^2} + (p+1) 1_{pI}
        for p in (2, 3):
            tp = HeckeFn.double_coset(2, p, (1, 0))
            got = convolve(tp, tp)
            assert got.coeffs == {(2, 0): 1, (1, 1): p + 1}

    def test_convolution_validation(self):
        f = HeckeFn.double_coset(2, 2, (1, 0))
        g = HeckeFn.double_coset(2, 3, (1, 0))
        with pytest.raises(ValueError):
            convolve(f, g)


class TestRadial:
    def test_exact_identity_at_center(self):
        # sigma = 1/2 makes every orbit coefficient exactly 1
        for p in (2, 3):
            val = satake_truncated_radial(0.5, 4, p=p)
            lams = [lam for lam in dominant_tuples(2, 4) if min(lam) >= 0]
            assert set(val.coeffs) == set(lams)
            for lam, c in val.coeffs.items():
                assert c == 1, (p, lam, c)

    def test_shifted_exponent(self):
        # at sigma = 1 the orbit lam carries p^(-|lam|/2)
        val = satake_truncated_radial(1.0, 3, p=2)
        for lam, c in val.coeffs.items():
            assert c == SqrtP.half_power(2, -(lam[0] + lam[1])), lam

    def test_fractional_sigma_exact_when_halves(self):
        val = satake_truncated_radial(Fraction(3, 2), 2, p=3)
        for lam, c in val.coeffs.items():
            assert c == SqrtP.half_power(3, -2 * (lam[0] + lam[1]))


class TestLocalFactors:
    def test_local_factor_closed_form(self):
        chi = SatakeParam(2, 2, (0.5 + 0.1j, 0.3))
        s = 0.7 - 0.2j
        x = 2.0 ** (-s)
        expect = 1.0 / ((1 - (0.5 + 0.1j) * x) * (1 - 0.3 * x))
        assert abs(local_factor(chi, s) - expect) < 1e-13

    def test_pole_detected(self):
        chi = SatakeParam(1, 2, (1.0,))
        with pytest.raises(ZeroDivisionError):
            local_factor(chi, 0.0)

    def test_series_vs_bruteforce_products(self):
        rng = random.Random(555)
        for _ in range(20):
            n = rng.randint(1, 3)
            d = rng.randint(1, 6)
            chi_vals = tuple(
                complex(rng.uniform(-0.9, 0.9), rng.uniform(-0.9, 0.9)) for _ in range(n)
            )
            chi = SatakeParam(n, 2, chi_vals)
            series = local_factor_series(chi, d)
            # brute force: truncated convolution of n geometric series
            prod = [1.0 + 0j] + [0j] * d
            for x in chi_vals:
                geo = [x**k for k in range(d + 1)]
                nxt = [0j] * (d + 1)
                for i in range(d + 1):
                    for j in range(d + 1 - i):
                        nxt[i + j] += prod[i] * geo[j]
                prod = nxt
            for k in range(d + 1):
                assert abs(series[k] - prod[k]) < 1e-12

    def test_series_sums_orbit_monomials(self):
        # h_k(chi) equals the trace of the degree-k dominant orbits
        chi = SatakeParam(2, 2, (0.4, 0.25))
        series = local_factor_series(chi, 5)
        for k in range(6):
            orbit_sum = 0j
            for lam in dominant_tuples(2, k):
                if sum(lam) == k and min(lam) >= 0:
                    orbit_sum += eval_character(SymLaurent.orbit(lam, 1), chi)
            assert abs(series[k] - orbit_sum) < 1e-13

    def test_trace_against_geometric_value(self):
        chi = SatakeParam(2, 2, (0.5, 0.3))
        expect = 1.0 / ((1 - 0.5) * (1 - 0.3))
        assert abs(trace_truncated(chi, 30) - expect) <= 1e-8

    def test_twist_matches_shift(self):
        chi = SatakeParam(2, 3, (0.8, 0.2 + 0.1j))
        s0 = 0.4 + 0.9j
        lhs = local_factor(twist(chi, s0), 0.25)
        rhs = local_factor(chi, s0 + 0.25)
        assert abs(lhs - rhs) < 1e-12


class TestSatakeParam:
    def test_zero_entry_rejected(self):
        with pytest.raises(ValueError):
            SatakeParam(2, 2, (0.0, 1.0))

    def test_norm_and_canonical_order(self):
        chi = SatakeParam(2, 2, (0.2, -1.5))
        assert chi.norm == 1.5
        assert SatakeParam(2, 2, (-1.5, 0.2)) == chi
