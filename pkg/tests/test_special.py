"""Special functions against independent oracles.

The derivative-representation oracle for p_{d,k} is evaluated symbolically
with sympy (exact rational arithmetic, then floated), keeping it fully
independent of the recurrence used in production.
"""

import math

import numpy as np
import pytest
import sympy as sp

from kinavg import special


def rodrigues_oracle(d: int, k: int):
    """p_{d,k} via k-fold symbolic differentiation; returns a float callable."""
    t = sp.Symbol("t")
    nu = sp.Rational(d - 3, 2)
    expr = (1 - t**2) ** (k + nu)
    dk = sp.diff(expr, t, k)
    pref = (-1) ** k * sp.gamma(sp.Rational(d - 1, 2)) / (2**k * sp.gamma(k + sp.Rational(d - 1, 2)))
    p = sp.simplify(pref * dk * (1 - t**2) ** (-nu))
    return sp.lambdify(t, p, "numpy")


class TestLegendre:
    def test_degree_zero_is_one(self):
        for d in (2, 3, 4):
            assert special.legendre(d, 0, 0.37) == 1.0

    def test_d3_k1_is_t(self):
        ts = np.linspace(-1, 1, 11)
        assert np.allclose(special.legendre(3, 1, ts), ts, atol=1e-14)

    def test_d2_k2_chebyshev(self):
        ts = np.linspace(-1, 1, 11)
        assert np.allclose(special.legendre(2, 2, ts), 2 * ts**2 - 1, atol=1e-13)

    def test_d2_matches_cosine(self):
        theta = np.linspace(0, np.pi, 37)
        for k in range(11):
            got = special.legendre(2, k, np.cos(theta))
            assert np.max(np.abs(got - np.cos(k * theta))) < 1e-12

    @pytest.mark.parametrize("d", [2, 3])
    @pytest.mark.parametrize("k", range(7))
    def test_rodrigues_oracle(self, d, k):
        fn = rodrigues_oracle(d, k)
        ts = np.linspace(-0.95, 0.95, 41)
        got = special.legendre(d, k, ts)
        want = np.asarray(fn(ts), dtype=float)
        assert np.max(np.abs(got - want)) < 1e-10

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            special.legendre(3, 2, 1.5)


class TestLegendreBound:
    def test_chebyshev_margin_at_zero(self):
        # d = 2: the constant is exactly 1, p_{2,1}(0) = 0
        assert special.legendre_bound_margin(2, 1, 0.0) == pytest.approx(1.0, abs=1e-14)

    def test_sample_points_nonnegative(self):
        assert special.legendre_bound_margin(3, 5, 0.3) >= 0
        assert special.legendre_bound_margin(3, 1, 0.999) >= 0

    def test_lattice_sweep(self):
        # the exact margin is >= 0; it touches 0 at Chebyshev extrema, so
        # allow double-precision rounding there
        ts = np.linspace(-0.999, 0.999, 201)
        for d in (2, 3):
            for k in range(1, 13):
                assert np.min(special.legendre_bound_margin(d, k, ts)) >= -1e-12

    def test_requires_k_positive(self):
        with pytest.raises(ValueError):
            special.legendre_bound_margin(2, 0, 0.5)


class TestIncompleteBeta:
    def test_flat_integrand(self):
        for x in (0.0, 0.25, 1.0):
            assert special.incomplete_beta(x, 1, 1) == pytest.approx(x, rel=1e-12, abs=1e-15)

    def test_arcsine_half(self):
        # antiderivative of the (1/2,1/2) integrand is 2 asin(sqrt(s))
        want = 2 * math.asin(math.sqrt(0.5))  # = pi/2
        assert special.incomplete_beta(0.5, 0.5, 0.5) == pytest.approx(want, rel=1e-12)
        assert want == pytest.approx(math.pi / 2, rel=1e-15)

    @pytest.mark.parametrize("a,b", [(0.5, 0.5), (2, 1), (1.5, 2.5), (0.7, 3.0)])
    def test_complete_beta_gamma_identity(self, a, b):
        want = math.gamma(a) * math.gamma(b) / math.gamma(a + b)
        assert special.incomplete_beta(1.0, a, b) == pytest.approx(want, rel=1e-12)

    def test_rejects_bad_parameters(self):
        with pytest.raises(ValueError):
            special.incomplete_beta(0.5, 0.0, 1.0)
        with pytest.raises(ValueError):
            special.incomplete_beta(1.5, 1.0, 1.0)


class TestIkIntegrals:
    def test_k0_d2_quarter(self):
        # integrand reduces to (1-s^2)^{-1/2}; arcsin antiderivative gives pi/2
        assert special.i_k_integral(2, 0, 0.25, 0.25) == pytest.approx(math.pi / 2, rel=1e-11)

    @pytest.mark.parametrize(
        "d,bp,bm", [(2, 0.25, 0.25), (3, 0.5, 0.0), (3, 0.25, 0.25), (2, 0.4, 0.1)]
    )
    def test_k0_matches_closed_form(self, d, bp, bm):
        got = special.i_k_integral(d, 0, bp, bm)
        want = special.i_zero_closed(d, bp, bm)
        assert got == pytest.approx(want, rel=1e-10)

    def test_monotone_in_k(self):
        i0 = special.i_k_integral(3, 0, 0.5, 0.0)
        i1 = special.i_k_integral(3, 1, 0.5, 0.0)
        i2 = special.i_k_integral(3, 2, 0.5, 0.0)
        assert i1 < i0 and i2 < i0

    def test_rejects_nonintegrable(self):
        with pytest.raises(ValueError):
            special.i_k_integral(2, 0, 0.5, 0.0)


class TestSharpConstants:
    def test_planar_endpoint_is_4pi(self):
        got = special.sharp_constant_general(2, 0.25)
        assert got.value == pytest.approx(4 * math.pi, rel=1e-14)
        assert got.branch.startswith("interior-max")
        assert "boundary" in got.branch

    def test_flat_branch(self):
        got = special.sharp_constant_general(3, 0.5)
        assert got.value == pytest.approx(2 * math.pi * special.sphere_area(1), rel=1e-14)
        assert got.branch == "flat"

    def test_d3_zero_order(self):
        # independent derivation: sup of pi (1 + s) on [0, 1] is 2 pi, constant 4 pi sup
        assert special.sharp_constant_general(3, 0.0).value == pytest.approx(8 * math.pi**2, rel=1e-14)

    def test_rejects_below_range(self):
        with pytest.raises(ValueError):
            special.sharp_constant_general(3, -0.26)

    def test_radial_endpoint(self):
        got = special.sharp_constant_radial(2, 0.25, 0.25)
        assert got.value == pytest.approx(4 * math.pi, rel=1e-10)

    def test_radial_d3(self):
        # ratio oracle: for v-independent data in d = 3 with b+ = 1/2 the
        # squared-norm ratio computes to 3 (2 pi)^3/(4 pi) = 6 pi^2
        got = special.sharp_constant_radial(3, 0.5, 0.0)
        assert got.value == pytest.approx(6 * math.pi**2, rel=1e-10)

    def test_radial_requires_strict_range(self):
        with pytest.raises(ValueError):
            special.sharp_constant_radial(2, 0.5, 0.0)
        with pytest.raises(ValueError):
            special.sharp_constant_radial(2, 0.3, 0.3)

    def test_radial_vs_ik_series_k0(self):
        # C0 = 4 pi |S^{d-2}|^2 / |S^{d-1}| * I_0 for pure k = 0 data
        for d, bp, bm in ((2, 0.25, 0.25), (3, 0.5, 0.0), (3, 0.3, 0.2)):
            i0 = special.i_k_integral(d, 0, bp, bm)
            want = 4 * math.pi * special.sphere_area(d - 2) ** 2 / special.sphere_area(d - 1) * i0
            got = special.sharp_constant_radial(d, bp, bm)
            assert got.value == pytest.approx(want, rel=1e-10)
