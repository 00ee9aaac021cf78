"""Special functions and closed-form constants: Legendre polynomials in d
dimensions, the incomplete beta function, the I_k weight integrals, and the
sharp constants of the (2,2) smoothing estimates.

The d-dimensional Legendre polynomial p_{d,k} is normalised by p_{d,k}(1) = 1;
p_{2,k} is the Chebyshev polynomial T_k and p_{3,k} the classical Legendre
polynomial P_k.  Evaluation uses the Gegenbauer three-term recurrence

    (k + d - 2) p_{d,k+1}(t) = (2k + d - 2) t p_{d,k}(t) - k p_{d,k-1}(t),

which is stable on [-1, 1]; the derivative (Rodrigues) representation is kept
out of the production path and only used as a test oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import integrate
from scipy.special import gamma as gamma_fn

from .exponents import Rational, as_fraction

__all__ = [
    "SpecialValue",
    "sphere_area",
    "legendre",
    "legendre_bound_margin",
    "incomplete_beta",
    "i_k_integral",
    "i_zero_closed",
    "sharp_constant_general",
    "sharp_constant_radial",
]


@dataclass(frozen=True)
class SpecialValue:
    """A computed constant together with the formula and branch that produced it."""

    value: float
    formula_id: str
    branch: str

    def __float__(self) -> float:
        return self.value


def sphere_area(m: int) -> float:
    """Surface measure of the unit sphere S^m in R^{m+1}; S^0 has measure 2."""
    if m < 0:
        raise ValueError("sphere dimension must be >= 0")
    return 2.0 * math.pi ** ((m + 1) / 2) / gamma_fn((m + 1) / 2)


def legendre(d: int, k: int, t):
    """p_{d,k}(t) for t in [-1, 1], vectorized in t."""
    if d < 2:
        raise ValueError("d must be >= 2")
    if k < 0 or k != int(k):
        raise ValueError("k must be a nonnegative integer")
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(t) > 1 + 1e-12):
        raise ValueError("t must lie in [-1, 1]")
    t = np.clip(t, -1.0, 1.0)
    pkm1 = np.ones_like(t)
    if k == 0:
        return pkm1 if pkm1.ndim else float(pkm1)
    pk = t.copy()
    for j in range(1, k):
        pkp1 = ((2 * j + d - 2) * t * pk - j * pkm1) / (j + d - 2)
        pkm1, pk = pk, pkp1
    return pk if pk.ndim else float(pk)


def legendre_pointwise_constant(d: int) -> float:
    """The explicit constant 2^{d-2} pi^{-1/2} Gamma((d-1)/2) in the decay bound."""
    return 2.0 ** (d - 2) / math.sqrt(math.pi) * gamma_fn((d - 1) / 2)


def legendre_bound_margin(d: int, k: int, t):
    """min(1, C_d k^{(2-d)/2} (1-t^2)^{(2-d)/2}) - |p_{d,k}(t)|.

    Nonnegative return certifies the pointwise decay bound at (d, k, t).
    Requires k >= 1 and |t| < 1.
    """
    if k < 1:
        raise ValueError("the pointwise bound is stated for k >= 1")
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(t) >= 1):
        raise ValueError("the pointwise bound needs |t| < 1")
    cd = legendre_pointwise_constant(d)
    env = np.minimum(1.0, cd * k ** ((2 - d) / 2) * (1 - t * t) ** ((2 - d) / 2))
    out = env - np.abs(legendre(d, k, t))
    return out if out.ndim else float(out)


def incomplete_beta(x: float, a: float, b: float) -> float:
    """B(x; a, b) = int_0^x s^{a-1} (1-s)^{b-1} ds to relative accuracy 1e-12.

    Endpoint singularities (a < 1 or b < 1) are removed by the substitution
    s = sin^2 u, after which the integrand is 2 sin^{2a-1} u cos^{2b-1} u.
    """
    if not (0.0 <= x <= 1.0):
        raise ValueError("x must lie in [0, 1]")
    if a <= 0 or b <= 0:
        raise ValueError("incomplete beta requires a > 0 and b > 0")
    if x == 0.0:
        return 0.0

    def integrand(u):
        su, cu = math.sin(u), math.cos(u)
        return 2.0 * su ** (2 * a - 1) * cu ** (2 * b - 1)

    upper = math.asin(math.sqrt(x))
    val, _err = integrate.quad(integrand, 0.0, upper, epsabs=0.0, epsrel=1e-13, limit=200)
    return val


def _ik_preconditions(d: int, beta_plus: float, beta_minus: float):
    if beta_minus <= (2 - d) / 2:
        raise ValueError(
            f"beta_minus must exceed (2-d)/2 = {(2 - d) / 2} for integrability at the cone"
        )
    if beta_plus <= (2 - d) / 2:
        raise ValueError(f"beta_plus must exceed (2-d)/2 = {(2 - d) / 2}")


def i_k_integral(d: int, k: int, beta_plus: float, beta_minus: float) -> float:
    """I_k = int_0^1 p_{d,k}(s)^2 (1+s)^{d-3+2b+} (1-s)^{d-3+2b-} ds.

    The substitution s = cos^2 u regularises the endpoint s = 1.  Satisfies
    I_k <= I_0 with equality only at k = 0.
    """
    _ik_preconditions(d, beta_plus, beta_minus)
    ep = d - 3 + 2 * beta_plus
    em = d - 3 + 2 * beta_minus

    def integrand(u):
        su, cu = math.sin(u), math.cos(u)
        s = cu * cu
        p = legendre(d, k, s)
        return 2.0 * p * p * (1 + s) ** ep * su ** (2 * em + 1) * cu

    val, _err = integrate.quad(integrand, 0.0, math.pi / 2, epsabs=0.0, epsrel=1e-13, limit=200)
    return val


def i_zero_closed(d: int, beta_plus: float, beta_minus: float) -> float:
    """Closed form I_0 = 2^{2(d-2)} B(1/2; 2b- + d - 2, 2b+ + d - 2)."""
    _ik_preconditions(d, beta_plus, beta_minus)
    return 4.0 ** (d - 2) * incomplete_beta(0.5, 2 * beta_minus + d - 2, 2 * beta_plus + d - 2)


def _pow00(base: float, exponent: float) -> float:
    # the constant formulas are to be read with 0^0 = 1
    if base == 0.0 and exponent == 0.0:
        return 1.0
    return base**exponent


def sharp_constant_general(d: int, beta_minus: Rational) -> SpecialValue:
    """Optimal constant for the squared (2,2) smoothing estimate over the sphere.

    Piecewise in beta_-: an interior-maximum branch on [(3-d)/4, 1/4] and the
    flat branch 2 pi |S^{d-2}| for beta_- > 1/4, with every 0^0 read as 1.
    """
    if d < 2:
        raise ValueError("d must be >= 2")
    bm = as_fraction(beta_minus, "beta_minus")
    lo = Fraction(3 - d, 4)
    if bm < lo:
        raise ValueError(f"beta_minus must be >= (3-d)/4 = {lo}")
    area = sphere_area(d - 2)
    bmf = float(bm)
    if bm <= Fraction(1, 4):
        value = (
            2.0
            * math.pi
            * area
            * _pow00(float(d - 2), float(2 - d))
            * _pow00(d - 1 - 4 * bmf, (d - 1) / 2 - 2 * bmf)
            * _pow00(d - 3 + 4 * bmf, (d - 3) / 2 + 2 * bmf)
        )
        branch = "interior-max"
        if bm in (lo, Fraction(1, 4)):
            branch += ":boundary"
    else:
        value = 2.0 * math.pi * area
        branch = "flat"
    return SpecialValue(value, "sharp-constant-general", branch)


def sharp_constant_radial(d: int, beta_plus: Rational, beta_minus: Rational) -> SpecialValue:
    """Optimal constant for the squared (2,2) estimate on spatially radial data.

    C0 = 2^{2d-2} pi |S^{d-2}|^2 / |S^{d-1}| * B(1/2; 2b- + d - 2, 2b+ + d - 2),
    requiring b+ + b- = 1/2 and b- > (2-d)/2 strictly.
    """
    if d < 2:
        raise ValueError("d must be >= 2")
    bp = as_fraction(beta_plus, "beta_plus")
    bm = as_fraction(beta_minus, "beta_minus")
    if bp + bm != Fraction(1, 2):
        raise ValueError("radial sharp constant requires beta_plus + beta_minus = 1/2")
    if bm <= Fraction(2 - d, 2):
        raise ValueError(f"beta_minus must exceed (2-d)/2 = {Fraction(2 - d, 2)}")
    if bp <= Fraction(2 - d, 2):
        raise ValueError(f"beta_plus must exceed (2-d)/2 = {Fraction(2 - d, 2)}")
    bpf, bmf = float(bp), float(bm)
    value = (
        2.0 ** (2 * d - 2)
        * math.pi
        * sphere_area(d - 2) ** 2
        / sphere_area(d - 1)
        * incomplete_beta(0.5, 2 * bmf + d - 2, 2 * bpf + d - 2)
    )
    return SpecialValue(value, "sharp-constant-radial", "incomplete-beta")
