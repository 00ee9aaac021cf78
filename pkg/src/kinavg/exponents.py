"""Exact rational arithmetic for every exponent and threshold in the estimates.

All operations work on ``fractions.Fraction`` internally so that comparisons
against thresholds are exact, never floating.  Floats are accepted and
converted through their exact binary value (dyadic rationals such as 0.25
convert losslessly); strings like "1/3" or "0.5" are parsed exactly.

Conventions (x = (x)_+ means max(x, 0) is *not* used here; "max"/"min" mean
the literal branch choice, which is always recorded):

* scaling_total(d,q,r,p,s) = s + d/r + 1/q - d/p, the total derivative count
  forced on beta_+ + beta_- by scale invariance.
* alpha_star(d,q,r)        = max(1/q + (d-1)/(2r) - (d+1)/4, -1/2), the
  critical cone-multiplier order for L^2 -> L^q_t L^r_x.
* beta_minus_star(d,q,r,kappa) = max(1/q + (d-1)/(2r) - (d+kappa)/2,
  -(d+1+2 kappa)/4), the lower smoothing threshold for the kappa-weighted
  velocity ball (kappa = -1 recovers the sphere threshold).
* equiv_alpha(d,bm,kappa)  = bm + kappa/2 + (d-1)/4, the cone order
  equivalent to the smoothing estimate with hyperbolic order bm.
* gamma_decoupling(d,p,q)  = the decoupling exponent, piecewise over the
  triangle {1/p >= 1/q} with the split at 1/q = (d-1)/(2(d+1)).
* alpha_double_star(d,q,r) = max(1/q + (d-1)/r - d/2, -1/2), the improved
  envelope available for spatially radial data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Union

Rational = Union[int, float, str, Fraction]

F = Fraction


class Threshold(NamedTuple):
    """A piecewise-formula value with the branch that produced it.

    ``branch`` is the 0-based index into the branch list of the formula
    (ties report the first branch); ``boundary`` flags an exact tie.
    """

    value: Fraction
    branch: int
    boundary: bool


def as_fraction(x: Rational, name: str = "value") -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return F(x)
    if isinstance(x, str):
        return F(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError(f"{name} must be finite, got {x!r}")
        return F(x)
    raise TypeError(f"{name} must be rational-like, got {type(x).__name__}")


def _check_dim(d: int) -> int:
    if not isinstance(d, int) or d < 2:
        raise ValueError(f"dimension must be an integer >= 2, got {d!r}")
    return d


def _check_lebesgue(x: Rational, name: str) -> Fraction:
    v = as_fraction(x, name)
    if v < 2:
        raise ValueError(f"{name} must lie in [2, oo), got {v}")
    return v


def _pick_max(branches: list[Fraction]) -> Threshold:
    best = max(branches)
    idx = branches.index(best)
    tie = sum(1 for b in branches if b == best) > 1
    return Threshold(best, idx, tie)


def _pick_min(branches: list[Fraction]) -> Threshold:
    best = min(branches)
    idx = branches.index(best)
    tie = sum(1 for b in branches if b == best) > 1
    return Threshold(best, idx, tie)


# ---------------------------------------------------------------------------
# scaling relation


def scaling_total(d: int, q: Rational, r: Rational, p: Rational = 2, s: Rational = 0) -> Fraction:
    """Total number of derivatives s + d/r + 1/q - d/p fixed by rescaling."""
    _check_dim(d)
    qf = _check_lebesgue(q, "q")
    rf = _check_lebesgue(r, "r")
    pf = _check_lebesgue(p, "p")
    sf = as_fraction(s, "s")
    return sf + F(d) / rf + 1 / qf - F(d) / pf


# ---------------------------------------------------------------------------
# thresholds


def alpha_star_detail(d: int, q: Rational, r: Rational) -> Threshold:
    _check_dim(d)
    qf = _check_lebesgue(q, "q")
    rf = _check_lebesgue(r, "r")
    return _pick_max([1 / qf + F(d - 1) / (2 * rf) - F(d + 1, 4), F(-1, 2)])


def alpha_star(d: int, q: Rational, r: Rational) -> Fraction:
    """Critical cone-multiplier order for L^2 -> L^q_t L^r_x bounds."""
    return alpha_star_detail(d, q, r).value


def beta_plus_star_detail(d: int, q: Rational, r: Rational) -> Threshold:
    _check_dim(d)
    qf = _check_lebesgue(q, "q")
    rf = _check_lebesgue(r, "r")
    return _pick_min([F(d + 1) / (2 * rf) - F(1, 2), F(d) / rf + 1 / qf - F(d + 1, 4)])


def beta_plus_star(d: int, q: Rational, r: Rational) -> Fraction:
    """Upper threshold on the classical derivative order (sphere average)."""
    return beta_plus_star_detail(d, q, r).value


def beta_minus_star_detail(d: int, q: Rational, r: Rational, kappa: Rational = -1) -> Threshold:
    _check_dim(d)
    qf = _check_lebesgue(q, "q")
    rf = _check_lebesgue(r, "r")
    kf = as_fraction(kappa, "kappa")
    if not (-1 <= kf <= 0):
        raise ValueError(f"kappa must lie in [-1, 0], got {kf}")
    return _pick_max(
        [
            1 / qf + F(d - 1) / (2 * rf) - (d + kf) / 2,
            -(d + 1 + 2 * kf) / 4,
        ]
    )


def beta_minus_star(d: int, q: Rational, r: Rational, kappa: Rational = -1) -> Fraction:
    """Lower threshold on the hyperbolic order for the kappa velocity weight.

    kappa = -1 is the sphere; kappa = 0 the solid unit ball.
    """
    return beta_minus_star_detail(d, q, r, kappa).value


def wave_admissible(d: int, q: Rational, r: Rational) -> bool:
    """True iff 1/q <= (d-1)/2 * (1/2 - 1/r) with q, r in [2, oo)."""
    _check_dim(d)
    qf = _check_lebesgue(q, "q")
    rf = _check_lebesgue(r, "r")
    return 1 / qf <= F(d - 1, 2) * (F(1, 2) - 1 / rf)


def radial_wave_admissible(d: int, q: Rational, r: Rational) -> bool:
    """Strict admissibility 1/q < (d-1)(1/2 - 1/r) for radial-data propagator bounds."""
    _check_dim(d)
    qf = _check_lebesgue(q, "q")
    rf = _check_lebesgue(r, "r")
    return 1 / qf < (d - 1) * (F(1, 2) - 1 / rf)


def equiv_alpha(d: int, beta_minus: Rational, kappa: Rational = -1) -> Fraction:
    """Cone order alpha = beta_- + kappa/2 + (d-1)/4 equivalent to the smoothing bound."""
    _check_dim(d)
    bm = as_fraction(beta_minus, "beta_minus")
    kf = as_fraction(kappa, "kappa")
    if not (-1 <= kf <= 0):
        raise ValueError(f"kappa must lie in [-1, 0], got {kf}")
    return bm + kf / 2 + F(d - 1, 4)


def gamma_decoupling_detail(d: int, p: Rational, q: Rational) -> Threshold:
    _check_dim(d)
    pf = as_fraction(p, "p")
    qf = as_fraction(q, "q")
    if pf < 2 or qf < 2 or 1 / pf < 1 / qf:
        raise ValueError(
            f"(1/p, 1/q) = ({1/pf}, {1/qf}) outside the triangle 0 <= 1/q <= 1/p <= 1/2"
        )
    upper = 1 / qf >= F(d - 1, 2 * (d + 1))
    boundary = 1 / qf == F(d - 1, 2 * (d + 1))
    if upper:
        val = F(d + 1) / (2 * qf) + F(d - 1, 4) - F(d) / pf
        return Threshold(val, 0, boundary)
    return Threshold(F(d - 1, 2) - F(d) / pf, 1, False)


def gamma_decoupling(d: int, p: Rational, q: Rational) -> Fraction:
    """Decoupling exponent gamma(p, q) on the triangle 1/p >= 1/q."""
    return gamma_decoupling_detail(d, p, q).value


def alpha_double_star_detail(d: int, q: Rational, r: Rational) -> Threshold:
    _check_dim(d)
    qf = _check_lebesgue(q, "q")
    rf = _check_lebesgue(r, "r")
    return _pick_max([1 / qf + F(d - 1) / rf - F(d, 2), F(-1, 2)])


def alpha_double_star(d: int, q: Rational, r: Rational) -> Fraction:
    """Dyadic-cone envelope exponent for data radial in the spatial variable."""
    return alpha_double_star_detail(d, q, r).value


# ---------------------------------------------------------------------------
# verdicts


def smoothing_verdict(d: int, q: Rational, r: Rational, beta_minus: Rational, kappa: Rational = -1) -> str:
    """Classify the smoothing estimate at the given hyperbolic order.

    Returns "holds", "fails", or "open".  In the wave-admissible region the
    characterisation is an if-and-only-if, so equality with the threshold
    fails.  Outside it the endpoint beta_- = beta_-* is genuinely undecided
    and is reported as "open".
    """
    bm = as_fraction(beta_minus, "beta_minus")
    thr = beta_minus_star(d, q, r, kappa)
    if bm > thr:
        return "holds"
    admissible = wave_admissible(d, q, r)
    if bm < thr:
        return "fails"
    return "fails" if admissible else "open"


# ---------------------------------------------------------------------------
# the exponent record


@dataclass(frozen=True)
class ExponentTuple:
    """All scalar exponents of one experiment, kept as exact rationals.

    ``scaling_consistent()`` checks beta_+ + beta_- = s + d/r + 1/q - d/p
    exactly; experiment constructors that advertise scale invariance must
    build tuples passing it.
    """

    d: int
    q: Fraction
    r: Fraction
    p: Fraction = F(2)
    s: Fraction = F(0)
    kappa: Fraction = F(-1)
    beta_plus: Fraction = F(0)
    beta_minus: Fraction = F(0)
    alpha: Fraction = F(0)

    def __post_init__(self):
        _check_dim(self.d)
        for name in ("q", "r", "p"):
            _check_lebesgue(getattr(self, name), name)
        if not (-1 <= self.kappa <= 0):
            raise ValueError(f"kappa must lie in [-1, 0], got {self.kappa}")

    @classmethod
    def make(
        cls,
        d: int,
        q: Rational,
        r: Rational,
        p: Rational = 2,
        s: Rational = 0,
        kappa: Rational = -1,
        beta_plus: Rational = 0,
        beta_minus: Rational = 0,
        alpha: Rational = 0,
    ) -> "ExponentTuple":
        return cls(
            d=d,
            q=as_fraction(q, "q"),
            r=as_fraction(r, "r"),
            p=as_fraction(p, "p"),
            s=as_fraction(s, "s"),
            kappa=as_fraction(kappa, "kappa"),
            beta_plus=as_fraction(beta_plus, "beta_plus"),
            beta_minus=as_fraction(beta_minus, "beta_minus"),
            alpha=as_fraction(alpha, "alpha"),
        )

    def scaling_consistent(self) -> bool:
        total = scaling_total(self.d, self.q, self.r, self.p, self.s)
        return self.beta_plus + self.beta_minus == total

    @classmethod
    def scaling_closed(
        cls,
        d: int,
        q: Rational,
        r: Rational,
        beta_minus: Rational,
        p: Rational = 2,
        s: Rational = 0,
        kappa: Rational = -1,
    ) -> "ExponentTuple":
        """Build a scaling-consistent tuple by solving for beta_plus."""
        bm = as_fraction(beta_minus, "beta_minus")
        total = scaling_total(d, q, r, p, s)
        t = cls.make(d, q, r, p=p, s=s, kappa=kappa, beta_plus=total - bm, beta_minus=bm)
        return t
