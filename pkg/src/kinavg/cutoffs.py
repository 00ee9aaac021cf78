"""Smooth compactly supported cutoffs and the dyadic partition of unity.

Everything here is built from the standard mollifier exp(-1/(1-u^2)).
Two profiles are exposed:

* ``bump`` -- a fixed C^infty bump supported on [1/2, 2] (not a partition).
* ``partition_bump`` -- the bump of a dyadic partition of unity: with
  W(u) = m(u) / sum_j m(u - j) (m = mollifier in log2 coordinates),
  phi(s) = W(log2 s) satisfies sum_j phi(2^-j s) = 1 exactly for every s > 0.

The partition identity holds to floating rounding because the normalising
denominator is 1-periodic in log2 s.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def mollifier(u):
    """exp(-1/(1-u^2)) on |u| < 1, zero outside; vectorized."""
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    inside = np.abs(u) < 1.0
    w = u[inside]
    out[inside] = np.exp(-1.0 / (1.0 - w * w))
    if out.ndim == 0:
        return float(out)
    return out


def bump(s):
    """Smooth bump supported on s in [1/2, 2], equal to exp(-1) at s = 1.

    Defined as mollifier(log2 s) so it is symmetric on the dyadic scale.
    """
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    pos = s > 0
    out[pos] = mollifier(np.log2(s[pos]))
    if out.ndim == 0:
        return float(out)
    return out


def _partition_denominator(u):
    # m has support (-1,1), so at most two translates are active at any u.
    j0 = np.floor(u)
    d = np.zeros_like(u)
    for off in (-1.0, 0.0, 1.0):
        d += mollifier(u - (j0 + off))
    return d


def partition_bump(s):
    """Dyadic partition bump phi: supported on [1/2,2], sum_j phi(2^-j s) = 1."""
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    pos = s > 0
    u = np.log2(s[pos])
    active = np.abs(u) < 1.0
    vals = np.zeros_like(u)
    ua = u[active]
    vals[active] = mollifier(ua) / _partition_denominator(ua)
    out[pos] = vals
    if out.ndim == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class BumpProfile:
    """One of the smooth cutoffs used throughout, with its partition flag.

    kind is "plain" (the fixed [1/2,2] bump) or "partition" (the dyadic
    partition bump).  Both vanish outside [1/2, 2].
    """

    kind: str = "plain"

    def __call__(self, s):
        if self.kind == "partition":
            return partition_bump(s)
        if self.kind == "plain":
            return bump(s)
        raise ValueError(f"unknown bump kind {self.kind!r}")

    @property
    def support(self) -> tuple[float, float]:
        return (0.5, 2.0)


PLAIN = BumpProfile("plain")
PARTITION = BumpProfile("partition")
