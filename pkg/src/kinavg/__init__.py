"""kinavg: a desk-scale numerical laboratory for velocity averages of the
kinetic transport equation, cone multipliers and hyperbolic Sobolev
smoothing estimates.

Subpackage map:

* ``exponents``   -- exact rational arithmetic of thresholds and scalings
* ``special``     -- Legendre polynomials, incomplete beta, sharp constants
* ``cutoffs``     -- mollifier bumps and the dyadic partition of unity
* ``grid``        -- periodic space-time grids, transforms, mixed norms
* ``symbols``     -- evaluable Fourier multiplier symbols
* ``velocity``    -- the averaging operator, its dual, and the harmonic series path
* ``radon``       -- Radon transforms of radial weights and the duality checks
* ``experiments`` -- Knapp/bump/dyadic scaling experiments and power-law fits
* ``cli``         -- command-line runner emitting JSON/CSV reports
"""

__version__ = "0.1.0"
