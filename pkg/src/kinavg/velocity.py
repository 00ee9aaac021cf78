"""The velocity averaging operator, its dual, and the spherical-harmonic
series path, over the sphere and the kappa-weighted ball measures.

Frequency-side formulas implemented here (transform in x only for
space-velocity data):

* rho_hat(xi,tau) = 2 pi * int delta(v.xi + tau) f_hat(xi,v) dmu(v);
* sphere case: the delta integral is an explicit slice of the sphere by the
  hyperplane v.xi = -tau (two points for d = 2, a circle for d = 3) with
  prefactor 2 pi / sqrt(|xi|^2 - tau^2);
* ball case: the delta is realised as a slab |v.xi + tau| <= eps of weight
  1/(2 eps), eps = one tau-lattice cell, which keeps rho and rho* mutually
  adjoint on the grid;
* dual: rho*_hat g(xi, v) = g_hat(xi, -xi.v), sampled by exact trigonometric
  evaluation of the band-limited time dependence.

d = 2 cone regularisation: the slice prefactor carries the inverse square
root (1 - tau^2/|xi|^2)^{-1/2}; within 1.5 cells of the cone the lattice
value uses the exact cell average of that profile (closed form via arcsin),
so lattice norms converge to the continuum from below rather than
oscillating.  For d = 3 the prefactor is bounded and no averaging is needed.

Phase-space data is stored frequency-first on an explicit list of spatial
lattice indices, so annulus-supported d = 3 data stays small.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.special import roots_jacobi, roots_legendre, sph_harm_y

from .grid import GridSpec, SpaceTimeField, spatial_forward, spatial_inverse
from .special import legendre, sphere_area

__all__ = [
    "VelocityMeasure",
    "sphere_measure",
    "kappa_ball_measure",
    "PhaseSpaceData",
    "RadialModeData",
    "average_rho",
    "rho_hat_on",
    "average_rho_direct",
    "dual_rho_star",
    "funk_hecke_coefficient",
    "funk_hecke_average",
    "phase_space_from_modes",
]

_CONE_BAND_CELLS = 1.5


# ---------------------------------------------------------------------------
# measures


@dataclass(frozen=True)
class VelocityMeasure:
    """Quadrature realisation of a velocity measure on R^d.

    kind "sphere" is the full surface measure on S^{d-1}; kind "kappa_ball"
    realises (1-|v|^2)^kappa / Gamma(1+kappa) dv on the unit ball, with the
    kappa -> -1 limit equal to half the sphere measure.
    """

    kind: str
    d: int
    kappa: float
    nodes: np.ndarray  # (N, d)
    weights: np.ndarray  # (N,)
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def total_mass(self) -> float:
        return float(np.sum(self.weights))

    @property
    def on_sphere(self) -> bool:
        return bool(self.meta.get("on_sphere", self.kind == "sphere"))


def _sphere_nodes(d: int, n_angles: int, n_theta: int, n_phi: int):
    if d == 2:
        th = 2.0 * np.pi * np.arange(n_angles) / n_angles
        nodes = np.stack([np.cos(th), np.sin(th)], axis=1)
        w = np.full(n_angles, 2.0 * np.pi / n_angles)
        meta = {"angles": th, "on_sphere": True}
        return nodes, w, meta
    x, wx = roots_legendre(n_theta)  # cos(theta) nodes on [-1, 1]
    ph = 2.0 * np.pi * np.arange(n_phi) / n_phi
    ct = np.repeat(x, n_phi)
    st = np.sqrt(1.0 - ct * ct)
    phr = np.tile(ph, n_theta)
    nodes = np.stack([st * np.cos(phr), st * np.sin(phr), ct], axis=1)
    w = np.repeat(wx, n_phi) * (2.0 * np.pi / n_phi)
    meta = {"n_theta": n_theta, "n_phi": n_phi, "cos_theta": x, "on_sphere": True}
    return nodes, w, meta


def sphere_measure(d: int, n_angles: int = 64, n_theta: int = 24, n_phi: int = 48) -> VelocityMeasure:
    """Surface measure on S^{d-1}: uniform angles (d=2) or a Gauss-Legendre
    by uniform product grid (d=3) exact for spherical harmonics of degree
    up to min(2 n_theta - 1, n_phi - 1)."""
    nodes, w, meta = _sphere_nodes(d, n_angles, n_theta, n_phi)
    return VelocityMeasure("sphere", d, -1.0, nodes, w, meta)


def kappa_ball_measure(
    d: int,
    kappa: float,
    n_radial: int = 16,
    n_angles: int = 64,
    n_theta: int = 16,
    n_phi: int = 32,
) -> VelocityMeasure:
    """The weight (1-|v|^2)^kappa / Gamma(1+kappa) on the unit ball of R^d.

    Radial quadrature is Gauss-Jacobi in u = s^2 (exact for polynomial
    integrands of moderate degree); kappa = -1 degenerates to half the
    sphere measure.
    """
    if not (-1.0 <= kappa <= 0.0):
        raise ValueError("kappa must lie in [-1, 0]")
    if kappa == -1.0:
        nodes, w, meta = _sphere_nodes(d, n_angles, n_theta, n_phi)
        return VelocityMeasure("kappa_ball", d, -1.0, nodes, 0.5 * w, meta)
    # int_ball F w_kappa dv = int_0^1 (1-s^2)^kappa/Gamma(1+k) s^{d-1}
    #                         int_{S^{d-1}} F(s omega) dsigma(omega) ds
    # u = s^2:  (1/2) u^{d/2-1} (1-u)^kappa du, Gauss-Jacobi(alpha=kappa, beta=d/2-1)
    xj, wj = roots_jacobi(n_radial, kappa, d / 2.0 - 1.0)
    u = (xj + 1.0) / 2.0
    # roots_jacobi weights are for (1-x)^a (1+x)^b on [-1,1]; mapping to [0,1]
    # contributes 2^{-kappa-d/2}, the u = s^2 substitution another 1/2
    wrad = wj * 0.5 ** (kappa + d / 2.0) * 0.5 / math.gamma(1.0 + kappa)
    s = np.sqrt(u)
    snodes, sw, meta = _sphere_nodes(d, n_angles, n_theta, n_phi)
    nodes = (s[:, None, None] * snodes[None, :, :]).reshape(-1, d)
    w = (wrad[:, None] * sw[None, :]).reshape(-1)
    meta = dict(meta)
    meta.update({"on_sphere": False, "radii": s, "radial_weights": wrad, "n_sphere": len(sw)})
    return VelocityMeasure("kappa_ball", d, float(kappa), nodes, w, meta)


# ---------------------------------------------------------------------------
# real spherical harmonics on S^2 (orthonormal)


def _real_sph_harm(ell: int, m: int, theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    # scipy's sph_harm_y(l, m, polar, azimuth) is the complex orthonormal Y_l^m
    if m == 0:
        return np.real(sph_harm_y(ell, 0, theta, phi))
    y = sph_harm_y(ell, abs(m), theta, phi)
    if m > 0:
        return np.sqrt(2.0) * (-1.0) ** m * np.real(y)
    return np.sqrt(2.0) * (-1.0) ** m * np.imag(y)


def _sph_harm_table(ell_max: int, vecs: np.ndarray) -> np.ndarray:
    """Real spherical harmonics up to degree ell_max at unit vectors (..., 3).

    Returns an array (..., n_coeff) with coefficients ordered (l, m) for
    l = 0..ell_max, m = -l..l.
    """
    v = np.asarray(vecs, dtype=float)
    theta = np.arccos(np.clip(v[..., 2], -1.0, 1.0))
    phi = np.arctan2(v[..., 1], v[..., 0])
    cols = []
    for ell in range(ell_max + 1):
        for m in range(-ell, ell + 1):
            cols.append(_real_sph_harm(ell, m, theta, phi))
    return np.stack(cols, axis=-1)


def _sh_degree_slices(ell_max: int):
    out, start = [], 0
    for ell in range(ell_max + 1):
        out.append(slice(start, start + 2 * ell + 1))
        start += 2 * ell + 1
    return out


# ---------------------------------------------------------------------------
# phase-space data


@dataclass
class PhaseSpaceData:
    """Initial data f(x, v): frequency samples on explicit lattice indices.

    freq[m, n] = f_hat(xi_m, v_n) where xi_m is the m-th entry of xi_idx
    (flat indices into the natural-order spatial lattice) and v_n the n-th
    measure node.
    """

    grid: GridSpec
    measure: VelocityMeasure
    xi_idx: np.ndarray  # (M,) flat spatial lattice indices
    freq: np.ndarray  # (M, N) complex

    def __post_init__(self):
        if self.freq.shape != (len(self.xi_idx), len(self.measure.weights)):
            raise ValueError("frequency sample shape mismatch")
        if self.measure.d != self.grid.d:
            raise ValueError("measure dimension does not match the grid")

    # -- constructors
    @classmethod
    def from_physical(cls, grid: GridSpec, measure: VelocityMeasure, samples: np.ndarray):
        """samples: complex array (n_x,)*d + (N,) of f(x_j, v_n)."""
        if samples.shape != (grid.n_x,) * grid.d + (len(measure.weights),):
            raise ValueError("physical sample shape mismatch")
        freq = spatial_forward(grid, samples.astype(complex))
        M = grid.n_x**grid.d
        return cls(grid, measure, np.arange(M), freq.reshape(M, -1))

    @classmethod
    def from_frequency_fn(cls, grid: GridSpec, measure: VelocityMeasure, fn, support_radii=(0.0, np.inf)):
        """Build from f_hat(xi_vectors, nodes); keeps only |xi| in support_radii."""
        R = grid.xi_radius().ravel()
        keep = (R >= support_radii[0]) & (R <= support_radii[1]) & (R > 0)
        idx = np.nonzero(keep)[0]
        xiv = cls._xi_vectors_static(grid, idx)
        freq = np.asarray(fn(xiv, measure.nodes), dtype=complex)
        return cls(grid, measure, idx, freq)

    @staticmethod
    def _xi_vectors_static(grid: GridSpec, idx: np.ndarray) -> np.ndarray:
        unraveled = np.unravel_index(idx, (grid.n_x,) * grid.d)
        ax = grid.xi_axis()
        return np.stack([ax[u] for u in unraveled], axis=1)

    # -- geometry
    def xi_vectors(self) -> np.ndarray:
        return self._xi_vectors_static(self.grid, self.xi_idx)

    def xi_radii(self) -> np.ndarray:
        v = self.xi_vectors()
        return np.sqrt(np.sum(v * v, axis=1))

    # -- norms
    def norm_sq(self) -> float:
        """||f||^2 in L^2(dx dmu) via the spatial Plancherel identity."""
        g = self.grid
        node = np.abs(self.freq) ** 2 @ self.measure.weights
        return float(np.sum(node)) * g.cell_volume_xi() / (2.0 * np.pi) ** g.d

    def norm(self) -> float:
        return math.sqrt(self.norm_sq())

    def physical_samples(self) -> np.ndarray:
        """Dense physical samples (n_x,)*d + (N,); intended for d = 2 grids."""
        g = self.grid
        dense = np.zeros((g.n_x**g.d, len(self.measure.weights)), dtype=complex)
        dense[self.xi_idx] = self.freq
        return spatial_inverse(g, dense.reshape((g.n_x,) * g.d + (-1,)))

    def scaled_data(self, j: int) -> "PhaseSpaceData":
        """Realise f_j with f_j_hat(xi, v) = f_hat(2^j xi, v).

        The natural lattice for f_j is this grid's frequency lattice divided
        by 2^j, i.e. grid.scaled(-j); the stored samples are reused verbatim
        since f_j_hat(2^{-j} xi_m) = f_hat(xi_m).
        """
        return PhaseSpaceData(self.grid.scaled(-j), self.measure, self.xi_idx, self.freq)


# ---------------------------------------------------------------------------
# the averaging operator in frequency


def _cell_mean_inv_sqrt(R: np.ndarray, tau_j: float, dtau: float) -> np.ndarray:
    """Cell average over [tau_j - dtau/2, tau_j + dtau/2] of (1-(t/R)^2)^{-1/2},
    clipped to the cone; equals R*(asin(hi/R) - asin(lo/R))/dtau."""
    lo = np.maximum(-R, tau_j - dtau / 2.0)
    hi = np.minimum(R, tau_j + dtau / 2.0)
    out = np.zeros_like(R)
    ok = hi > lo
    out[ok] = (np.arcsin(np.clip(hi[ok] / R[ok], -1, 1)) - np.arcsin(np.clip(lo[ok] / R[ok], -1, 1))) * R[ok] / dtau
    return out


def _slice_prefactor_d2(R: np.ndarray, tau_j: float, dtau: float) -> np.ndarray:
    """(1 - tau^2/R^2)^{-1/2} with near-cone cells replaced by their exact
    cell average (see module docstring)."""
    out = np.zeros_like(R)
    inside = np.abs(tau_j) < R
    with np.errstate(divide="ignore", invalid="ignore"):
        out[inside] = (1.0 - (tau_j / R[inside]) ** 2) ** (-0.5)
    band = (np.abs(R - abs(tau_j)) <= _CONE_BAND_CELLS * dtau) & (R > 2 * dtau)
    if np.any(band):
        out[band] = _cell_mean_inv_sqrt(R[band], tau_j, dtau)
    return out


def _fourier_modes_d2(data: PhaseSpaceData):
    th = data.measure.meta["angles"]
    n = len(th)
    if not np.allclose(th, 2.0 * np.pi * np.arange(n) / n):
        raise ValueError("d=2 sphere path requires uniform angular nodes")
    c = np.fft.fft(data.freq, axis=1) / n  # coefficients of sum_m c_m e^{i m theta}
    ms = np.fft.fftfreq(n, d=1.0 / n).astype(int)
    return c, ms


def _rho_sphere_d2(data: PhaseSpaceData, taus: np.ndarray, dtau: float) -> np.ndarray:
    """rho_hat on (selected xi) x taus for the d=2 sphere measure."""
    xiv = data.xi_vectors()
    R = np.sqrt(np.sum(xiv * xiv, axis=1))
    phi0 = np.arctan2(xiv[:, 1], xiv[:, 0])
    c, ms = _fourier_modes_d2(data)
    # fold +-m together: slice sum = 2 * sum_{m>=0}' B_m T_m(lambda)
    mmax = int(np.max(np.abs(ms)))
    B = np.zeros((mmax + 1, len(R)), dtype=complex)
    for col, m in enumerate(ms):
        B[abs(m)] += c[:, col] * np.exp(1j * m * phi0)
    out = np.zeros((len(R), len(taus)), dtype=complex)
    pos = R > 0
    for j, t in enumerate(taus):
        sel = pos & (np.abs(t) <= R)
        if not np.any(sel):
            continue
        lam = -t / R[sel]
        A = np.arccos(np.clip(lam, -1.0, 1.0))
        cosmA = np.cos(np.outer(np.arange(mmax + 1), A))
        slice_sum = 2.0 * np.einsum("ms,ms->s", B[:, sel], cosmA)
        pref = _slice_prefactor_d2(R[sel], float(t), dtau)
        out[sel, j] = (2.0 * np.pi / R[sel]) * pref * slice_sum
    return out


def _sh_analysis_d3(data: PhaseSpaceData, ell_max: int):
    meas = data.measure
    Y = meas.meta.get("_sh_table")
    if Y is None or Y.shape[1] != (ell_max + 1) ** 2:
        Y = _sph_harm_table(ell_max, meas.nodes)
        meas.meta["_sh_table"] = Y
    coeffs = (data.freq * meas.weights[None, :]) @ Y  # (M, n_coeff)
    return coeffs


def _rho_sphere_d3(data: PhaseSpaceData, taus: np.ndarray, dtau: float, ell_max: int = 16) -> np.ndarray:
    """rho_hat for the d=3 sphere via the zonal reduction of the slice circle.

    The circle average of a degree-l harmonic about the axis xi' at height
    lambda is p_{3,l}(lambda) Y(xi'), so the 64-point circle quadrature is
    evaluated in closed form; the explicit quadrature is kept as a test
    oracle in slice_circle_quadrature.
    """
    xiv = data.xi_vectors()
    R = np.sqrt(np.sum(xiv * xiv, axis=1))
    coeffs = _sh_analysis_d3(data, ell_max)
    Yxi = _sph_harm_table(ell_max, xiv / np.maximum(R, 1e-300)[:, None])
    slices = _sh_degree_slices(ell_max)
    A = np.stack(
        [np.einsum("mc,mc->m", coeffs[:, sl], Yxi[:, sl]) for sl in slices], axis=0
    )  # (L+1, M)
    out = np.zeros((len(R), len(taus)), dtype=complex)
    pos = R > 0
    for j, t in enumerate(taus):
        sel = pos & (np.abs(t) <= R)
        if not np.any(sel):
            continue
        lam = -t / R[sel]
        P = np.stack([legendre(3, ell, lam) for ell in range(ell_max + 1)], axis=0)
        series = np.einsum("lm,lm->m", A[:, sel], P)
        out[sel, j] = (2.0 * np.pi * sphere_area(1) / R[sel]) * series
    return out


def _rho_ball_slab(data: PhaseSpaceData, taus: np.ndarray, dtau: float, eps_cells: float = 1.0) -> np.ndarray:
    """Slab realisation of the delta for ball measures: average of the node
    sum over |v.xi + tau| <= eps with eps = eps_cells * dtau."""
    eps = eps_cells * dtau
    xiv = data.xi_vectors()
    nodes = data.measure.nodes
    w = data.measure.weights
    out = np.zeros((len(data.xi_idx), len(taus)), dtype=complex)
    taus = np.asarray(taus, dtype=float)
    for m in range(len(data.xi_idx)):
        dots = nodes @ xiv[m]
        # node n contributes to taus in [-dots-eps, -dots+eps]
        centers = -dots
        sel = np.abs(taus[None, :] - centers[:, None]) <= eps
        contrib = (w * data.freq[m]).astype(complex)
        out[m] = contrib @ sel / (2.0 * eps)
    return 2.0 * np.pi * out


def rho_hat_on(data: PhaseSpaceData, taus: np.ndarray, eps_cells: float = 1.0) -> np.ndarray:
    """Frequency samples of rho f on (data's xi support) x (given taus)."""
    dtau = data.grid.dtau
    if data.measure.on_sphere:
        if data.grid.d == 2:
            base = _rho_sphere_d2(data, taus, dtau)
        else:
            base = _rho_sphere_d3(data, taus, dtau)
        # kappa = -1 ball is half the sphere measure: weights already halved,
        # but the slice path integrates against full sigma; rescale.
        if data.measure.kind == "kappa_ball":
            base = 0.5 * base
        return base
    return _rho_ball_slab(data, taus, dtau, eps_cells)


def average_rho(data: PhaseSpaceData, eps_cells: float = 1.0) -> SpaceTimeField:
    """rho f as a frequency-domain space-time field on the full lattice.

    The output support lies inside the cone |tau| <= |xi| exactly (sphere
    paths) and inside the slab-widened cone for ball measures.
    """
    g = data.grid
    taus = g.tau_axis()
    vals = rho_hat_on(data, taus, eps_cells)
    cube = np.zeros((g.n_x**g.d, g.n_t), dtype=complex)
    cube[data.xi_idx] = vals
    return SpaceTimeField(g, cube.reshape(g.shape), "frequency")


def average_rho_direct(data: PhaseSpaceData, x: np.ndarray, t: float) -> complex:
    """Physical-space oracle: sum_n w_n f(x - t v_n, v_n) by trigonometric
    synthesis from the frequency samples (exact for band-limited data)."""
    g = data.grid
    xiv = data.xi_vectors()
    x = np.asarray(x, dtype=float)
    pts = x[None, :] - t * data.measure.nodes  # (N, d)
    phases = np.exp(1j * (xiv @ pts.T))  # (M, N)
    vals = np.sum(data.freq * phases, axis=0) * g.cell_volume_xi() / (2.0 * np.pi) ** g.d
    return complex(np.sum(data.measure.weights * vals))


def dual_rho_star(gfield: SpaceTimeField, measure: VelocityMeasure, chunk: int = 64):
    """rho* g as phase-space data: values g_hat(xi, -xi.v) on the support of g.

    Time frequencies outside the resolvable band are flagged (count stored in
    the returned object's ``clipped`` attribute) and set to zero.
    """
    g = gfield.grid
    if measure.d != g.d:
        raise ValueError("measure dimension mismatch")
    # spatial transform only; keep time samples for exact trig evaluation
    if gfield.domain == "physical":
        gt = spatial_forward(g, gfield.samples)
    else:
        # frequency cube -> undo the time transform
        axes_t = g.d
        gt = np.fft.fftshift(
            np.fft.ifft(np.fft.ifftshift(gfield.samples, axes=axes_t), axis=axes_t),
            axes=axes_t,
        ) / g.dt
    M = g.n_x**g.d
    gt = gt.reshape(M, g.n_t)
    support = np.nonzero(np.max(np.abs(gt), axis=1) > 0)[0]
    xiv = PhaseSpaceData._xi_vectors_static(g, support)
    tgrid = g.t_axis()
    nodes = measure.nodes
    taumax = g.tau_max
    out = np.empty((len(support), len(nodes)), dtype=complex)
    clipped = 0
    for a in range(0, len(support), chunk):
        b = min(a + chunk, len(support))
        taustar = -(xiv[a:b] @ nodes.T)  # (c, N)
        # g_hat(xi, tau*) = dt * sum_t g~(xi,t) e^{-i t tau*}
        E = np.exp(-1j * tgrid[None, :, None] * taustar[:, None, :])
        out[a:b] = np.einsum("ct,ctn->cn", gt[support[a:b]], E) * g.dt
        bad = np.abs(taustar) > taumax
        if np.any(bad):
            out[a:b][bad] = 0.0
            clipped += int(np.sum(bad))
    res = PhaseSpaceData(g, measure, support, out)
    res.clipped = clipped
    return res


# ---------------------------------------------------------------------------
# Funk-Hecke series path


def funk_hecke_coefficient(d: int, k: int, F) -> float:
    """zeta_k = |S^{d-2}| int_-1^1 F(s) p_{d,k}(s) (1-s^2)^{(d-3)/2} ds.

    For d = 2 the weight is absorbed by s = cos(u), giving
    int_0^pi F(cos u) cos(k u) du.
    """
    from scipy import integrate

    if d == 2:
        val, _ = integrate.quad(
            lambda u: F(math.cos(u)) * math.cos(k * u), 0.0, math.pi, epsabs=0.0, epsrel=1e-12, limit=200
        )
        return sphere_area(0) * val
    val, _ = integrate.quad(
        lambda s: F(s) * legendre(d, k, s) * (1.0 - s * s) ** ((d - 3) / 2.0),
        -1.0,
        1.0,
        epsabs=0.0,
        epsrel=1e-12,
        limit=200,
    )
    return sphere_area(d - 2) * val


@dataclass
class RadialModeData:
    """One spherical-harmonic mode of data radial in the spatial variable.

    For d = 2 the degree-k component is a(r) e^{i k theta} + b(r) e^{-i k theta}
    and coeffs has shape (2, n_r) (one row used when k = 0); for d = 3 it is
    sum_m c_m(r) Y_{k,m} over the 2k+1 real harmonics, coeffs (2k+1, n_r).
    Profiles are sampled on a geometric r-grid and evaluated by cubic
    interpolation in log r.
    """

    d: int
    k: int
    r_grid: np.ndarray
    coeffs: np.ndarray

    def __post_init__(self):
        n_comp = 1 if (self.d == 2 and self.k == 0) else (2 if self.d == 2 else 2 * self.k + 1)
        if self.coeffs.shape != (n_comp, len(self.r_grid)):
            raise ValueError(f"expected coeffs shape ({n_comp}, {len(self.r_grid)})")
        if not np.all(np.isfinite(self.coeffs)):
            raise ValueError("profiles must be square integrable (finite samples)")
        self._splines = [
            CubicSpline(np.log(self.r_grid), self.coeffs[i], extrapolate=False)
            for i in range(self.coeffs.shape[0])
        ]

    @classmethod
    def geometric_grid(cls, n: int = 128, lo: float = 0.5, hi: float = 2.0) -> np.ndarray:
        return np.geomspace(lo, hi, n)

    def coeffs_at(self, r: np.ndarray) -> np.ndarray:
        """(n_comp, len(r)) profile values; zero outside the radial window."""
        r = np.asarray(r, dtype=float)
        out = np.zeros((self.coeffs.shape[0], len(r)), dtype=complex)
        ok = (r >= self.r_grid[0]) & (r <= self.r_grid[-1])
        if np.any(ok):
            lr = np.log(r[ok])
            for i, sp in enumerate(self._splines):
                out[i, ok] = sp(lr)
        return out

    def sphere_l2_sq_at(self, r: np.ndarray) -> np.ndarray:
        """||Y_k^r||^2_{L^2(S^{d-1})} at the given radii."""
        c = self.coeffs_at(r)
        if self.d == 2:
            return 2.0 * np.pi * np.sum(np.abs(c) ** 2, axis=0)
        return np.sum(np.abs(c) ** 2, axis=0)

    def eval_harmonic(self, unit_vecs: np.ndarray, r: np.ndarray) -> np.ndarray:
        """Y_k^r evaluated at directions unit_vecs with radius-dependent coeffs."""
        c = self.coeffs_at(r)
        if self.d == 2:
            th = np.arctan2(unit_vecs[:, 1], unit_vecs[:, 0])
            if self.k == 0:
                return c[0]
            return c[0] * np.exp(1j * self.k * th) + c[1] * np.exp(-1j * self.k * th)
        Y = _sph_harm_table(self.k, unit_vecs)[:, -(2 * self.k + 1):]
        return np.einsum("cm,mc->m", c, Y)


def funk_hecke_average(modes: list[RadialModeData], grid: GridSpec, taus=None) -> SpaceTimeField:
    """Assemble rho_hat f from spherical-harmonic modes of spatially radial data:

        rho_hat(xi,tau) = (2 pi |S^{d-2}| / |xi|) (1 - tau^2/|xi|^2)_+^{(d-3)/2}
                          * sum_k p_{d,k}(-tau/|xi|) Y_k^{|xi|}(xi').

    The d = 2 prefactor uses the same near-cone cell averaging as the slice
    path so the two routes agree on the lattice.
    """
    if not modes:
        return SpaceTimeField(grid, np.zeros(grid.shape, dtype=complex), "frequency")
    d = grid.d
    if any(m.d != d for m in modes):
        raise ValueError("mode dimension mismatch")
    full_taus = grid.tau_axis() if taus is None else np.asarray(taus, dtype=float)
    R = grid.xi_radius().ravel()
    pos = np.nonzero((R >= modes[0].r_grid[0]) & (R <= modes[0].r_grid[-1]))[0]
    xiv = PhaseSpaceData._xi_vectors_static(grid, pos)
    Rp = R[pos]
    units = xiv / Rp[:, None]
    harm = {m.k: m.eval_harmonic(units, Rp) for m in modes}
    out = np.zeros((grid.n_x**d, len(full_taus)), dtype=complex)
    area = sphere_area(d - 2)
    for j, t in enumerate(full_taus):
        sel = np.abs(t) <= Rp
        if not np.any(sel):
            continue
        lam = -t / Rp[sel]
        series = np.zeros(int(np.sum(sel)), dtype=complex)
        for m in modes:
            series += legendre(d, m.k, lam) * harm[m.k][sel]
        if d == 2:
            pref = _slice_prefactor_d2(Rp, float(t), grid.dtau)[sel]
        else:
            pref = np.ones(int(np.sum(sel)))
        out[pos[sel], j] = (2.0 * np.pi * area / Rp[sel]) * pref * series
    if taus is None:
        return SpaceTimeField(grid, out.reshape(grid.shape), "frequency")
    return out  # (lattice, taus) block for scan use


def phase_space_from_modes(
    modes: list[RadialModeData], grid: GridSpec, measure: VelocityMeasure
) -> PhaseSpaceData:
    """Sample the modal data f_hat(xi, v) = sum_k Y_k^{|xi|}(v) at the measure nodes."""
    d = grid.d
    R = grid.xi_radius().ravel()
    keep = np.nonzero((R >= modes[0].r_grid[0]) & (R <= modes[0].r_grid[-1]))[0]
    Rk = R[keep]
    vals = np.zeros((len(keep), len(measure.nodes)), dtype=complex)
    for m in modes:
        c = m.coeffs_at(Rk)  # (n_comp, M)
        if d == 2:
            th = np.arctan2(measure.nodes[:, 1], measure.nodes[:, 0])
            if m.k == 0:
                vals += c[0][:, None] * np.ones_like(th)[None, :]
            else:
                vals += c[0][:, None] * np.exp(1j * m.k * th)[None, :]
                vals += c[1][:, None] * np.exp(-1j * m.k * th)[None, :]
        else:
            Y = _sph_harm_table(m.k, measure.nodes)[:, -(2 * m.k + 1):]  # (N, 2k+1)
            vals += c.T @ Y.T
    return PhaseSpaceData(grid, measure, keep, vals)


def slice_circle_quadrature(data: PhaseSpaceData, xi_vec: np.ndarray, tau: float, n_quad: int = 64, ell_max: int = 16) -> complex:
    """Explicit d=3 slice evaluation (test oracle for the zonal fast path).

    Synthesises f_hat(xi, .) from its degree <= ell_max harmonics at
    Gauss-Legendre points of the slice circle and multiplies by the slice
    prefactor 2 pi / sqrt(|xi|^2 - tau^2) and circumference element.
    """
    xi_vec = np.asarray(xi_vec, dtype=float)
    R = float(np.linalg.norm(xi_vec))
    if abs(tau) >= R:
        return 0.0 + 0.0j
    m = np.nonzero(np.all(np.isclose(data.xi_vectors(), xi_vec[None, :]), axis=1))[0]
    if len(m) != 1:
        raise ValueError("xi_vec is not a support lattice point")
    coeffs = _sh_analysis_d3(data, ell_max)[m[0]]
    axis = xi_vec / R
    h = -tau / R
    rad = math.sqrt(1.0 - h * h)
    # orthonormal frame about the axis
    a = np.array([1.0, 0.0, 0.0]) if abs(axis[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = np.cross(axis, a)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(axis, e1)
    x, w = roots_legendre(n_quad)
    psi = np.pi * (x + 1.0)
    wq = np.pi * w
    pts = h * axis[None, :] + rad * (np.cos(psi)[:, None] * e1 + np.sin(psi)[:, None] * e2)
    Y = _sph_harm_table(ell_max, pts)
    fvals = Y @ coeffs
    circ_integral = rad * float(np.sum(wq * fvals.real)) + 1j * rad * float(np.sum(wq * fvals.imag))
    return 2.0 * np.pi / math.sqrt(R * R - tau * tau) * circ_integral
