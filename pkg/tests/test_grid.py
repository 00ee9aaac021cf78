"""Grid, transform convention, norms and Littlewood-Paley pieces."""

import numpy as np
import pytest

from kinavg import grid as G
from kinavg.cutoffs import bump, partition_bump

RNG = np.random.default_rng(1234)


@pytest.fixture(scope="module")
def small_grid():
    return G.GridSpec(2, 32, 8 * np.pi, 32, 8 * np.pi)


@pytest.fixture(scope="module")
def random_field(small_grid):
    s = RNG.normal(size=small_grid.shape) + 1j * RNG.normal(size=small_grid.shape)
    return G.SpaceTimeField(small_grid, s, "physical")


def test_grid_validation():
    with pytest.raises(ValueError):
        G.GridSpec(4, 32, 1.0, 32, 1.0)
    with pytest.raises(ValueError):
        G.GridSpec(2, 24, 1.0, 32, 1.0)
    with pytest.raises(ValueError):
        G.GridSpec(2, 32, 1.0, 4, 1.0)


def test_roundtrip_identity(random_field):
    back = G.inverse_transform(G.forward_transform(random_field))
    err = np.max(np.abs(back.samples - random_field.samples)) / np.max(np.abs(random_field.samples))
    assert err < 1e-12


def test_transform_of_constant(small_grid):
    c = 2.5 - 1.0j
    f = G.SpaceTimeField(small_grid, np.full(small_grid.shape, c), "physical")
    fh = G.forward_transform(f)
    zero_idx = (small_grid.n_x // 2,) * small_grid.d + (small_grid.n_t // 2,)
    vol = small_grid.len_x**small_grid.d * small_grid.len_t
    assert fh.samples[zero_idx] == pytest.approx(c * vol, rel=1e-12)
    rest = fh.samples.copy()
    rest[zero_idx] = 0
    assert np.max(np.abs(rest)) < 1e-9 * abs(c * vol)


def test_gaussian_matches_analytic():
    # exp(-|z|^2/2) has transform (2 pi)^{n/2} exp(-|xi|^2/2); the lattice
    # needs |xi|_max ~ 8 to push Gaussian aliasing below the 1e-6 target
    g = G.GridSpec(2, 64, 8 * np.pi, 64, 8 * np.pi)
    x = g.x_axis()
    t = g.t_axis()
    X, Y, T = np.meshgrid(x, x, t, indexing="ij")
    f = G.SpaceTimeField(g, np.exp(-(X**2 + Y**2 + T**2) / 2).astype(complex), "physical")
    fh = G.forward_transform(f)
    xi = g.xi_axis()
    tau = g.tau_axis()
    XI, ETA, TAU = np.meshgrid(xi, xi, tau, indexing="ij")
    want = (2 * np.pi) ** 1.5 * np.exp(-(XI**2 + ETA**2 + TAU**2) / 2)
    assert np.max(np.abs(fh.samples - want)) < 1e-6 * np.max(want)


def test_plancherel(random_field):
    fh = G.forward_transform(random_field)
    n = random_field.grid.d + 1
    lhs = np.sum(np.abs(fh.samples) ** 2) * fh.grid.cell_volume_xi() * fh.grid.dtau
    rhs = (2 * np.pi) ** n * np.sum(np.abs(random_field.samples) ** 2) * fh.grid.cell_volume_x() * fh.grid.dt
    assert abs(lhs - rhs) / rhs < 1e-12
    assert G.l2_norm(fh) == pytest.approx(G.l2_norm(random_field), rel=1e-12)


class TestMixedNorm:
    def test_single_cell(self, small_grid):
        s = np.zeros(small_grid.shape, dtype=complex)
        s[3, 5, 7] = 1.0
        f = G.SpaceTimeField(small_grid, s, "physical")
        want = (small_grid.dt * small_grid.cell_volume_x()) ** 0.5
        assert G.mixed_norm(f, 2, 2) == pytest.approx(want, rel=1e-12)

    def test_equal_exponents_flat_sum(self, random_field):
        g = random_field.grid
        flat = (np.sum(np.abs(random_field.samples) ** 3) * g.cell_volume_x() * g.dt) ** (1 / 3)
        assert G.mixed_norm(random_field, 3, 3) == pytest.approx(flat, rel=1e-12)

    def test_homogeneity(self, random_field):
        doubled = G.SpaceTimeField(random_field.grid, 2 * random_field.samples, "physical")
        assert G.mixed_norm(doubled, 4, 2) == pytest.approx(2 * G.mixed_norm(random_field, 4, 2), rel=1e-12)

    def test_triangle_inequality(self, small_grid):
        for _ in range(5):
            a = RNG.normal(size=small_grid.shape) + 1j * RNG.normal(size=small_grid.shape)
            b = RNG.normal(size=small_grid.shape) + 1j * RNG.normal(size=small_grid.shape)
            fa = G.SpaceTimeField(small_grid, a, "physical")
            fb = G.SpaceTimeField(small_grid, b, "physical")
            fab = G.SpaceTimeField(small_grid, a + b, "physical")
            for q, r in ((2, 2), (4, 2), (2, 4), (6, 3)):
                assert G.mixed_norm(fab, q, r) <= G.mixed_norm(fa, q, r) + G.mixed_norm(fb, q, r) + 1e-12

    def test_rejects_frequency_domain(self, random_field):
        fh = G.forward_transform(random_field)
        with pytest.raises(ValueError):
            G.mixed_norm(fh, 2, 2)


def _band_limited_field(g, j_lo, j_hi, rng):
    """Random field with spatial frequency support in 2^{j_lo-1} <= |xi| <= 2^{j_hi+1}."""
    R = g.xi_radius()
    mask = (R >= 2.0 ** (j_lo - 1)) & (R <= 2.0 ** (j_hi + 1))
    cube = rng.normal(size=g.shape) + 1j * rng.normal(size=g.shape)
    cube *= mask[..., None]
    return G.SpaceTimeField(g, cube, "frequency")


class TestLittlewoodPaley:
    # P_j acts on the spatial frequency only, so a fine spatial lattice with
    # a short time axis keeps these cheap while giving several dyadic bands
    @pytest.fixture(scope="class")
    def lp_grid(self):
        return G.GridSpec(2, 256, 32 * np.pi, 8, 2 * np.pi)

    def test_partition_reconstruction(self, lp_grid):
        lo, hi = G.resolvable_lp_range(lp_grid)
        assert hi - lo >= 3
        f = _band_limited_field(lp_grid, lo + 1, hi - 1, RNG)
        total = np.zeros_like(f.samples)
        for j in range(lo, hi + 1):
            total += G.lp_project(f, j).samples
        err = np.max(np.abs(total - f.samples)) / np.max(np.abs(f.samples))
        assert err < 1e-10

    def test_support_containment(self, lp_grid):
        lo, hi = G.resolvable_lp_range(lp_grid)
        j = (lo + hi) // 2
        f = _band_limited_field(lp_grid, j, j, RNG)
        pj = G.lp_project(f, j)
        R = lp_grid.xi_radius()
        outside = (R < 2.0 ** (j - 1)) | (R > 2.0 ** (j + 1))
        assert np.max(np.abs(pj.samples[outside])) == 0.0

    def test_rejects_unresolvable(self, lp_grid):
        lo, hi = G.resolvable_lp_range(lp_grid)
        f = _band_limited_field(lp_grid, lo, hi, RNG)
        with pytest.raises(ValueError):
            G.lp_project(f, hi + 5)

    def test_square_function_comparable(self, lp_grid):
        lo, hi = G.resolvable_lp_range(lp_grid)
        f = _band_limited_field(lp_grid, lo + 1, hi - 1, RNG)
        phys = G.inverse_transform(f)
        sq = np.zeros(lp_grid.shape)
        for j in range(lo, hi + 1):
            pj = G.lp_project(phys, j)
            sq += np.abs(pj.samples) ** 2
        sfield = G.SpaceTimeField(lp_grid, np.sqrt(sq).astype(complex), "physical")
        for r in (2.0, 3.0):
            ratio = G.mixed_norm(sfield, r, r) / G.mixed_norm(phys, r, r)
            assert 0.1 <= ratio <= 10.0


class TestApplySymbol:
    def test_identity(self, random_field):
        out = G.apply_symbol(random_field, lambda R, tau: np.ones(np.broadcast(R, tau).shape))
        err = np.max(np.abs(out.samples - random_field.samples)) / np.max(np.abs(random_field.samples))
        assert err < 1e-12

    def test_indicator_idempotent(self, random_field):
        ind = lambda R, tau: (np.broadcast_to(R, np.broadcast(R, tau).shape) < 3.0).astype(float)
        once = G.apply_symbol(random_field, ind)
        twice = G.apply_symbol(once, ind)
        assert np.max(np.abs(twice.samples - once.samples)) < 1e-12 * np.max(np.abs(once.samples))

    def test_composition_is_product(self, random_field):
        m1 = lambda R, tau: np.exp(-np.broadcast_to(R, np.broadcast(R, tau).shape) ** 2)
        m2 = lambda R, tau: 1.0 / (1.0 + np.broadcast_to(tau, np.broadcast(R, tau).shape) ** 2)
        m12 = lambda R, tau: m1(R, tau) * m2(R, tau)
        seq = G.apply_symbol(G.apply_symbol(random_field, m1), m2)
        joint = G.apply_symbol(random_field, m12)
        assert np.max(np.abs(seq.samples - joint.samples)) < 1e-12 * np.max(np.abs(joint.samples))


def test_container_roundtrip(tmp_path, random_field):
    p = tmp_path / "field.kav"
    G.save_field(random_field, p)
    back = G.load_field(p)
    assert back.grid == random_field.grid
    assert back.domain == random_field.domain
    # stored as complex64; compare at single precision
    assert np.max(np.abs(back.samples - random_field.samples)) < 1e-5 * np.max(np.abs(random_field.samples))


def test_partition_bump_identity():
    s = np.geomspace(0.01, 100.0, 500)
    total = np.zeros_like(s)
    for j in range(-10, 11):
        total += partition_bump(s / 2.0**j)
    assert np.max(np.abs(total - 1)) < 1e-12


def test_bump_support():
    s = np.array([0.4, 0.5, 1.0, 2.0, 2.1])
    v = bump(s)
    assert v[0] == 0 and v[1] == 0 and v[3] == 0 and v[4] == 0 and v[2] > 0
