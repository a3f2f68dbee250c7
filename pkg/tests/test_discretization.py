import math

import numpy as np
import pytest

from bsrd.discretization import (
    Grid,
    SimulationState,
    bulk_quadrature_weights,
    bulk_rhs,
    reaction,
    robin_flux,
    surface_advection,
    surface_laplacian,
    surface_rhs,
)
from bsrd.errors import ValidationError
from bsrd.geometry import MotionPreset, grid_geometry
from bsrd.params import SystemParameters

STATIONARY = MotionPreset("stationary")
UNIT = SystemParameters(1.0, 1.0, 1.0, 1.0, 1.0)


def make_state(grid, u, w, z, t=0.0):
    return SimulationState(t, np.asarray(u, float), np.asarray(w, float),
                           np.asarray(z, float))


def constant_state(grid, cu, cw, cz, t=0.0):
    return SimulationState(
        t,
        np.full((grid.Nx, grid.Ny + 1), float(cu)),
        np.full(grid.Nx, float(cw)),
        np.full(grid.Nx, float(cz)),
    )


# ---------------------------------------------------------------------------
# grid and state validation

def test_grid_requires_at_least_four_cells():
    with pytest.raises(ValidationError):
        Grid(2, 8, 1.0)
    with pytest.raises(ValidationError):
        Grid(8, 3, 1.0)


def test_grid_spacings():
    g = Grid(10, 5, 2.0)
    assert g.dx == pytest.approx(0.2)
    assert g.dy == pytest.approx(0.2)
    assert g.x[0] == 0.0 and g.y[-1] == pytest.approx(1.0)


def test_state_shape_check():
    g = Grid(8, 8, 1.0)
    bad = SimulationState(0.0, np.zeros((8, 8)), np.zeros(8), np.zeros(8))
    with pytest.raises(ValidationError, match="shape"):
        bad.check(g)


def test_state_rejects_non_finite_entries():
    g = Grid(8, 8, 1.0)
    u = np.zeros((8, 9))
    u[3, 4] = np.inf
    with pytest.raises(ValidationError, match="non-finite"):
        SimulationState(0.0, u, np.zeros(8), np.zeros(8)).check(g)


# ---------------------------------------------------------------------------
# pointwise reaction and Robin flux

def test_reaction_vanishes_on_zero_state():
    assert reaction(0.0, 0.0, 0.0, UNIT) == 0.0


def test_reaction_balances_at_unit_state():
    assert reaction(1.0, 1.0, 1.0, UNIT) == 0.0


def test_reaction_hand_value():
    params = SystemParameters(1, 1, 1, 2.0, 4.0)
    assert reaction(2.0, 3.0, 1.0, params) == pytest.approx(1 / 4 - 6 / 2)


def test_robin_flux_zero_cases():
    assert robin_flux(0.0, 0.0, 0.0, 0.0, UNIT) == 0.0
    assert robin_flux(1.0, 1.0, 1.0, 0.0, UNIT) == 0.0


def test_robin_flux_with_jump():
    assert robin_flux(2.0, 1.0, 0.0, 0.5, UNIT) == pytest.approx(-1.0)


# ---------------------------------------------------------------------------
# surface operators

def test_surface_laplacian_annihilates_constants():
    g = Grid(32, 4, 2 * math.pi)
    out = surface_laplacian(np.full(g.Nx, 3.7), g)
    assert np.max(np.abs(out)) < 1e-13


def test_surface_laplacian_eigenfunction_and_order():
    errs = []
    for n in (32, 64):
        g = Grid(n, 4, 2 * math.pi)
        f = np.cos(g.x)
        errs.append(np.max(np.abs(surface_laplacian(f, g) + np.cos(g.x))))
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.05)


def test_surface_laplacian_with_uniform_metric():
    # line element 2 scales the operator by 1/4
    g = Grid(128, 4, 2 * math.pi)
    f = np.cos(g.x)
    out = surface_laplacian(f, g, geom_row=2.0)
    assert np.max(np.abs(out + np.cos(g.x) / 4)) < 2e-4


def test_surface_laplacian_size_mismatch():
    g = Grid(8, 4, 1.0)
    with pytest.raises(ValidationError):
        surface_laplacian(np.zeros(9), g)


def test_surface_advection_is_conservative():
    g = Grid(32, 4, 2 * math.pi)
    rng = np.random.default_rng(3)
    f = rng.random(g.Nx)
    out = surface_advection(f, g, speed=0.8)
    assert abs(np.sum(out)) < 1e-13


def test_surface_advection_translates_a_wave():
    """One full period of pure advection returns the profile up to O(dx^2)
    dispersion."""
    g = Grid(64, 4, 2 * math.pi)
    f0 = np.cos(g.x)
    f = f0.copy()
    dt = 2e-3
    steps = int(round(2 * math.pi / dt))
    for _ in range(steps):  # RK4 on df/dt = -(d/dx)(f)
        k1 = surface_advection(f, g, 1.0)
        k2 = surface_advection(f + 0.5 * dt * k1, g, 1.0)
        k3 = surface_advection(f + 0.5 * dt * k2, g, 1.0)
        k4 = surface_advection(f + dt * k3, g, 1.0)
        f = f + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    assert np.max(np.abs(f - f0)) < 0.05


# ---------------------------------------------------------------------------
# coupled right sides

def test_constant_equilibrium_is_steady():
    g = Grid(16, 16, 2 * math.pi)
    # u*w/delta_k = z/delta_kp with these values
    params = SystemParameters(1.0, 0.5, 0.2, 2.0, 1.0)
    st = constant_state(g, 2.0, 1.0, 1.0)
    assert np.max(np.abs(bulk_rhs(st, g, STATIONARY, params))) < 1e-13
    dw, dz = surface_rhs(st, g, STATIONARY, params)
    assert np.max(np.abs(dw)) < 1e-13 and np.max(np.abs(dz)) < 1e-13


def test_bulk_interior_reduces_to_five_point_laplacian():
    g = Grid(16, 16, 2 * math.pi)
    rng = np.random.default_rng(7)
    u = rng.random((g.Nx, g.Ny + 1))
    st = make_state(g, u, np.zeros(g.Nx), np.zeros(g.Nx))
    params = SystemParameters(0.7, 1, 1, 1, 1)
    rhs = bulk_rhs(st, g, STATIONARY, params)
    lap = (
        (np.roll(u, -1, 0) - 2 * u + np.roll(u, 1, 0)) / g.dx**2
        + (np.roll(u, -1, 1) - 2 * u + np.roll(u, 1, 1)) / g.dy**2
    )
    np.testing.assert_allclose(rhs[:, 1:-1], 0.7 * lap[:, 1:-1], atol=1e-11)


def test_bulk_harmonic_residual_second_order():
    errs = []
    for n in (16, 32):
        g = Grid(n, n, 2 * math.pi)
        xb, yb = np.meshgrid(g.x, g.y, indexing="ij")
        st = make_state(g, np.cos(xb) * np.cosh(yb), np.zeros(n), np.zeros(n))
        rhs = bulk_rhs(st, g, STATIONARY, UNIT)
        errs.append(np.max(np.abs(rhs[:, 1:-1])))
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.15)


def test_reaction_cancels_in_receptor_complex_sum():
    """With equal surface diffusivities and u = 0 the sum w + z obeys the
    plain surface heat equation pointwise."""
    g = Grid(32, 8, 2 * math.pi)
    params = SystemParameters(1.0, 0.5, 0.5, 1.0, 1.0)
    w = 1.0 + 0.3 * np.cos(g.x)
    z = 0.5 + 0.2 * np.sin(2 * g.x)
    st = make_state(g, np.zeros((g.Nx, g.Ny + 1)), w, z)
    dw, dz = surface_rhs(st, g, STATIONARY, params)
    np.testing.assert_allclose(dw + dz, 0.5 * surface_laplacian(w + z, g),
                               atol=1e-12)


def test_cross_diffusion_structure_of_the_sum():
    """d(w+z)/dt = dgamp*Lap(w+z) + (dgam - dgamp)*Lap(w) exactly at the
    stencil level: the reaction cancels in the sum."""
    g = Grid(32, 8, 2 * math.pi)
    params = SystemParameters(1.0, 0.5, 0.2, 1.0, 1.0)
    rng = np.random.default_rng(11)
    st = make_state(g, rng.random((g.Nx, g.Ny + 1)),
                    rng.random(g.Nx), rng.random(g.Nx))
    dw, dz = surface_rhs(st, g, STATIONARY, params)
    v = st.w + st.z
    expected = 0.2 * surface_laplacian(v, g) \
        + (0.5 - 0.2) * surface_laplacian(st.w, g)
    np.testing.assert_allclose(dw + dz, expected, atol=1e-12)


def test_linearity_of_the_diffusive_parts():
    g = Grid(16, 4, 2 * math.pi)
    rng = np.random.default_rng(5)
    f1, f2 = rng.random(g.Nx), rng.random(g.Nx)
    lhs = surface_laplacian(2.0 * f1 + 3.0 * f2, g)
    rhs = 2.0 * surface_laplacian(f1, g) + 3.0 * surface_laplacian(f2, g)
    np.testing.assert_allclose(lhs, rhs, atol=1e-13)


@pytest.mark.parametrize("preset", [
    STATIONARY,
    MotionPreset("vertical_breathing", a=0.1, b=1.0),
    MotionPreset("combined", a=0.1, b=1.3, v_tau=0.4),
], ids=lambda p: p.kind)
def test_discrete_mass_balance(preset):
    """The J-weighted bulk sum of du/dt plus the surface sum of dz/dt
    vanishes (d/dt M1 = 0), and the w+z surface sum too (d/dt M2 = 0)."""
    g = Grid(24, 12, 2 * math.pi)
    rng = np.random.default_rng(13)
    st = SimulationState(0.3, 0.5 + rng.random((g.Nx, g.Ny + 1)),
                         0.5 + rng.random(g.Nx), 0.5 + rng.random(g.Nx))
    params = SystemParameters(0.8, 0.5, 0.2, 1.5, 0.7)
    geom = grid_geometry(preset, st.t, g)
    du = bulk_rhs(st, g, preset, params, geom=geom)
    dw, dz = surface_rhs(st, g, preset, params, geom=geom)
    wq = bulk_quadrature_weights(g)
    # d/dt of the J-weighted bulk integral: J*du + dJdt*u per node
    dm_bulk = float(np.sum(wq * (geom.J * du + geom.dJdt * st.u)))
    dm1 = dm_bulk + geom.msurf * g.dx * float(np.sum(dz))
    dm2 = geom.msurf * g.dx * float(np.sum(dw + dz))
    assert abs(dm1) < 1e-12
    assert abs(dm2) < 1e-12


def test_quadrature_weights_sum_to_reference_area():
    g = Grid(12, 7, 2 * math.pi)
    assert float(np.sum(bulk_quadrature_weights(g))) == pytest.approx(2 * math.pi)
