import math

import numpy as np
import pytest

from bsrd.errors import GeometryError, ValidationError
from bsrd.geometry import (
    NU0,
    MotionPreset,
    flow_map,
    geometry_sample,
    grid_geometry,
    velocity_sample,
)
from bsrd.discretization import Grid
from bsrd.params import SystemParameters

ALL_PRESETS = [
    MotionPreset("stationary"),
    MotionPreset("vertical_breathing", a=0.1, b=1.0),
    MotionPreset("tangential_flow", v_tau=0.5),
    MotionPreset("combined", a=0.1, b=1.0, v_tau=0.5),
]

PARAMS = SystemParameters(1.0, 1.0, 1.0, 1.0, 1.0)


# ---------------------------------------------------------------------------
# preset validation

def test_amplitude_must_stay_below_height():
    with pytest.raises(ValidationError, match="a must be < H"):
        MotionPreset("vertical_breathing", a=1.0, b=1.0, H=1.0)


def test_unknown_kind_rejected():
    with pytest.raises(ValidationError, match="kind"):
        MotionPreset("sideways")


def test_stationary_forbids_motion_fields():
    with pytest.raises(ValidationError):
        MotionPreset("stationary", a=0.1, b=1.0)
    with pytest.raises(ValidationError):
        MotionPreset("stationary", v_tau=0.5)


def test_single_motion_presets_are_exclusive():
    with pytest.raises(ValidationError):
        MotionPreset("vertical_breathing", a=0.1, b=1.0, v_tau=0.5)
    with pytest.raises(ValidationError):
        MotionPreset("tangential_flow", a=0.1, v_tau=0.5)


# ---------------------------------------------------------------------------
# flow map

@pytest.mark.parametrize("preset", ALL_PRESETS, ids=lambda p: p.kind)
def test_flow_map_is_identity_at_t0(preset):
    assert flow_map(preset, 0.0, (1.0, 0.3)) == pytest.approx((1.0, 0.3))


def test_stationary_flow_map_is_identity_at_all_times():
    preset = MotionPreset("stationary")
    for t in (0.0, 0.7, 3.0):
        assert flow_map(preset, t, (2.0, 0.5)) == pytest.approx((2.0, 0.5))


def test_breathing_surface_height():
    preset = MotionPreset("vertical_breathing", a=0.1, b=1.0)
    x, y = flow_map(preset, math.pi / 2, (1.5, 0.0))
    assert (x, y) == pytest.approx((1.5, 0.1))


def test_breathing_outer_boundary_is_fixed():
    preset = MotionPreset("vertical_breathing", a=0.1, b=1.0)
    assert flow_map(preset, 0.8, (2.0, 1.0))[1] == pytest.approx(1.0)


def test_flow_map_rejects_negative_time():
    with pytest.raises(GeometryError, match="time"):
        flow_map(MotionPreset("stationary"), -0.1, (1.0, 0.5))


def test_flow_map_rejects_points_outside_strip():
    with pytest.raises(GeometryError, match="outside the strip"):
        flow_map(MotionPreset("stationary"), 0.0, (1.0, 1.5))
    with pytest.raises(GeometryError, match="outside the strip"):
        flow_map(MotionPreset("stationary"), 0.0, (7.0, 0.5))


# ---------------------------------------------------------------------------
# geometry samples

@pytest.mark.parametrize("preset", ALL_PRESETS, ids=lambda p: p.kind)
def test_identity_package_at_t0(preset):
    gs = geometry_sample(preset, 0.0, (1.0, 0.5), PARAMS)
    assert gs.J == pytest.approx(1.0)
    np.testing.assert_allclose(gs.M, np.eye(2), atol=1e-15)
    np.testing.assert_allclose(gs.A, np.eye(2), atol=1e-15)
    assert gs.omega == pytest.approx(1.0)


def test_breathing_sample_at_height_0p1():
    # h(pi/2) = 0.1, so DPhi = diag(1, 0.9)
    preset = MotionPreset("vertical_breathing", a=0.1, b=1.0)
    gs = geometry_sample(preset, math.pi / 2, (1.0, 0.0), PARAMS)
    assert gs.J == pytest.approx(0.9)
    np.testing.assert_allclose(gs.M, np.diag([1.0, 1.0 / 0.9]), rtol=1e-14)
    assert gs.omega == pytest.approx(1.0 / 0.9)
    assert gs.surface_len == pytest.approx(1.0)


def test_breathing_jacobian_rate():
    preset = MotionPreset("vertical_breathing", a=0.1, b=2.0)
    for t in (0.0, 0.4, 1.1):
        gs = geometry_sample(preset, t, (0.5, 0.5), PARAMS)
        assert gs.dJdt == pytest.approx(-0.1 * 2.0 * math.cos(2.0 * t))


@pytest.mark.parametrize("preset", ALL_PRESETS, ids=lambda p: p.kind)
def test_diffusion_tensor_reconstruction(preset):
    params = SystemParameters(0.7, 1, 1, 1, 1)
    for t in (0.0, 0.9):
        gs = geometry_sample(preset, t, (1.0, 0.25), params)
        rebuilt = params.delta_omega * gs.J * (gs.M @ gs.M.T)
        np.testing.assert_allclose(gs.A, rebuilt, atol=1e-14)
        np.testing.assert_allclose(gs.B, gs.A / gs.J, atol=1e-14)
        # symmetric positive definite
        assert np.all(np.linalg.eigvalsh(gs.A) > 0)


# ---------------------------------------------------------------------------
# velocities and jumps

def test_stationary_velocities_vanish():
    vs = velocity_sample(MotionPreset("stationary"), 1.0, (1.0, 0.0))
    assert vs.V_p == (0.0, 0.0)
    assert vs.V_Gamma == (0.0, 0.0)
    assert vs.j == 0.0


def test_breathing_jump_equals_height_rate():
    preset = MotionPreset("vertical_breathing", a=0.1, b=1.0)
    vs = velocity_sample(preset, 0.0, (2.0, 0.0))
    assert vs.j == pytest.approx(0.1)  # h'(0) = a*b
    for t in (0.3, 1.7):
        vs = velocity_sample(preset, t, (2.0, 0.0))
        assert vs.j == pytest.approx(preset.height_rate(t))


def test_tangential_flow_has_no_normal_jump():
    preset = MotionPreset("tangential_flow", v_tau=0.5)
    vs = velocity_sample(preset, 0.7, (1.0, 0.0))
    assert vs.j == 0.0
    assert vs.J_Gamma == pytest.approx((0.5, 0.0))
    # purely tangential: zero normal component
    assert vs.J_Gamma[0] * NU0[0] + vs.J_Gamma[1] * NU0[1] == 0.0


@pytest.mark.parametrize("preset", ALL_PRESETS, ids=lambda p: p.kind)
def test_parametrization_matches_surface_normal_motion(preset):
    """(V_p - V_Gamma).nu = 0 on the surface; V_p vanishes on the fixed
    outer boundary."""
    for t in (0.0, 0.6, 2.0):
        vs = velocity_sample(preset, t, (1.0, 0.0))
        dvn = (vs.V_p[0] - vs.V_Gamma[0]) * NU0[0] \
            + (vs.V_p[1] - vs.V_Gamma[1]) * NU0[1]
        assert abs(dvn) <= 1e-15
        top = velocity_sample(preset, t, (1.0, 1.0))
        assert top.V_p[1] == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("preset", ALL_PRESETS, ids=lambda p: p.kind)
def test_jacobi_identity_analytic(preset):
    """dJ/dt = J * div(V_p) holds exactly for the analytic presets."""
    for t in (0.0, 0.5, 2.2):
        gs = geometry_sample(preset, t, (1.0, 0.5), PARAMS)
        vs = velocity_sample(preset, t, (1.0, 0.5))
        assert gs.dJdt == pytest.approx(gs.J * vs.div_V_p, abs=1e-14)


# ---------------------------------------------------------------------------
# whole-grid sampling

def test_grid_geometry_matches_pointwise_samples():
    preset = MotionPreset("combined", a=0.1, b=1.3, v_tau=0.25)
    grid = Grid(8, 8, 2 * math.pi)
    t = 0.7
    gg = grid_geometry(preset, t, grid)
    gs = geometry_sample(preset, t, (0.0, 0.0), PARAMS)
    assert gg.J == pytest.approx(gs.J)
    assert gg.dJdt == pytest.approx(gs.dJdt)
    assert gg.omega == pytest.approx(gs.omega)
    assert gg.msurf == pytest.approx(gs.surface_len * gs.J * gs.omega)
    assert gg.jump == pytest.approx(velocity_sample(preset, t, (0.0, 0.0)).j)
    # vertical parametrization velocity at the y-face midpoints
    y_face = (np.arange(grid.Ny) + 0.5) * grid.dy
    np.testing.assert_allclose(gg.vy_face,
                               preset.height_rate(t) * (1 - y_face), rtol=1e-14)


def test_grid_geometry_rejects_negative_time():
    with pytest.raises(GeometryError):
        grid_geometry(MotionPreset("stationary"), -1.0, Grid(8, 8, 1.0))


def test_surface_measure_is_time_invariant():
    # J*omega = 1 on the surface: the surface line element never changes
    preset = MotionPreset("vertical_breathing", a=0.3, b=2.0)
    grid = Grid(8, 8, 2 * math.pi)
    for t in (0.0, 0.4, 1.9):
        gg = grid_geometry(preset, t, grid)
        assert gg.msurf == pytest.approx(1.0, abs=1e-15)
