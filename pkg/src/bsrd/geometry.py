"""Moving geometry on a periodic reference strip.

The reference domain is the strip [0, P_x) x [0, 1] with periodic x.  The
bottom edge (y = 0) is the active surface, a closed curve via periodicity;
the top edge (y = 1) is the fixed outer boundary with a no-flux condition.
Each motion preset supplies the flow map, its Jacobian package, and all
velocity fields analytically, so no numerical differentiation enters the
solver itself (the verify module cross-checks with finite differences).

All presets move vertically with height profile h(t) = a*sin(b*t) and map
(x, y) -> (x, h(t) + y*(H - h(t))).  The Jacobian matrix is therefore
diagonal and x-independent, which keeps the pulled-back diffusion tensor
diagonal.  The outward normal of the bulk on the surface is nu0 = (0, -1).
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import GeometryError, ValidationError

KINDS = ("stationary", "vertical_breathing", "tangential_flow", "combined")

# Outward unit normal of the bulk on the reference surface.
NU0 = (0.0, -1.0)


@dataclass(frozen=True)
class MotionPreset:
    """Analytic motion of the strip.

    a, b: amplitude and frequency of the vertical breathing h(t) = a*sin(b*t).
    v_tau: tangential material speed of the surface.
    H: height of the outer boundary; P_x: period of the x-direction.
    """

    kind: str
    a: float = 0.0
    b: float = 0.0
    v_tau: float = 0.0
    H: float = 1.0
    P_x: float = 2.0 * math.pi

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if not (self.H > 0):
            raise ValidationError(f"H must be positive, got {self.H}")
        if not (self.P_x > 0):
            raise ValidationError(f"P_x must be positive, got {self.P_x}")
        if self.a < 0:
            raise ValidationError(f"a must be non-negative, got {self.a}")
        if not (self.a < self.H):
            raise ValidationError(f"a must be < H (a={self.a}, H={self.H})")
        if self.kind == "stationary" and (self.a != 0 or self.v_tau != 0):
            raise ValidationError("stationary preset requires a = 0 and v_tau = 0")
        if self.kind == "vertical_breathing" and self.v_tau != 0:
            raise ValidationError("vertical_breathing preset requires v_tau = 0")
        if self.kind == "tangential_flow" and self.a != 0:
            raise ValidationError("tangential_flow preset requires a = 0")

    def height(self, t):
        """Surface height h(t)."""
        if self.kind in ("vertical_breathing", "combined"):
            return self.a * math.sin(self.b * t)
        return 0.0

    def height_rate(self, t):
        """h'(t)."""
        if self.kind in ("vertical_breathing", "combined"):
            return self.a * self.b * math.cos(self.b * t)
        return 0.0


@dataclass(frozen=True)
class GeometrySample:
    """Pointwise Jacobian/metric package on the reference strip.

    J: Jacobian determinant; M: inverse Jacobian matrix; A = delta_omega*J*M*M^T;
    B = A/J; omega = |M^T nu0|; dJdt: time derivative of J; surface_len:
    line-element factor |dPhi/dx| on the surface.
    """

    J: float
    M: np.ndarray
    A: np.ndarray
    B: np.ndarray
    omega: float
    dJdt: float
    surface_len: float


@dataclass(frozen=True)
class VelocitySample:
    """Velocity fields and jumps at a reference point.

    V_p is the parametrization velocity; V_Omega and V_Gamma the bulk and
    surface material velocities; j = (V_Omega - V_Gamma).nu is the normal
    jump on the surface.  J_Gamma is purely tangential by construction.
    """

    V_p: tuple
    V_Omega: tuple
    V_Gamma: tuple
    divV_Omega: float
    divGamma_V_Gamma: float
    div_V_p: float
    J_Omega: tuple
    J_Gamma: tuple
    j: float


def _check_point(preset, t, xi):
    x, y = xi
    if not math.isfinite(t) or t < 0:
        raise GeometryError(f"time t={t} outside the admissible range")
    if not (0.0 <= x < preset.P_x) or not (0.0 <= y <= 1.0):
        raise GeometryError(
            f"reference point {xi} outside the strip [0,{preset.P_x})x[0,1]"
        )


def flow_map(preset, t, xi):
    """Map a reference point to its physical position at time t.

    (x, y) -> (x, h(t) + y*(H - h(t))); the surface y=0 maps to height h(t)
    and the outer edge y=1 to height H.  The identity at t=0 (and for the
    stationary preset at all times) requires H = 1, which every shipped
    configuration uses.
    """
    _check_point(preset, t, xi)
    x, y = xi
    h = preset.height(t)
    return (x, h + y * (preset.H - h))


def geometry_sample(preset, t, xi, params):
    """Jacobian/metric package at a reference point."""
    _check_point(preset, t, xi)
    h = preset.height(t)
    beta = preset.H - h  # dPhi_y/dy
    J = beta
    if not (J > 0):
        raise GeometryError(f"singular flow map at t={t}: J={J}")
    M = np.array([[1.0, 0.0], [0.0, 1.0 / beta]])
    A = params.delta_omega * J * (M @ M.T)
    B = A / J
    omega = 1.0 / beta  # |M^T nu0| with nu0 = (0,-1)
    dJdt = -preset.height_rate(t)
    return GeometrySample(J=J, M=M, A=A, B=B, omega=omega, dJdt=dJdt, surface_len=1.0)


def velocity_sample(preset, t, xi):
    """Velocity fields, jumps, and divergences at a reference point.

    The bulk material is at rest (V_Omega = 0); the surface material moves
    with (v_tau, h'(t)).  V_p interpolates the vertical motion linearly in
    y so that it matches the surface on y=0 and vanishes on y=1.
    """
    _check_point(preset, t, xi)
    x, y = xi
    hp = preset.height_rate(t)
    h = preset.height(t)
    beta = preset.H - h
    V_p = (0.0, hp * (1.0 - y))
    V_Omega = (0.0, 0.0)
    vtau = preset.v_tau if preset.kind in ("tangential_flow", "combined") else 0.0
    V_Gamma = (vtau, hp)
    J_Omega = (V_Omega[0] - V_p[0], V_Omega[1] - V_p[1])
    V_p_surf = (0.0, hp)  # V_p restricted to y=0
    J_Gamma = (V_Gamma[0] - V_p_surf[0], V_Gamma[1] - V_p_surf[1])
    j = (V_Omega[0] - V_Gamma[0]) * NU0[0] + (V_Omega[1] - V_Gamma[1]) * NU0[1]
    return VelocitySample(
        V_p=V_p,
        V_Omega=V_Omega,
        V_Gamma=V_Gamma,
        divV_Omega=0.0,
        divGamma_V_Gamma=0.0,
        div_V_p=-hp / beta,
        J_Omega=J_Omega,
        J_Gamma=J_Gamma,
        j=j,
    )


@dataclass(frozen=True)
class GridGeometry:
    """Geometry of a whole reference grid at one time.

    Exploits the x-independence of the presets: J, metric entries, and the
    surface factors are scalars; only the vertical parametrization velocity
    varies (linearly) in y.  vy_face holds h'(t)*(1 - y) at the Ny interior
    y-face midpoints, which is the advective flux coefficient of the
    pulled-back conservative form.
    """

    t: float
    J: float
    dJdt: float
    myy: float          # M_yy = 1/J (M_xx = 1)
    omega: float        # boundary metric factor at y=0
    surface_len: float
    msurf: float        # surface measure factor = surface_len * J * omega
    jump: float         # normal velocity jump j on the surface
    v_tau: float        # tangential surface material speed
    vy_face: np.ndarray


def grid_geometry(preset, t, grid):
    """Sample the preset on the faces/rows of a grid at time t."""
    if not math.isfinite(t) or t < 0:
        raise GeometryError(f"time t={t} outside the admissible range")
    h = preset.height(t)
    hp = preset.height_rate(t)
    beta = preset.H - h
    if not (beta > 0):
        raise GeometryError(f"singular flow map at t={t}: J={beta}")
    y_face = (np.arange(grid.Ny) + 0.5) * grid.dy
    vtau = preset.v_tau if preset.kind in ("tangential_flow", "combined") else 0.0
    omega = 1.0 / beta
    return GridGeometry(
        t=t,
        J=beta,
        dJdt=-hp,
        myy=1.0 / beta,
        omega=omega,
        surface_len=1.0,
        msurf=1.0 * beta * omega,
        jump=hp,
        v_tau=vtau,
        vy_face=hp * (1.0 - y_face),
    )
