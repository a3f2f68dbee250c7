"""Functionals on discrete states: conserved masses, entropy, dissipation,
equilibrium constants, the relative-entropy inequalities, and decay-rate
fitting.

Entropy and dissipation are defined only in the stationary setting (no
domain motion), which is where the decay theory applies; calling them on
a moving preset raises.  The convention 0*log(0) = 0 is used throughout,
and inside the dissipation logarithms only, entries are floored at
EPS_POS to keep the value finite.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import special, stats

from . import geometry
from .discretization import bulk_quadrature_weights
from .errors import FitError, ValidationError

EPS_POS = 1e-12       # floor inside dissipation logs
NEG_TOL = 1e-10       # entries above -NEG_TOL are clamped to 0 in entropy


@dataclass(frozen=True)
class MassPair:
    M1: float  # bulk u plus surface z
    M2: float  # surface w plus z


@dataclass(frozen=True)
class EquilibriumState:
    u_inf: float
    w_inf: float
    z_inf: float


@dataclass(frozen=True)
class DiagnosticsRow:
    """One output-time record; E, D, E_rel are None on moving presets."""

    t: float
    M1: float
    M2: float
    dM1_rel: float
    dM2_rel: float
    E: float | None
    D: float | None
    E_rel: float | None
    u_min: float
    u_max: float
    w_min: float
    w_max: float
    z_min: float
    z_max: float
    dt: float


def masses(state, grid, preset):
    """Conserved mass pair with moving-domain quadrature weights."""
    geom = geometry.grid_geometry(preset, state.t, grid)
    wq = bulk_quadrature_weights(grid)
    m_bulk = geom.J * float(np.sum(wq * state.u))
    msurf = geom.msurf * grid.dx
    return MassPair(
        M1=m_bulk + msurf * float(np.sum(state.z)),
        M2=msurf * float(np.sum(state.w + state.z)),
    )


def _xlogx_minus_x(f):
    """f*(log f - 1) with 0*log0 = 0; small negatives clamped, larger raise."""
    f = np.asarray(f, dtype=float)
    if np.any(f < -NEG_TOL):
        raise ValidationError(f"negative entries below -{NEG_TOL} in entropy integrand")
    f = np.maximum(f, 0.0)
    out = np.zeros_like(f)
    pos = f > 0
    out[pos] = f[pos] * (np.log(f[pos]) - 1.0)
    return out


def _require_stationary(preset):
    if preset.kind != "stationary":
        raise ValidationError(
            "entropy/dissipation are defined for the stationary preset only"
        )


def entropy(state, grid, preset=None):
    """Entropy E = int u(log u - 1) + int w(log w - 1) + int z(log z - 1)."""
    if preset is not None:
        _require_stationary(preset)
        H = preset.H
    else:
        H = 1.0
    wq = bulk_quadrature_weights(grid) * H  # physical measure of the strip
    e_bulk = float(np.sum(wq * _xlogx_minus_x(state.u)))
    e_surf = grid.dx * float(np.sum(_xlogx_minus_x(state.w) + _xlogx_minus_x(state.z)))
    return e_bulk + e_surf


def dissipation(state, grid, params, preset=None):
    """Entropy dissipation and its four summands.

    D = int |grad u|^2/u + dgam*int |grad w|^2/w + dgamp*int |grad z|^2/z
        + int_surface (uw - z) log(uw/z).
    Valid in the stationary unit-rate regime (delta_omega = delta_k =
    delta_kp = 1).  Returns (total, (bulk, w, z, reactive)).
    """
    if preset is not None:
        _require_stationary(preset)
    for name in ("delta_omega", "delta_k", "delta_kp"):
        if abs(getattr(params, name) - 1.0) > 1e-14:
            raise ValidationError(f"dissipation requires {name} = 1")
    u, w, z = state.u, state.w, state.z
    if np.any(u < -NEG_TOL) or np.any(w < -NEG_TOL) or np.any(z < -NEG_TOL):
        raise ValidationError("dissipation requires non-negative fields")
    dx, dy = grid.dx, grid.dy

    ux = (np.roll(u, -1, axis=0) - np.roll(u, 1, axis=0)) / (2 * dx)
    uy = np.empty_like(u)
    uy[:, 1:-1] = (u[:, 2:] - u[:, :-2]) / (2 * dy)
    uy[:, 0] = (-1.5 * u[:, 0] + 2.0 * u[:, 1] - 0.5 * u[:, 2]) / dy
    uy[:, -1] = (1.5 * u[:, -1] - 2.0 * u[:, -2] + 0.5 * u[:, -3]) / dy
    wq = bulk_quadrature_weights(grid)
    d_bulk = float(np.sum(wq * (ux**2 + uy**2) / np.maximum(u, EPS_POS)))

    def surf_term(f, delta):
        fx = (np.roll(f, -1) - np.roll(f, 1)) / (2 * dx)
        return delta * dx * float(np.sum(fx**2 / np.maximum(f, EPS_POS)))

    d_w = surf_term(w, params.delta_gamma)
    d_z = surf_term(z, params.delta_gamma_p)

    ut = u[:, 0]
    uw = ut * w
    ratio = np.maximum(uw, EPS_POS) / np.maximum(z, EPS_POS)
    d_react = dx * float(np.sum((uw - z) * np.log(ratio)))
    total = d_bulk + d_w + d_z + d_react
    return total, (d_bulk, d_w, d_z, d_react)


def equilibrium(M1, M2, area_omega, len_gamma):
    """Unique non-negative equilibrium constants for given masses.

    u_inf is the non-negative root of |O|u^2 + (|O| + M2 - M1)u - M1 = 0,
    obtained by eliminating w and z from the algebraic equilibrium system;
    then w_inf and z_inf follow in closed form with u_inf*w_inf = z_inf.
    """
    if M1 < 0 or M2 < 0:
        raise ValidationError(f"masses must be non-negative, got M1={M1}, M2={M2}")
    if not (area_omega > 0 and len_gamma > 0):
        raise ValidationError("domain measures must be positive")
    b = area_omega + M2 - M1
    # numerically stable positive root
    disc = math.sqrt(b * b + 4.0 * area_omega * M1)
    if b > 0:
        u_inf = 2.0 * M1 / (b + disc)
    else:
        u_inf = (disc - b) / (2.0 * area_omega)
    z_inf = u_inf * M2 / (len_gamma * (1.0 + u_inf))
    w_inf = M2 / len_gamma - z_inf
    return EquilibriumState(u_inf=u_inf, w_inf=w_inf, z_inf=z_inf)


def equilibrium_entropy(eq, area_omega, len_gamma):
    """Entropy of the constant equilibrium state."""

    def g(v):
        return v * (math.log(v) - 1.0) if v > 0 else 0.0

    return area_omega * g(eq.u_inf) + len_gamma * (g(eq.w_inf) + g(eq.z_inf))


def ckp_gap(f, measure):
    """Both sides of the Csiszar-Kullback-Pinsker inequality.

    f: non-negative field; measure: quadrature weights of the same shape.
    Returns (lhs, rhs) with lhs = int f log(f/fbar) and
    rhs = ||f - fbar||_1^2 / (2 |M| fbar); the contract is lhs >= rhs - 1e-10.
    """
    f = np.asarray(f, dtype=float)
    m = np.asarray(measure, dtype=float)
    if f.shape != m.shape:
        raise ValidationError("field and measure shapes differ")
    if np.any(f < 0):
        raise ValidationError("ckp_gap requires a non-negative field")
    vol = float(np.sum(m))
    fbar = float(np.sum(m * f)) / vol
    if fbar <= 0:
        raise ValidationError("ckp_gap requires a positive mean")
    # xlogy extends f*log(f) continuously by 0 and is safe for subnormals
    lhs = float(np.sum(m * (special.xlogy(f, f) - f * math.log(fbar))))
    l1 = float(np.sum(m * np.abs(f - fbar)))
    rhs = l1 * l1 / (2.0 * vol * fbar)
    return lhs, rhs


def xlog_gap(x, y):
    """Gap and lower bound of the scalar inequality
    x log(x/y) - (x - y) >= (x - y)^2 / (2x + 2y) for x, y > 0.

    Returns (gap, bound); the contract is gap >= bound - 1e-12.
    """
    if not (x > 0 and y > 0):
        raise ValidationError(f"xlog_gap requires positive inputs, got {x}, {y}")
    d = x - y
    gap = x * math.log1p(d / y) - d
    bound = d * d / (2.0 * (x + y))
    return gap, bound


def fit_decay_rate(series):
    """Least-squares exponential decay rate from (t, E_rel) samples.

    Fits a line through (t, log E_rel) after dropping trailing values
    below 1e-12; returns (K, R^2) with K the slope magnitude.
    """
    pts = [(t, e) for t, e in series]
    while pts and pts[-1][1] < 1e-12:
        pts.pop()
    usable = [(t, e) for t, e in pts if e > 0]
    if len(usable) < 3:
        raise FitError(f"only {len(usable)} usable points for the decay fit")
    t = np.array([p[0] for p in usable])
    loge = np.log(np.array([p[1] for p in usable]))
    res = stats.linregress(t, loge)
    r2 = res.rvalue**2 if np.isfinite(res.rvalue) else 0.0
    return -res.slope, float(r2)
