"""Spatial operators on the reference grid.

Node-centered finite differences in conservative flux form.  The bulk
field u lives on an Nx x (Ny+1) grid (periodic in x, y-index 0 on the
surface); the surface fields w, z live on Nx periodic nodes.  The Robin
coupling enters as the boundary flux of the conservative form, so the
discrete mass bookkeeping of the bulk and surface exchange is exact: the
flux the bulk gains through its bottom face is, value for value, the flux
the complex equation loses.

The hot kernels are numba-compiled; the module-level functions wrap them
behind plain array signatures.
"""

from dataclasses import dataclass

import numpy as np
from numba import njit

from . import geometry
from .errors import ValidationError


@dataclass(frozen=True)
class Grid:
    """Uniform tensor grid on the reference strip."""

    Nx: int
    Ny: int
    P_x: float

    def __post_init__(self):
        if self.Nx < 4 or self.Ny < 4:
            raise ValidationError(f"Nx and Ny must be >= 4, got {self.Nx}, {self.Ny}")
        if not (self.P_x > 0):
            raise ValidationError(f"P_x must be positive, got {self.P_x}")

    @property
    def dx(self):
        return self.P_x / self.Nx

    @property
    def dy(self):
        return 1.0 / self.Ny

    @property
    def x(self):
        return np.arange(self.Nx) * self.dx

    @property
    def y(self):
        return np.arange(self.Ny + 1) * self.dy


@dataclass
class SimulationState:
    """Discrete fields on the reference grid at time t."""

    t: float
    u: np.ndarray  # (Nx, Ny+1), y-index 0 on the surface
    w: np.ndarray  # (Nx,)
    z: np.ndarray  # (Nx,)

    def check(self, grid):
        if self.u.shape != (grid.Nx, grid.Ny + 1):
            raise ValidationError(
                f"u has shape {self.u.shape}, expected {(grid.Nx, grid.Ny + 1)}"
            )
        if self.w.shape != (grid.Nx,) or self.z.shape != (grid.Nx,):
            raise ValidationError("w and z must have shape (Nx,)")
        if not (
            np.all(np.isfinite(self.u))
            and np.all(np.isfinite(self.w))
            and np.all(np.isfinite(self.z))
        ):
            raise ValidationError("state contains non-finite entries")

    def copy(self):
        return SimulationState(self.t, self.u.copy(), self.w.copy(), self.z.copy())


def reaction(u_val, w_val, z_val, params):
    """Pointwise reaction z/delta_kp - u*w/delta_k (dissociation minus binding)."""
    return z_val / params.delta_kp - u_val * w_val / params.delta_k


def robin_flux(u_trace, w_val, z_val, j_val, params):
    """Normal diffusive flux delta_omega*grad(u).nu on the surface.

    From the Robin condition delta_omega*grad(u).nu - u*j = r(u,w,z).
    """
    return reaction(u_trace, w_val, z_val, params) + j_val * u_trace


def surface_laplacian(f, grid, geom_row=1.0):
    """Laplace-Beltrami operator on the periodic surface line.

    With line-element factor ell this is (1/ell) d/dx ((1/ell) df/dx),
    discretized conservatively; constants are annihilated exactly.
    geom_row may be a scalar or a per-node array of ell values.
    """
    f = np.asarray(f, dtype=float)
    if f.shape != (grid.Nx,):
        raise ValidationError(f"field has shape {f.shape}, expected {(grid.Nx,)}")
    ell = np.broadcast_to(np.asarray(geom_row, dtype=float), (grid.Nx,))
    ell_face = 0.5 * (ell + np.roll(ell, -1))  # at i+1/2
    grad_face = (np.roll(f, -1) - f) / (grid.dx * ell_face)
    return (grad_face - np.roll(grad_face, 1)) / (grid.dx * ell)


def surface_advection(f, grid, speed, geom_row=1.0):
    """Conservative tangential advection -(1/ell) d/dx (speed*f) with
    second-order centered face fluxes."""
    f = np.asarray(f, dtype=float)
    if f.shape != (grid.Nx,):
        raise ValidationError(f"field has shape {f.shape}, expected {(grid.Nx,)}")
    ell = np.broadcast_to(np.asarray(geom_row, dtype=float), (grid.Nx,))
    flux_face = -speed * 0.5 * (f + np.roll(f, -1))  # at i+1/2
    return (flux_face - np.roll(flux_face, 1)) / (grid.dx * ell)


@njit(cache=True)
def _rhs_kernel(u, w, z, dx, dy, J, dJdt, axx, ayy, hp, jomega, vtau,
                dgam, dgamp, inv_dk, inv_dkp, msurf, du, dw, dz):
    """Semi-discrete right side of the full coupled system.

    Bulk: conservative fluxes F_x = axx*du/dx, F_y = ayy*du/dy + c(y)*u
    with c(y) = hp*(1-y) the vertical parametrization-velocity profile;
    the y=0 boundary face flux is -jomega*r(u,w,z) and the y=1 face flux
    is zero; du = (flux divergence - u*dJdt)/J.  Surface: conservative
    periodic diffusion/advection with sources +r (receptor) and -r
    (complex).  The bulk boundary term and the surface sources use the
    same reaction values, so the discrete masses balance exactly.
    """
    nx, nyp1 = u.shape
    ny = nyp1 - 1
    inv_dx2 = 1.0 / (dx * dx)
    inv_dy = 1.0 / dy
    inv_hdy = 2.0 / dy
    inv_J = 1.0 / J
    inv_dx = 1.0 / dx
    inv_dxm = 1.0 / (dx * msurf)
    for i in range(nx):
        im = i - 1 if i > 0 else nx - 1
        ip = i + 1 if i < nx - 1 else 0
        r = inv_dkp * z[i] - inv_dk * u[i, 0] * w[i]
        # bulk column: fy is the y-face flux at j+1/2
        fy = ayy * (u[i, 1] - u[i, 0]) * inv_dy \
            + hp * (1.0 - 0.5 * dy) * 0.5 * (u[i, 0] + u[i, 1])
        dconv = axx * (u[ip, 0] - 2.0 * u[i, 0] + u[im, 0]) * inv_dx2 \
            + (fy + jomega * r) * inv_hdy
        du[i, 0] = (dconv - u[i, 0] * dJdt) * inv_J
        fy_prev = fy
        for j in range(1, ny):
            fy = ayy * (u[i, j + 1] - u[i, j]) * inv_dy \
                + hp * (1.0 - (j + 0.5) * dy) * 0.5 * (u[i, j] + u[i, j + 1])
            dconv = axx * (u[ip, j] - 2.0 * u[i, j] + u[im, j]) * inv_dx2 \
                + (fy - fy_prev) * inv_dy
            du[i, j] = (dconv - u[i, j] * dJdt) * inv_J
            fy_prev = fy
        dconv = axx * (u[ip, ny] - 2.0 * u[i, ny] + u[im, ny]) * inv_dx2 \
            - fy_prev * inv_hdy
        du[i, ny] = (dconv - u[i, ny] * dJdt) * inv_J
        # surface pair (line-element factor 1 for all presets)
        fw_p = dgam * (w[ip] - w[i]) * inv_dx - vtau * 0.5 * (w[i] + w[ip])
        fw_m = dgam * (w[i] - w[im]) * inv_dx - vtau * 0.5 * (w[im] + w[i])
        fz_p = dgamp * (z[ip] - z[i]) * inv_dx - vtau * 0.5 * (z[i] + z[ip])
        fz_m = dgamp * (z[i] - z[im]) * inv_dx - vtau * 0.5 * (z[im] + z[i])
        dw[i] = (fw_p - fw_m) * inv_dxm + r
        dz[i] = (fz_p - fz_m) * inv_dxm - r


@njit(cache=True)
def _heun_kernel(u, w, z, dx, dy, dt,
                 g0, g1,
                 dom, dgam, dgamp, inv_dk, inv_dkp):
    """One explicit-trapezoidal step with stage-exact geometry.

    g0, g1 are the scalar geometry packs (J, dJdt, hp, jomega, vtau,
    msurf) at the two stage times.  Returns the new fields plus a probe
    sum that is non-finite iff any entry is.
    """
    J0, dJdt0, hp0, jom0, vt0, ms0 = g0
    J1, dJdt1, hp1, jom1, vt1, ms1 = g1
    k1u = np.empty_like(u)
    k1w = np.empty_like(w)
    k1z = np.empty_like(z)
    _rhs_kernel(u, w, z, dx, dy, J0, dJdt0, dom * J0, dom / J0, hp0, jom0,
                vt0, dgam, dgamp, inv_dk, inv_dkp, ms0, k1u, k1w, k1z)
    pu = u + dt * k1u
    pw = w + dt * k1w
    pz = z + dt * k1z
    k2u = np.empty_like(u)
    k2w = np.empty_like(w)
    k2z = np.empty_like(z)
    _rhs_kernel(pu, pw, pz, dx, dy, J1, dJdt1, dom * J1, dom / J1, hp1, jom1,
                vt1, dgam, dgamp, inv_dk, inv_dkp, ms1, k2u, k2w, k2z)
    half = 0.5 * dt
    probe = 0.0
    nx, nyp1 = u.shape
    for i in range(nx):
        for j in range(nyp1):
            v = u[i, j] + half * (k1u[i, j] + k2u[i, j])
            k1u[i, j] = v
            probe += v
        vw = w[i] + half * (k1w[i] + k2w[i])
        vz = z[i] + half * (k1z[i] + k2z[i])
        k1w[i] = vw
        k1z[i] = vz
        probe += vw + vz
    return k1u, k1w, k1z, probe


def _geom_pack(geom):
    return (geom.J, geom.dJdt, -geom.dJdt, geom.J * geom.omega,
            geom.v_tau, geom.msurf)


def _rhs_arrays(state, grid, params, geom):
    du = np.empty_like(state.u)
    dw = np.empty_like(state.w)
    dz = np.empty_like(state.z)
    _rhs_kernel(
        state.u, state.w, state.z, grid.dx, grid.dy,
        geom.J, geom.dJdt,
        params.delta_omega * geom.J,   # A_xx
        params.delta_omega / geom.J,   # A_yy
        -geom.dJdt,                    # hp: vertical velocity amplitude
        geom.J * geom.omega,
        geom.v_tau,
        params.delta_gamma, params.delta_gamma_p,
        1.0 / params.delta_k, 1.0 / params.delta_kp,
        geom.msurf,
        du, dw, dz,
    )
    return du, dw, dz


def bulk_rhs(state, grid, preset, params, geom=None):
    """Time derivative of the bulk field on the reference grid.

    geom may be passed to reuse a grid_geometry sample at state.t.
    """
    state.check(grid)
    if geom is None:
        geom = geometry.grid_geometry(preset, state.t, grid)
    return _rhs_arrays(state, grid, params, geom)[0]


def surface_rhs(state, grid, preset, params, geom=None):
    """Time derivatives (dw/dt, dz/dt) of the surface fields."""
    state.check(grid)
    if geom is None:
        geom = geometry.grid_geometry(preset, state.t, grid)
    _, dw, dz = _rhs_arrays(state, grid, params, geom)
    return dw, dz


def bulk_quadrature_weights(grid):
    """Trapezoid-in-y, periodic-in-x node weights (without the J factor)."""
    wy = np.full(grid.Ny + 1, grid.dy)
    wy[0] = wy[-1] = 0.5 * grid.dy
    return grid.dx * wy[np.newaxis, :] * np.ones((grid.Nx, 1))
