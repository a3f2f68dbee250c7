"""Independent oracles for the solver.

Every check here recomputes its reference quantity through a route that
does not share code with the production path: geometry by finite
differences of the flow map, surface operators spectrally, the
homogeneous dynamics with a separate high-accuracy integrator.  Each
suite returns a list of (name, passed, detail) tuples.
"""

import math
from dataclasses import replace

import numpy as np
from numba import njit

from . import discretization as disc
from . import geometry, timestepper
from .errors import ValidationError


# ---------------------------------------------------------------------------
# operator convergence orders

def _surface_grid(n, P_x):
    return disc.Grid(Nx=n, Ny=4, P_x=P_x)


def _op_error(operator_id, n):
    """Max-norm error of one operator against an exact image at resolution n."""
    P_x = 2.0 * math.pi
    if operator_id == "surface_laplacian":
        grid = _surface_grid(n, P_x)
        f = np.cos(grid.x)
        exact = -np.cos(grid.x)
        approx = disc.surface_laplacian(f, grid)
        return float(np.max(np.abs(approx - exact)))
    if operator_id == "surface_advection":
        grid = _surface_grid(n, P_x)
        f = np.sin(grid.x)
        exact = -np.cos(grid.x)  # -(d/dx)(1*f)
        approx = disc.surface_advection(f, grid, speed=1.0)
        return float(np.max(np.abs(approx - exact)))
    if operator_id == "bulk_interior":
        from .params import SystemParameters

        grid = disc.Grid(Nx=n, Ny=n, P_x=P_x)
        preset = geometry.MotionPreset("stationary", P_x=P_x)
        params = SystemParameters(1.0, 1.0, 1.0, 1.0, 1.0)
        xb, yb = np.meshgrid(grid.x, grid.y, indexing="ij")
        u = np.cos(xb) * np.cosh(yb)  # harmonic: exact image 0 in the interior
        state = disc.SimulationState(0.0, u, np.zeros(grid.Nx), np.zeros(grid.Nx))
        rhs = disc.bulk_rhs(state, grid, preset, params)
        return float(np.max(np.abs(rhs[:, 1:-1])))
    raise ValidationError(f"unknown operator_id {operator_id!r}")


def operator_order(operator_id, resolutions):
    """Observed convergence orders under successive mesh halving.

    resolutions must contain at least 3 entries, each double the last.
    Returns (errors, orders); the pass band for orders is [1.7, 2.3].
    """
    res = list(resolutions)
    if len(res) < 3:
        raise ValidationError("need at least 3 resolutions")
    for a, b in zip(res, res[1:]):
        if b != 2 * a:
            raise ValidationError("each resolution must double the previous one")
    errors = [_op_error(operator_id, n) for n in res]
    orders = [math.log2(e0 / e1) for e0, e1 in zip(errors, errors[1:])]
    return errors, orders


# ---------------------------------------------------------------------------
# geometry cross-checks

def fd_flow_jacobian(preset, t, xi, h=1e-6):
    """Jacobian matrix of the flow map by central differences."""
    x, y = xi

    def phi(p):
        return np.array(geometry.flow_map(preset, t, p))

    dcol_x = (phi((x + h, y)) - phi((x - h, y))) / (2 * h)
    dcol_y = (phi((x, y + h)) - phi((x, y - h))) / (2 * h)
    return np.column_stack([dcol_x, dcol_y])


def fd_dJdt(preset, t, xi, h=1e-4, h_space=1e-4):
    """dJ/dt by central differences of the finite-difference determinant.

    The inner spatial step is kept large (the flow maps are affine in the
    reference coordinates, so spatial truncation is exactly zero and a
    larger step only reduces roundoff amplification by the outer time
    difference).
    """
    t0 = max(t - h, 0.0)
    j_plus = np.linalg.det(fd_flow_jacobian(preset, t + h, xi, h_space))
    j_minus = np.linalg.det(fd_flow_jacobian(preset, t0, xi, h_space))
    return (j_plus - j_minus) / (t + h - t0)


def check_jacobi(preset, t_samples, xi_samples):
    """Max relative error of dJ/dt against J * div(V_p) over the samples.

    Both sides come from the analytic preset formulas; the finite
    difference comparison is a separate oracle (fd_dJdt).
    """
    from .params import SystemParameters

    params = SystemParameters(1.0, 1.0, 1.0, 1.0, 1.0)
    worst = 0.0
    for t in t_samples:
        for xi in xi_samples:
            gs = geometry.geometry_sample(preset, t, xi, params)
            vs = geometry.velocity_sample(preset, t, xi)
            lhs = gs.dJdt
            rhs = gs.J * vs.div_V_p
            err = abs(lhs - rhs) / max(1.0, abs(lhs))
            worst = max(worst, err)
    return worst


def check_geometry_fd(preset, t_samples, xi_samples, h=1e-6):
    """Max abs deviation of the analytic Jacobian package from finite
    differences of the flow map."""
    from .params import SystemParameters

    params = SystemParameters(1.0, 1.0, 1.0, 1.0, 1.0)
    worst = 0.0
    for t in t_samples:
        for xi in xi_samples:
            gs = geometry.geometry_sample(preset, t, xi, params)
            dphi = fd_flow_jacobian(preset, t, xi, h)
            worst = max(worst, float(np.max(np.abs(np.linalg.inv(dphi) - gs.M))))
            worst = max(worst, abs(np.linalg.det(dphi) - gs.J))
            worst = max(worst, abs(fd_dJdt(preset, t, xi) - gs.dJdt))
            nu0 = np.array(geometry.NU0)
            worst = max(worst, abs(np.linalg.norm(np.linalg.inv(dphi).T @ nu0) - gs.omega))
    return worst


def check_compatibility(preset, t_samples, x_samples):
    """Max |(V_p - V_Gamma).nu| over surface samples; should vanish."""
    worst = 0.0
    for t in t_samples:
        for x in x_samples:
            vs = geometry.velocity_sample(preset, t, (x, 0.0))
            dvn = (vs.V_p[0] - vs.V_Gamma[0]) * geometry.NU0[0] \
                + (vs.V_p[1] - vs.V_Gamma[1]) * geometry.NU0[1]
            worst = max(worst, abs(dvn))
    return worst


# ---------------------------------------------------------------------------
# cross-diffusion residual

def _spectral_laplacian(f, P_x):
    n = f.shape[0]
    k = 2.0 * math.pi * np.fft.fftfreq(n, d=P_x / n)
    return np.real(np.fft.ifft(-(k**2) * np.fft.fft(f)))


def cross_diffusion_residual(trajectory, grid, params):
    """Max residual of the w+z equation along a stored trajectory.

    Inserts v = w + z into d/dt v - dgamp*Lap(v) = (dgam - dgamp)*Lap(w)
    using spectral Laplacians (independent of the solver's stencils) and
    trapezoidal time differencing between consecutive snapshots.
    """
    states = trajectory.states
    if len(states) < 2:
        raise ValidationError("need at least 2 snapshots")
    worst = 0.0
    for s0, s1 in zip(states, states[1:]):
        dt = s1.t - s0.t
        v0, v1 = s0.w + s0.z, s1.w + s1.z

        def rhs(s):
            v = s.w + s.z
            return (
                params.delta_gamma_p * _spectral_laplacian(v, grid.P_x)
                + (params.delta_gamma - params.delta_gamma_p)
                * _spectral_laplacian(s.w, grid.P_x)
            )

        resid = (v1 - v0) / dt - 0.5 * (rhs(s0) + rhs(s1))
        worst = max(worst, float(np.max(np.abs(resid))))
    return worst


# ---------------------------------------------------------------------------
# maximum principle

def max_principle_check(trajectory, params, preset):
    """(sup over time of max(w+z), max of the initial w+z).

    Valid for the stationary preset with equal surface diffusivities,
    where w + z solves a pure heat equation on the surface.
    """
    if preset.kind != "stationary":
        raise ValidationError("max principle check requires the stationary preset")
    if abs(params.delta_gamma - params.delta_gamma_p) > 1e-14:
        raise ValidationError("max principle check requires delta_gamma == delta_gamma_p")
    v0 = trajectory.states[0].w + trajectory.states[0].z
    sup_t = max(float(np.max(s.w + s.z)) for s in trajectory.states)
    return sup_t, float(np.max(v0))


# ---------------------------------------------------------------------------
# spatially homogeneous reference dynamics

@njit(cache=True)
def _rk4_homogeneous(u0, w0, z0, ratio, inv_dk, inv_dkp, T, dt):
    n = int(round(T / dt))
    u, w, z = u0, w0, z0
    out = np.empty((n + 1, 4))
    out[0] = (0.0, u, w, z)
    for i in range(n):
        # classical RK4 on u' = ratio*r, w' = r, z' = -r
        r1 = inv_dkp * z - inv_dk * u * w
        u2, w2, z2 = u + 0.5 * dt * ratio * r1, w + 0.5 * dt * r1, z - 0.5 * dt * r1
        r2 = inv_dkp * z2 - inv_dk * u2 * w2
        u3, w3, z3 = u + 0.5 * dt * ratio * r2, w + 0.5 * dt * r2, z - 0.5 * dt * r2
        r3 = inv_dkp * z3 - inv_dk * u3 * w3
        u4, w4, z4 = u + dt * ratio * r3, w + dt * r3, z - dt * r3
        r4 = inv_dkp * z4 - inv_dk * u4 * w4
        rbar = (r1 + 2 * r2 + 2 * r3 + r4) / 6.0
        u += dt * ratio * rbar
        w += dt * rbar
        z -= dt * rbar
        out[i + 1] = ((i + 1) * dt, u, w, z)
    return out


def homogeneous_ode_oracle(params, initial, T, area_omega=1.0, len_gamma=1.0,
                           dt_ref=1e-5):
    """High-accuracy trajectory of the spatially homogeneous 3-ODE system.

    u' = (|Gamma|/|Omega|) r, w' = r, z' = -r with the pointwise reaction.
    Returns an (n+1, 4) array of rows (t, u, w, z).
    """
    u0, w0, z0 = initial
    if u0 < 0 or w0 < 0 or z0 < 0:
        raise ValidationError("homogeneous oracle requires non-negative initial data")
    return _rk4_homogeneous(
        float(u0), float(w0), float(z0),
        len_gamma / area_omega,
        1.0 / params.delta_k, 1.0 / params.delta_kp,
        float(T), float(dt_ref),
    )


# ---------------------------------------------------------------------------
# continuous dependence

def _state_l2(grid, du, dw, dz):
    wq = disc.bulk_quadrature_weights(grid)
    return math.sqrt(
        float(np.sum(wq * du**2))
        + grid.dx * float(np.sum(dw**2))
        + grid.dx * float(np.sum(dz**2))
    )


def continuous_dependence_probe(config, eps):
    """Growth factor ||difference(T)||_2 / ||difference(0)||_2 between the
    configured run and one with the bulk initial data perturbed by eps
    times a unit-L2 cosine profile."""
    if eps == 0:
        return 0.0
    base = timestepper.run(config)
    pert_spec = dict(config.initial)
    amp = eps / math.sqrt(0.5 * config.grid.P_x * 1.0)  # unit L2 norm of cos(x) on the strip
    u_spec = config.initial["u"]
    if u_spec.get("type") != "expression":
        raise ValidationError("probe expects an expression-type bulk initial field")
    pert_spec["u"] = {
        "type": "expression",
        "formula": f"({u_spec['formula']}) + {amp!r}*cos(2*pi*x/{config.grid.P_x!r})",
    }
    pert_cfg = replace(config, initial=pert_spec)
    pert = timestepper.run(pert_cfg)

    s0a, s0b = base.states[0], pert.states[0]
    sTa, sTb = base.states[-1], pert.states[-1]
    d0 = _state_l2(config.grid, s0b.u - s0a.u, s0b.w - s0a.w, s0b.z - s0a.z)
    dT = _state_l2(config.grid, sTb.u - sTa.u, sTb.w - sTa.w, sTb.z - sTa.z)
    return dT / d0


# ---------------------------------------------------------------------------
# suites

def _preset_samples():
    presets = [
        geometry.MotionPreset("stationary"),
        geometry.MotionPreset("vertical_breathing", a=0.1, b=1.0),
        geometry.MotionPreset("tangential_flow", v_tau=0.5),
        geometry.MotionPreset("combined", a=0.1, b=1.0, v_tau=0.5),
    ]
    ts = [0.0, 0.3, 1.0, 2.5]
    # interior points so central differences of the flow map stay in range
    xis = [(0.1, 0.01), (1.0, 0.25), (3.0, 0.7), (5.0, 0.99)]
    return presets, ts, xis


def suite_geometry():
    presets, ts, xis = _preset_samples()
    results = []
    for p in presets:
        e1 = check_jacobi(p, ts, xis)
        results.append((f"jacobi[{p.kind}]", e1 <= 1e-10, f"max rel err {e1:.3e}"))
        e2 = check_geometry_fd(p, ts, xis)
        results.append((f"geometry_fd[{p.kind}]", e2 <= 1e-6, f"max abs err {e2:.3e}"))
        e3 = check_compatibility(p, ts, [0.1, 2.0, 4.0])
        results.append((f"compatibility[{p.kind}]", e3 <= 1e-14, f"max |dV.nu| {e3:.3e}"))
    return results


def suite_operators():
    results = []
    for op_id in ("surface_laplacian", "surface_advection", "bulk_interior"):
        _, orders = operator_order(op_id, (16, 32, 64, 128))
        ok = all(1.7 <= o <= 2.3 for o in orders)
        results.append((f"order[{op_id}]", ok,
                        "orders " + ", ".join(f"{o:.2f}" for o in orders)))
    return results


def suite_ode():
    from .functionals import equilibrium
    from .params import SystemParameters

    params = SystemParameters(1.0, 1.0, 1.0, 1.0, 1.0)
    traj = homogeneous_ode_oracle(params, (2.0, 1.0, 0.0), T=10.0)
    eq = equilibrium(2.0, 1.0, 1.0, 1.0)
    end = traj[-1]
    err = max(abs(end[1] - eq.u_inf), abs(end[2] - eq.w_inf), abs(end[3] - eq.z_inf))
    results = [("ode_equilibrium", err <= 1e-6, f"endpoint err {err:.3e}")]
    c1 = np.max(np.abs(traj[:, 1] + traj[:, 3] - (traj[0, 1] + traj[0, 3])))
    c2 = np.max(np.abs(traj[:, 2] + traj[:, 3] - (traj[0, 2] + traj[0, 3])))
    ok = max(c1, c2) <= 1e-10
    results.append(("ode_conservation", ok, f"max drift {max(c1, c2):.3e}"))
    return results


SUITES = {
    "geometry": suite_geometry,
    "operators": suite_operators,
    "ode": suite_ode,
}


def run_suites(names=None):
    """Run the named suites (all by default); returns a flat result list."""
    if names is None:
        names = list(SUITES)
    results = []
    for name in names:
        if name not in SUITES:
            raise ValidationError(f"unknown suite {name!r}; available: {sorted(SUITES)}")
        results.extend(SUITES[name]())
    return results
