"""Model parameters: dimensionless rate/diffusion constants and the
conversion from dimensional biological constants.

The dimensionless model is governed by five positive constants: a bulk
diffusivity, two surface diffusivities, and two reaction time constants
(binding and dissociation).
"""

from dataclasses import dataclass, fields

from .errors import ValidationError


@dataclass(frozen=True)
class SystemParameters:
    """The five positive constants of the dimensionless model."""

    delta_omega: float    # bulk diffusivity
    delta_gamma: float    # receptor surface diffusivity
    delta_gamma_p: float  # complex surface diffusivity
    delta_k: float        # binding time constant
    delta_kp: float       # dissociation time constant

    def __post_init__(self):
        validate(self)


@dataclass(frozen=True)
class DimensionalParameters:
    """Physical constants and the scales used to render them dimensionless.

    Diffusivities are in length^2/time, k_on in 1/(concentration*time),
    k_off in 1/time.  L and S are the length and time scales; U, W, Z are
    the concentration scales of the bulk, receptor, and complex fields.
    """

    D_L: float
    D_Gamma: float
    D_GammaP: float
    k_on: float
    k_off: float
    L: float
    S: float
    U: float
    W: float
    Z: float

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not (v > 0):
                raise ValidationError(f"{f.name} must be positive, got {v}")


def validate(params):
    """Raise ValidationError naming the offending field if any constant is
    not strictly positive."""
    for f in fields(SystemParameters):
        v = getattr(params, f.name)
        if not (v > 0):
            raise ValidationError(f"{f.name} must be positive, got {v}")


def nondimensionalize(dim):
    """Convert dimensional constants to the dimensionless parameter set.

    Returns (SystemParameters, gamma, gamma_p) where gamma = L*U/W and
    gamma_p = L*U/Z are the factors by which the receptor and complex
    initial data are rescaled (w = w_bar/gamma, z = z_bar/gamma_p).
    """
    delta_omega = dim.S * dim.D_L / dim.L**2
    delta_gamma = dim.S * dim.D_Gamma / dim.L**2
    delta_gamma_p = dim.S * dim.D_GammaP / dim.L**2
    delta_k = 1.0 / (dim.U * dim.S * dim.k_on)
    delta_kp = 1.0 / (dim.S * dim.k_off)
    gamma = dim.L * dim.U / dim.W
    gamma_p = dim.L * dim.U / dim.Z
    return (
        SystemParameters(delta_omega, delta_gamma, delta_gamma_p, delta_k, delta_kp),
        gamma,
        gamma_p,
    )


def redimensionalize(params, L, S, U, W, Z):
    """Inverse of nondimensionalize for chosen scales.

    Solves the defining relations for the physical constants; useful for
    round-trip testing and for reporting runs in physical units.
    """
    for name, v in (("L", L), ("S", S), ("U", U), ("W", W), ("Z", Z)):
        if not (v > 0):
            raise ValidationError(f"{name} must be positive, got {v}")
    return DimensionalParameters(
        D_L=params.delta_omega * L**2 / S,
        D_Gamma=params.delta_gamma * L**2 / S,
        D_GammaP=params.delta_gamma_p * L**2 / S,
        k_on=1.0 / (U * S * params.delta_k),
        k_off=1.0 / (S * params.delta_kp),
        L=L,
        S=S,
        U=U,
        W=W,
        Z=Z,
    )
