"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Invalid parameter, configuration, or input field."""


class GeometryError(RuntimeError):
    """Degenerate or out-of-range geometry (singular Jacobian, point outside strip)."""


class BlowUpError(RuntimeError):
    """Non-finite values appeared during time integration."""

    def __init__(self, t, field):
        self.t = t
        self.field = field
        super().__init__(f"non-finite values in field '{field}' at t={t}")


class FitError(RuntimeError):
    """Not enough usable data for a least-squares fit."""


class VerificationError(RuntimeError):
    """An oracle check failed."""
