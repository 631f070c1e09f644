import numpy as np


class ValidationError(ValueError):
    """Invalid input value. ``field`` names the offending parameter."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


class SingularCompliance(np.linalg.LinAlgError):
    """Compliance matrix cannot be inverted into a stiffness matrix."""

    def __init__(self, rcond, null_direction):
        self.rcond = float(rcond)
        self.null_direction = np.asarray(null_direction, dtype=float)
        labels = ("x", "y", "phi")
        desc = ", ".join(f"{c:+.3g}*{n}" for c, n in zip(self.null_direction, labels) if abs(c) > 1e-6)
        super().__init__(
            f"compliance is singular (rcond={self.rcond:.3g}); null direction ~ [{desc}]"
        )


class SingularSystem(np.linalg.LinAlgError):
    """A stiffness system has an unconstrained mechanism."""

    def __init__(self, message, dof=None):
        super().__init__(message)
        self.dof = dof
