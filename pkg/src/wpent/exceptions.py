"""Exception types raised by wpent."""


class ParameterError(ValueError):
    """A physical or numerical parameter violates its documented range."""


class GridMismatchError(ValueError):
    """Two objects that must share a k-grid (or mode set) do not."""


class QuadratureError(RuntimeError):
    """Quadrature did not converge within its node budget.

    Attributes
    ----------
    residual : float
        Last estimated absolute error when the budget ran out.
    """

    def __init__(self, message, residual):
        super().__init__(f"{message} (residual estimate {residual:.3e})")
        self.residual = residual


class IntegrationError(RuntimeError):
    """The ODE integrator failed (step-size collapse or stiffness)."""
