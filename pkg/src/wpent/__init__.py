"""Wavepacket-level entanglement and nonclassicality witnesses."""

__version__ = "0.1.0"

from .exceptions import GridMismatchError, IntegrationError, ParameterError, QuadratureError

__all__ = ["GridMismatchError", "IntegrationError", "ParameterError", "QuadratureError",
           "__version__"]
