"""Conservation laws of PDE systems: multipliers by the direct method and
fluxes by direct matching, homotopy operators and scaling symmetries."""
from .poly import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]
