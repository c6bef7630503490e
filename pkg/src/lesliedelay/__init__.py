"""Stability switching, double-Hopf and simulation tools for a delayed
diffusive Leslie-Gower predator-prey system."""
from .model import REFERENCE_PARAMS, Equilibrium, ModelParams, equilibrium

__version__ = "0.1.0"

__all__ = ["REFERENCE_PARAMS", "Equilibrium", "ModelParams", "equilibrium", "__version__"]
