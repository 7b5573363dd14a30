"""Simulation and verification toolkit for hyper-rough square-root
Volterra processes and their Inverse Gaussian limit."""

from .errors import ConfigError, NumericalError
from .kernels import FractionalKernel, ModelParams, UniformGrid
from .ig import IGParams, IGProcessParams, RngSeed
from .scheme import PathPair, simulate_coupled, simulate_coupled_batch, simulate_pair
from .riccati import TestFunctionPair, char_functional, char_functional_limit

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "NumericalError",
    "FractionalKernel",
    "ModelParams",
    "UniformGrid",
    "IGParams",
    "IGProcessParams",
    "RngSeed",
    "PathPair",
    "simulate_pair",
    "simulate_coupled",
    "simulate_coupled_batch",
    "TestFunctionPair",
    "char_functional",
    "char_functional_limit",
    "__version__",
]
