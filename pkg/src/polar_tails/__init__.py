"""Exact and asymptotic tail probabilities of bivariate polar random vectors."""

__version__ = "0.1.0"

from .angular import CustomAngular, DirichletAngular, UniformAngular  # noqa: E402
from .errors import ConfigError, InsufficientDataError, QuadratureError  # noqa: E402
from .polar_exact import PolarModel, conditional_cdf, joint_survivor, survivor_x  # noqa: E402
from .radial import CustomRadial, KotzRadial  # noqa: E402

__all__ = [
    "__version__",
    "PolarModel",
    "KotzRadial",
    "CustomRadial",
    "UniformAngular",
    "DirichletAngular",
    "CustomAngular",
    "survivor_x",
    "joint_survivor",
    "conditional_cdf",
    "ConfigError",
    "InsufficientDataError",
    "QuadratureError",
]
