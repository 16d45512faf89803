"""Numerical eigenvalue bounds for the Dirac operator on ellipsoids, tubes and tori."""
from .bounds import BoundKind, BoundValue, TestFunctionPair
from .geometry import (
    ConformalFactorField,
    EllipsoidParam,
    Lattice2,
    SpinStructure,
    TubeParam,
)

__version__ = "0.1.0"

__all__ = [
    "BoundKind",
    "BoundValue",
    "TestFunctionPair",
    "ConformalFactorField",
    "EllipsoidParam",
    "Lattice2",
    "SpinStructure",
    "TubeParam",
]
