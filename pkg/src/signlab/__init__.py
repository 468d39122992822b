"""Numerics for Fourier sign uncertainty problems."""
from .funcrep import FunctionSpec, closed, combine, eigen, evaluate, parse_spec, sampled, serialize_spec
from .signtools import last_sign_change
from .transforms import fourier_transform

__version__ = "0.1.0"

__all__ = [
    "FunctionSpec",
    "closed",
    "combine",
    "eigen",
    "evaluate",
    "parse_spec",
    "sampled",
    "serialize_spec",
    "last_sign_change",
    "fourier_transform",
]
