"""Spectral stability of cnoidal and snoidal waves of a coupled quintic NLS system."""

from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__"]
