"""sphera: harmonic analysis of probability distributions on the unit sphere.

Evaluate and expand spherical densities in spherical harmonics, estimate
expansion coefficients from directional samples, run distribution-free
large-sample tests for uniformity and symmetry, and fit girdle-type
mixture-Watson data.
"""
from ._kernels import backend_name as kernel_backend

__version__ = "0.1.0"

__all__ = ["kernel_backend", "__version__"]
