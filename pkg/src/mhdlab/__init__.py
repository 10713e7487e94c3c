"""Numerical laboratory for the linear kernels, integral representations, and
small-data pseudo-spectral dynamics of 2D compressible MHD without magnetic
diffusion near the (rho, u, b) = (1, 0, e1) equilibrium."""

__version__ = "0.1.0"
