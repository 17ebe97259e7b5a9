"""Exact lattice and finite-field tools for supersingular K3 and Enriques period data."""
from ._kernels import BACKEND as KERNEL_BACKEND  # noqa: F401

__version__ = "0.1.0"
