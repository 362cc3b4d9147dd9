"""Eigenproblems with eigenvalue-dependent boundary conditions and their step perturbations."""

__version__ = "0.1.0"
