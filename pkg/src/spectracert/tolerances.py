"""Shared numerical tolerance policy.

Every eigenvalue comparison in the package goes through a single
:class:`Tolerances` record so that thresholds scale with the size of the
matrix being tested.
"""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    """Absolute tolerance plus the relative rule ``abs * (1 + scale)``.

    Parameters
    ----------
    abs : float
        Base tolerance. Must be positive.
    asymmetry : float
        Largest entrywise asymmetry accepted (and silently symmetrized)
        when ingesting matrices.
    """

    abs: float = 1e-9
    asymmetry: float = 1e-12

    def __post_init__(self):
        if not self.abs > 0:
            raise ValueError(f"tolerance must be positive, got {self.abs!r}")

    def rel(self, scale: float = 0.0) -> float:
        """Tolerance for a matrix of spectral norm ``scale``."""
        return self.abs * (1.0 + abs(float(scale)))


DEFAULT_TOL = Tolerances()
