"""Perron eigenpairs of symmetric matrices with positive entries.

For such a matrix with entries in ``[c, b]`` the normalized Perron vector
``x`` and eigenvalue ``lam`` satisfy

* ``c / (b sqrt n) <= x_i <= b / (c sqrt n)``,
* ``n c <= lam``,
* ``lam x_i x_j >= c^3 / b^2``.

These are theorems; :func:`verify_perron_bounds` measures the slack of each
family and treats a violation as a numerical bug.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BoundViolation, NonPositiveEntry, ResidualFailure
from .tolerances import DEFAULT_TOL, Tolerances


@dataclass(frozen=True, eq=False)
class PerronData:
    lam: float
    x: np.ndarray
    c: float
    b: float
    second: float

    @property
    def n(self) -> int:
        return self.x.shape[0]

    def to_dict(self) -> dict:
        return {"lambda": self.lam, "x": self.x.tolist(), "c": self.c, "b": self.b,
                "n": self.n, "second_eigenvalue": self.second}


def perron_eigenpair(A, tol: Tolerances = DEFAULT_TOL) -> PerronData:
    """Largest eigenvalue and its positive unit eigenvector."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise NonPositiveEntry("matrix must be square", shape=A.shape)
    bad = np.argwhere(A <= 0)
    if bad.size:
        i, j = bad[0]
        raise NonPositiveEntry(f"entry ({i}, {j}) = {A[i, j]:.3e} is not positive",
                               location=(int(i), int(j)), value=float(A[i, j]))
    A = 0.5 * (A + A.T)
    w, U = np.linalg.eigh(A)
    lam, x = float(w[-1]), U[:, -1].copy()
    if x[np.argmax(np.abs(x))] < 0:
        x = -x
    norm = float(np.linalg.norm(A, 2))
    if np.any(x <= 0):
        raise ResidualFailure("Perron vector has a non-positive entry", x=x)
    resid = float(np.linalg.norm(A @ x - lam * x))
    if resid > tol.rel(norm) * norm:
        raise ResidualFailure("eigen residual too large", residual=resid)
    second = float(w[-2]) if w.shape[0] > 1 else -np.inf
    return PerronData(lam, x, float(A.min()), float(A.max()), second)


def power_iteration(A, iters: int = 500, tol: float = 1e-14):
    """Perron pair by power iteration from the all-ones vector (cross-check only)."""
    A = np.asarray(A, dtype=float)
    x = np.ones(A.shape[0]) / np.sqrt(A.shape[0])
    lam = 0.0
    for _ in range(iters):
        y = A @ x
        lam_new = float(x @ y)
        x = y / np.linalg.norm(y)
        if abs(lam_new - lam) <= tol * abs(lam_new):
            lam = lam_new
            break
        lam = lam_new
    return lam, x


@dataclass(frozen=True)
class BoundReport:
    x_lower: float
    x_upper: float
    lam_lower: float
    product_lower: float
    tolerance: float
    worst_pair: tuple

    @property
    def passed(self) -> bool:
        return min(self.x_lower, self.x_upper, self.lam_lower, self.product_lower) >= -self.tolerance

    def to_dict(self) -> dict:
        return {"x_lower_slack": self.x_lower, "x_upper_slack": self.x_upper,
                "lambda_lower_slack": self.lam_lower, "product_lower_slack": self.product_lower,
                "tolerance": self.tolerance, "worst_pair": list(self.worst_pair),
                "passed": self.passed}


def bound_slacks(pd: PerronData, tol: Tolerances = DEFAULT_TOL) -> BoundReport:
    """Minimal slack of each bound family, without raising."""
    n, c, b, x, lam = pd.n, pd.c, pd.b, pd.x, pd.lam
    rn = np.sqrt(n)
    prod = lam * np.outer(x, x) - c ** 3 / b ** 2
    flat = int(np.argmin(prod))
    return BoundReport(
        x_lower=float((x - c / (b * rn)).min()),
        x_upper=float((b / (c * rn) - x).min()),
        lam_lower=float(lam - n * c),
        product_lower=float(prod.ravel()[flat]),
        tolerance=tol.rel(lam),
        worst_pair=tuple(int(v) for v in np.unravel_index(flat, prod.shape)),
    )


def verify_perron_bounds(pd: PerronData, tol: Tolerances = DEFAULT_TOL) -> BoundReport:
    """Check all three bound families; raise :class:`BoundViolation` on failure."""
    rep = bound_slacks(pd, tol)
    if not rep.passed:
        raise BoundViolation("Perron bound violated", **rep.to_dict())
    return rep
