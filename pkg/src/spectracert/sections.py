"""Continuous kernel sections on a compact piece of one stratum.

Near a boundary point ``x`` of stratum ``i`` the spectral projection onto the
eigenvalues of ``Q(z)`` below ``epsilon`` (a radius inside the gap
``(0, lambda_{i+1}(x))``) varies continuously.  On points of the same stratum
its range is exactly ``ker Q(z)``, so ``gamma(z) = P(z) v / ||P(z) v||`` is a
continuous unit kernel vector once ``P(z) v`` stays away from zero.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import (PointOutsideSection, PreconditionError, SeedVectorNotFound,
                     SpectralGapViolation)
from .faces import is_extreme
from .pencil import SymmetricPencil, max_step
from .sampling import interior_center
from .strata import GAP_FACTOR, in_closed_stratum, kernel_dimension, locally_closed_witness
from .tolerances import DEFAULT_TOL, Tolerances


def _projection(w: np.ndarray, U: np.ndarray, eps: float, tau: float) -> np.ndarray:
    band = GAP_FACTOR * tau
    near = np.abs(np.abs(w) - eps) <= band
    if np.any(near):
        raise SpectralGapViolation("an eigenvalue sits on the contour |w| = epsilon",
                                   eigenvalues=w, epsilon=eps, band=band)
    S = U[:, np.abs(w) < eps]
    return S @ S.T


def riesz_projection(p: SymmetricPencil, z, epsilon: float, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Spectral projection of ``Q(z)`` for the eigenvalues inside ``|w| < epsilon``.

    For a symmetric matrix the contour integral reduces to the sum of the
    eigenprojections it encloses, which is what is computed here.
    """
    w, U = np.linalg.eigh(p.evaluate(z))
    return _projection(w, U, epsilon, tol.rel(np.abs(w).max(initial=0.0)))


@dataclass(frozen=True, eq=False)
class KernelSection:
    """Unit kernel section ``gamma`` on ``F = E_i cap closed-ball(x, radius)``.

    ``grid`` holds the verified sample of ``F`` (row 0 is ``x``) and
    ``gammas`` the section on it.  ``c`` and ``b`` are the measured infimum
    and supremum of ``gamma(w)^T Q(y) gamma(z)`` over grid pairs.
    """

    pencil: SymmetricPencil
    stratum: int
    x: np.ndarray
    y: np.ndarray
    epsilon: float
    v: np.ndarray
    radius: float
    grid: np.ndarray
    gammas: np.ndarray
    c: float
    b: float
    tol: Tolerances = DEFAULT_TOL
    grid_stats: dict = field(default_factory=dict)

    def contains(self, z) -> bool:
        z = np.asarray(z, dtype=float)
        if np.linalg.norm(z - self.x) > self.radius * (1 + 1e-12):
            return False
        return in_closed_stratum(self.pencil, z, self.stratum, self.tol)

    def gamma(self, z) -> np.ndarray:
        if not self.contains(z):
            raise PointOutsideSection("point is not in the section domain", point=np.asarray(z))
        g = riesz_projection(self.pencil, z, self.epsilon, self.tol) @ self.v
        return g / np.linalg.norm(g)

    def gammas_at(self, nodes: Sequence) -> np.ndarray:
        """Section values at ``nodes`` as the columns of an ``m x n`` matrix."""
        return np.stack([self.gamma(t) for t in nodes], axis=1)

    def to_dict(self) -> dict:
        return {"x": self.x.tolist(), "y": self.y.tolist(), "stratum": self.stratum,
                "epsilon": self.epsilon, "radius": self.radius, "c": self.c, "b": self.b,
                "v": self.v.tolist(), "grid_stats": self.grid_stats}


def kernel_value(ks: KernelSection, z, omega1, omega2) -> float:
    """``gamma(omega2)^T Q(z) gamma(omega1)``."""
    return float(ks.gamma(omega2) @ ks.pencil.evaluate(z) @ ks.gamma(omega1))


def gram_from_gammas(p: SymmetricPencil, z, G: np.ndarray) -> np.ndarray:
    """``G^T Q(z) G`` symmetrized; columns of ``G`` are section values."""
    A = G.T @ p.evaluate(z) @ G
    return 0.5 * (A + A.T)


def gram_matrix(ks: KernelSection, z, nodes: Sequence) -> np.ndarray:
    """Matrix of kernel values ``k_z(t_i, t_j)`` over ``nodes``."""
    return gram_from_gammas(ks.pencil, z, ks.gammas_at(nodes))


# -- construction -----------------------------------------------------------------

def _cone_directions(e: np.ndarray, h: float, grid: int) -> np.ndarray:
    """Unit directions ``e + s T u`` with ``T`` spanning ``e``'s complement."""
    k = e.shape[0]
    if k == 1:
        return e[None]
    T = np.linalg.svd(e[None], full_matrices=True)[2][1:].T
    axis = np.linspace(-h, h, grid)
    mesh = np.stack(np.meshgrid(*([axis] * (k - 1)), indexing="ij"), axis=-1).reshape(-1, k - 1)
    D = e[None] + mesh @ T.T
    return D / np.linalg.norm(D, axis=1, keepdims=True)


def _stratum_grid(p, x, i, radius, grid, center, tol):
    """Boundary points of stratum ``i`` within ``radius`` of ``x``; ``x`` first."""
    rel = x - center
    dist = np.linalg.norm(rel)
    h = min(10.0, 2.0 * radius / dist)
    pts = [x]
    for d in _cone_directions(rel / dist, h, grid):
        b = center + max_step(p, center, d) * d
        if np.linalg.norm(b - x) > radius or np.linalg.norm(b - x) < 1e-14:
            continue
        try:
            if kernel_dimension(p, b, tol) != i:
                continue
        except Exception:  # ambiguous or off-boundary points are not used
            continue
        pts.append(b)
    return np.array(pts)


def _section_on_grid(p, pts, v, eps, tol):
    """Section values on ``pts`` and the worst diagnostics, or a failure reason."""
    gam, res, norms = [], 0.0, []
    for z in pts:
        w, U = np.linalg.eigh(p.evaluate(z))
        tau = tol.rel(np.abs(w).max(initial=0.0))
        try:
            P = _projection(w, U, eps, tau)
        except SpectralGapViolation:
            return None, "spectral gap"
        g = P @ v
        ng = np.linalg.norm(g)
        if ng <= tau:
            return None, "vanishing projection"
        g = g / ng
        res = max(res, float(np.linalg.norm(p.evaluate(z) @ g) / (p.m * tau)))
        gam.append(g)
        norms.append(ng)
    return np.array(gam), {"residual_ratio": res, "min_projection_norm": float(min(norms))}


def build_gamma(p: SymmetricPencil, x, y, tol: Tolerances = DEFAULT_TOL, *,
                radius: Optional[float] = None, grid: int = 32, require_extreme: bool = True,
                seed: int = 0, max_halvings: int = 30) -> KernelSection:
    """Kernel section around ``x`` with positive kernel values at ``y``.

    The radius starts at the locally closed witness radius (or ``radius``)
    and is halved until, on the grid, the spectral gap holds, ``P(z) v`` is
    nonzero, the section is a kernel vector, and every pairwise value
    ``gamma(w)^T Q(y) gamma(z)`` is positive.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    i = kernel_dimension(p, x, tol)
    if require_extreme and not is_extreme(p, x, tol):
        raise PreconditionError("base point is not extreme", point=x)
    if i == p.m:
        raise PreconditionError("Q vanishes at the base point, so K is a single point", point=x)
    w, U = np.linalg.eigh(p.evaluate(x))
    eps = 0.5 * float(w[i])
    V = U[:, :i]
    Qy = p.evaluate(y)
    tau_y = tol.rel(np.abs(np.linalg.eigvalsh(Qy)).max(initial=0.0))
    mu, E = np.linalg.eigh(V.T @ Qy @ V)
    if mu[-1] <= tau_y:
        raise SeedVectorNotFound("Q(y) vanishes on ker Q(x); y equals x or x is not extreme",
                                 max_value=float(mu[-1]))
    v = V @ E[:, -1]
    r = radius if radius is not None else locally_closed_witness(p, x, tol, seed=seed).ball_radius
    center, _ = interior_center(p, tol)
    reasons = []
    for _ in range(max_halvings + 1):
        pts = _stratum_grid(p, x, i, r, grid, center, tol)
        gam, info = _section_on_grid(p, pts, v, eps, tol)
        if gam is not None:
            coherent = bool(np.all(gam @ gam[0] > 0))
            Ky = gam @ Qy @ gam.T
            Ky = 0.5 * (Ky + Ky.T)
            if coherent and Ky.min() > tau_y and info["residual_ratio"] <= 1.0:
                stats = dict(info)
                stats.update(_continuity_stats(pts, gam))
                stats.update({"points": int(pts.shape[0]), "halvings": len(reasons),
                              "rejected": reasons, "confidence": "grid"})
                return KernelSection(p, i, x, y, eps, v, float(r), pts, gam,
                                     float(Ky.min()), float(Ky.max()), tol, stats)
            info = "non-positive kernel value" if coherent else "sign flip"
        reasons.append(info)
        r *= 0.5
    raise SpectralGapViolation("no radius passed the section checks", reasons=reasons)


def _continuity_stats(pts: np.ndarray, gam: np.ndarray) -> dict:
    """Nearest neighbour Hoelder ratio ``||dgamma|| / ||dz||^(1/2)`` (reported only)."""
    if pts.shape[0] < 2:
        return {"holder_ratio": 0.0, "max_neighbor_jump": 0.0}
    d = np.linalg.norm(pts[:, None] - pts[None], axis=2)
    np.fill_diagonal(d, np.inf)
    j = d.argmin(axis=1)
    dz = d[np.arange(len(j)), j]
    dg = np.linalg.norm(gam - gam[j], axis=1)
    return {"holder_ratio": float(np.max(dg / np.sqrt(dz))), "max_neighbor_jump": float(dg.max())}
