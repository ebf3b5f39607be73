"""Quasi-random directions and ray shooting onto the boundary of ``K``."""
from __future__ import annotations

import numpy as np
from scipy.stats import norm, qmc

from .errors import PreconditionError, Unbounded
from .pencil import SymmetricPencil, affine_hull_reduce, deepest_point, max_step
from .tolerances import DEFAULT_TOL, Tolerances


def halton(n: int, dim: int, seed: int = 0) -> np.ndarray:
    """``n`` scrambled Halton points in ``[0, 1)^dim``."""
    if n <= 0:
        return np.zeros((0, dim))
    return qmc.Halton(d=dim, scramble=True, seed=seed).random(n)


def sphere_directions(k: int, n: int, seed: int = 0) -> np.ndarray:
    """``n`` quasi-uniform unit vectors in ``R^k``."""
    if k == 1:
        return np.where(np.arange(n) % 2 == 0, 1.0, -1.0)[:, None]
    if k == 2:
        u = halton(n, 1, seed)[:, 0]
        ang = 2.0 * np.pi * u
        return np.stack([np.cos(ang), np.sin(ang)], axis=1)
    u = np.clip(halton(n, k, seed), 1e-12, 1 - 1e-12)
    g = norm.ppf(u)
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def ball_points(center, radius: float, n: int, seed: int = 0) -> np.ndarray:
    """``n`` quasi-random points in the closed ball ``B(center, radius)``."""
    center = np.asarray(center, dtype=float)
    k = center.shape[0]
    dirs = sphere_directions(k, n, seed)
    r = halton(n, 1, seed + 1)[:, 0] ** (1.0 / k)
    return center + radius * r[:, None] * dirs


def interior_center(p: SymmetricPencil, tol: Tolerances = DEFAULT_TOL):
    """Deepest point of ``K`` and its smallest eigenvalue, which must be positive."""
    z, lam = deepest_point(p)
    scale = np.abs(np.linalg.eigvalsh(p.evaluate(z))).max()
    if lam <= tol.rel(scale):
        raise PreconditionError("spectrahedron has no interior point; reduce to its affine hull first",
                                max_min_eigenvalue=lam)
    return z, lam


def boundary_point(p: SymmetricPencil, center, direction) -> np.ndarray:
    """Exit point of the ray ``center + t*direction`` from ``K``."""
    center = np.asarray(center, dtype=float)
    t = max_step(p, center, direction)
    if not np.isfinite(t):
        raise Unbounded("ray never leaves K", direction=np.asarray(direction))
    return center + t * np.asarray(direction, dtype=float)


def sample_boundary(p: SymmetricPencil, n: int, *, seed: int = 0,
                    tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """``n`` points of the boundary of ``K`` in ``R^k``.

    A full dimensional ``K`` is sampled by ray shooting from its deepest
    point.  When ``K`` has empty interior every point of ``K`` is a boundary
    point; points are drawn from the reduced spectrahedron on the affine hull
    (its relative boundary and relative interior) and embedded back.
    """
    z, lam = deepest_point(p)
    scale = np.abs(np.linalg.eigvalsh(p.evaluate(z))).max()
    if lam > tol.rel(scale):
        dirs = sphere_directions(p.k, n, seed)
        return np.array([boundary_point(p, z, d) for d in dirs]).reshape(n, p.k)
    red = affine_hull_reduce(p, tol, seed=seed)
    if red.d == 0 or red.compressed is None:
        return np.repeat(red.offset[None], max(n, 1), axis=0)[:n]
    q = red.compressed
    c, _ = deepest_point(q)
    dirs = sphere_directions(red.d, n, seed)
    frac = halton(n, 1, seed + 7)[:, 0]
    # half on the relative boundary, half strictly inside
    frac[::2] = 1.0
    pts = [c + f * max_step(q, c, d) * d for d, f in zip(dirs, frac)]
    return np.array([red.embed(w) for w in pts])
