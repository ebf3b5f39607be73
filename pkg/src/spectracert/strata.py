"""Boundary strata ``K_i = {z in bd K : dim ker Q(z) = i}``.

``E_j`` denotes the closed union of the strata ``K_n`` with ``n >= j``; the
strata are locally closed because ``K_i = E_i minus E_{i+1}``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import minimize

from .errors import AmbiguousKernelDim, NotOnBoundary, WitnessSearchFailed
from .pencil import Membership, SymmetricPencil, classify, max_step
from .sampling import ball_points, interior_center
from .tolerances import DEFAULT_TOL, Tolerances

GAP_FACTOR = 10.0


def spectrum(p: SymmetricPencil, z):
    """Sorted eigenvalues of ``Q(z)`` and the relative tolerance for them."""
    w = np.linalg.eigvalsh(p.evaluate(z))
    return w, np.abs(w).max(initial=0.0)


def kernel_dim_from_spectrum(w: np.ndarray, tau: float) -> int:
    """Number of near-zero eigenvalues, refusing to guess inside the gap band.

    ``w`` is sorted ascending and belongs to a point of ``K``.
    """
    i = int(np.sum(w <= tau))
    if i < w.shape[0] and w[i] <= GAP_FACTOR * tau:
        raise AmbiguousKernelDim(
            f"eigenvalue {w[i]:.3e} lies between tau and {GAP_FACTOR:g}*tau",
            eigenvalues=w, tau=tau)
    return i


def kernel_dimension(p: SymmetricPencil, z, tol: Tolerances = DEFAULT_TOL) -> int:
    """Stratum index of the boundary point ``z``."""
    w, scale = spectrum(p, z)
    tau = tol.rel(scale)
    status = classify(w[0], tau)
    if status is not Membership.BOUNDARY:
        raise NotOnBoundary(f"point is {status.value}, not on the boundary",
                            point=np.asarray(z, dtype=float), min_eigenvalue=float(w[0]))
    return kernel_dim_from_spectrum(w, tau)


@dataclass(frozen=True)
class StratumRecord:
    point: np.ndarray
    stratum: int
    min_eig: float
    gap: Optional[float]

    def to_dict(self) -> dict:
        return {"point": [float(v) for v in self.point], "stratum": self.stratum,
                "min_eig": self.min_eig, "gap": self.gap}


def stratify_samples(p: SymmetricPencil, points: Sequence, tol: Tolerances = DEFAULT_TOL) -> list:
    """Label every boundary point with its stratum.

    Returns one :class:`StratumRecord` per input point, in input order.  The
    ``gap`` field is the first nonzero eigenvalue (``None`` on ``K_m``).
    """
    out = []
    for idx, z in enumerate(points):
        z = np.asarray(z, dtype=float)
        try:
            i = kernel_dimension(p, z, tol)
        except NotOnBoundary as exc:
            exc.details["index"] = idx
            raise
        except AmbiguousKernelDim as exc:
            exc.details["index"] = idx
            raise
        w, _ = spectrum(p, z)
        gap = float(w[i]) if i < p.m else None
        out.append(StratumRecord(z, i, float(w[0]), gap))
    return out


def in_closed_stratum(p: SymmetricPencil, z, j: int, tol: Tolerances = DEFAULT_TOL) -> bool:
    """Whether ``z`` lies in ``E_j`` (boundary point with kernel dimension >= j)."""
    w, scale = spectrum(p, z)
    tau = tol.rel(scale)
    if classify(w[0], tau) is not Membership.BOUNDARY:
        return False
    return int(np.sum(np.abs(w) <= tau)) >= j


@dataclass(frozen=True)
class LocallyClosedWitness:
    """Closed piece ``F = E_i cap closed-ball(center, epsilon/2)`` inside ``K_i``.

    ``certified`` is true when ``epsilon`` came from the Weyl bound
    ``lambda_{i+1}(x) / L`` rather than from sampling.
    """

    center: np.ndarray
    epsilon: float
    stratum: int
    certified: bool
    probe_min: Optional[float] = None

    @property
    def ball_radius(self) -> float:
        return 0.5 * self.epsilon

    @property
    def neighborhood_radius(self) -> float:
        return 0.5 * self.epsilon

    def contains(self, p: SymmetricPencil, z, tol: Tolerances = DEFAULT_TOL) -> bool:
        z = np.asarray(z, dtype=float)
        return (np.linalg.norm(z - self.center) <= self.ball_radius * (1 + 1e-12)
                and in_closed_stratum(p, z, self.stratum, tol))

    def to_dict(self) -> dict:
        return {"center": self.center.tolist(), "epsilon": self.epsilon,
                "ball_radius": self.ball_radius, "stratum": self.stratum,
                "neighborhood_radius": self.neighborhood_radius,
                "certified": self.certified, "probe_min": self.probe_min}


def _probe_next_eigenvalue(p, x, i, eps, center, n, seed):
    """Smallest ``lambda_{i+1}`` found on boundary points within ``eps`` of ``x``."""
    L = max(p.lipschitz(), 1e-300)

    def boundary_at(u):
        nu = np.linalg.norm(u)
        if nu == 0:
            return None
        d = u / nu
        t = max_step(p, center, d)
        return center + t * d

    def objective(u):
        b = boundary_at(u)
        if b is None:
            return np.inf
        lam = np.linalg.eigvalsh(p.evaluate(b))[i]
        return lam + 10.0 * L * max(0.0, np.linalg.norm(b - x) - eps)

    targets = ball_points(x, eps, n, seed)
    starts, best = [], np.inf
    for tgt in targets:
        u = tgt - center
        b = boundary_at(u)
        if b is None or np.linalg.norm(b - x) > eps:
            continue
        val = float(np.linalg.eigvalsh(p.evaluate(b))[i])
        starts.append((val, u))
        best = min(best, val)
    starts.sort(key=lambda s: s[0])
    for _, u in starts[:2]:
        res = minimize(objective, u, method="Nelder-Mead",
                       options={"xatol": 1e-13, "fatol": 1e-15, "maxiter": 200})
        b = boundary_at(res.x)
        if b is not None and np.linalg.norm(b - x) <= eps:
            best = min(best, float(np.linalg.eigvalsh(p.evaluate(b))[i]))
    return best


def locally_closed_witness(p: SymmetricPencil, x, tol: Tolerances = DEFAULT_TOL, *,
                           seed: int = 0, probe_samples: int = 48) -> LocallyClosedWitness:
    """Radius ``epsilon`` with ``B(x, epsilon)`` disjoint from ``E_{i+1}``.

    Sweeps ``epsilon`` over ``1, 1/2, ..., 2^-20`` and accepts the first value
    that is either covered by the Weyl bound (every eigenvalue moves by at
    most ``L ||z - x||``) or survives a sampled probe of ``lambda_{i+1}`` on
    nearby boundary points.
    """
    x = np.asarray(x, dtype=float)
    i = kernel_dimension(p, x, tol)
    if i == p.m:
        return LocallyClosedWitness(x, 1.0, i, True)
    w, scale = spectrum(p, x)
    L = p.lipschitz()
    eps_cert = w[i] / L if L > 0 else np.inf
    center = None
    for j in range(21):
        eps = 2.0 ** -j
        if eps <= eps_cert:
            return LocallyClosedWitness(x, eps, i, True)
        if center is None:
            center, _ = interior_center(p, tol)
        found = _probe_next_eigenvalue(p, x, i, eps, center, probe_samples, seed)
        if found > GAP_FACTOR * tol.rel(scale):
            return LocallyClosedWitness(x, eps, i, False, float(found))
    raise WitnessSearchFailed("no radius in the sweep avoids the next stratum", point=x)


def detect_full_kernel_singleton(p: SymmetricPencil, tol: Tolerances = DEFAULT_TOL):
    """Point ``z`` with ``Q(z) = 0``, or ``None``.

    Such a point forces ``K = {z}`` when ``K`` is compact, because every ray
    from another point of ``K`` through ``z`` would stay in ``K``.
    """
    if p.k == 0:
        return np.zeros(0) if np.abs(p.A0).max(initial=0.0) <= tol.abs else None
    M = p.coeffs.reshape(p.k, -1).T
    z = np.linalg.lstsq(M, -p.A0.ravel(), rcond=None)[0]
    resid = np.linalg.norm(p.evaluate(z), 2)
    if resid <= tol.rel(np.linalg.norm(p.A0, 2)):
        return z
    return None
