"""Faces at boundary points and extreme point tests.

At a boundary point ``x`` with kernel basis ``V`` a direction ``d`` keeps
``x + t d`` in ``K`` for all small ``|t|`` exactly when ``A(d) V = 0``: on
``ker Q(x)`` the quadratic form of ``Q(x) + t A(d)`` is ``t v^T A(d) v``,
which must vanish for both signs of ``t``, and positive semidefiniteness then
forces ``A(d) v = 0``.  Conversely such a ``d`` leaves the kernel untouched
and perturbs the range of ``Q(x)`` only slightly.  So ``x`` is extreme iff
that direction space is trivial.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import PreconditionError
from .pencil import Membership, SymmetricPencil, classify, max_step, membership
from .sampling import sphere_directions
from .strata import kernel_dim_from_spectrum
from .tolerances import DEFAULT_TOL, Tolerances


def _kernel_basis(p: SymmetricPencil, x, tol: Tolerances):
    w, U = np.linalg.eigh(p.evaluate(x))
    tau = tol.rel(np.abs(w).max(initial=0.0))
    if classify(w[0], tau) is not Membership.BOUNDARY:
        raise PreconditionError("point is not on the boundary", min_eigenvalue=float(w[0]))
    i = kernel_dim_from_spectrum(w, tau)
    return U[:, :i], U[:, i:], w, tau


def kernel_projection(p: SymmetricPencil, x, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Orthogonal projection onto ``ker Q(x)``."""
    V = _kernel_basis(p, x, tol)[0]
    return V @ V.T


@dataclass(frozen=True, eq=False)
class FaceDescriptor:
    """Smallest face of ``K`` containing ``x``, described near ``x``.

    ``directions`` has orthonormal columns spanning the two-sided feasible
    directions; the face is ``K`` intersected with ``x + span(directions)``.
    """

    base: np.ndarray
    projection: np.ndarray
    kernel_basis: np.ndarray
    directions: np.ndarray
    kernel_dim: int

    @property
    def dim(self) -> int:
        return self.directions.shape[1]

    @property
    def is_singleton(self) -> bool:
        return self.dim == 0

    def to_dict(self) -> dict:
        return {"base": self.base.tolist(), "kernel_dim": self.kernel_dim,
                "D0_dim": self.dim, "D0": self.directions.T.tolist(),
                "is_singleton": self.is_singleton}


def face_direction_space(p: SymmetricPencil, x, tol: Tolerances = DEFAULT_TOL) -> FaceDescriptor:
    """Null space of ``d -> A(d) V`` computed by SVD."""
    x = np.asarray(x, dtype=float)
    V, _, w, tau = _kernel_basis(p, x, tol)
    k = p.k
    if k == 0:
        D = np.zeros((0, 0))
    else:
        M = np.stack([(A @ V).ravel() for A in p.coeffs], axis=1)
        _, sv, Vt = np.linalg.svd(M, full_matrices=True)
        rank = int(np.sum(sv > tau))
        D = Vt[rank:].T
    return FaceDescriptor(x, V @ V.T, V, D, V.shape[1])


def is_extreme(p: SymmetricPencil, x, tol: Tolerances = DEFAULT_TOL) -> bool:
    """Whether ``x`` is an extreme point of ``K``; interior points are not."""
    verdict = membership(p, x, tol)
    if verdict.status is Membership.OUTSIDE:
        raise PreconditionError("point is outside K", min_eigenvalue=verdict.min_eigenvalue)
    if verdict.status is Membership.INTERIOR:
        return False
    return face_direction_space(p, x, tol).is_singleton


# -- independent geometric oracle ------------------------------------------------

@dataclass(frozen=True)
class OracleVerdict:
    is_extreme: bool
    confidence: str
    probes: int
    witness: Optional[np.ndarray] = None
    extent: Optional[float] = None

    def to_dict(self) -> dict:
        return {"is_extreme": self.is_extreme, "confidence": self.confidence,
                "probes": self.probes,
                "witness": None if self.witness is None else self.witness.tolist(),
                "extent": self.extent}


def extreme_oracle_geometric(p: SymmetricPencil, x, tol: Tolerances = DEFAULT_TOL, *,
                             budget: int = 16, seed: int = 0, t_max: Optional[float] = None,
                             neighbors: Optional[Sequence] = None,
                             use_face_directions: bool = True) -> OracleVerdict:
    """Look for a segment through ``x`` inside ``K`` by direct feasibility probes.

    A direction ``d`` is a witness when both ``x + t d`` and ``x - t d`` pass
    the membership predicate at ``t = t_seg``; convexity then puts the whole
    segment in ``K``.  ``t_seg`` sits well above the chord length that the
    membership slack alone admits on a curved boundary.  Probe directions are
    the face direction basis (unless disabled), the coordinate axes, chords
    to ``neighbors``, and ``budget`` quasi-random unit vectors; when no probe
    succeeds the answer is "extreme" with confidence ``probes_exhausted``.
    """
    x = np.asarray(x, dtype=float)
    k = p.k
    slack = 1e-3 * tol.abs
    Qx = p.evaluate(x)
    scale = 1.0 + np.abs(np.linalg.eigvalsh(Qx)).max(initial=0.0)
    t_seg = 10.0 * np.sqrt(2.0 * slack * scale)

    def ok(z):
        w = np.linalg.eigvalsh(p.evaluate(z))
        return w[0] >= -slack * (1.0 + np.abs(w).max())

    dirs = []
    if use_face_directions:
        try:
            dirs.extend(face_direction_space(p, x, tol).directions.T)
        except Exception:  # ambiguous kernels: fall back to blind probes
            pass
    dirs.extend(np.eye(k))
    for nb in neighbors or ():
        d = np.asarray(nb, dtype=float) - x
        if np.linalg.norm(d) > 0:
            dirs.append(d)
    if budget > 0 and k > 0:
        dirs.extend(sphere_directions(k, budget, seed))
    probes = 0
    for d in dirs:
        nd = np.linalg.norm(d)
        if nd == 0:
            continue
        d = d / nd
        probes += 1
        if ok(x + t_seg * d) and ok(x - t_seg * d):
            cap = t_max if t_max is not None else 1e6
            ext = min(max_step(p, x, d, slack=slack, t_cap=cap),
                      max_step(p, x, -d, slack=slack, t_cap=cap))
            return OracleVerdict(False, "witness", probes, d, float(ext))
    return OracleVerdict(True, "probes_exhausted", probes)


# -- walking to extreme points -----------------------------------------------------

def walk_to_extreme(p: SymmetricPencil, x, tol: Tolerances = DEFAULT_TOL, *,
                    sign: float = 1.0, max_steps: Optional[int] = None) -> np.ndarray:
    """Move from the boundary point ``x`` inside its face until the face is a point.

    Each step travels along a face direction to the relative boundary of the
    face, which raises the kernel dimension, so at most ``m`` steps occur.
    Feasibility inside the face is tested on ``W^T Q W`` with ``W`` spanning
    the range of ``Q(x)``, which is positive definite at the start of a step.
    ``sign`` flips the first face direction and so picks the other end.
    """
    x = np.asarray(x, dtype=float)
    for _ in range(max_steps if max_steps is not None else p.m + 1):
        face = face_direction_space(p, x, tol)
        if face.is_singleton:
            return x
        _, W, _, _ = _kernel_basis(p, x, tol)
        D = face.directions * (1.0 if sign >= 0 else -1.0)
        local = SymmetricPencil(W.T @ p.evaluate(x) @ W,
                                [W.T @ p.evaluate(D[:, j], homogeneous=True) @ W for j in range(D.shape[1])])
        t = max_step(local, np.zeros(D.shape[1]), np.eye(D.shape[1])[0])
        if not np.isfinite(t):
            t = max_step(local, np.zeros(D.shape[1]), -np.eye(D.shape[1])[0])
            if not np.isfinite(t):
                raise PreconditionError("face contains a line; K is not pointed")
            t = -t
        x = x + t * D[:, 0]
    return x


# -- closedness of the extreme set ---------------------------------------------------

@dataclass(frozen=True)
class ClosednessReport:
    """Sampled look at whether extreme samples accumulate at non-extreme ones.

    Always labelled HEURISTIC: closedness cannot be decided from finitely
    many samples.
    """

    status: str
    radius: float
    suspects: list = field(default_factory=list)
    label: str = "HEURISTIC"

    def to_dict(self) -> dict:
        return {"label": self.label, "status": self.status, "radius": self.radius,
                "suspects": list(self.suspects)}


def closedness_heuristic(points, extreme_flags, radius: Optional[float] = None) -> ClosednessReport:
    """Flag non-extreme samples near two or more distinct extreme samples.

    ``radius`` defaults to twice the median nearest-neighbour spacing.
    """
    pts = np.asarray(points, dtype=float)
    flags = np.asarray(extreme_flags, dtype=bool)
    n = pts.shape[0]
    if n < 2:
        return ClosednessReport("consistent", 0.0)
    dist = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=2)
    if radius is None:
        nn = np.where(np.eye(n, dtype=bool), np.inf, dist).min(axis=1)
        nn = nn[nn > 1e-9]
        radius = 2.0 * float(np.median(nn)) if nn.size else 0.0
    suspects = []
    ext = np.flatnonzero(flags)
    for j in np.flatnonzero(~flags):
        near = ext[dist[j, ext] < radius]
        if near.size >= 2:
            sub = dist[np.ix_(near, near)]
            if sub.max() > 1e-9:
                suspects.append(int(j))
    return ClosednessReport("suspect" if suspects else "consistent", float(radius), suspects)
