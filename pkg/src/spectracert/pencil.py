"""Symmetric matrix pencils and the spectrahedra they define.

A pencil is the affine map ``Q(z) = A0 + sum_i z_i A_i`` into real symmetric
``m x m`` matrices; its spectrahedron is ``K = {z : Q(z) >= 0}``.  This module
holds the pencil types, evaluation, membership classification, the
complex-to-real doubling, and the reduction of a lower dimensional ``K`` to a
full dimensional spectrahedron on its affine hull.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import linalg

from .errors import (AsymmetryTooLarge, DimensionMismatch, EmptySpectrahedron,
                     MalformedHermitian, ReductionFailed, Unbounded)
from .tolerances import DEFAULT_TOL, Tolerances

UNBOUNDED_EXTENT = 1e6


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


def _symmetrize_stack(mats: np.ndarray, limit: float, what: str) -> np.ndarray:
    asym = np.abs(mats - np.swapaxes(mats, -1, -2))
    if asym.size and asym.max() > limit:
        idx = np.unravel_index(int(np.argmax(asym)), asym.shape)
        raise AsymmetryTooLarge(
            f"{what} is not symmetric (asymmetry {asym.max():.3e} > {limit:g})",
            location=tuple(int(i) for i in idx), asymmetry=float(asym.max()))
    return 0.5 * (mats + np.swapaxes(mats, -1, -2))


def _as_stack(coeffs, m: int, what: str) -> np.ndarray:
    stack = np.asarray(coeffs, dtype=float)
    if stack.size == 0:
        return np.zeros((0, m, m))
    if stack.ndim == 2:
        stack = stack[None]
    if stack.ndim != 3 or stack.shape[1:] != (m, m):
        raise DimensionMismatch(
            f"{what} must be a list of {m}x{m} matrices, got shape {stack.shape}")
    return stack


@dataclass(frozen=True, eq=False)
class SymmetricPencil:
    """Real symmetric pencil ``Q(z) = A0 + sum_i z_i A_i``.

    Inputs are symmetrized on construction; an asymmetry above
    ``tol.asymmetry`` is rejected.  ``k = 0`` is allowed and describes the
    constant pencil that arises when a spectrahedron is a single point.
    """

    A0: np.ndarray
    coeffs: np.ndarray
    tol: Tolerances = DEFAULT_TOL

    def __post_init__(self):
        A0 = np.asarray(self.A0, dtype=float)
        if A0.ndim != 2 or A0.shape[0] != A0.shape[1]:
            raise DimensionMismatch(f"A0 must be square, got shape {A0.shape}")
        m = A0.shape[0]
        stack = _as_stack(self.coeffs, m, "coeffs")
        A0 = _symmetrize_stack(A0, self.tol.asymmetry, "A0")
        stack = _symmetrize_stack(stack, self.tol.asymmetry, "coeffs")
        object.__setattr__(self, "A0", _frozen(A0))
        object.__setattr__(self, "coeffs", _frozen(stack))

    @property
    def m(self) -> int:
        return self.A0.shape[0]

    @property
    def k(self) -> int:
        return self.coeffs.shape[0]

    def evaluate(self, z, homogeneous: bool = False) -> np.ndarray:
        """``A0 + sum z_i A_i`` (or ``sum z_i A_i`` when ``homogeneous``)."""
        z = np.asarray(z, dtype=float).reshape(-1)
        if z.shape[0] != self.k:
            raise DimensionMismatch(f"point has dimension {z.shape[0]}, pencil expects {self.k}")
        Q = np.tensordot(z, self.coeffs, axes=1) if self.k else np.zeros((self.m, self.m))
        if not homogeneous:
            Q = Q + self.A0
        # exact symmetry regardless of the summation order used above
        return 0.5 * (Q + Q.T)

    __call__ = evaluate

    def lipschitz(self) -> float:
        """Upper bound ``L`` with ``||A(d)||_2 <= L ||d||_2`` for all ``d``.

        Uses ``||A(d)||_2 <= ||A(d)||_F = ||M d||`` where the columns of ``M``
        are the vectorized coefficient matrices.
        """
        if self.k == 0:
            return 0.0
        M = self.coeffs.reshape(self.k, -1).T
        return float(np.linalg.norm(M, 2))

    def injectivity_margin(self) -> float:
        """Smallest singular value of the vectorized coefficients.

        ``z -> Q(z)`` is injective exactly when this is positive, and then
        ``||Q(z) - Q(w)||_F >= margin * ||z - w||``.
        """
        if self.k == 0:
            return np.inf
        M = self.coeffs.reshape(self.k, -1).T
        return float(np.linalg.svd(M, compute_uv=False)[-1])

    def to_dict(self) -> dict:
        return {"m": self.m, "k": self.k, "A0": self.A0.tolist(),
                "A": [a.tolist() for a in self.coeffs]}


@dataclass(frozen=True, eq=False)
class HermitianPencil:
    """Complex Hermitian pencil stored as real part ``X`` and imaginary part ``Y``.

    ``X[0], Y[0]`` belong to the constant term, ``X[i], Y[i]`` to ``z_i``.
    """

    X: np.ndarray
    Y: np.ndarray
    tol: Tolerances = DEFAULT_TOL

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        Y = np.asarray(self.Y, dtype=float)
        if X.ndim != 3 or X.shape != Y.shape or X.shape[1] != X.shape[2]:
            raise MalformedHermitian(
                f"real and imaginary stacks must both be (k+1, m, m), got {X.shape} and {Y.shape}")
        lim = self.tol.asymmetry
        sx = np.abs(X - np.swapaxes(X, 1, 2)).max(initial=0.0)
        sy = np.abs(Y + np.swapaxes(Y, 1, 2)).max(initial=0.0)
        if sx > lim or sy > lim:
            raise MalformedHermitian(
                f"matrices are not Hermitian (real asymmetry {sx:.3e}, imaginary symmetry {sy:.3e})")
        X = 0.5 * (X + np.swapaxes(X, 1, 2))
        Y = 0.5 * (Y - np.swapaxes(Y, 1, 2))
        object.__setattr__(self, "X", _frozen(X))
        object.__setattr__(self, "Y", _frozen(Y))

    @classmethod
    def from_complex(cls, A0, coeffs: Sequence, tol: Tolerances = DEFAULT_TOL) -> "HermitianPencil":
        mats = np.asarray([A0, *coeffs], dtype=complex)
        return cls(mats.real, mats.imag, tol)

    @property
    def m(self) -> int:
        return self.X.shape[1]

    @property
    def k(self) -> int:
        return self.X.shape[0] - 1

    def evaluate(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=float).reshape(-1)
        if z.shape[0] != self.k:
            raise DimensionMismatch(f"point has dimension {z.shape[0]}, pencil expects {self.k}")
        w = np.concatenate([[1.0], z])
        H = np.tensordot(w, self.X, axes=1) + 1j * np.tensordot(w, self.Y, axes=1)
        return 0.5 * (H + H.conj().T)

    __call__ = evaluate

    def to_dict(self) -> dict:
        return {"m": self.m, "k": self.k, "A0": self.X[0].tolist(),
                "A": [a.tolist() for a in self.X[1:]],
                "Y0": self.Y[0].tolist(), "Y": [a.tolist() for a in self.Y[1:]]}


def evaluate(p: SymmetricPencil, z, homogeneous: bool = False) -> np.ndarray:
    return p.evaluate(z, homogeneous=homogeneous)


def symmetrize_hermitian(h: HermitianPencil) -> SymmetricPencil:
    """Real ``2m x 2m`` pencil with blocks ``[[X, -Y], [Y, X]]``.

    Its value at ``z`` has the spectrum of ``h(z)`` with every multiplicity
    doubled, so both pencils define the same spectrahedron.
    """
    blocks = np.block([[h.X, -h.Y], [h.Y, h.X]])
    return SymmetricPencil(blocks[0], blocks[1:], h.tol)


# -- membership ---------------------------------------------------------------

class Membership(str, enum.Enum):
    INTERIOR = "interior"
    BOUNDARY = "boundary"
    OUTSIDE = "outside"


@dataclass(frozen=True)
class MembershipVerdict:
    status: Membership
    min_eigenvalue: float
    tolerance_used: float

    @property
    def in_K(self) -> bool:
        return self.status is not Membership.OUTSIDE

    def to_dict(self) -> dict:
        return {"class": self.status.value, "min_eigenvalue": self.min_eigenvalue,
                "tolerance_used": self.tolerance_used}


def classify(min_eig: float, tau: float) -> Membership:
    if min_eig > tau:
        return Membership.INTERIOR
    if min_eig < -tau:
        return Membership.OUTSIDE
    return Membership.BOUNDARY


def membership(p, z, tol: Tolerances = DEFAULT_TOL) -> MembershipVerdict:
    """Classify ``z`` as interior, boundary or outside of ``K``."""
    Q = p.evaluate(z)
    w = np.linalg.eigvalsh(Q)
    tau = tol.rel(np.abs(w).max(initial=0.0))
    lam = float(w[0]) if w.size else np.inf
    return MembershipVerdict(classify(lam, tau), lam, tau)


def min_eig(p: SymmetricPencil, z) -> float:
    return float(np.linalg.eigvalsh(p.evaluate(z))[0])


def _exact_exit(p: SymmetricPencil, origin, direction):
    """Exit time ``1/mu`` from the pencil ``-A(d) v = mu Q(origin) v``.

    Only valid when ``Q(origin)`` is positive definite; returns ``None``
    otherwise so the caller falls back to plain bisection.
    """
    Q = p.evaluate(origin)
    try:
        C = np.linalg.cholesky(Q)
    except np.linalg.LinAlgError:
        return None
    Ad = p.evaluate(direction, homogeneous=True)
    Ci = np.linalg.solve(C, np.eye(p.m))
    G = -Ci @ Ad @ Ci.T
    mu = np.linalg.eigvalsh(0.5 * (G + G.T))[-1]
    return 1.0 / mu if mu > 0 else np.inf


def max_step(p: SymmetricPencil, origin, direction, *, slack: float = 0.0,
             t_cap: float = UNBOUNDED_EXTENT, iters: int = 200) -> float:
    """Largest ``t`` in ``[0, t_cap]`` keeping ``origin + t*direction`` feasible.

    Feasible means ``min eig Q >= -slack*(1 + ||Q||)``.  Returns ``inf`` when
    the ray is still feasible at ``t_cap`` and ``0.0`` when the origin itself
    is infeasible.
    """
    origin = np.asarray(origin, dtype=float)
    direction = np.asarray(direction, dtype=float)

    def feasible(t):
        w = np.linalg.eigvalsh(p.evaluate(origin + t * direction))
        return w[0] >= -slack * (1.0 + np.abs(w).max())

    if not feasible(0.0):
        return 0.0
    lo, hi = 0.0, 1.0
    guess = _exact_exit(p, origin, direction)
    if guess is not None:
        if not np.isfinite(guess) or guess > t_cap:
            if feasible(t_cap):
                return np.inf
        else:
            # accept the generalized-eigenvalue estimate once the predicate
            # confirms it, nudging inward by a few ulps if needed
            if not feasible(guess * (1 + 1e-9)):
                t = guess
                for _ in range(8):
                    if feasible(t):
                        return t
                    t *= 1 - 1e-12
    while feasible(hi):
        lo = hi
        hi *= 2.0
        if hi > t_cap:
            return np.inf
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if feasible(mid):
            lo = mid
        else:
            hi = mid
    return lo


# -- deepest point --------------------------------------------------------------

def deepest_point(p: SymmetricPencil, *, gap: float = 1e-11, z0=None,
                  max_outer: int = 40, max_inner: int = 100):
    """Maximize ``min eig Q(z)`` along a log-barrier path.

    Solves ``max t s.t. Q(z) - t I >= 0`` by Newton steps on
    ``-s t - log det(Q(z) - t I)`` with ``s`` increased geometrically.  The
    path ends in the relative interior of the set of maximizers, which is
    what the affine-hull reduction relies on when the maximum is zero.

    Returns
    -------
    z : ndarray
    lam : float
        ``min eig Q(z)`` at the returned point.
    """
    k, m = p.k, p.m
    z = np.zeros(k) if z0 is None else np.asarray(z0, dtype=float).copy()
    if k == 0:
        return z, float(np.linalg.eigvalsh(p.A0)[0])
    I = np.eye(m)
    dirs = np.concatenate([p.coeffs, -I[None]], axis=0)
    scale = 1.0 + np.abs(np.linalg.eigvalsh(p.evaluate(z))).max()
    t = float(np.linalg.eigvalsh(p.evaluate(z))[0]) - scale
    s = 1.0 / scale

    def objective(zz, tt):
        G = p.evaluate(zz) - tt * I
        try:
            c = linalg.cholesky(G, lower=True)
        except linalg.LinAlgError:
            return np.inf
        return -s * tt - 2.0 * np.log(np.diag(c)).sum()

    for _ in range(max_outer):
        for _ in range(max_inner):
            G = p.evaluate(z) - t * I
            c = linalg.cho_factor(G, lower=True)
            C = np.stack([linalg.cho_solve(c, D) for D in dirs])
            grad = -np.trace(C, axis1=1, axis2=2)
            grad[-1] -= s
            H = np.einsum("aij,bji->ab", C, C)
            d = 1.0 / np.sqrt(np.maximum(np.diag(H), 1e-300))
            Hs = H * d[:, None] * d[None, :]
            try:
                step = -d * np.linalg.solve(Hs, d * grad)
            except np.linalg.LinAlgError:
                step = -d * np.linalg.lstsq(Hs, d * grad, rcond=None)[0]
            dec = float(-grad @ step)
            if dec < 1e-12:
                break
            f0 = objective(z, t)
            a = 1.0
            while a > 1e-14:
                zn, tn = z + a * step[:-1], t + a * step[-1]
                fn = objective(zn, tn)
                if fn <= f0 - 0.25 * a * dec:
                    break
                a *= 0.5
            else:
                break
            z, t = zn, tn
            if not np.all(np.isfinite(z)) or np.linalg.norm(z) > UNBOUNDED_EXTENT:
                raise Unbounded("barrier path diverged; K is unbounded or empty with a recession direction",
                                norm=float(np.linalg.norm(z)))
        if m / s < gap * scale:
            break
        s *= 10.0
    return z, float(np.linalg.eigvalsh(p.evaluate(z))[0])


# -- boundedness probe --------------------------------------------------------------

@dataclass(frozen=True)
class BoundednessProbe:
    bounded: bool
    max_extent: float
    diameter: float
    directions: int


def boundedness_probe(p: SymmetricPencil, z0, tol: Tolerances = DEFAULT_TOL, *,
                      seed: int = 0, n_directions: Optional[int] = None) -> BoundednessProbe:
    """Shoot ``2k + 64`` random rays from the feasible point ``z0``.

    ``K`` is declared unbounded if any ray stays feasible past ``1e6``.  This
    is a probe and not a proof.  The diameter estimate is the longest chord
    through ``z0`` along the probed directions.
    """
    k = p.k
    if k == 0:
        return BoundednessProbe(True, 0.0, 0.0, 0)
    n = n_directions if n_directions is not None else 2 * k + 64
    rng = np.random.default_rng(seed)
    half = max(1, n // 2)
    D = rng.standard_normal((half, k))
    D /= np.linalg.norm(D, axis=1, keepdims=True)
    z0 = np.asarray(z0, dtype=float)
    extent, diameter = 0.0, 0.0
    for d in D:
        tp = max_step(p, z0, d, slack=tol.abs)
        tm = max_step(p, z0, -d, slack=tol.abs)
        if not (np.isfinite(tp) and np.isfinite(tm)):
            return BoundednessProbe(False, np.inf, np.inf, 2 * half)
        extent = max(extent, tp, tm)
        diameter = max(diameter, tp + tm)
    return BoundednessProbe(True, extent, diameter, 2 * half)


# -- affine hull reduction ----------------------------------------------------

@dataclass(frozen=True, eq=False)
class AffineReduction:
    """Affine chart ``z = offset + basis @ w`` of ``aff(K)``.

    ``reduced`` is the pencil ``w -> Q(offset + basis @ w)``.  It agrees with
    the original pencil entrywise but still carries the kernel common to all
    of ``K``.  ``compressed`` is ``W^T reduced(w) W`` with ``W`` spanning the
    complement of that common kernel; it is positive definite on the relative
    interior of ``K``, so its membership test sees a nonempty interior.  It is
    ``None`` when the compression leaves nothing (``Q`` vanishes on ``K``).
    """

    d: int
    basis: np.ndarray
    offset: np.ndarray
    reduced: SymmetricPencil
    compressed: Optional[SymmetricPencil]
    complement: np.ndarray
    relint_point: np.ndarray

    def embed(self, w) -> np.ndarray:
        w = np.asarray(w, dtype=float).reshape(-1)
        if w.shape[0] != self.d:
            raise DimensionMismatch(f"reduced point has dimension {w.shape[0]}, expected {self.d}")
        return self.offset + self.basis @ w

    def project(self, z) -> np.ndarray:
        """Coordinates of the orthogonal projection of ``z`` onto the hull."""
        return self.basis.T @ (np.asarray(z, dtype=float) - self.offset)

    @property
    def full_dimensional(self) -> bool:
        return self.d == self.basis.shape[0]

    def injectivity_defect(self) -> float:
        """``||B^T B - I||``; zero for an injective orthonormal chart."""
        return float(np.abs(self.basis.T @ self.basis - np.eye(self.d)).max(initial=0.0))

    def to_dict(self) -> dict:
        return {"d": self.d, "k": int(self.basis.shape[0]), "basis": self.basis.tolist(),
                "offset": self.offset.tolist(), "relint_point": self.relint_point.tolist(),
                "compressed_size": 0 if self.compressed is None else self.compressed.m,
                "full_dimensional": self.full_dimensional}


# thresholds separating the common kernel from the rest of the spectrum at the
# end of the barrier path
_KERNEL_CUT = 1e-6
_KERNEL_GAP = 1e-4


def _reduce_once(cur: SymmetricPencil, w: np.ndarray, tol: Tolerances):
    Qw = cur.evaluate(w)
    evals, evecs = np.linalg.eigh(Qw)
    scale = 1.0 + np.abs(evals).max(initial=0.0)
    r = int(np.sum(evals <= _KERNEL_CUT * scale))
    if r == 0:
        raise ReductionFailed("no common kernel found although the pencil has no interior point",
                              min_eigenvalue=float(evals[0]))
    if r < cur.m and evals[r] < _KERNEL_GAP * scale:
        raise ReductionFailed("common kernel is not separated from the rest of the spectrum",
                              eigenvalues=evals)
    V0 = evecs[:, :r]
    for _ in range(3):
        wc, N = _kernel_affine_set(cur, w, V0)
        resid = float(np.abs(cur.evaluate(wc) @ V0).max())
        if resid > _KERNEL_CUT * scale:
            raise ReductionFailed("affine equations for the common kernel are inconsistent",
                                  residual=resid)
        # the common kernel restricted to the affine set is an exact null space
        stack = np.vstack([cur.evaluate(wc)] + [cur.evaluate(N[:, j], homogeneous=True)
                                                for j in range(N.shape[1])])
        _, _, Vt = np.linalg.svd(stack)
        V0 = Vt[cur.m - r:].T
    wc, N = _kernel_affine_set(cur, w, V0)
    full = np.linalg.svd(V0, full_matrices=True)[0]
    Wc = full[:, r:]
    return wc, N, Wc


def _kernel_affine_set(cur: SymmetricPencil, w: np.ndarray, V0: np.ndarray):
    """Affine set ``{w : Q(w) V0 = 0}`` as a point ``wc`` and direction basis ``N``."""
    r = V0.shape[1]
    if cur.k:
        M = np.stack([(A @ V0).ravel() for A in cur.coeffs], axis=1)
    else:
        M = np.zeros((cur.m * r, 0))
    U, S, Vt = np.linalg.svd(M, full_matrices=True)
    s_max = S[0] if S.size else 0.0
    rank = int(np.sum(S > 1e-8 * max(1.0, s_max)))
    N = Vt[rank:].T
    rhs = -(cur.evaluate(w) @ V0).ravel()
    corr = Vt[:rank].T @ ((U[:, :rank].T @ rhs) / S[:rank]) if rank else np.zeros(cur.k)
    return w + corr, N


def affine_hull_reduce(p: SymmetricPencil, tol: Tolerances = DEFAULT_TOL, *,
                       seed: int = 0, samples: Optional[int] = None) -> AffineReduction:
    """Chart of the affine hull of ``K`` on which ``K`` is full dimensional.

    The deepest point of ``K`` (maximal smallest eigenvalue) decides the
    case.  A positive value means ``K`` already has interior and the chart is
    the identity.  Otherwise the barrier path ends in the relative interior,
    where the kernel of ``Q`` is the kernel shared by all of ``K``; the affine
    hull is ``{z : Q(z) V0 = 0}``.  The step repeats on the compressed pencil
    until an interior point appears or the hull is a point.

    Raises
    ------
    EmptySpectrahedron
        The largest smallest eigenvalue is negative beyond tolerance.
    Unbounded
        The barrier path diverges or the ray probe exceeds ``1e6``.
    """
    k, m = p.k, p.m
    z0, lam = deepest_point(p)
    Q0 = p.evaluate(z0)
    scale = np.abs(np.linalg.eigvalsh(Q0)).max(initial=0.0)
    if lam < -tol.rel(scale):
        raise EmptySpectrahedron("no feasible point: largest smallest eigenvalue is negative",
                                 max_min_eigenvalue=lam, point=z0)
    probe = boundedness_probe(p, z0, tol, seed=seed, n_directions=samples)
    if not probe.bounded:
        raise Unbounded("ray probe exceeded 1e6", point=z0)

    offset = np.zeros(k)
    basis = np.eye(k)
    W = np.eye(m)
    cur, w = p, z0
    while lam <= tol.rel(scale):
        if cur.k == 0:
            break
        wc, N, Wc = _reduce_once(cur, w, tol)
        offset = offset + basis @ wc
        basis = basis @ N
        W = W @ Wc
        A0n = Wc.T @ cur.evaluate(wc) @ Wc
        An = [Wc.T @ cur.evaluate(N[:, j], homogeneous=True) @ Wc for j in range(N.shape[1])]
        if Wc.shape[1] == 0:
            if N.shape[1] > 0:
                raise Unbounded("pencil vanishes on a whole affine subspace")
            cur = None
            break
        cur = SymmetricPencil(A0n, np.asarray(An).reshape(len(An), Wc.shape[1], Wc.shape[1]), p.tol)
        w, lam = deepest_point(cur)
        scale = np.abs(np.linalg.eigvalsh(cur.evaluate(w))).max(initial=0.0)
        if lam < -tol.rel(scale):
            raise ReductionFailed("compressed pencil lost feasibility", max_min_eigenvalue=lam)

    d = basis.shape[1]
    if W.shape[1] == m:
        # already full dimensional with a positive definite point: identity chart
        return AffineReduction(k, np.eye(k), np.zeros(k), p, p, np.eye(m), np.asarray(z0))
    relint = offset + basis @ w if cur is not None else offset.copy()
    coeffs = np.asarray([p.evaluate(basis[:, j], homogeneous=True) for j in range(d)]).reshape(d, m, m)
    reduced = SymmetricPencil(p.evaluate(offset), coeffs, p.tol)
    return AffineReduction(d, basis, offset, reduced, cur, W, relint)
