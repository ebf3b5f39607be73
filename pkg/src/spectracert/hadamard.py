"""Spectral splits, entrywise inverses and Read's positivity criterion."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InvalidBounds, ReadTheoremViolation, ZeroEntry
from .pencil import SymmetricPencil
from .tolerances import DEFAULT_TOL, Tolerances


def split_matrix(Q: np.ndarray):
    """Negative and positive spectral parts ``(X, Y)`` with ``Q = X + Y``."""
    w, U = np.linalg.eigh(Q)
    X = (U * np.minimum(w, 0.0)) @ U.T
    Y = (U * np.maximum(w, 0.0)) @ U.T
    return 0.5 * (X + X.T), 0.5 * (Y + Y.T)


@dataclass(frozen=True, eq=False)
class SpectralSplit:
    X: np.ndarray
    Y: np.ndarray
    A_minus: Optional[np.ndarray] = None
    A_plus: Optional[np.ndarray] = None

    @property
    def A(self) -> Optional[np.ndarray]:
        if self.A_plus is None:
            return None
        return self.A_plus + self.A_minus


def spectral_split(p: SymmetricPencil, z, gammas: Optional[np.ndarray] = None) -> SpectralSplit:
    """Split ``Q(z)`` and, given section columns ``gammas``, the Gram matrix.

    ``A_minus[i, j] = gamma_j^T X gamma_i`` and likewise for ``A_plus``; the
    ``mn x mn`` block matrix ``(1) (x) X`` is never formed.
    """
    X, Y = split_matrix(p.evaluate(z))
    if gammas is None:
        return SpectralSplit(X, Y)
    Am = gammas.T @ X @ gammas
    Ap = gammas.T @ Y @ gammas
    return SpectralSplit(X, Y, 0.5 * (Am + Am.T), 0.5 * (Ap + Ap.T))


@dataclass(frozen=True)
class AlphaConstant:
    """``alpha = c^3 / (16 (b + c)^2)`` and ``c_tilde = (c - alpha)^3 / (b + alpha)^2``."""

    c: float
    b: float
    alpha: float
    c_tilde: float

    def to_dict(self) -> dict:
        return {"c": self.c, "b": self.b, "alpha": self.alpha, "c_tilde": self.c_tilde}


def alpha_constant(c: float, b: float) -> AlphaConstant:
    if not (np.isfinite(c) and np.isfinite(b) and 0 < c <= b):
        raise InvalidBounds("need 0 < c <= b", c=c, b=b)
    alpha = c ** 3 / (16.0 * (b + c) ** 2)
    c_tilde = (c - alpha) ** 3 / (b + alpha) ** 2
    if not (alpha <= c / 2 and c_tilde >= 2 * alpha):
        raise InvalidBounds("alpha inequalities failed", alpha=alpha, c_tilde=c_tilde)
    return AlphaConstant(float(c), float(b), float(alpha), float(c_tilde))


def hadamard_inverse(M, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Entrywise reciprocal of a matrix with positive entries."""
    M = np.asarray(M, dtype=float)
    bad = np.argwhere(M <= tol.abs)
    if bad.size:
        i, j = (int(v) for v in bad[0])
        raise ZeroEntry(f"entry ({i}, {j}) is not positive", location=(i, j), value=float(M[i, j]))
    return 1.0 / M


@dataclass(frozen=True)
class ReadCheck:
    satisfies_read: bool
    hadamard_inverse_psd: bool
    positive_eigenvalues: int
    min_entry: float
    inverse_min_eig: Optional[float]

    def to_dict(self) -> dict:
        return {"satisfies_read": self.satisfies_read,
                "hadamard_inverse_psd": self.hadamard_inverse_psd,
                "positive_eigenvalues": self.positive_eigenvalues,
                "min_entry": self.min_entry, "inverse_min_eig": self.inverse_min_eig}


def read_psd_check(M, tol: Tolerances = DEFAULT_TOL) -> ReadCheck:
    """Test Read's hypotheses on ``M`` and whether its Hadamard inverse is PSD.

    Eigenvalues within ``tau_rel`` of zero count as zero.  A matrix meeting
    the hypotheses with a non-PSD inverse raises :class:`ReadTheoremViolation`.
    """
    M = np.asarray(M, dtype=float)
    M = 0.5 * (M + M.T)
    n = M.shape[0]
    w = np.linalg.eigvalsh(M)
    npos = int(np.sum(w > tol.rel(np.abs(w).max(initial=0.0))))
    min_entry = float(M.min())
    positive = min_entry > tol.abs
    satisfies = positive and npos == 1
    inv_psd, inv_min = False, None
    if positive:
        B = 1.0 / M
        wb = np.linalg.eigvalsh(B)
        inv_min = float(wb[0])
        inv_psd = inv_min >= -n * tol.rel(np.abs(wb).max())
    if satisfies and not inv_psd:
        raise ReadTheoremViolation("Read's hypotheses hold but the Hadamard inverse is not PSD",
                                   inverse_min_eig=inv_min)
    return ReadCheck(satisfies, inv_psd, npos, min_entry, inv_min)
