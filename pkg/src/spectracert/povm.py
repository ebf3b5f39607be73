"""Finite separation principle for measures on a finite discrete space.

On a finite set with the discrete topology the atoms are the smallest
disjoint open neighbourhoods, so the separation hypothesis reads
``P_i E_j P_i = 0`` for every pair of distinct atoms.  From there the chain
is elementary: ``E_j >= 0`` turns ``P_i E_j P_i = 0`` into ``E_j P_i = 0``;
summing over ``i != j`` gives ``E_j = P_j E_j P_j``; and compressing
``sum_i E_i = I`` by ``P_j`` leaves ``P_j E_j P_j = P_j``.

With residuals, ``tau_h = max ||P_i E_j P_i||`` and the validity residual
``tau_v``, the same chain gives

    ||E_j - P_j|| <= sqrt((1 + tau_v)(N - 1) tau_h) + 2 (N - 1) tau_h + tau_v.

The square root is genuine: a rotation by angle ``t`` moves ``E`` by ``O(t)``
while the hypothesis residual is only ``O(t^2)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy.linalg import expm

from .errors import EqualityViolation, HypothesisNotVerified, ShapeMismatch
from .tolerances import DEFAULT_TOL, Tolerances


def _stack(mats, what: str) -> np.ndarray:
    a = np.asarray(mats, dtype=float)
    if a.ndim != 3 or a.shape[1] != a.shape[2] or a.shape[0] == 0:
        raise ShapeMismatch(f"{what} must be a nonempty stack of square matrices", shape=a.shape)
    return a


@dataclass(frozen=True, eq=False)
class FinitePVM:
    P: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "P", _stack(self.P, "projections"))

    @property
    def N(self) -> int:
        return self.P.shape[0]

    @property
    def h(self) -> int:
        return self.P.shape[1]

    def to_dict(self) -> dict:
        return {"N": self.N, "h": self.h, "P": self.P.tolist()}


@dataclass(frozen=True, eq=False)
class FinitePOVM:
    E: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "E", _stack(self.E, "effects"))

    @property
    def N(self) -> int:
        return self.E.shape[0]

    @property
    def h(self) -> int:
        return self.E.shape[1]

    def to_dict(self) -> dict:
        return {"N": self.N, "h": self.h, "E": self.E.tolist()}


@dataclass(frozen=True)
class Validity:
    valid: bool
    residual: float
    violation: Optional[str] = None


def validity(m: Union[FinitePVM, FinitePOVM], tol: Tolerances = DEFAULT_TOL) -> Validity:
    """Largest invariant residual and the first invariant it breaks."""
    mats = m.P if isinstance(m, FinitePVM) else m.E
    h = mats.shape[1]
    tau = tol.rel(1.0)
    checks = [("symmetry", float(np.abs(mats - mats.transpose(0, 2, 1)).max())),
              ("sum", float(np.linalg.norm(mats.sum(axis=0) - np.eye(h), 2)))]
    if isinstance(m, FinitePVM):
        checks.append(("idempotence", max(float(np.linalg.norm(P @ P - P, 2)) for P in mats)))
        cross = 0.0
        for i in range(m.N):
            for j in range(i + 1, m.N):
                cross = max(cross, float(np.linalg.norm(mats[i] @ mats[j], 2)))
        checks.append(("orthogonality", cross))
    else:
        neg = max(max(0.0, -float(np.linalg.eigvalsh(0.5 * (E + E.T))[0])) for E in mats)
        checks.append(("positivity", neg))
    worst = max(r for _, r in checks)
    for name, r in checks:
        if r > tau:
            return Validity(False, worst, name)
    return Validity(True, worst)


def is_valid(m: Union[FinitePVM, FinitePOVM], tol: Tolerances = DEFAULT_TOL) -> bool:
    return validity(m, tol).valid


@dataclass(frozen=True)
class HypothesisResult:
    holds: bool
    residual: float
    witness: Optional[tuple] = None


def _check_shapes(pvm: FinitePVM, povm: FinitePOVM):
    if pvm.N != povm.N or pvm.h != povm.h:
        raise ShapeMismatch("measures disagree in atom count or dimension",
                            pvm=(pvm.N, pvm.h), povm=(povm.N, povm.h))


def hypothesis_holds(pvm: FinitePVM, povm: FinitePOVM, tol: Tolerances = DEFAULT_TOL) -> HypothesisResult:
    """Whether ``||P_i E_j P_i|| <= tau`` for every ``i != j``.

    The witness is the first failing ordered pair, 1-based, in row-major order.
    """
    _check_shapes(pvm, povm)
    tau = tol.rel(1.0)
    worst, witness = 0.0, None
    for i in range(pvm.N):
        for j in range(pvm.N):
            if i == j:
                continue
            r = float(np.linalg.norm(pvm.P[i] @ povm.E[j] @ pvm.P[i], 2))
            if r > tau and witness is None:
                witness = (i + 1, j + 1)
            worst = max(worst, r)
    return HypothesisResult(witness is None, worst, witness)


def equality_bound(N: int, tau_h: float, tau_v: float) -> float:
    """Bound on ``max_j ||E_j - P_j||`` given the two measured residuals."""
    return float(np.sqrt((1 + tau_v) * (N - 1) * tau_h) + 2 * (N - 1) * tau_h + tau_v)


@dataclass(frozen=True)
class EqualityResult:
    equal: bool
    max_deviation: float
    bound: float
    hypothesis_residual: float
    validity_residual: float


def conclude_equality_check(pvm: FinitePVM, povm: FinitePOVM,
                            tol: Tolerances = DEFAULT_TOL) -> EqualityResult:
    """Confirm ``E_j = P_j`` up to :func:`equality_bound` once the hypothesis holds.

    Refuses with :class:`HypothesisNotVerified` when the hypothesis fails;
    a deviation above the bound is an implementation bug and raises
    :class:`EqualityViolation`.
    """
    hyp = hypothesis_holds(pvm, povm, tol)
    if not hyp.holds:
        raise HypothesisNotVerified("separation hypothesis fails", witness=hyp.witness,
                                    residual=hyp.residual)
    vp, ve = validity(pvm, tol), validity(povm, tol)
    if not (vp.valid and ve.valid):
        raise HypothesisNotVerified("input is not a valid PVM/POVM pair",
                                    pvm=vp.violation, povm=ve.violation)
    tau_v = max(vp.residual, ve.residual)
    bound = equality_bound(pvm.N, hyp.residual, tau_v) + tol.rel(1.0)
    dev = max(float(np.linalg.norm(povm.E[j] - pvm.P[j], 2)) for j in range(pvm.N))
    if dev > bound:
        raise EqualityViolation("deviation exceeds the derived bound", deviation=dev, bound=bound)
    return EqualityResult(True, dev, bound, hyp.residual, tau_v)


# -- random instances ---------------------------------------------------------------

def random_orthogonal(h: int, rng: np.random.Generator) -> np.ndarray:
    Q, R = np.linalg.qr(rng.standard_normal((h, h)))
    return Q * np.sign(np.diag(R))


def random_pvm(h: int, N: int, rng: np.random.Generator) -> FinitePVM:
    """Coordinate blocks of a random orthonormal basis, all blocks nonempty."""
    O = random_orthogonal(h, rng)
    cuts = np.sort(rng.choice(np.arange(1, h), size=N - 1, replace=False)) if N > 1 else []
    blocks = np.split(np.arange(h), cuts)
    return FinitePVM(np.stack([O[:, b] @ O[:, b].T for b in blocks]))


def _rotation(h: int, angle: float, rng: np.random.Generator) -> np.ndarray:
    S = rng.standard_normal((h, h))
    S = S - S.T
    S /= np.linalg.norm(S, 2)
    return expm(angle * S)


def perturbed_povm(pvm: FinitePVM, angle: float, rng: np.random.Generator) -> FinitePOVM:
    """Convex mix of two rotated copies of ``pvm``; PSD and unital by construction."""
    W1 = _rotation(pvm.h, angle, rng)
    W2 = _rotation(pvm.h, angle, rng)
    t = rng.uniform()
    E = (1 - t) * np.einsum("ab,nbc,dc->nad", W1, pvm.P, W1) + t * np.einsum("ab,nbc,dc->nad", W2, pvm.P, W2)
    E = 0.5 * (E + E.transpose(0, 2, 1))
    # clip any roundoff negativity so E stays a POVM
    w, U = np.linalg.eigh(E)
    E = np.einsum("nab,nb,ncb->nac", U, np.maximum(w, 0.0), U)
    return FinitePOVM(E)


@dataclass(frozen=True)
class SweepReport:
    trials: int
    hypothesis_true: int
    hypothesis_false: int
    violations: int
    worst_ratio: float
    tightness: dict
    seed: int

    @property
    def passed(self) -> bool:
        return self.violations == 0 and all(self.tightness.values())

    def to_dict(self) -> dict:
        return {"trials": self.trials, "hypothesis_true": self.hypothesis_true,
                "hypothesis_false": self.hypothesis_false, "violations": self.violations,
                "worst_deviation_over_bound": self.worst_ratio,
                "tightness": {str(k): v for k, v in sorted(self.tightness.items())},
                "seed": self.seed, "passed": self.passed}


def povm_sweep(trials: int = 10_000, seed: int = 0, *, h_max: int = 16, N_max: int = 8,
               tol: Tolerances = DEFAULT_TOL) -> SweepReport:
    """Randomized check that the hypothesis forces equality, plus a tightness probe.

    Rotation angles are log-uniform below the scale at which the hypothesis
    residual reaches ``tau``, so almost every instance satisfies it while
    ``E`` still differs from ``P``.  The tightness probe uses a large angle
    for each atom count and expects the check to refuse.
    """
    rng = np.random.default_rng(seed)
    tau = tol.rel(1.0)
    amax = np.sqrt(tau)
    true = false = bad = 0
    worst = 0.0
    for _ in range(trials):
        N = int(rng.integers(1, N_max + 1))
        h = int(rng.integers(max(N, 2), h_max + 1))
        pvm = random_pvm(h, N, rng)
        angle = amax * 10 ** rng.uniform(-4, 0)
        povm = perturbed_povm(pvm, angle, rng)
        try:
            res = conclude_equality_check(pvm, povm, tol)
        except HypothesisNotVerified:
            false += 1
            continue
        except EqualityViolation:
            bad += 1
            true += 1
            continue
        true += 1
        worst = max(worst, res.max_deviation / res.bound)
    tight = {}
    # one atom forces E = P = I, so the probe starts at two atoms
    for N in range(2, N_max + 1):
        pvm = random_pvm(N + int(rng.integers(0, 3)), N, rng)
        povm = perturbed_povm(pvm, 0.5, rng)
        differs = max(float(np.linalg.norm(povm.E[j] - pvm.P[j], 2)) for j in range(N)) > tau
        hyp = hypothesis_holds(pvm, povm, tol)
        try:
            conclude_equality_check(pvm, povm, tol)
            refused = False
        except HypothesisNotVerified:
            refused = True
        tight[N] = (not hyp.holds) and differs and refused
    return SweepReport(trials, true, false, bad, worst, tight, seed)
