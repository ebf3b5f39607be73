"""Separation certificates between a kernel section and a target extreme point.

The pipeline follows the order of the underlying argument:

1. cover the section domain ``F`` by cells on which the diagonal kernel
   values ``k_z(x_i, x_i)`` stay below ``epsilon``;
2. form the affine Gram map ``A(z) = (k_z(x_i, x_j))``;
3. bound the kernel at ``y`` from both sides (``c``, ``b``) and fix ``alpha``;
4. pick an interior point ``omega1`` and an exterior point ``omega2`` with
   ``y`` on the segment between them, and the ball ``U = B(y, s delta)``;
5. build the Hadamard inverse ``B`` of ``lam p p^T + A^-(omega2)`` and check
   the Loewner dominations ``(1 - s)(1) <= B o A(x)`` on ``U cap K``.

Every inequality is logged with its slack.  Neighbourhood radii come from
the Weyl bound ``||A(d)|| <= L ||d||`` where that is possible; the
domination over ``U cap K`` is checked on samples.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (CoverFailure, DominationFailed, EqualityViolation, InvalidPair,
                     PreconditionError, ReadConditionFailed, SpectraError, VerificationFailure)
from .faces import is_extreme
from .hadamard import alpha_constant, hadamard_inverse, read_psd_check, split_matrix
from .pencil import Membership, SymmetricPencil, affine_hull_reduce, membership
from .perron import perron_eigenpair
from .sampling import ball_points, sample_boundary
from .sections import KernelSection, build_gamma, gram_from_gammas, riesz_projection
from .strata import kernel_dimension
from .tolerances import DEFAULT_TOL, Tolerances

SAMPLED = "sampled"
RIGOROUS = "rigorous"
GRID = "grid"


@dataclass(frozen=True)
class Inequality:
    name: str
    lhs: float
    relation: str
    rhs: float
    tolerance: float
    kind: str = RIGOROUS

    @property
    def slack(self) -> float:
        if self.relation == ">=":
            return float(self.lhs - self.rhs)
        return float(self.rhs - self.lhs)

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.slack) and self.slack >= -self.tolerance)

    def to_dict(self) -> dict:
        return {"name": self.name, "lhs": float(self.lhs), "relation": self.relation,
                "rhs": float(self.rhs), "slack": self.slack, "tolerance": float(self.tolerance),
                "kind": self.kind, "passed": self.passed}


class InequalityLog(list):
    def check(self, name, lhs, relation, rhs, tolerance=0.0, kind=RIGOROUS) -> Inequality:
        item = Inequality(name, float(lhs), relation, float(rhs), float(tolerance), kind)
        self.append(item)
        return item

    @property
    def passed(self) -> bool:
        return all(i.passed for i in self)

    def failures(self) -> list:
        return [i for i in self if not i.passed]


# -- cover ------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Cover:
    epsilon: float
    nodes: list
    cells: list
    sup_diag: list

    @property
    def n(self) -> int:
        return len(self.nodes)


def diagonal_table(p: SymmetricPencil, grid: np.ndarray, gammas: np.ndarray) -> np.ndarray:
    """``T[a, b] = gamma(g_a)^T Q(g_b) gamma(g_a)`` over grid points."""
    Qs = np.stack([p.evaluate(z) for z in grid])
    return np.einsum("am,bmn,an->ab", gammas, Qs, gammas)


def epsilon_cover(ks: KernelSection, epsilon: float, tol: Optional[Tolerances] = None) -> Cover:
    """Greedy cover of the section grid by the sets ``{z : k_z(t, t) < epsilon}``.

    Each step picks the grid point covering the most uncovered points (lowest
    index on ties); cells are the newly covered points, so they are disjoint
    and exhaust the grid.
    """
    if not epsilon > 0:
        raise CoverFailure("cover tolerance must be positive; only base points satisfy k_t(t, t) = 0",
                           epsilon=epsilon)
    T = diagonal_table(ks.pencil, ks.grid, ks.gammas)
    covers = T < epsilon
    lonely = np.flatnonzero(~np.diag(covers))
    if lonely.size:
        raise CoverFailure("a grid point does not cover itself; epsilon is below grid resolution",
                           index=int(lonely[0]), value=float(T[lonely[0], lonely[0]]))
    uncovered = np.ones(T.shape[0], dtype=bool)
    nodes, cells, sups = [], [], []
    while uncovered.any():
        gain = (covers & uncovered[None, :]).sum(axis=1)
        a = int(np.argmax(gain))
        cell = np.flatnonzero(covers[a] & uncovered)
        nodes.append(a)
        cells.append(cell.tolist())
        sups.append(float(T[a, cell].max()))
        uncovered[cell] = False
    return Cover(float(epsilon), nodes, cells, sups)


# -- the certificate -----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SeparationCertificate:
    section: KernelSection
    y: np.ndarray
    cover: Cover
    c: float
    b: float
    alpha: float
    c_tilde: float
    radii: dict
    omega1: np.ndarray
    omega2: np.ndarray
    s: float
    delta: float
    perron_lambda: float
    perron_vector: np.ndarray
    B: np.ndarray
    samples: np.ndarray
    domination_slacks: np.ndarray
    constant: float
    log: InequalityLog = field(default_factory=InequalityLog)

    @property
    def epsilon(self) -> float:
        return self.cover.epsilon

    @property
    def n(self) -> int:
        return self.cover.n

    @property
    def U_radius(self) -> float:
        return self.s * self.delta

    @property
    def verified(self) -> bool:
        return self.log.passed

    @property
    def norm_bound(self) -> float:
        return self.epsilon * self.constant

    def to_dict(self, full: bool = True) -> dict:
        ks = self.section
        out = {
            "verified": self.verified,
            "epsilon": self.epsilon, "n": self.n,
            "x": ks.x.tolist(), "y": self.y.tolist(),
            "section": ks.to_dict(),
            "c": self.c, "b": self.b, "alpha": self.alpha, "c_tilde": self.c_tilde,
            "radii": self.radii,
            "omega1": self.omega1.tolist(), "omega2": self.omega2.tolist(),
            "s": self.s, "delta": self.delta, "U_radius": self.U_radius,
            "perron": {"lambda": self.perron_lambda, "p": self.perron_vector.tolist()},
            "constant": self.constant, "norm_bound": self.norm_bound,
            "domination": {"samples": int(self.samples.shape[0]),
                           "min_slack": float(self.domination_slacks.min())},
            "sup_diag": self.cover.sup_diag,
            "inequality_log": [i.to_dict() for i in self.log],
            "notes": ["neighbourhood of the negative part and domination over U are sampled checks"],
        }
        if full:
            out.update({
                "stratum": ks.stratum, "section_epsilon": ks.epsilon, "section_radius": ks.radius,
                "v": ks.v.tolist(), "grid": ks.grid.tolist(),
                "nodes": [ks.grid[a].tolist() for a in self.cover.nodes],
                "node_index": self.cover.nodes, "cells": self.cover.cells,
                "B": self.B.tolist(), "samples": self.samples.tolist(),
            })
        return out


_ERRORS = {"cover": CoverFailure, "read": ReadConditionFailed, "domination": DominationFailed,
           "loewner": DominationFailed}


def _raise_first_failure(log: InequalityLog, **details):
    bad = log.failures()
    if not bad:
        return
    head = bad[0].name.split(".")[0].split("[")[0]
    cls = _ERRORS.get(head, VerificationFailure)
    raise cls(f"inequality {bad[0].name} failed", failed=[i.to_dict() for i in bad],
              **details)


def _tau(tol: Tolerances, M: np.ndarray) -> float:
    return tol.rel(np.linalg.norm(M, 2))


def _domination_samples(p, y, radius, M, seed, tol):
    """Up to ``M`` quasi-random points of ``B(y, radius) cap K`` plus ``y`` and axis points."""
    k = y.shape[0]
    pts = [y]
    for j in range(k):
        for sgn in (1.0, -1.0):
            pts.append(y + sgn * 0.999 * radius * np.eye(k)[j])
    pts = [z for z in pts if membership(p, z, tol).in_K]
    found, draws = 0, 0
    while found < M and draws < 40 * M:
        for z in ball_points(y, 0.999 * radius, 2 * M, seed + draws):
            if found >= M:
                break
            if membership(p, z, tol).in_K:
                pts.append(z)
                found += 1
        draws += 2 * M
    return np.array(pts)


def _interior_near(p, y, radius, seed, tol):
    """Point of ``B(y, radius)`` with the largest smallest eigenvalue among samples."""
    cand = np.vstack([y[None], ball_points(y, radius, 256, seed)])
    lam = np.array([np.linalg.eigvalsh(p.evaluate(z))[0] for z in cand])
    dist = np.linalg.norm(cand - y, axis=1)
    order = np.lexsort((dist, -lam))
    return cand[order[0]], float(lam[order[0]])


def certify_separation(ks: KernelSection, y=None, epsilon: float = 0.05, *, M: int = 512,
                       seed: int = 0, tol: Optional[Tolerances] = None,
                       strict: bool = True) -> SeparationCertificate:
    """Build and check the full certificate for ``(F, gamma)`` against ``y``.

    With ``strict`` the first failed inequality raises the matching error
    (``CoverFailure``, ``ReadConditionFailed``, ``DominationFailed``...)
    carrying the log; otherwise an unverified certificate is returned.
    """
    tol = tol or ks.tol
    p = ks.pencil
    y = ks.y if y is None else np.asarray(y, dtype=float)
    if not np.allclose(y, ks.y, rtol=0, atol=1e-12):
        raise PreconditionError("target differs from the point the section was built for",
                                y=y, section_target=ks.y)
    if ks.contains(y):
        raise PreconditionError("target lies in the section domain", y=y)
    L = p.lipschitz()
    log = InequalityLog()

    # cover of the section grid
    cover = epsilon_cover(ks, epsilon, tol)
    for idx, sup in enumerate(cover.sup_diag):
        log.check(f"cover.sup_diag[{idx}]", sup, "<=", epsilon, 0.0, GRID)
    G = ks.gammas[cover.nodes].T
    n = G.shape[1]

    # the Gram map is affine and PSD on K
    Ay = gram_from_gammas(p, y, G)
    a0 = gram_from_gammas(p, np.zeros(p.k), G)
    mid = gram_from_gammas(p, 0.5 * y, G)
    log.check("gram.affine", np.abs(mid - 0.5 * (Ay + a0)).max(), "<=", 0.0, 1e-12 * (1 + np.abs(Ay).max()))
    log.check("gram.psd_at_y", np.linalg.eigvalsh(Ay)[0], ">=", 0.0, n * _tau(tol, Ay))

    # kernel bounds near y and the radii they allow
    Qy = p.evaluate(y)
    Ky = ks.gammas @ Qy @ ks.gammas.T
    cy, by = float(Ky.min()), float(Ky.max())
    log.check("kernel_at_y.inf_positive", cy, ">=", 0.0, 0.0, GRID)
    c, b = 0.5 * cy, by + 0.5 * cy
    al = alpha_constant(c, b)
    r_V = cy / (2.0 * L)
    r_Vt = al.alpha / L
    r_U = min(r_V, r_Vt)

    # interior point, exterior point and the ball U
    omega1, lam1 = _interior_near(p, y, 0.5 * r_U, seed, tol)
    if lam1 <= tol.rel(np.linalg.norm(p.evaluate(omega1), 2)):
        raise PreconditionError("no interior point found near y; reduce to the affine hull first")
    delta = 0.9 * min(lam1 / L, r_U)
    u = (y - omega1) / np.linalg.norm(y - omega1)
    r = 0.9 * r_U
    for _ in range(60):
        if membership(p, y + r * u, tol).status is Membership.OUTSIDE:
            break
        r *= 0.5
    s = r / (np.linalg.norm(omega1 - y) + r)
    omega2 = (y - s * omega1) / (1.0 - s)
    gap = float(np.linalg.norm(s * omega1 + (1 - s) * omega2 - y))
    if gap > 1e-12 * (1 + np.linalg.norm(y)):
        raise EqualityViolation("convex combination identity failed", gap=gap)
    log.check("combination.identity", gap, "<=", 0.0, 1e-12 * (1 + np.linalg.norm(y)))
    log.check("omega1.interior_ball", delta * L, "<=", lam1)
    log.check("omega1.distance", np.linalg.norm(omega1 - y), "<=", r_U)
    log.check("delta.inside_U_tilde", delta, "<=", r_U)
    lam2 = float(np.linalg.eigvalsh(p.evaluate(omega2))[0])
    log.check("omega2.outside", lam2, "<=", -tol.rel(np.linalg.norm(p.evaluate(omega2), 2)))
    log.check("omega2.distance", np.linalg.norm(omega2 - y), "<=", r_U)
    log.check("s.open_interval", min(s, 1 - s), ">=", 0.0)

    # sampled look at the tilde-V neighbourhood: negative part below alpha
    probe = ball_points(y, r_U, 64, seed + 1)
    worst_neg = max(max(0.0, -np.linalg.eigvalsh(p.evaluate(z))[0]) for z in probe)
    log.check("V_tilde.negative_part", worst_neg, "<=", al.alpha, 0.0, SAMPLED)
    worst_kern = min(float((ks.gammas @ p.evaluate(z) @ ks.gammas.T).min()) for z in probe[:8])
    log.check("V.kernel_lower", worst_kern, ">=", c, 0.0, SAMPLED)

    # Perron pair, Read check, Hadamard inverse and dominations
    X2, Y2 = split_matrix(p.evaluate(omega2))
    Am = G.T @ X2 @ G
    Ap = G.T @ Y2 @ G
    Am, Ap = 0.5 * (Am + Am.T), 0.5 * (Ap + Ap.T)
    log.check("A_plus.lower", Ap.min(), ">=", c - al.alpha)
    log.check("A_plus.upper", Ap.max(), "<=", b + al.alpha)
    log.check("A_minus.entries", np.abs(Am).max(), "<=", al.alpha)
    pd = perron_eigenpair(Ap, tol)
    lpp = pd.lam * np.outer(pd.x, pd.x)
    log.check("perron.product_lower", lpp.min(), ">=", al.c_tilde, tol.rel(pd.lam))
    Mread = lpp + Am
    log.check("read.entries", Mread.min(), ">=", al.alpha)
    rc = read_psd_check(Mread, tol)
    log.check("read.one_positive_eigenvalue", rc.positive_eigenvalues, "<=", 1)
    log.check("read.hypotheses", float(rc.satisfies_read), ">=", 1.0)
    B = hadamard_inverse(Mread, tol)
    A2 = Ap + Am
    log.check("B.psd", np.linalg.eigvalsh(B)[0], ">=", 0.0, n * _tau(tol, B))
    D2 = B * A2
    log.check("loewner.at_omega2", np.linalg.eigvalsh(D2 - 1.0)[0], ">=", 0.0, n * _tau(tol, D2))

    samples = _domination_samples(p, y, s * delta, M, seed + 2, tol)
    slacks = []
    for z in samples:
        D = B * gram_from_gammas(p, z, G)
        slacks.append(np.linalg.eigvalsh(D - (1.0 - s))[0] + n * _tau(tol, D))
    slacks = np.array(slacks)
    worst = int(np.argmin(slacks))
    log.check("domination.U_cap_K", slacks[worst], ">=", 0.0, 0.0, SAMPLED)
    log.check("domination.sample_count", samples.shape[0], ">=", min(M, 1))

    log.check("B.diagonal", np.diag(B).max(), "<=", 1.0 / al.alpha, tol.rel(1.0 / al.alpha))
    log.check("final.sup_diag", max(cover.sup_diag), "<=", epsilon, 0.0, GRID)
    constant = 1.0 / (al.alpha * (1.0 - s))
    log.check("final.constant_finite", constant, "<=", np.finfo(float).max)

    cert = SeparationCertificate(
        ks, y, cover, c, b, al.alpha, al.c_tilde,
        {"L": L, "V": r_V, "V_tilde": r_Vt, "U_tilde": r_U, "omega2_step": float(r)},
        omega1, omega2, float(s), float(delta), pd.lam, pd.x, B, samples, slacks,
        float(constant), log)
    if strict:
        _raise_first_failure(log, witness=samples[worst].tolist())
    return cert


# -- audit --------------------------------------------------------------------------

@dataclass(frozen=True)
class AuditReport:
    log: InequalityLog

    @property
    def passed(self) -> bool:
        return self.log.passed

    def to_dict(self) -> dict:
        return {"passed": self.passed, "inequality_log": [i.to_dict() for i in self.log]}


def audit_certificate(p: SymmetricPencil, payload: dict,
                      tol: Tolerances = DEFAULT_TOL) -> AuditReport:
    """Re-check a certificate from the pencil and the certificate's raw points.

    Only points, the seed vector and scalar choices are read from
    ``payload``; every matrix (section values, Gram matrices, the split, the
    Perron pair, ``B``) is recomputed here.
    """
    log = InequalityLog()
    x = np.asarray(payload["x"], dtype=float)
    y = np.asarray(payload["y"], dtype=float)
    v = np.asarray(payload["v"], dtype=float)
    eps_gap = float(payload["section_epsilon"])
    eps = float(payload["epsilon"])
    grid = np.asarray(payload["grid"], dtype=float)
    i = int(payload["stratum"])
    L = p.lipschitz()

    def gam(z):
        g = riesz_projection(p, z, eps_gap, tol) @ v
        return g / np.linalg.norm(g)

    for z in grid:
        w = np.linalg.eigvalsh(p.evaluate(z))
        tz = tol.rel(np.abs(w).max())
        log.check("audit.grid_on_stratum", int(np.sum(np.abs(w) <= tz)), ">=", i)
        log.check("audit.grid_in_ball", np.linalg.norm(z - x), "<=", payload["section_radius"],
                  1e-12)
    Gall = np.stack([gam(z) for z in grid])
    T = diagonal_table(p, grid, Gall)
    for idx, (node, cell) in enumerate(zip(payload["node_index"], payload["cells"])):
        log.check(f"audit.cover[{idx}]", T[node, cell].max(), "<=", eps, 0.0, GRID)
    covered = sorted(j for cell in payload["cells"] for j in cell)
    log.check("audit.cells_partition", float(covered == list(range(grid.shape[0]))), ">=", 1.0)

    Ky = Gall @ p.evaluate(y) @ Gall.T
    cy, by = float(Ky.min()), float(Ky.max())
    log.check("audit.kernel_inf", cy, ">=", 2.0 * payload["c"], 1e-12 * (1 + by))
    al = alpha_constant(0.5 * cy, by + 0.5 * cy)
    r_U = min(cy / (2 * L), al.alpha / L)
    o1 = np.asarray(payload["omega1"], dtype=float)
    o2 = np.asarray(payload["omega2"], dtype=float)
    s, delta = float(payload["s"]), float(payload["delta"])
    lam1 = float(np.linalg.eigvalsh(p.evaluate(o1))[0])
    log.check("audit.omega1_ball", delta * L, "<=", lam1)
    log.check("audit.delta", delta, "<=", r_U)
    log.check("audit.omega1_distance", np.linalg.norm(o1 - y), "<=", r_U)
    log.check("audit.omega2_distance", np.linalg.norm(o2 - y), "<=", r_U)
    Q2 = p.evaluate(o2)
    log.check("audit.omega2_outside", np.linalg.eigvalsh(Q2)[0], "<=", -tol.rel(np.linalg.norm(Q2, 2)))
    log.check("audit.identity", np.linalg.norm(s * o1 + (1 - s) * o2 - y), "<=", 0.0,
              1e-12 * (1 + np.linalg.norm(y)))

    G = Gall[payload["node_index"]].T
    n = G.shape[1]
    X2, Y2 = split_matrix(Q2)
    Am, Ap = G.T @ X2 @ G, G.T @ Y2 @ G
    Am, Ap = 0.5 * (Am + Am.T), 0.5 * (Ap + Ap.T)
    log.check("audit.A_plus_lower", Ap.min(), ">=", al.c - al.alpha)
    log.check("audit.A_plus_upper", Ap.max(), "<=", al.b + al.alpha)
    log.check("audit.A_minus", np.abs(Am).max(), "<=", al.alpha)
    pd = perron_eigenpair(Ap, tol)
    Mread = pd.lam * np.outer(pd.x, pd.x) + Am
    log.check("audit.read_entries", Mread.min(), ">=", al.alpha)
    rc = read_psd_check(Mread, tol)
    log.check("audit.read", float(rc.satisfies_read), ">=", 1.0)
    B = 1.0 / Mread
    log.check("audit.B_psd", np.linalg.eigvalsh(B)[0], ">=", 0.0, n * _tau(tol, B))
    D2 = B * (Ap + Am)
    log.check("audit.loewner_omega2", np.linalg.eigvalsh(D2 - 1.0)[0], ">=", 0.0, n * _tau(tol, D2))
    worst = np.inf
    for z in np.asarray(payload["samples"], dtype=float):
        log_in = membership(p, z, tol).in_K and np.linalg.norm(z - y) <= s * delta
        if not log_in:
            log.check("audit.sample_in_U_cap_K", 0.0, ">=", 1.0)
            continue
        D = B * gram_from_gammas(p, z, G)
        worst = min(worst, np.linalg.eigvalsh(D - (1 - s))[0] + n * _tau(tol, D))
    log.check("audit.domination", worst, ">=", 0.0, 0.0, SAMPLED)
    log.check("audit.B_diagonal", np.diag(B).max(), "<=", 1.0 / al.alpha, tol.rel(1.0 / al.alpha))
    return AuditReport(log)


# -- pair certificates -------------------------------------------------------------

@dataclass(frozen=True)
class PairConfig:
    epsilon: float = 0.05
    grid: int = 32
    samples: int = 128
    u_points: int = 3
    v_points: int = 3
    boundary_samples: int = 256
    seed: int = 0
    tol: Tolerances = DEFAULT_TOL


@dataclass(frozen=True, eq=False)
class PairCertificate:
    x: np.ndarray
    y: np.ndarray
    radius: float
    entries: list
    reduction: Optional[dict] = None

    @property
    def verified(self) -> bool:
        certs = [e for e in self.entries if e["kind"] == "certificate"]
        return bool(certs) and all(e["verified"] for e in certs)

    @property
    def strata(self) -> list:
        return sorted({e["stratum"] for e in self.entries})

    def to_dict(self) -> dict:
        return {"verified": self.verified, "x": self.x.tolist(), "y": self.y.tolist(),
                "U": {"center": self.x.tolist(), "radius": self.radius},
                "V": {"center": self.y.tolist(), "radius": self.radius},
                "ball_gap": float(np.linalg.norm(self.x - self.y) - 2.0 * self.radius),
                "strata": self.strata, "entries": self.entries, "reduction": self.reduction}


def _pick(points, center, radius, count, include):
    near = [z for z in points if 0 < np.linalg.norm(z - center) < radius]
    near.sort(key=lambda z: (np.linalg.norm(z - center), tuple(z)))
    stride = max(1, len(near) // max(count, 1))
    return [include] + near[::stride][:count]


def certify_pair(p: SymmetricPencil, x, y, config: PairConfig = PairConfig()) -> PairCertificate:
    """Glue separation certificates for two distinct extreme points.

    ``U = B(x, r)`` and ``V = B(y, r)`` with ``r = ||x - y|| / 3``, so the
    closure of ``V`` misses ``U``.  For sampled boundary points ``z`` in
    ``U`` and ``w`` in the closure of ``V`` either both are extreme and a
    section around ``z`` is certified against ``w``, or an exclusion cell is
    recorded (non-extreme points stay away from the closed extreme set).
    Spectrahedra with empty interior are handled on their affine hull.
    """
    tol = config.tol
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.linalg.norm(x - y) <= tol.rel(np.linalg.norm(x)):
        raise InvalidPair("x and y must differ")
    reduction = None
    red = affine_hull_reduce(p, tol, seed=config.seed)
    q = p
    if not red.full_dimensional:
        if red.d == 0 or red.compressed is None:
            raise InvalidPair("K is a single point, so no distinct pair exists")
        q = red.compressed
        reduction = red.to_dict()
        x, y = red.project(x), red.project(y)
    for name, pt in (("x", x), ("y", y)):
        if not is_extreme(q, pt, tol):
            raise PreconditionError(f"{name} is not an extreme point", point=pt)
    r = np.linalg.norm(x - y) / 3.0
    pts = sample_boundary(q, config.boundary_samples, seed=config.seed, tol=tol)
    zs = _pick(pts, x, r, config.u_points, x)
    ws = _pick(pts, y, r * (1 + 1e-12), config.v_points, y)
    entries = []
    ext_cache = {}

    def extreme(z):
        key = tuple(np.round(z, 15))
        if key not in ext_cache:
            ext_cache[key] = is_extreme(q, z, tol)
        return ext_cache[key]

    for zi, z in enumerate(zs):
        try:
            j = kernel_dimension(q, z, tol)
        except SpectraError as exc:
            entries.append({"kind": "skipped", "z": z.tolist(), "reason": type(exc).__name__,
                            "stratum": -1})
            continue
        for wi, w in enumerate(ws):
            base = {"z": z.tolist(), "omega": w.tolist(), "stratum": j}
            if not extreme(z) or not extreme(w):
                who = "z" if not extreme(z) else "omega"
                entries.append({"kind": "exclusion", "reason": f"{who} not extreme", **base})
                continue
            try:
                ks = build_gamma(q, z, w, tol, grid=config.grid, seed=config.seed)
                cert = certify_separation(ks, w, config.epsilon, M=config.samples,
                                          seed=config.seed + 10 * zi + wi, tol=tol, strict=False)
            except SpectraError as exc:
                exc.details.update({"stratum": j, "z": z, "omega": w})
                raise
            entries.append({"kind": "certificate", "verified": cert.verified, "n": cert.n,
                            "s": cert.s, "U_radius": cert.U_radius, "constant": cert.constant,
                            "section_radius": ks.radius, **base})
    return PairCertificate(x, y, float(r), entries, reduction)
