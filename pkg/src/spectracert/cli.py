"""Command line front end.

Every subcommand prints one JSON report.  Exit codes: 0 when everything that
was asked for verified, 2 for an honest verification failure, 3 for bad
input or a failed precondition, 4 for an internal invariant breach.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .certify import PairConfig, audit_certificate, certify_pair, certify_separation
from .errors import InputError, InvariantBreach, ParseError, SpectraError, VerificationFailure
from .faces import (closedness_heuristic, extreme_oracle_geometric, face_direction_space,
                    is_extreme, walk_to_extreme)
from .io import dumps, parse_pencil
from .pencil import affine_hull_reduce, boundedness_probe, deepest_point, membership
from .perron import bound_slacks, perron_eigenpair
from .povm import povm_sweep
from .sampling import sample_boundary
from .sections import build_gamma
from .strata import stratify_samples
from .tolerances import Tolerances

EXIT_OK, EXIT_UNVERIFIED, EXIT_INPUT, EXIT_INTERNAL = 0, 2, 3, 4
POINT_FLAGS = ("--x", "--y", "--point")

log = logging.getLogger("spectracert")


@dataclass(frozen=True)
class RunConfig:
    command: str
    tol_abs: float = 1e-9
    grid: int = 32
    samples: int = 512
    seed: int = 0
    input: Optional[str] = None
    output: Optional[str] = None

    def __post_init__(self):
        if not self.tol_abs > 0:
            raise InputError("--tol must be positive", field="tol")
        if self.grid < 1 or self.samples < 1:
            raise InputError("--grid and --samples must be at least 1", field="budget")

    @property
    def tol(self) -> Tolerances:
        return Tolerances(abs=self.tol_abs)


def parse_point(text: str) -> np.ndarray:
    try:
        return np.array([float(t) for t in text.split(",")], dtype=float)
    except ValueError as exc:
        raise InputError(f"cannot parse point {text!r}", field="point") from exc


def _pencil(args, cfg):
    return parse_pencil(args.pencil, cfg.tol, real=True)


# -- subcommands ---------------------------------------------------------------------

def cmd_membership(args, cfg):
    p = _pencil(args, cfg)
    v = membership(p, parse_point(args.point), cfg.tol)
    return {"point": parse_point(args.point), **v.to_dict()}, True


def cmd_stratify(args, cfg):
    p = _pencil(args, cfg)
    if args.points:
        pts = [parse_point(t) for t in args.points.split(";") if t.strip()]
    else:
        pts = list(sample_boundary(p, cfg.samples, seed=cfg.seed, tol=cfg.tol))
    recs = stratify_samples(p, pts, cfg.tol)
    counts = {}
    for r in recs:
        counts[r.stratum] = counts.get(r.stratum, 0) + 1
    return {"points": [r.to_dict() for r in recs],
            "counts": {str(k): v for k, v in sorted(counts.items())}}, True


def cmd_extremes(args, cfg):
    p = _pencil(args, cfg)
    pts = sample_boundary(p, cfg.samples, seed=cfg.seed, tol=cfg.tol)
    z0, _ = deepest_point(p)
    diam = boundedness_probe(p, z0, cfg.tol, seed=cfg.seed).diameter
    rows, flags, corners = [], [], []
    for idx, z in enumerate(pts):
        face = face_direction_space(p, z, cfg.tol)
        ext = face.is_singleton
        oracle = extreme_oracle_geometric(p, z, cfg.tol, seed=cfg.seed + idx,
                                          t_max=2.0 * diam if diam > 0 else None)
        rows.append({"point": z, "is_extreme": ext, "oracle_agrees": oracle.is_extreme == ext,
                     "D0_dim": face.dim, "confidence": oracle.confidence})
        flags.append(ext)
        if not ext:
            for sign in (1.0, -1.0):
                c = walk_to_extreme(p, z, cfg.tol, sign=sign)
                if not any(np.linalg.norm(c - q) < 1e-7 for q in corners):
                    corners.append(c)
    corners.sort(key=lambda c: tuple(np.round(c, 9)))
    found = [{"point": c, "is_extreme": is_extreme(p, c, cfg.tol),
              "oracle_agrees": extreme_oracle_geometric(p, c, cfg.tol).is_extreme}
             for c in corners]
    closed = closedness_heuristic(pts, flags)
    agree = all(r["oracle_agrees"] for r in rows) and all(f["oracle_agrees"] for f in found)
    closed_d = closed.to_dict()
    closed_d["summary"] = f"ex(K) closed: {closed.status}"
    summary = {"samples": len(rows), "extreme": int(sum(flags)),
               "non_extreme": len(rows) - int(sum(flags)),
               "disagreements": sum(not r["oracle_agrees"] for r in rows)}
    return {"points": rows, "summary": summary, "discovered_extremes": found,
            "closedness": closed_d}, agree


def cmd_perron_check(args, cfg):
    if args.matrix:
        try:
            A = np.asarray(json.loads(Path(args.matrix).read_text()), dtype=float)
        except (OSError, ValueError) as exc:
            raise ParseError(f"cannot read matrix {args.matrix}: {exc}", field="matrix") from exc
        pd = perron_eigenpair(A, cfg.tol)
        rep = bound_slacks(pd, cfg.tol)
        return {"perron": pd.to_dict(), "bounds": rep.to_dict()}, rep.passed
    rng = np.random.default_rng(cfg.seed)
    worst = {"x_lower": np.inf, "x_upper": np.inf, "lambda_lower": np.inf, "product_lower": np.inf}
    violations = 0
    for _ in range(args.trials):
        n = int(rng.integers(1, 13))
        M = rng.uniform(args.low, args.high, (n, n))
        rep = bound_slacks(perron_eigenpair(np.triu(M) + np.triu(M, 1).T, cfg.tol), cfg.tol)
        violations += not rep.passed
        for key, val in (("x_lower", rep.x_lower), ("x_upper", rep.x_upper),
                         ("lambda_lower", rep.lam_lower), ("product_lower", rep.product_lower)):
            worst[key] = min(worst[key], val)
    return {"trials": args.trials, "entries": [args.low, args.high], "violations": violations,
            "worst_slack": worst}, violations == 0


def _section(args, cfg, p):
    return build_gamma(p, parse_point(args.x), parse_point(args.y), cfg.tol,
                       radius=args.radius, grid=cfg.grid, seed=cfg.seed,
                       require_extreme=not args.allow_non_extreme)


def cmd_section(args, cfg):
    p = _pencil(args, cfg)
    return _section(args, cfg, p).to_dict(), True


def cmd_certify(args, cfg):
    p = _pencil(args, cfg)
    ks = _section(args, cfg, p)
    cert = certify_separation(ks, parse_point(args.y), args.epsilon, M=cfg.samples,
                              seed=cfg.seed, tol=cfg.tol, strict=False)
    return cert.to_dict(full=True), cert.verified


def cmd_certify_pair(args, cfg):
    p = _pencil(args, cfg)
    conf = PairConfig(epsilon=args.epsilon, grid=cfg.grid, samples=cfg.samples,
                      u_points=args.points_per_side, v_points=args.points_per_side,
                      seed=cfg.seed, tol=cfg.tol)
    pc = certify_pair(p, parse_point(args.x), parse_point(args.y), conf)
    return pc.to_dict(), pc.verified


def cmd_reduce(args, cfg):
    p = _pencil(args, cfg)
    red = affine_hull_reduce(p, cfg.tol, seed=cfg.seed)
    w = np.linspace(-0.5, 0.5, red.d) if red.d else np.zeros(0)
    trip = float(np.abs(red.project(red.embed(w)) - w).max(initial=0.0))
    return {**red.to_dict(), "round_trip_error": trip,
            "injectivity_defect": red.injectivity_defect(),
            "pencil_injectivity_margin": p.injectivity_margin()}, True


def cmd_povm_sweep(args, cfg):
    rep = povm_sweep(args.trials, cfg.seed, tol=cfg.tol)
    return rep.to_dict(), rep.passed


def cmd_audit(args, cfg):
    p = _pencil(args, cfg)
    try:
        payload = json.loads(Path(args.certificate).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read certificate {args.certificate}: {exc}", field="certificate") from exc
    # accept both a bare certificate and a full command report
    payload = payload.get("report", payload) if isinstance(payload, dict) else payload
    try:
        rep = audit_certificate(p, payload, cfg.tol)
    except (KeyError, TypeError) as exc:
        raise ParseError(f"certificate lacks field {exc}", field=str(exc)) from exc
    return rep.to_dict(), rep.passed


# -- parser ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=1e-9, help="absolute tolerance tau_abs")
    common.add_argument("--grid", type=int, default=32, help="grid points per dimension on F")
    common.add_argument("--samples", type=int, default=None,
                        help="sample budget (boundary samples or domination samples)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default=None, help="write the report here instead of stdout")
    common.add_argument("-v", "--verbose", action="store_true")

    ap = argparse.ArgumentParser(prog="spectracert", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, pencil=True, help=None):
        sp = sub.add_parser(name, parents=[common], help=help)
        if pencil:
            sp.add_argument("pencil", help="pencil JSON file or bundled example name")
        sp.set_defaults(fn=fn)
        return sp

    add("membership", cmd_membership, help="classify a point").add_argument("--point", required=True)
    add("stratify", cmd_stratify, help="kernel dimension of boundary points").add_argument(
        "--points", default=None, help="semicolon separated points; default samples the boundary")
    add("extremes", cmd_extremes, help="extreme point test with oracle cross-check")
    sp = add("perron-check", cmd_perron_check, pencil=False, help="Perron bound sweep")
    sp.add_argument("--trials", type=int, default=10_000)
    sp.add_argument("--low", type=float, default=0.5)
    sp.add_argument("--high", type=float, default=3.0)
    sp.add_argument("--matrix", default=None, help="JSON file with one matrix")
    for name, fn in (("section", cmd_section), ("certify", cmd_certify)):
        sp = add(name, fn, help=f"{name} for a pair of boundary points")
        sp.add_argument("--x", required=True)
        sp.add_argument("--y", required=True)
        sp.add_argument("--radius", type=float, default=None)
        sp.add_argument("--allow-non-extreme", action="store_true")
        if name == "certify":
            sp.add_argument("--epsilon", type=float, default=0.05)
    sp = add("certify-pair", cmd_certify_pair, help="glued certificate for two extreme points")
    sp.add_argument("--x", required=True)
    sp.add_argument("--y", required=True)
    sp.add_argument("--epsilon", type=float, default=0.05)
    sp.add_argument("--points-per-side", type=int, default=3)
    sp = add("povm-sweep", cmd_povm_sweep, pencil=False, help="finite separation sweep")
    sp.add_argument("--trials", type=int, default=10_000)
    add("reduce", cmd_reduce, help="affine hull reduction")
    add("audit", cmd_audit, help="re-check a certificate").add_argument("certificate")
    return ap


_DEFAULT_SAMPLES = {"certify": 512, "certify-pair": 128, "extremes": 400, "stratify": 64}


def _glue_points(argv):
    """Allow ``--y -1,0`` by rewriting it as ``--y=-1,0``."""
    out, it = [], iter(argv)
    for tok in it:
        if tok in POINT_FLAGS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def run(argv=None) -> tuple:
    """Parse ``argv`` and run the subcommand.

    Returns ``(exit_code, report_text, out_path)``; the report is already
    written when ``out_path`` is set.
    """
    args = build_parser().parse_args(_glue_points(list(sys.argv[1:] if argv is None else argv)))
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    try:
        samples = args.samples if args.samples is not None else _DEFAULT_SAMPLES.get(args.command, 512)
        cfg = RunConfig(args.command, args.tol, args.grid, samples, args.seed,
                        getattr(args, "pencil", None), args.out)
        report, ok = args.fn(args, cfg)
        code = EXIT_OK if ok else EXIT_UNVERIFIED
        body = {"command": args.command, "seed": cfg.seed, "verified": bool(ok), "report": report}
    except InvariantBreach as exc:
        code, body = EXIT_INTERNAL, {"command": args.command, "verified": False, "error": exc.to_dict()}
    except InputError as exc:
        code, body = EXIT_INPUT, {"command": args.command, "verified": False, "error": exc.to_dict()}
    except VerificationFailure as exc:
        code, body = EXIT_UNVERIFIED, {"command": args.command, "verified": False, "error": exc.to_dict()}
    except SpectraError as exc:  # pragma: no cover - every error belongs to a family above
        code, body = EXIT_INTERNAL, {"command": args.command, "verified": False, "error": exc.to_dict()}
    text = dumps(body)
    if args.out:
        Path(args.out).write_text(text)
    return code, text, args.out


def main(argv=None) -> int:
    code, text, out = run(argv)
    if not out:
        try:
            sys.stdout.write(text)
        except BrokenPipeError:  # pragma: no cover - reader closed early
            pass
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
