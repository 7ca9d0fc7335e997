"""Command-line driver.

Exit codes: 0 and 1 are mathematical outcomes (success / negative answer),
2 is malformed input, 3 an evidence conflict during classification, 4 an
exhausted sign-pattern search, 5 multilateration without a solution.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
import tempfile
from importlib import resources
from pathlib import Path
from typing import Optional

import numpy as np

from . import bisector, gauss, norms, resolve
from .errors import (
    DegenerateAnchors,
    DegenerateInput,
    DimensionMismatch,
    InvalidNorm,
    MinkresError,
    NormIsEuclidean,
    NormIsStrictlyConvex,
    NoSignPattern,
    NoSolution,
    NotStrictlyConvex,
)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_MALFORMED = 2
EXIT_CONFLICT = 3
EXIT_BUDGET = 4
EXIT_NO_SOLUTION = 5

DEFAULT_SEED = 20240501

_MALFORMED = (InvalidNorm, DimensionMismatch, DegenerateInput, DegenerateAnchors, ValueError, OSError, KeyError, TypeError)


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# inputs


def fixture_dir() -> Path:
    return Path(str(resources.files("minkres") / "fixtures"))


def _fixture_name(name: str) -> str:
    m = re.fullmatch(r"l(\d+(?:\.\d+)?|inf)(?:_dim)?(\d)", name)
    return f"l{m.group(1)}_dim{m.group(2)}" if m else name


def resolve_path(source: str) -> Path:
    """A path on disk, or the name of a shipped fixture (with or without ``.json``)."""
    p = Path(source)
    if p.exists():
        return p
    stem = _fixture_name(p.name[:-5] if p.name.endswith(".json") else p.name)
    q = fixture_dir() / f"{stem}.json"
    if q.exists():
        return q
    raise FileNotFoundError(f"no such file or fixture: {source}")


def load_norm_arg(source: Optional[str]) -> norms.NormSpec:
    if not source:
        raise UsageError("--norm is required")
    return norms.load_norm(resolve_path(source))


def parse_vector(text: str) -> np.ndarray:
    try:
        return np.array([float(t) for t in text.replace(" ", "").split(",") if t], dtype=float)
    except ValueError:
        raise UsageError(f"cannot parse vector {text!r}") from None


def load_points(source: str) -> tuple[np.ndarray, Optional[np.ndarray]]:
    """Anchors from a JSON file (a list, or an object with ``anchors`` and optional ``distances``) or inline ``a,b;c,d;...``."""
    try:
        path = resolve_path(source)
    except FileNotFoundError:
        if ";" not in source:
            raise
        return np.array([parse_vector(row) for row in source.split(";")]), None
    data = json.loads(path.read_text())
    if isinstance(data, dict):
        dist = data.get("distances")
        return np.array(data["anchors"], dtype=float), None if dist is None else np.array(dist, dtype=float)
    return np.array(data, dtype=float), None


def seed_from(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("MR_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"MR_SEED must be an integer, got {env!r}") from None
    return DEFAULT_SEED


# ---------------------------------------------------------------------------
# outputs


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v + 0.0 if np.isfinite(v) else str(v)
    return obj


def dumps(obj) -> str:
    # json writes floats with repr(), the shortest string that round-trips.
    return json.dumps(_jsonable(obj), indent=2) + "\n"


def write_atomic(path: str, text: str):
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=target.parent if str(target.parent) else ".", prefix=f".{target.name}.")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit(args, payload):
    text = dumps(payload)
    if args.out:
        write_atomic(args.out, text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# commands


def cmd_classify(args) -> int:
    n = load_norm_arg(args.norm)
    budget = gauss.ClassifyBudget(pairs=args.budget or 1000)
    result = gauss.classify_norm(n, budget, seed_from(args))
    emit(args, {"norm": n.to_dict(), **result.to_dict()})
    return EXIT_CONFLICT if result.conflict else EXIT_OK


def cmd_bisector_sample(args) -> int:
    n = load_norm_arg(args.norm)
    x = parse_vector(args.x) if args.x else np.zeros(n.dim)
    if args.y is None:
        raise UsageError("--y is required")
    y = parse_vector(args.y)
    b = bisector.Bisector(n, x, y)
    radii = [float(r) for r in parse_vector(args.radii)] if args.radii else None
    kw = {"samples_per_radius": args.budget} if args.budget else {}
    fit = bisector.slab_fit(b, radii=radii, seed=seed_from(args), flat_tol=args.tol or 1e-8, **kw)
    payload = {"norm": n.to_dict(), "x": x, "y": y, **fit.to_dict()}
    if n.dim == 2 or args.plane:
        plane = None if n.dim == 2 else [parse_vector(v) for v in args.plane.split(";")]
        seg = norms.flat_segment_parallel_to(n, x - y, plane)
        if seg is not None:
            cone = bisector.flat_ray_cone(b, seg)
            payload["cone"] = {"apex": cone.apex, "gen_a": cone.gen_a, "gen_b": cone.gen_b}
    if args.csv:
        write_atomic(args.csv, fit.samples_csv())
    emit(args, payload)
    return EXIT_OK


def cmd_resolve_check(args) -> int:
    n = load_norm_arg(args.norm)
    if not args.anchors:
        raise UsageError("--anchors is required")
    pts, _ = load_points(args.anchors)
    a = resolve.AnchorSet(pts)
    budget = resolve.ResolveBudget(starts=args.budget) if args.budget else resolve.ResolveBudget()
    rep = resolve.is_resolving_for_hull(a, n, budget, seed_from(args))
    emit(args, {"norm": n.to_dict(), "anchors": a.points, **rep.to_dict()})
    return EXIT_OK if rep.resolving else EXIT_NEGATIVE


def cmd_counterexample(args) -> int:
    n = load_norm_arg(args.norm)
    try:
        cert = resolve.counterexample(n, seed=seed_from(args))
    except (NormIsEuclidean, NormIsStrictlyConvex) as exc:
        emit(args, {"refusal": True, "reason": type(exc).__name__, "message": str(exc), "norm": n.to_dict()})
        return EXIT_NEGATIVE
    report = resolve.verify_certificate(cert)
    emit(args, {**cert.to_dict(), "verification": report.to_dict()})
    return EXIT_OK if report.passed else EXIT_BUDGET


def cmd_multilaterate(args) -> int:
    n = load_norm_arg(args.norm)
    if not args.anchors:
        raise UsageError("--anchors is required")
    pts, dist = load_points(args.anchors)
    if args.distances:
        dist = parse_vector(args.distances)
    if dist is None:
        raise UsageError("distances are required (--distances or a 'distances' key in the anchors file)")
    a = resolve.AnchorSet(pts)
    r = resolve.DistanceVector(dist)
    kw = {"grid": args.budget} if args.budget else {}
    try:
        sols = resolve.multilaterate(a, n, r, tol=args.tol or norms.DEFAULT_TOL, **kw)
    except NoSolution as exc:
        emit(args, {"solutions": [], "count": 0, "message": str(exc), "best_residual": exc.best_residual})
        return EXIT_NO_SOLUTION
    out = [{"x": s, "residual": float(np.max(np.abs(n.evaluate(s - a.points) - r.values)))} for s in sols]
    emit(args, {"solutions": out, "count": len(out), "ambiguous": len(out) > 1})
    return EXIT_OK if len(out) == 1 else EXIT_NEGATIVE


COMMANDS = {
    "classify": cmd_classify,
    "bisector-sample": cmd_bisector_sample,
    "resolve-check": cmd_resolve_check,
    "counterexample": cmd_counterexample,
    "multilaterate": cmd_multilaterate,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--norm", help="norm JSON file or shipped fixture name (e.g. l4_dim3, linf2, euclid3)")
    common.add_argument("--seed", type=int, default=None, help="random seed (default: $MR_SEED or a fixed constant)")
    common.add_argument("--tol", type=float, default=None, help="tolerance override")
    common.add_argument("--out", help="write the JSON report here instead of stdout")
    common.add_argument("--csv", help="CSV output path (bisector-sample point cloud)")
    common.add_argument("--budget", type=int, default=None,
                        help="search budget: pair-search starts, slab samples per radius, grid steps or defect pairs")

    parser = argparse.ArgumentParser(prog="minkres", description="Bisectors, multilateration and resolving sets in normed spaces.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("classify", parents=[common], help="euclidean / strictly convex / not strictly convex")
    p = sub.add_parser("bisector-sample", parents=[common], help="sample B(x, y) and fit a slab")
    p.add_argument("--x", help="comma-separated coordinates (default: origin)")
    p.add_argument("--y", help="comma-separated coordinates")
    p.add_argument("--radii", help="comma-separated increasing radii")
    p.add_argument("--plane", help="two spanning vectors 'a1,a2,..;b1,b2,..' for the cone search above dimension 2")
    p = sub.add_parser("resolve-check", parents=[common], help="search for two hull points with equal anchor distances")
    p.add_argument("--anchors", help="JSON file or inline 'x,y;x,y;...'")
    sub.add_parser("counterexample", parents=[common], help="synthesise a verified certificate")
    p = sub.add_parser("multilaterate", parents=[common], help="recover hull points from anchor distances")
    p.add_argument("--anchors", help="JSON file or inline 'x,y;x,y;...'")
    p.add_argument("--distances", help="comma-separated distances")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_MALFORMED if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except NoSignPattern as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except NotStrictlyConvex as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NEGATIVE
    except (UsageError, json.JSONDecodeError, *_MALFORMED) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except MinkresError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
