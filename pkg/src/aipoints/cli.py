"""Command-line interface: point, converge, symmetry, audit.

stdout carries data (JSON or CSV), stderr carries diagnostics.  Every output
embeds a deterministic run manifest (command, body paths, config echo, tool
version); identical manifests produce byte-identical output.  Exit codes:
0 success, 2 parse errors, 3 degenerate weights, 4 precondition violations.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .classical import centroid_rule, john_rule
from .errors import (AnchorOutsideFixedSet, BodyFormatError, ConfigError,
                     ConvergenceFailure, DegenerateBody, DegenerateWeights,
                     InvalidRadius, SingularMap, TruncationTooSmall)
from .estimator import (SWEEP_CSV_HEADER, EstimatorConfig, convergence_sweep,
                        estimate_record, estimate_tk)
from .geometry import ConvexPolygon, apply_affine, load_polygon
from .haar import sample_sl2pm
from .symmetry import automorphism_group, fixed_points, report_to_dict
from .unimodular import VolumePreservingAffineMap, singular_values

EXIT_PARSE = 2
EXIT_DEGENERATE_WEIGHTS = 3
EXIT_PRECONDITION = 4

_PRECONDITION_ERRORS = (DegenerateBody, SingularMap, AnchorOutsideFixedSet,
                        ConfigError, InvalidRadius, TruncationTooSmall,
                        ConvergenceFailure, ValueError)


def _anchor_type(text: str) -> np.ndarray:
    try:
        x, y = (float(part) for part in text.split(","))
    except Exception as exc:
        raise argparse.ArgumentTypeError("anchor must be 'x,y'") from exc
    return np.array([x, y])


def _ks_type(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except Exception as exc:
        raise argparse.ArgumentTypeError("ks must be a comma list of integers") from exc


def _default_threads() -> int:
    try:
        return max(1, int(os.environ.get("AIP_THREADS", "1")))
    except ValueError:
        return 1


def _add_estimator_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--k", type=int, default=4, help="weight exponent (default 4)")
    parser.add_argument("--samples", type=int, default=200_000,
                        help="Monte Carlo samples per run (default 200000)")
    parser.add_argument("--radius", type=float, default=16.0,
                        help="truncation radius R for the group ball (default 16)")
    parser.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    parser.add_argument("--threads", type=int, default=_default_threads(),
                        help="worker threads (default $AIP_THREADS or 1)")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aipoints",
        description="Affine invariant points of planar convex bodies.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_point = sub.add_parser("point", help="evaluate one point rule on a body")
    p_point.add_argument("body", type=Path, help="polygon JSON file")
    p_point.add_argument("--rule", required=True, choices=("centroid", "john", "tk"))
    p_point.add_argument("--anchor", type=_anchor_type, default=None,
                         help="anchor x,y for the tk rule (default: base-body centroid)")
    p_point.add_argument("--base-body", type=Path, default=None,
                         help="body defining the tk weight (default: the body itself)")
    _add_estimator_flags(p_point)

    p_conv = sub.add_parser("converge", help="sweep k and tabulate errors to the anchor")
    p_conv.add_argument("body", type=Path)
    p_conv.add_argument("--anchor", type=_anchor_type, required=True)
    p_conv.add_argument("--ks", type=_ks_type, default=[2, 4, 8, 16])
    p_conv.add_argument("--out", type=Path, required=True, help="CSV output path")
    p_conv.add_argument("--unsafe-anchor", action="store_true",
                        help="skip the fixed-set check on the anchor")
    _add_estimator_flags(p_conv)

    p_sym = sub.add_parser("symmetry", help="report the affine automorphism group")
    p_sym.add_argument("body", type=Path)

    p_audit = sub.add_parser("audit", help="equivariance residuals over a body directory")
    p_audit.add_argument("bodies", type=Path, help="directory of polygon JSON files")
    p_audit.add_argument("--rules", default="centroid,john",
                         help="comma list from {centroid,john,tk}")
    p_audit.add_argument("--maps", type=int, default=20,
                         help="random volume-preserving maps per body (default 20)")
    p_audit.add_argument("--out", type=Path, default=None,
                         help="CSV output path (default stdout)")
    _add_estimator_flags(p_audit)
    return parser


def _config_from_args(args) -> EstimatorConfig:
    return EstimatorConfig(k=args.k, samples=args.samples, R=args.radius,
                           seed=args.seed)


def _manifest(command: str, bodies: dict, config: dict) -> dict:
    return {
        "command": command,
        "bodies": {key: str(val) for key, val in bodies.items()},
        "config": config,
        "version": __version__,
    }


def _emit_json(payload: dict) -> None:
    sys.stdout.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _write_csv(lines: list[str], out: Path | None) -> None:
    text = "\n".join(lines) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text, encoding="utf-8")


def _unit_frame(poly: ConvexPolygon) -> tuple[ConvexPolygon, float]:
    scale = float(poly.area ** 0.5)
    return ConvexPolygon(poly.vertices / scale), scale


def cmd_point(args) -> int:
    body = load_polygon(args.body)
    if args.rule in ("centroid", "john"):
        rule = centroid_rule() if args.rule == "centroid" else john_rule()
        value = rule.evaluate(body)
        manifest = _manifest("point", {"body": args.body},
                             {"rule": args.rule})
        _emit_json({"rule": args.rule,
                    "value": [float(value[0]), float(value[1])],
                    "manifest": manifest})
        return 0

    base_path = args.base_body if args.base_body is not None else args.body
    base = load_polygon(base_path)
    anchor = args.anchor if args.anchor is not None else np.array(base.centroid)
    cfg = _config_from_args(args)
    # unit-area frame for the base body: T_{k,sK,sv}(sL) = s T_{k,K,v}(L)
    base_unit, scale = _unit_frame(base)
    est = estimate_tk(base_unit, anchor / scale,
                      ConvexPolygon(body.vertices / scale), cfg,
                      threads=args.threads)
    record = estimate_record(est, cfg)
    record["value"] = [float(scale * est.value[0]), float(scale * est.value[1])]
    record["std_error"] = [float(scale * est.std_error[0]),
                           float(scale * est.std_error[1])]
    record["r_stability"] = float(scale * est.r_stability)
    manifest = _manifest("point", {"body": args.body, "base_body": base_path},
                         {"rule": "tk", "k": cfg.k, "samples": cfg.samples,
                          "R": cfg.R, "seed": cfg.seed, "threads": args.threads,
                          "anchor": [float(anchor[0]), float(anchor[1])]})
    record["rule"] = "tk"
    record["manifest"] = manifest
    _emit_json(record)
    return 0


def cmd_converge(args) -> int:
    body = load_polygon(args.body)
    cfg = _config_from_args(args)
    unit, scale = _unit_frame(body)
    anchor = np.asarray(args.anchor, float)
    rows = convergence_sweep(unit, anchor / scale, args.ks, cfg,
                             threads=args.threads,
                             check_anchor=not args.unsafe_anchor)
    manifest = _manifest("converge", {"body": args.body},
                         {"ks": list(args.ks), "samples": cfg.samples,
                          "R": cfg.R, "seed": cfg.seed, "threads": args.threads,
                          "anchor": [float(anchor[0]), float(anchor[1])],
                          "unsafe_anchor": bool(args.unsafe_anchor)})
    lines = ["# manifest: " + json.dumps(manifest, sort_keys=True),
             ",".join(SWEEP_CSV_HEADER)]
    for row in rows:
        value = scale * row.estimate.value
        se = scale * row.estimate.std_error
        err = scale * row.err_to_v
        lines.append(",".join([str(row.k)] + [repr(float(x))
                                              for x in (*value, *se, err)]))
    _write_csv(lines, args.out)
    return 0


def cmd_symmetry(args) -> int:
    body = load_polygon(args.body)
    report = automorphism_group(body)
    payload = report_to_dict(report)
    payload["manifest"] = _manifest("symmetry", {"body": args.body}, {})
    _emit_json(payload)
    return 0


def _audit_maps(count: int, seed: int) -> list[VolumePreservingAffineMap]:
    rng = np.random.default_rng(seed)
    maps = []
    for _ in range(count):
        linear = sample_sl2pm(2.0, rng).phi.linear
        shift = rng.uniform(-1.0, 1.0, size=2)
        maps.append(VolumePreservingAffineMap(linear, shift))
    return maps


def cmd_audit(args) -> int:
    rules = [part.strip() for part in args.rules.split(",") if part.strip()]
    for rule in rules:
        if rule not in ("centroid", "john", "tk"):
            raise ValueError(f"unknown rule {rule!r}")
    paths = sorted(args.bodies.glob("*.json"))
    if not paths:
        raise ValueError(f"no polygon JSON files under {args.bodies}")
    cfg = _config_from_args(args)
    maps = _audit_maps(args.maps, args.seed)
    manifest = _manifest("audit", {"bodies": args.bodies},
                         {"rules": rules, "maps": args.maps, "k": cfg.k,
                          "samples": cfg.samples, "R": cfg.R,
                          "seed": cfg.seed, "threads": args.threads})
    lines = ["# manifest: " + json.dumps(manifest, sort_keys=True),
             "body,rule,map_index,residual,gate,status"]
    residuals: dict[str, list[float]] = {rule: [] for rule in rules}

    point_rules = {"centroid": (centroid_rule(), 1e-10),
                   "john": (john_rule(), 1e-5)}
    for path in paths:
        body = load_polygon(path)
        for rule in rules:
            base = _audit_base(rule, body, point_rules, cfg, args.threads)
            for index, tau in enumerate(maps):
                try:
                    moved = apply_affine(tau, body)
                    if rule == "tk":
                        residual, gate = _tk_residual(base, moved, tau, cfg,
                                                      args.threads)
                    else:
                        fn, gate = point_rules[rule]
                        residual = float(np.linalg.norm(
                            fn.evaluate(moved) - tau.apply(base)))
                except Exception as exc:  # keep auditing the rest
                    lines.append(f"{path.name},{rule},{index},,,"
                                 f"error:{type(exc).__name__}")
                    continue
                status = "ok" if residual <= gate else "exceed"
                residuals[rule].append(residual)
                lines.append(f"{path.name},{rule},{index},{residual!r},"
                             f"{gate!r},{status}")

    for rule in rules:
        vals = np.array(residuals[rule])
        if vals.size:
            lines.append(f"# summary rule={rule} n={vals.size} "
                         f"p50={np.quantile(vals, 0.5)!r} "
                         f"p90={np.quantile(vals, 0.9)!r} max={vals.max()!r}")
        else:
            lines.append(f"# summary rule={rule} n=0")
    _write_csv(lines, args.out)
    return 0


def _audit_base(rule: str, body: ConvexPolygon, point_rules: dict,
                cfg: EstimatorConfig, threads: int):
    """Per-body data reused across maps: a point for the exact rules, the
    unit frame plus base estimate for tk."""
    if rule != "tk":
        return point_rules[rule][0].evaluate(body)
    unit, scale = _unit_frame(body)
    anchor = np.array(unit.centroid)
    est = estimate_tk(unit, anchor, unit, cfg, threads=threads)
    return unit, scale, anchor, est


def _tk_residual(base, moved: ConvexPolygon, tau: VolumePreservingAffineMap,
                 cfg: EstimatorConfig, threads: int) -> tuple[float, float]:
    unit, scale, anchor, base_est = base
    moved_est = estimate_tk(unit, anchor,
                            ConvexPolygon(moved.vertices / scale), cfg,
                            threads=threads)
    lin = tau.linear.matrix
    base_val = scale * base_est.value
    moved_val = scale * moved_est.value
    residual = float(np.linalg.norm(moved_val - tau.apply(base_val)))
    se_moved = scale * moved_est.std_error
    se_base = scale * base_est.std_error
    var_mapped = (lin * lin) @ (se_base * se_base)
    gate = (3.0 * float(np.sqrt(np.sum(se_moved ** 2) + np.sum(var_mapped)))
            + scale * moved_est.r_stability
            + singular_values(lin).lam1 * scale * base_est.r_stability)
    return residual, gate


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handler = {"point": cmd_point, "converge": cmd_converge,
               "symmetry": cmd_symmetry, "audit": cmd_audit}[args.command]
    started = time.perf_counter()
    try:
        code = handler(args)
    except DegenerateWeights as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE_WEIGHTS
    except (BodyFormatError, json.JSONDecodeError, FileNotFoundError,
            IsADirectoryError, NotADirectoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except _PRECONDITION_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    print(f"# {args.command}: {time.perf_counter() - started:.2f}s wall clock",
          file=sys.stderr)
    return code


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
