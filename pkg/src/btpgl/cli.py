"""Command-line front end.

Exit codes partition the failure classes so campaign scripts can triage
without parsing stderr: 1 parse/validation error, 2 improper intersection,
3 identity or oracle disagreement, 4 enumeration cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass

from . import building, cycles, serialize
from .errors import (
    BtpglError,
    EnumerationTooLarge,
    ImproperGenericIntersection,
    SchemaError,
)
from .lattices import LatticeBasis
from .padic import PAdicContext

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_IMPROPER = 2
EXIT_DISAGREE = 3
EXIT_ENUMERATION = 4


@dataclass(frozen=True)
class CampaignConfig:
    seed: int
    trials: int
    n: int
    p: int
    d: int
    max_val: int
    mode: str
    oracle: str

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.oracle not in ("formula", "bfs", "both"):
            raise ValueError("oracle must be formula, bfs or both")


def _load_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise SchemaError(path, "file not found") from None
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}:{exc.lineno}:{exc.colno}", exc.msg) from None


def _print_json(obj) -> None:
    print(json.dumps(obj, sort_keys=True))


def cmd_intersect(args) -> int:
    data = _load_json(args.instance)
    ctx, lattice, forms, cfg = serialize.parse_instance(data)
    report = cycles.properness_check(cfg)
    if report.kind is cycles.Properness.PROPER_HIGHER_DIM:
        dec = cycles.decompose_intersection(cfg)
        out = serialize.decomposition_to_json(dec)
        out["properness"] = report.kind.value
        out["r0"] = report.r0
        _print_json(out)
        return EXIT_OK
    if report.kind is cycles.Properness.IMPROPER:
        if forms is not None:
            try:
                cycles.intersect_hyperplanes(forms)
            except ImproperGenericIntersection as exc:
                print(f"ImproperGenericIntersection: {exc}", file=sys.stderr)
                return EXIT_IMPROPER
        print("Improper: cycles do not meet properly on the model", file=sys.stderr)
        return EXIT_IMPROPER
    if forms is not None:
        number = cycles.intersect_hyperplanes(forms)
    else:
        number = cycles.intersect_hyperplanes(cycles.realized_forms(cfg))
    _print_json({"number": number})
    return EXIT_OK


def cmd_dist(args) -> int:
    data = _load_json(args.instance)
    _, first, second = serialize.parse_lattice_pair(data)
    formula = building.dist(first, second)
    bfs = None
    if args.oracle in ("bfs", "both"):
        target = building.class_key(first, second)
        bfs = building.bfs_dist(first, first, {target}, radius_cap=formula)
        if bfs != formula:
            print(
                f"oracle mismatch: formula {formula}, bfs {bfs}",
                file=sys.stderr,
            )
            return EXIT_DISAGREE
    if args.oracle == "formula":
        print(formula)
    elif args.oracle == "bfs":
        print(bfs)
    else:
        print(formula)
        print(bfs)
    return EXIT_OK


def cmd_verify(args) -> int:
    config = CampaignConfig(
        seed=args.seed,
        trials=args.trials,
        n=args.n,
        p=args.p,
        d=args.d if args.d is not None else (args.n if args.mode == "hyperplanes" else 2),
        max_val=args.max_val,
        mode=args.mode,
        oracle=args.oracle,
    )
    start = time.perf_counter()
    agreements = 0
    rejections = 0
    bfs_checked = 0
    max_lhs = 0
    failure = None
    for trial in range(config.trials):
        sample = cycles.random_instance(
            seed=config.seed + trial,
            n=config.n,
            p=config.p,
            d=config.d,
            max_val=config.max_val,
            mode=config.mode,
        )
        rejections += sample.rejections
        if config.mode == "higherdim":
            dec = cycles.decompose_intersection(sample.config)
            permuted = cycles.CycleConfiguration(
                sample.config.ambient, tuple(reversed(sample.config.submodules))
            )
            retry = cycles.decompose_intersection(permuted)
            agree = retry.special_multiplicity == dec.special_multiplicity
            max_lhs = max(max_lhs, dec.special_multiplicity)
        else:
            report = cycles.verify_intersection_identity(sample.config)
            agree = report.agree
            max_lhs = max(max_lhs, report.lhs)
            if agree and config.oracle in ("bfs", "both") and config.n <= 3 and report.rhs <= 4:
                fam = cycles.vertex_family(sample.config)
                keys = cycles.family_window_keys(sample.config.ambient, fam)
                found = building.bfs_dist(
                    sample.config.ambient, sample.config.ambient, keys, radius_cap=report.rhs
                )
                bfs_checked += 1
                agree = found == report.rhs
        if agree:
            agreements += 1
        elif failure is None:
            failure = (trial, sample)
    wall = time.perf_counter() - start
    summary = {
        "trials": config.trials,
        "agreements": agreements,
        "rejections": rejections,
        "max_lhs": max_lhs,
        "wall_time": round(wall, 3),
    }
    if config.oracle in ("bfs", "both"):
        summary["bfs_checked"] = bfs_checked
    _print_json(summary)
    if failure is not None:
        trial, sample = failure
        path = f"{args.out or '.'}/disagreement_trial_{trial}.json"
        payload = serialize.instance_to_json(
            config.p,
            sample.config.ambient,
            sample.forms if sample.forms is not None else sample.config.submodules,
        )
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2)
        print(f"disagreement at trial {trial}; instance dumped to {path}", file=sys.stderr)
        return EXIT_DISAGREE
    return EXIT_OK


def cmd_export_dot(args) -> int:
    ctx = PAdicContext(args.p)
    center = LatticeBasis.standard(ctx, args.n)
    highlighted = set()
    if args.instance:
        data = _load_json(args.instance)
        _, lattice, _, cfg = serialize.parse_instance(data)
        center = lattice
        fam = cycles.vertex_family(cfg)
        highlighted = cycles.family_window_keys(center, fam)
    nodes, edges = building.bfs_ball(center, center, args.radius)
    dot = building.render_dot(nodes, edges, highlighted=highlighted)
    sidecar = {
        key.to_hex(): serialize.lattice_to_json(lattice) for key, lattice in nodes
    }
    dot_path = f"{args.out}.dot"
    json_path = f"{args.out}.json"
    with open(dot_path, "w", encoding="utf-8") as fh:
        fh.write(dot)
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=False)
    _print_json({"nodes": len(nodes), "edges": len(edges), "dot": dot_path, "json": json_path})
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="btpgl",
        description="Exact intersection numbers of linear cycles on p-adic "
        "projective space and distances in the PGL lattice-class building.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_int = sub.add_parser("intersect", help="intersection number or cycle decomposition")
    p_int.add_argument("instance", help="instance JSON file")
    p_int.set_defaults(func=cmd_intersect)

    p_dist = sub.add_parser("dist", help="distance between two lattice classes")
    p_dist.add_argument("instance", help="JSON file with lattice_M and lattice_L")
    p_dist.add_argument("--oracle", choices=("formula", "bfs", "both"), default="formula")
    p_dist.set_defaults(func=cmd_dist)

    p_ver = sub.add_parser("verify", help="seeded verification campaign")
    p_ver.add_argument("--seed", type=int, default=1)
    p_ver.add_argument("--trials", type=int, default=100)
    p_ver.add_argument("--n", type=int, default=3)
    p_ver.add_argument("--p", type=int, default=3)
    p_ver.add_argument("--d", type=int, default=None)
    p_ver.add_argument("--max-val", type=int, default=4)
    p_ver.add_argument("--mode", choices=cycles.MODES, default="hyperplanes")
    p_ver.add_argument("--oracle", choices=("formula", "bfs", "both"), default="formula")
    p_ver.add_argument("--out", default=None, help="directory for disagreement dumps")
    p_ver.set_defaults(func=cmd_verify)

    p_dot = sub.add_parser("export-dot", help="export a BFS ball as DOT plus JSON sidecar")
    p_dot.add_argument("--n", type=int, default=2)
    p_dot.add_argument("--p", type=int, default=2)
    p_dot.add_argument("--radius", type=int, default=1)
    p_dot.add_argument("--out", required=True, help="output path prefix")
    p_dot.add_argument(
        "--instance",
        default=None,
        help="optional instance file; its model becomes the center and the "
        "vertex family of its cycles is highlighted",
    )
    p_dot.set_defaults(func=cmd_export_dot)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SchemaError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ImproperGenericIntersection as exc:
        print(f"ImproperGenericIntersection: {exc}", file=sys.stderr)
        return EXIT_IMPROPER
    except EnumerationTooLarge as exc:
        print(f"EnumerationTooLarge: {exc}", file=sys.stderr)
        return EXIT_ENUMERATION
    except (ValueError, BtpglError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
