"""``mds22`` command line.

Exit codes: 0 success, 2 usage/config, 3 I/O, 4 missing helpers,
5 MDS failure, 6 field too large for the exhaustive oracle.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from . import constructions as cons
from .code import CodeSpec, mds_check
from .errors import (
    BadArity,
    BadFieldDescriptor,
    FieldMismatch,
    FieldTooLarge,
    FieldTooSmall,
    HeaderMismatch,
    MDSError,
    MdsCheckFailed,
    MissingHelper,
    NotPrime,
    ReducibleModulus,
    TooFewShards,
)
from .gf import GF256, FieldSpec, parse_field
from .linalg import Mat
from .oracle import MAX_ORACLE_ORDER, bounds_report
from .repair import repair_stats

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_MISSING_HELPERS = 4
EXIT_MDS = 5
EXIT_ORACLE_GUARD = 6


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


@dataclass
class CliConfig:
    command: str
    construction: Optional[str] = None
    k: Optional[int] = None
    field: Optional[FieldSpec] = None
    output: str = "human"


def _field(desc: Optional[str], default: Optional[FieldSpec]) -> Optional[FieldSpec]:
    if desc is None:
        return default
    try:
        return parse_field(desc)
    except (BadFieldDescriptor, NotPrime, ReducibleModulus) as exc:
        raise CliError(f"bad --field: {exc}", EXIT_USAGE) from exc


def _config(args) -> CliConfig:
    cfg = CliConfig(args.command, output="json" if getattr(args, "json", False) else "human")
    if getattr(args, "k", None) is not None:
        if args.k < 2:
            raise CliError("--k must be at least 2", EXIT_USAGE)
        cfg.k = args.k
    cfg.construction = getattr(args, "construction", None)
    return cfg


def _build(construction: str, k: int, field: Optional[FieldSpec]) -> CodeSpec:
    try:
        return cons.build(construction, k, field)
    except (FieldTooSmall, BadArity) as exc:
        raise CliError(str(exc), EXIT_USAGE) from exc
    except MdsCheckFailed as exc:
        raise CliError(str(exc), EXIT_MDS) from exc


def _emit(cfg: CliConfig, payload: dict, human: str) -> None:
    if cfg.output == "json":
        print(json.dumps(payload, indent=2, sort_keys=False))
    else:
        print(human)


# commands ------------------------------------------------------------------

def cmd_encode(args) -> int:
    from .store import encode_file

    cfg = _config(args)
    field = _field(args.field, GF256)
    if field != GF256:
        raise CliError("the shard store works over GF(2^8) only", EXIT_USAGE)
    code = _build(args.construction, cfg.k, field)
    try:
        paths = encode_file(args.input, code, args.out)
    except OSError as exc:
        raise CliError(f"I/O error: {exc}", EXIT_IO) from exc
    manifest = {"construction": args.construction, "k": cfg.k, "n": code.n,
                "field": field.descriptor(), "shards": [str(p) for p in paths]}
    _emit(cfg, manifest, "\n".join(str(p) for p in paths))
    return EXIT_OK


def cmd_decode(args) -> int:
    from .store import decode_file

    cfg = _config(args)
    try:
        data = decode_file(args.dir, args.output)
    except TooFewShards as exc:
        raise CliError(str(exc), EXIT_MISSING_HELPERS) from exc
    except HeaderMismatch as exc:
        raise CliError(str(exc), EXIT_IO) from exc
    except OSError as exc:
        raise CliError(f"I/O error: {exc}", EXIT_IO) from exc
    _emit(cfg, {"output": args.output, "bytes": len(data)}, f"wrote {len(data)} bytes to {args.output}")
    return EXIT_OK


def cmd_repair(args) -> int:
    from .store import repair_shard

    cfg = _config(args)
    if args.node < 1:
        raise CliError("--node is 1-based", EXIT_USAGE)
    try:
        path, report = repair_shard(args.dir, args.node, out_path=args.out)
    except MissingHelper as exc:
        raise CliError(str(exc), EXIT_MISSING_HELPERS) from exc
    except HeaderMismatch as exc:
        raise CliError(str(exc), EXIT_IO) from exc
    except IndexError as exc:
        raise CliError(str(exc), EXIT_USAGE) from exc
    except OSError as exc:
        raise CliError(f"I/O error: {exc}", EXIT_IO) from exc
    lines = [f"rebuilt {path}", f"{'helper':>6} {'sent':>10} {'read':>10}"]
    for h in report.helpers:
        lines.append(f"{h['node']:>6} {h['symbols_sent']:>10} {h['symbols_read']:>10}")
    lines.append(f"{'total':>6} {report.total_sent:>10} {report.total_read:>10}"
                 f"  ({report.stripes} stripes)")
    _emit(cfg, report.to_json(), "\n".join(lines))
    return EXIT_OK


def _load_custom(path: str) -> CodeSpec:
    try:
        spec = json.loads(Path(path).read_text())
    except OSError as exc:
        raise CliError(f"I/O error: {exc}", EXIT_IO) from exc
    except ValueError as exc:
        raise CliError(f"bad code file: {exc}", EXIT_USAGE) from exc
    field = _field(spec.get("field"), GF256)
    try:
        blocks = tuple(Mat.from_rows(field, b) for b in spec["h_blocks"])
        repair = spec.get("repair")
        repair = tuple(Mat.from_rows(field, m) for m in repair) if repair else None
        return CodeSpec(int(spec["k"]), field, blocks, repair, "custom")
    except (KeyError, TypeError, ValueError) as exc:
        raise CliError(f"bad code file: {exc}", EXIT_USAGE) from exc


def cmd_verify(args) -> int:
    cfg = _config(args)
    if args.construction == "custom":
        if not args.h_file:
            raise CliError("--construction custom needs --h-file", EXIT_USAGE)
        code = _load_custom(args.h_file)
    else:
        if cfg.k is None:
            raise CliError("--k is required", EXIT_USAGE)
        field = _field(args.field, None)
        try:
            code = cons.build(args.construction, cfg.k, field, check=False)
        except (FieldTooSmall, BadArity) as exc:
            raise CliError(str(exc), EXIT_USAGE) from exc

    ok, pair = mds_check(code)
    result = {"construction": code.construction_id, "k": code.k, "n": code.n,
              "field": code.field.descriptor(), "mds": ok,
              "failing_pair": list(pair) if pair else None}
    lines = [f"{code.construction_id} k={code.k} n={code.n} over {code.field.descriptor()}",
             f"  MDS: {'pass' if ok else f'FAIL at pair {pair}'}"]
    passed = ok
    if ok and code.construction_id in cons.PATTERN_MEASURE:
        measure = cons.PATTERN_MEASURE[code.construction_id]
        pattern_ok = cons.repair_pattern(code, measure) == cons.expected_pattern(code)
        metric = "bandwidth" if code.construction_id == "c1" else "io"
        costs = [getattr(repair_stats(code, code.designed(i)), metric) for i in code.nodes()]
        sizes = {i: len(g) for g in code.groups for i in g}
        achieved = all(c == code.k + sizes[i] for i, c in zip(code.nodes(), costs))
        result.update({"pattern": measure, "pattern_ok": pattern_ok, "metric": metric,
                       "per_node": costs, "max": max(costs), "achieved": achieved})
        lines.append(f"  {measure}(M_i H_j) group pattern: {'pass' if pattern_ok else 'FAIL'}")
        lines.append(f"  designed {metric}: {costs} (max {max(costs)})"
                     f" {'= k + |group|' if achieved else 'MISMATCH'}")
        passed = pattern_ok and achieved
    result["pass"] = passed
    _emit(cfg, result, "\n".join(lines))
    return EXIT_OK if passed else EXIT_MDS


def _fmt(x) -> str:
    return f"{x.numerator}/{x.denominator}" if getattr(x, "denominator", 1) != 1 else str(int(x))


def cmd_bounds(args) -> int:
    cfg = _config(args)
    field = _field(args.field, None)
    if field.order > MAX_ORACLE_ORDER:
        raise CliError(f"exhaustive search needs q <= {MAX_ORACLE_ORDER}", EXIT_ORACLE_GUARD)
    code = _build(args.construction, cfg.k, field)
    try:
        rep = bounds_report(code)
    except FieldTooLarge as exc:
        raise CliError(str(exc), EXIT_ORACLE_GUARD) from exc
    sat = rep.satisfied
    lines = [f"{rep.construction} k={rep.k} over {rep.field}",
             f"{'node':>5} {'beta':>5} {'gamma':>6} {'gamma_relaxed':>14}"]
    for o in rep.per_node:
        lines.append(f"{o.node:>5} {o.beta:>5} {o.gamma:>6} {o.gamma_relaxed:>14}")
    lines.append(f"{'quantity':<10} {'observed':>9} {'bound':>7}  ok")
    for name, obs, bnd in (("avg_beta", rep.avg_beta, rep.bound_avg_beta),
                           ("max_beta", rep.max_beta, rep.bound_max_beta),
                           ("avg_gamma", rep.avg_gamma, rep.bound_avg_gamma),
                           ("max_gamma", rep.max_gamma, rep.bound_max_gamma)):
        lines.append(f"{name:<10} {_fmt(obs):>9} {_fmt(bnd):>7}  {sat[name]}")
    _emit(cfg, rep.to_json(), "\n".join(lines))
    return EXIT_OK


def cmd_report(args) -> int:
    from .report import write_report

    cfg = _config(args)
    if args.k_min < 2 or args.k_max < args.k_min:
        raise CliError("need 2 <= --k-min <= --k-max", EXIT_USAGE)
    oracle_field = _field(args.oracle_field, None)
    if oracle_field is not None and oracle_field.order > MAX_ORACLE_ORDER:
        raise CliError(f"exhaustive search needs q <= {MAX_ORACLE_ORDER}", EXIT_ORACLE_GUARD)
    try:
        summary = write_report(args.construction, range(args.k_min, args.k_max + 1),
                               args.out, oracle_field)
    except OSError as exc:
        raise CliError(f"I/O error: {exc}", EXIT_IO) from exc
    _emit(cfg, summary, f"wrote {summary['csv']} and {summary['figure']}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mds22", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, k_required=True, construction=("c1", "c2")):
        p.add_argument("--k", type=int, required=k_required)
        p.add_argument("--construction", choices=construction, required=True)
        p.add_argument("--field", help="gf:p=<prime>, gf:2^<m> or gf:2^<m>/0x<poly>")
        p.add_argument("--json", action="store_true", help="machine-readable output")

    p = sub.add_parser("encode", help="split a file into k+2 shards")
    common(p)
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="rebuild the original file from >= k shards")
    p.add_argument("--dir", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("repair", help="rebuild one shard with its designed repair matrix")
    p.add_argument("--dir", required=True)
    p.add_argument("--node", type=int, required=True)
    p.add_argument("--out", help="write the rebuilt shard here instead of into --dir")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_repair)

    p = sub.add_parser("verify", help="check MDS property and designed repair patterns")
    common(p, k_required=False, construction=("c1", "c2", "custom"))
    p.add_argument("--h-file", help="JSON code description for --construction custom")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bounds", help="exhaustive per-node optima against the lower bounds")
    common(p)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("report", help="CSV and figure of designed cost versus bounds over k")
    p.add_argument("--construction", choices=("c1", "c2"), required=True)
    p.add_argument("--k-min", type=int, default=2)
    p.add_argument("--k-max", type=int, default=64)
    p.add_argument("--oracle-field", help="also plot exhaustive optima over this field")
    p.add_argument("--out", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "bounds" and args.field is None:
        parser.error("bounds needs an explicit small --field")
    try:
        return args.func(args)
    except CliError as exc:
        print(f"mds22: {exc}", file=sys.stderr)
        return exc.code
    except FieldMismatch as exc:
        print(f"mds22: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except MDSError as exc:
        print(f"mds22: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
