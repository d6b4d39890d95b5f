"""Command-line entry point.

One executable, one subcommand per capability.  Every report embeds a meta
block (arithmetic mode, convention, seed, precision bits, and the exact
parameters used) so no emitted number is separable from its caveats, and
output bytes are deterministic for a fixed config: keys are sorted, floats
come from exact enclosures, and nothing timestamps itself.

Errors from the library surface as a JSON envelope {"error": {type, message,
context}} and a nonzero exit status; --check validates a config without
executing it and prints diagnostics instead.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
from dataclasses import dataclass, field

from . import __version__
from .birkhoff import decay_profile, sup_profile
from .cohomology import (
    boundedness_certificate,
    build_primitive,
    coboundary_roundtrip,
    psi_on_orbit,
)
from .core import PermutationPair
from .diagram import CONVENTIONS, RauzyDiagram
from .errors import IemlabError, ParseError
from .exact import to_float
from .induction import InductionTrace, self_similar_iem
from .roth import roth_report
from .specio import (
    DEFAULT_PRECISION_BITS,
    MIN_PRECISION_BITS,
    dump_json,
    emit_function,
    emit_iem,
    load_json,
    parse_function,
    parse_iem,
)

COMMANDS = ("diagram", "induct", "birkhoff", "roth", "solve", "selfsim", "roundtrip")
EMITS = {
    "diagram": ("json", "dot"),
    "induct": ("json", "csv"),
    "birkhoff": ("json",),
    "roth": ("json", "csv"),
    "solve": ("json", "csv"),
    "selfsim": ("json",),
    "roundtrip": ("json",),
}


@dataclass
class RunConfig:
    command: str
    iem_path: str | None = None
    fn_path: str | None = None
    psi0_path: str | None = None
    pair: str | None = None
    types: str | None = None
    blocks: int = 30
    depth: int = 10
    delta: float = 0.1
    truncate: int = 10
    orbit: int = 1000
    mode: str = "accelerated"
    convention: str = "winner"
    emit: str = "json"
    seed: int = 0
    precision_bits: int = DEFAULT_PRECISION_BITS
    out: str | None = None
    check: bool = False
    extra: dict = field(default_factory=dict)


def validate(config: RunConfig) -> list[str]:
    """Schema and cross-field checks, returned as diagnostics, never thrown."""
    diags = []
    if config.command not in COMMANDS:
        diags.append(f"unknown command {config.command!r}")
        return diags
    allowed = EMITS[config.command]
    if config.emit not in allowed:
        diags.append(
            f"format {config.emit!r} invalid for command {config.command!r}"
            f" (allowed: {', '.join(allowed)})"
        )
    for name, value in (
        ("blocks", config.blocks),
        ("depth", config.depth),
        ("truncate", config.truncate),
        ("orbit", config.orbit),
    ):
        if value < 1:
            diags.append(f"{name} must be positive (got {value})")
    if not 0 < config.delta < 1:
        diags.append(f"delta must be in (0, 1) (got {config.delta})")
    if config.precision_bits < MIN_PRECISION_BITS:
        diags.append(
            f"precision bits must be at least {MIN_PRECISION_BITS}"
            f" (got {config.precision_bits})"
        )
    if config.mode not in ("rv", "zorich", "accelerated"):
        diags.append(f"unknown induction mode {config.mode!r}")
    if config.convention not in CONVENTIONS:
        diags.append(f"unknown naming convention {config.convention!r}")
    needs_iem = config.command in ("induct", "birkhoff", "roth", "solve", "roundtrip")
    if needs_iem and not config.iem_path:
        diags.append(f"command {config.command!r} requires --iem")
    if config.command == "diagram" and not (config.iem_path or config.pair):
        diags.append("diagram requires --iem or --pair")
    if config.command == "selfsim":
        if not config.pair:
            diags.append("selfsim requires --pair")
        if not config.types:
            diags.append("selfsim requires --types")
    if config.command in ("birkhoff", "solve") and not config.fn_path:
        diags.append(f"command {config.command!r} requires --fn")
    if config.command == "roundtrip" and not config.psi0_path:
        diags.append("roundtrip requires --psi0")
    for label, path in (
        ("--iem", config.iem_path),
        ("--fn", config.fn_path),
        ("--psi0", config.psi0_path),
    ):
        if path and not os.path.isfile(path):
            diags.append(f"{label} file not found: {path}")
    if config.pair and "/" not in config.pair:
        diags.append("--pair must look like 'ABC/CBA'")
    return diags


def _parse_pair_arg(text: str) -> PermutationPair:
    top, _, bottom = text.partition("/")
    if not top or not bottom:
        raise ParseError("--pair must look like 'ABC/CBA'", got=text)
    return PermutationPair.from_rows(tuple(top.strip()), tuple(bottom.strip()))


def _meta(config: RunConfig, iem=None, **extra) -> dict:
    meta = {
        "command": config.command,
        "seed": config.seed,
        "precision_bits": config.precision_bits,
        "version": __version__,
    }
    if iem is not None:
        meta["arithmetic_mode"] = iem.mode
    meta.update(extra)
    return meta


def _load_iem(config: RunConfig):
    return parse_iem(load_json(config.iem_path), config.precision_bits)


def _trace(config: RunConfig, iem) -> InductionTrace:
    return InductionTrace(iem, mode=config.mode, convention=config.convention)


def _fit_json(fit) -> dict | None:
    if fit is None:
        return None
    return {
        "slope": fit.slope,
        "intercept": fit.intercept,
        "stderr": fit.stderr,
        "npoints": fit.npoints,
    }


def _csv_text(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _cmd_diagram(config: RunConfig) -> str:
    if config.iem_path:
        pair = _load_iem(config).pair
    else:
        pair = _parse_pair_arg(config.pair)
    diagram = RauzyDiagram(pair)
    if config.emit == "dot":
        return diagram.to_dot(config.convention)
    payload = diagram.to_json(config.convention)
    payload["meta"] = _meta(config, convention=config.convention)
    payload["strongly_connected"] = diagram.is_strongly_connected()
    return dump_json(payload)


def _cmd_induct(config: RunConfig) -> str:
    iem = _load_iem(config)
    trace = _trace(config, iem)
    trace.extend_to(config.blocks)
    rows = []
    for n in range(1, config.blocks + 1):
        blk = trace.block(n)
        names = blk.winners if config.convention == "winner" else blk.firsts
        rows.append(
            {
                "n": n,
                "types": "".join(str(t) for t in blk.types),
                "winners": "".join(blk.winners),
                "names": "".join(names),
                "steps": blk.elementary_count,
                "norm_z": trace.norm_z(n),
                "norm_q": trace.norm_q(0, n),
            }
        )
    if config.emit == "csv":
        header = ["n", "types", "winners", "names", "steps", "norm_z", "norm_q"]
        return _csv_text(header, [[r[h] for h in header] for r in rows])
    payload = {
        "meta": _meta(
            config,
            iem,
            induction_mode=config.mode,
            convention=config.convention,
            blocks=config.blocks,
        ),
        "blocks": rows,
        "lengths_float": [to_float(v) for v in iem.lengths],
    }
    return dump_json(payload)


def _cmd_birkhoff(config: RunConfig) -> str:
    iem = _load_iem(config)
    trace = _trace(config, iem)
    fn = parse_function(load_json(config.fn_path), iem)
    profile = decay_profile(trace, fn, config.blocks)
    rows = [
        {
            "n": r.n,
            "norm_z": r.norm_z,
            "norm_q": r.norm_q,
            "sup_block": None if r.sup_block is None else to_float(r.sup_block.hi),
            "sup_phi": to_float(r.sup_phi.hi),
            "maxvar_phi": to_float(r.maxvar_phi.hi),
            "chi_norm": to_float(r.chi_norm.hi),
            "sup_total": to_float(r.sup_total.hi),
            "checks": [
                r.bounded_by_maxvar,
                r.maxvar_bounded,
                r.chi_bounded,
                r.block_bounded,
            ],
        }
        for r in profile.rows
    ]
    payload = {
        "meta": _meta(
            config,
            iem,
            induction_mode=config.mode,
            convention=profile.convention,
            blocks=config.blocks,
        ),
        "function": emit_function(fn),
        "rows": rows,
        "variation_total": to_float(profile.var_total.hi),
        "inequalities_hold": profile.inequalities_hold,
        "decay_fit": _fit_json(profile.fit),
        "is_decaying": profile.is_decaying() if profile.fit else False,
    }
    return dump_json(payload)


def _cmd_roth(config: RunConfig) -> str:
    iem = _load_iem(config)
    trace = _trace(config, iem)
    report = roth_report(
        trace, config.blocks, depth=config.depth, delta=config.delta
    )
    if config.emit == "csv":
        header = ["condition", "n", "ratio_or_norm"]
        rows = []
        for key, rep in (("a", report.a), ("b", report.b), ("c", report.c)):
            if rep is None:
                continue
            for r in rep.rows:
                value = r.get("ratio", r.get("norm_restricted"))
                rows.append([key, r["n"], value])
        return _csv_text(header, rows)
    payload = report.to_json()
    payload["meta"].update(
        _meta(config, iem, induction_mode=config.mode, convention=report.convention)
    )
    payload["quantifier_note"] = (
        "condition (c) is profiled from the single base level m=0; the range of"
        " m the asymptotic statement quantifies over is not specified"
    )
    return dump_json(payload)


def _cmd_solve(config: RunConfig) -> str:
    iem = _load_iem(config)
    trace = _trace(config, iem)
    fn = parse_function(load_json(config.fn_path), iem)
    check_pairs = ((1, 3),) if config.blocks >= 3 + config.depth else ()
    candidate = build_primitive(
        trace,
        fn,
        config.truncate,
        depth=config.depth,
        delta=config.delta,
        check_pairs=check_pairs,
    )
    certificate = boundedness_certificate(trace, candidate.phi, config.blocks)
    table = psi_on_orbit(iem, candidate.phi, config.orbit)
    psi_rows = table.float_rows()
    if config.emit == "csv":
        return _csv_text(["k", "x", "psi"], [list(r) for r in psi_rows])
    sups, decay_fit = sup_profile(trace, candidate.phi, config.blocks)
    payload = {
        "meta": _meta(
            config,
            iem,
            induction_mode=config.mode,
            convention=trace.convention,
            blocks=config.blocks,
            truncate=config.truncate,
            orbit=config.orbit,
            depth=config.depth,
            delta=config.delta,
        ),
        "input": emit_function(fn),
        "primitive": emit_function(candidate.phi),
        "correction": {
            "vector_float": [to_float(c) for c in candidate.corrected_vector],
            "quotient_dim": candidate.correction.quotient_dim,
            "term_norms": list(candidate.correction.term_norms),
            "tail_bound": candidate.tail_bound,
            "lambda_rows": list(candidate.correction.lambda_rows),
        },
        "functoriality": list(candidate.functoriality),
        "majorant": {
            "value": certificate.majorant,
            "tail": certificate.tail,
            "terms": list(certificate.terms),
            "valid_horizon": certificate.valid_horizon,
            "fit": _fit_json(certificate.fit),
        },
        "decay": {
            "sup_floats": sups,
            "fit": _fit_json(decay_fit),
        },
        "psi": {
            "normalization": to_float(table.normalization),
            "sup_abs_sums": to_float(table.sup_abs_sums),
            "table": [list(r) for r in psi_rows],
        },
    }
    return dump_json(payload)


def _cmd_selfsim(config: RunConfig) -> str:
    pair = _parse_pair_arg(config.pair)
    types = tuple(int(t) for t in config.types.replace(",", "").strip())
    iem = self_similar_iem(pair, types)
    ss = iem.self_similarity
    payload = {
        "meta": _meta(config, iem, types=list(types)),
        "iem": emit_iem(iem),
        "loop_matrix": [list(row) for row in ss.matrix],
        "lengths_float": [to_float(v) for v in iem.lengths],
    }
    return dump_json(payload)


def _cmd_roundtrip(config: RunConfig) -> str:
    iem = _load_iem(config)
    psi0 = parse_function(load_json(config.psi0_path), iem)
    report = coboundary_roundtrip(iem, psi0, config.orbit)
    payload = {
        "meta": _meta(config, iem, orbit=config.orbit),
        "planted": emit_function(psi0),
        "deviation": report.deviation,
        "constant": report.constant,
        "sup_abs_sums": report.sup_abs_sums,
        "count": report.count,
    }
    return dump_json(payload)


_RUNNERS = {
    "diagram": _cmd_diagram,
    "induct": _cmd_induct,
    "birkhoff": _cmd_birkhoff,
    "roth": _cmd_roth,
    "solve": _cmd_solve,
    "selfsim": _cmd_selfsim,
    "roundtrip": _cmd_roundtrip,
}


def run(config: RunConfig) -> tuple[int, str]:
    """Execute a validated config; returns (exit status, output text)."""
    diags = validate(config)
    if config.check:
        payload = {"diagnostics": diags, "ok": not diags}
        return (0 if not diags else 2), dump_json(payload)
    if diags:
        return 2, dump_json({"error": {"type": "InvalidConfig", "diagnostics": diags}})
    try:
        return 0, _RUNNERS[config.command](config)
    except IemlabError as exc:
        envelope = {
            "error": {
                "type": type(exc).__name__,
                "message": exc.message if hasattr(exc, "message") else str(exc),
                "context": getattr(exc, "context", {}),
            }
        }
        return 1, dump_json(envelope)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="iemlab",
        description="interval exchange maps: induction, Birkhoff sums, "
        "growth diagnostics, and the transfer-equation solver",
    )
    parser.add_argument("--version", action="version", version=f"iemlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, emits):
        p.add_argument("--seed", type=int, default=0, help="seed recorded in reports")
        p.add_argument(
            "--precision-bits",
            type=int,
            default=int(
                os.environ.get("IEMLAB_PRECISION_BITS", DEFAULT_PRECISION_BITS)
            ),
            help="radius budget for tracked-real inputs",
        )
        p.add_argument("--out", help="write output here instead of stdout")
        p.add_argument("--emit", choices=emits, default=emits[0])
        p.add_argument(
            "--check", action="store_true", help="validate the config and exit"
        )

    p = sub.add_parser("diagram", help="extended class and move graph of a pair")
    p.add_argument("--iem", dest="iem_path")
    p.add_argument("--pair", help="rows as 'ABC/CBA'")
    p.add_argument("--convention", choices=CONVENTIONS, default="first")
    common(p, EMITS["diagram"])

    p = sub.add_parser("induct", help="run induction blocks and report the cocycle")
    p.add_argument("--iem", dest="iem_path", required=False)
    p.add_argument("--blocks", type=int, default=30)
    p.add_argument("--mode", choices=("rv", "zorich", "accelerated"), default="accelerated")
    p.add_argument("--convention", choices=CONVENTIONS, default="winner")
    common(p, EMITS["induct"])

    p = sub.add_parser("birkhoff", help="decay profile of special sums of a function")
    p.add_argument("--iem", dest="iem_path")
    p.add_argument("--fn", dest="fn_path")
    p.add_argument("--blocks", type=int, default=20)
    p.add_argument("--mode", choices=("rv", "zorich", "accelerated"), default="accelerated")
    p.add_argument("--convention", choices=CONVENTIONS, default="winner")
    common(p, EMITS["birkhoff"])

    p = sub.add_parser("roth", help="growth-condition profiles and verdicts")
    p.add_argument("--iem", dest="iem_path")
    p.add_argument("--blocks", type=int, default=24)
    p.add_argument("--depth", type=int, default=10)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--mode", choices=("rv", "zorich", "accelerated"), default="accelerated")
    p.add_argument("--convention", choices=CONVENTIONS, default="winner")
    common(p, EMITS["roth"])

    p = sub.add_parser("solve", help="corrected primitive, majorant, orbit solution")
    p.add_argument("--iem", dest="iem_path")
    p.add_argument("--fn", dest="fn_path")
    p.add_argument("--blocks", type=int, default=30)
    p.add_argument("--truncate", type=int, default=10)
    p.add_argument("--orbit", type=int, default=1000)
    p.add_argument("--depth", type=int, default=10)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--mode", choices=("rv", "zorich", "accelerated"), default="accelerated")
    p.add_argument("--convention", choices=CONVENTIONS, default="winner")
    common(p, EMITS["solve"])

    p = sub.add_parser("selfsim", help="exact periodic map from a closed move loop")
    p.add_argument("--pair", help="rows as 'ABC/CBA'")
    p.add_argument("--types", help="move types, e.g. '00101'")
    common(p, EMITS["selfsim"])

    p = sub.add_parser("roundtrip", help="plant a solution, difference, re-solve")
    p.add_argument("--iem", dest="iem_path")
    p.add_argument("--psi0", dest="psi0_path")
    p.add_argument("--orbit", type=int, default=1000)
    common(p, EMITS["roundtrip"])

    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    fields = {
        "command": args.command,
        "emit": args.emit,
        "seed": args.seed,
        "precision_bits": args.precision_bits,
        "out": args.out,
        "check": args.check,
    }
    for name in (
        "iem_path",
        "fn_path",
        "psi0_path",
        "pair",
        "types",
        "blocks",
        "depth",
        "delta",
        "truncate",
        "orbit",
        "mode",
        "convention",
    ):
        if hasattr(args, name) and getattr(args, name) is not None:
            fields[name] = getattr(args, name)
    return RunConfig(**fields)


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    config = config_from_args(args)
    status, text = run(config)
    if config.out:
        with open(config.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
