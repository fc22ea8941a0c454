"""Command-line driver: ``sica <command> ...``.

Every command reads one table (a CSV path, ``-`` for stdin, or
``fixture:NAME`` for a bundled table) and writes deterministic text. Exit
status is 0 on success, 1 when validation fails (the message names the
pipeline stage) and 2 on file errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__
from .ca import ca_decompose, first_non_unit_dims, lra_decompose, mfca, principal_map
from .fixtures import fixture_path
from .report import coordinates_to_csv, dumps, map_to_svg, sigmas_to_csv
from .sinkhorn import detect_blocks, scale, trace_to_csv
from .sparsity import sparsity_report
from .table import (
    CountTable,
    ingest_csv,
    merge_equivalent,
    power_transform,
    row_closure,
    sign_transform,
    table_to_csv,
    table_to_json,
    to_correspondence,
)
from .taxicab import tca_decompose
from .verify import GROUPS, run_checks

METHODS = ("ca", "tca", "mfca", "lra")
INPUT_HELP = "CSV path, '-' for stdin, or fixture:NAME"


class CliError(Exception):
    def __init__(self, stage: str, message: str, code: int):
        super().__init__(f"{stage}: {message}")
        self.stage = stage
        self.code = code


@contextmanager
def stage(name: str):
    """Turn failures inside a pipeline stage into exit codes 1 (invalid) or 2 (IO)."""
    try:
        yield
    except CliError:
        raise
    except OSError as e:
        raise CliError(name, f"{e.strerror or e} ({e.filename})" if e.filename else str(e), 2) from e
    except (ValueError, ArithmeticError) as e:
        raise CliError(name, str(e), 1) from e


@dataclass
class RunConfig:
    """Everything that determines a run; round-trips through JSON."""

    command: str
    input: str = ""
    transforms: list = field(default_factory=list)
    sinkhorn: dict = field(default_factory=lambda: {"iters": 500, "tol": 1e-8, "zero_tol": None, "epsilon": None})
    decomposition: dict = field(default_factory=lambda: {"method": None, "k": None, "dims": None})
    outputs: dict = field(default_factory=dict)
    seed: int = 0

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        d = json.loads(text)
        d["transforms"] = [list(x) for x in d.get("transforms", [])]
        return cls(**d)


# ---------------------------------------------------------------------------
# helpers


class _Chain(argparse.Action):
    # keeps transform flags in command-line order
    def __call__(self, parser, ns, values, option_string=None):
        chain = list(getattr(ns, "transforms", None) or [])
        chain.append([self.const, values if self.nargs != 0 else None])
        ns.transforms = chain


def describe_chain(chain) -> str:
    if not chain:
        return "none"
    return " -> ".join(name if v is None else f"{name} {v:g}" for name, v in chain)


def apply_chain(t: CountTable, chain) -> CountTable:
    for name, v in chain:
        if name == "power":
            t = power_transform(t, v)
        elif name == "sign":
            t = sign_transform(t)
        elif name == "closure":
            t = row_closure(t)
        elif name == "merge":
            t = merge_equivalent(t).merged
        else:
            raise ValueError(f"unknown transform {name!r}")
    return t


def read_table(args) -> CountTable:
    src = args.input
    with stage("ingest"):
        if src.startswith("fixture:"):
            path = fixture_path(src.split(":", 1)[1])
            if not path.exists():
                raise FileNotFoundError(2, "no such fixture", str(path))
            text = path.read_text(encoding="utf-8")
        elif src == "-":
            text = sys.stdin.read()
        else:
            text = Path(src).read_text(encoding="utf-8")
        t = ingest_csv(
            text,
            delimiter=args.delimiter,
            has_header=False if args.no_header else None,
            has_row_labels=False if args.no_row_labels else None,
        )
    for w in t.warnings:
        print(f"sica: warning: {w}", file=sys.stderr)
    return t


def header(args, extra=()) -> list[str]:
    lines = [f"sica {__version__} {args.command}", f"input: {args.input}",
             f"transform: {describe_chain(getattr(args, 'transforms', None))}"]
    return lines + list(extra)


def emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    with stage("write"):
        p = Path(out)
        p.parent.mkdir(parents=True, exist_ok=True)
        with open(p, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _prepare(args) -> CountTable:
    t = read_table(args)
    with stage("transform"):
        return apply_chain(t, getattr(args, "transforms", None) or [])


def _decompose(t: CountTable, method: str, args):
    """Return (decomposition, mfca result or None)."""
    with stage(f"decompose ({method})"):
        if method == "mfca":
            res = mfca(t, iters=args.iters, tol=args.tol, zero_tol=args.zero_tol, epsilon=args.epsilon)
            return res.decomposition, res
        p = to_correspondence(t)
        if method == "ca":
            return ca_decompose(p), None
        if method == "tca":
            return tca_decompose(p, getattr(args, "k", None)), None
        if method == "lra":
            return lra_decompose(p), None
    raise CliError("decompose", f"unknown method {method!r}", 1)


def _default_dims(dec, res) -> tuple[int, int]:
    if res is not None and res.partition.k > 1:
        return first_non_unit_dims(dec)
    return (1, 2)


# ---------------------------------------------------------------------------
# commands


def cmd_ingest(args) -> int:
    t = read_table(args)
    if args.format == "json":
        emit(dumps(table_to_json(t)), args.output)
    else:
        emit(table_to_csv(t.values, t.row_labels, t.col_labels, header_lines=header(args)), args.output)
    return 0


def cmd_sparsity(args) -> int:
    t = _prepare(args)
    with stage("sparsity"):
        rep = sparsity_report(t, args.merge_tol)
    emit(dumps(rep.to_json()) if args.json else rep.summary() + "\n", args.output)
    return 0


def cmd_transform(args) -> int:
    t = _prepare(args)
    if args.decompose:
        dec, _ = _decompose(t, args.decompose, args)
        emit(sigmas_to_csv(dec, header(args, [f"method: {dec.method}"])), args.output)
    else:
        emit(table_to_csv(t.values, t.row_labels, t.col_labels, header_lines=header(args)), args.output)
    return 0


def cmd_scale(args) -> int:
    t = _prepare(args)
    with stage("scale"):
        s = scale(t, iters=args.iters, tol=args.tol, epsilon=args.epsilon)
        part = detect_blocks(s, args.zero_tol)
    extra = [f"status: {s.status}", f"iterations: {s.n_iter}", f"blocks: {part.k}"]
    emit(trace_to_csv(s, args.last, header(args, extra)), args.output)
    if args.out_dir:
        out = Path(args.out_dir)
        emit(table_to_csv(s.d, t.row_labels, t.col_labels, header_lines=header(args, extra)), str(out / "scaled.csv"))
        emit(dumps(part.to_json(t.row_labels, t.col_labels)), str(out / "blocks.json"))
    return 0


def cmd_decompose(args) -> int:
    t = _prepare(args)
    dec, res = _decompose(t, args.method, args)
    head = header(args, [f"method: {dec.method}"])
    if args.format == "json":
        obj = dec.to_json()
        if res is not None:
            obj["blocks"] = res.partition.to_json(t.row_labels, t.col_labels)
        emit(dumps(obj), args.output)
    elif args.format == "coords":
        emit(coordinates_to_csv(dec, head), args.output)
    else:
        emit(sigmas_to_csv(dec, head), args.output)
    return 0


def cmd_map(args) -> int:
    t = _prepare(args)
    dec, res = _decompose(t, args.method, args)
    with stage("map"):
        if dec.n_dims < 2:
            raise ValueError(f"map needs at least 2 dimensions, decomposition has {dec.n_dims}")
        dims = tuple(args.dims) if args.dims else _default_dims(dec, res)
        m = principal_map(dec, dims)
    title = args.title if args.title is not None else f"{dec.method} map of {args.input}"
    emit(map_to_svg(m, title), args.output)
    return 0


def cmd_report(args) -> int:
    out = Path(args.out_dir)
    cfg = config_from_args(args)
    t = _prepare(args)
    emit(cfg.to_json(), str(out / "config.json"))
    with stage("sparsity"):
        rep = sparsity_report(t)
    emit(rep.summary() + "\n", str(out / "sparsity.txt"))
    emit(dumps(rep.to_json()), str(out / "sparsity.json"))
    with stage("scale"):
        s = scale(t, iters=args.sinkhorn_iters, tol=args.tol, epsilon=args.epsilon)
        part = detect_blocks(s, args.zero_tol)
    extra = [f"status: {s.status}", f"iterations: {s.n_iter}", f"blocks: {part.k}"]
    emit(trace_to_csv(s, header_lines=header(args, extra)), str(out / "trace.csv"))
    emit(dumps(part.to_json(t.row_labels, t.col_labels)), str(out / "blocks.json"))
    lines = [f"sparsity: {rep.summary()}", f"sinkhorn: {s.status} after {s.n_iter} iterations",
             f"  last c2dist: {', '.join(f'{x:.6e}' for x in s.c2dist[-4:])}",
             f"  last ratio: {s.ratio[-1]:.6e}", f"blocks: {part.k} ({part.kind})"]
    args.iters = args.sinkhorn_iters
    for method in args.decompose or []:
        dec, res = _decompose(t, method, args)
        head = header(args, [f"method: {dec.method}"])
        emit(sigmas_to_csv(dec, head), str(out / f"{method}_sigmas.csv"))
        emit(coordinates_to_csv(dec, head), str(out / f"{method}_coordinates.csv"))
        lines.append(f"{method}: " + ", ".join(f"{x:.4f}" for x in dec.sigmas[:8]))
        if args.svg and dec.n_dims >= 2:
            with stage("map"):
                m = principal_map(dec, _default_dims(dec, res))
            emit(map_to_svg(m, f"{dec.method} map of {args.input}"), str(out / f"{method}_map.svg"))
    sys.stdout.write("\n".join(lines) + "\n")
    return 0


def cmd_verify(args) -> int:
    with stage("verify"):
        checks = run_checks(args.only, seed=args.seed, property_iters=args.property_iters)
    for c in checks:
        print(c.line())
    failed = sum(not c.passed for c in checks)
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return 1 if failed else 0


def config_from_args(args) -> RunConfig:
    iters = getattr(args, "sinkhorn_iters", None) or getattr(args, "iters", 500)
    return RunConfig(
        command=args.command,
        input=getattr(args, "input", ""),
        transforms=[list(x) for x in getattr(args, "transforms", None) or []],
        sinkhorn={"iters": iters, "tol": getattr(args, "tol", 1e-8),
                  "zero_tol": getattr(args, "zero_tol", None), "epsilon": getattr(args, "epsilon", None)},
        decomposition={"method": getattr(args, "decompose", None) or getattr(args, "method", None),
                       "k": getattr(args, "k", None), "dims": getattr(args, "dims", None)},
        outputs={"output": getattr(args, "output", None), "out_dir": getattr(args, "out_dir", None),
                 "svg": getattr(args, "svg", False)},
        seed=getattr(args, "seed", 0),
    )


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    io_flags = argparse.ArgumentParser(add_help=False)
    io_flags.add_argument("--delimiter", default=",")
    io_flags.add_argument("--no-header", action="store_true", help="first line is data")
    io_flags.add_argument("--no-row-labels", action="store_true", help="first column is data")

    io_opts = argparse.ArgumentParser(add_help=False, parents=[io_flags])
    io_opts.add_argument("input", help=INPUT_HELP)

    chain = argparse.ArgumentParser(add_help=False)
    g = chain.add_argument_group("transforms (applied in the order given)")
    g.add_argument("--power", type=float, action=_Chain, const="power", metavar="ALPHA", dest="transforms")
    g.add_argument("--sign", nargs=0, action=_Chain, const="sign", dest="transforms")
    g.add_argument("--closure", nargs=0, action=_Chain, const="closure", dest="transforms")
    g.add_argument("--merge", nargs=0, action=_Chain, const="merge", dest="transforms")

    sk = argparse.ArgumentParser(add_help=False)
    g = sk.add_argument_group("scaling")
    g.add_argument("--tol", type=float, default=1e-8)
    g.add_argument("--zero-tol", type=float, default=None)
    g.add_argument("--epsilon", type=float, default=None, help="replace zero cells before scaling")

    out = argparse.ArgumentParser(add_help=False)
    out.add_argument("-o", "--output", default=None)

    p = argparse.ArgumentParser(prog="sica", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"sica {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("ingest", parents=[io_opts, out], help="validate and echo a table")
    s.add_argument("--format", choices=("csv", "json"), default="csv")
    s.set_defaults(func=cmd_ingest)

    s = sub.add_parser("sparsity", parents=[io_opts, chain, out], help="sparsity indices")
    s.add_argument("--merge-tol", type=float, default=1e-9)
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_sparsity)

    s = sub.add_parser("transform", parents=[io_opts, chain, sk, out], help="apply a transform chain")
    s.add_argument("--decompose", choices=METHODS, default=None, help="emit singular values instead of the table")
    s.add_argument("--iters", type=int, default=500)
    s.add_argument("--k", type=int, default=None)
    s.set_defaults(func=cmd_transform)

    s = sub.add_parser("scale", parents=[io_opts, chain, sk, out], help="Sinkhorn scaling trace")
    s.add_argument("--iters", type=int, default=500)
    s.add_argument("--last", type=int, default=None, help="only the last N trace rows")
    s.add_argument("--out-dir", default=None, help="also write scaled.csv and blocks.json")
    s.set_defaults(func=cmd_scale)

    s = sub.add_parser("decompose", parents=[io_flags, chain, sk, out], help="spectral decomposition")
    s.add_argument("method", choices=METHODS)
    s.add_argument("input", help=INPUT_HELP)
    s.add_argument("--iters", type=int, default=500)
    s.add_argument("--k", type=int, default=None, help="number of taxicab axes")
    s.add_argument("--format", choices=("sigmas", "coords", "json"), default="sigmas")
    s.set_defaults(func=cmd_decompose)

    s = sub.add_parser("map", parents=[io_opts, chain, sk, out], help="SVG principal map")
    s.add_argument("--method", choices=METHODS, default="ca")
    s.add_argument("--dims", type=int, nargs=2, default=None, metavar=("D1", "D2"))
    s.add_argument("--iters", type=int, default=500)
    s.add_argument("--k", type=int, default=None)
    s.add_argument("--title", default=None)
    s.set_defaults(func=cmd_map)

    s = sub.add_parser("report", parents=[io_opts, chain, sk], help="full analysis into a directory")
    s.add_argument("--sinkhorn-iters", type=int, default=500)
    s.add_argument("--decompose", choices=METHODS, action="append", default=None)
    s.add_argument("--k", type=int, default=None)
    s.add_argument("--out-dir", default="sica-report")
    s.add_argument("--svg", action="store_true", help="write a map per decomposition")
    s.set_defaults(func=cmd_report)

    s = sub.add_parser("verify", help="run the built-in acceptance checks")
    s.add_argument("--only", choices=GROUPS, default=None)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--property-iters", type=int, default=None)
    s.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as e:
        print(f"sica: error in {e}", file=sys.stderr)
        return e.code


if __name__ == "__main__":
    sys.exit(main())
