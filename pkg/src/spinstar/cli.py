"""Command-line front end.

Exit status: 0 ok, 2 configuration error, 3 resource cap, 4 accuracy failure.
Flags override the corresponding fields of the ``--config`` JSON document.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import config as cfgmod
from .bath import joint_distribution
from .config import ConfigError
from .correlations import bruteforce_table, infinite_table, moment_table
from .errors import AccuracyError, DomainError, ResourceError, UnsupportedError
from .runner import (FIGURES, figure_table, run_table, sweep_tables, table_json,
                     to_csv, to_json)

log = logging.getLogger("spinstar")

EXIT_OK, EXIT_CONFIG, EXIT_RESOURCE, EXIT_ACCURACY = 0, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def _floats(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise ConfigError(f"cannot parse value list {text!r}") from exc


def _common():
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", type=Path, help="JSON run configuration")
    p.add_argument("--out", type=Path, help="output file (stdout if omitted)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--tolerance", type=float, help="accuracy target for series and integrators")
    p.add_argument("--threads", type=int, default=1)
    return p


def _model_flags(p):
    p.add_argument("--layers", help="layers as N:alpha,N:alpha,...")
    p.add_argument("--methods", help="comma separated subset of " + ",".join(cfgmod.RUN_METHODS))
    p.add_argument("--bloch", help="initial Bloch vector w1,w2,w3")
    p.add_argument("--t-start", type=float)
    p.add_argument("--t-end", type=float)
    p.add_argument("--t-steps", type=int)
    p.add_argument("--series-order", type=int)
    p.add_argument("--alpha-inf", type=float, help="rescaled coupling of the infinite layer")
    p.add_argument("--infinite-spin-count", type=int)
    p.add_argument("--rescale", action="store_true", default=None,
                   help="divide limit couplings by sqrt(N)")
    p.add_argument("--law", choices=("independent", "locked"))
    p.add_argument("--blocked", action="store_true", default=None,
                   help="oracle: diagonalize magnetization blocks separately")


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="spinstar", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", parents=[common], help="decoherence curves for selected methods")
    _model_flags(run)

    fig = sub.add_parser("fig", parents=[common], help="figure data (2..7 or 'all')")
    fig.add_argument("which")
    fig.add_argument("--t-start", type=float)
    fig.add_argument("--t-end", type=float)
    fig.add_argument("--t-steps", type=int)

    sw = sub.add_parser("sweep", parents=[common], help="vary one parameter over a list")
    _model_flags(sw)
    sw.add_argument("--param", required=True, help="alpha:<layer>, N:<layer> or alpha_inf")
    sw.add_argument("--values", required=True, help="comma separated values")

    orc = sub.add_parser("oracle", parents=[common], help="full-Hamiltonian reference curves")
    _model_flags(orc)

    cor = sub.add_parser("correlations", parents=[common], help="bath correlation table")
    _model_flags(cor)
    cor.add_argument("--source", choices=("moment", "bruteforce", "infinite"), default="moment")
    cor.add_argument("--order", type=int, default=4)
    return parser


def _resolve(args) -> cfgmod.RunConfig:
    base = cfgmod.load(args.config) if args.config else None
    over = dict(
        layers=cfgmod.parse_layers(args.layers) if args.layers else None,
        methods=tuple(m.strip() for m in args.methods.split(",")) if args.methods else None,
        initial_bloch=tuple(_floats(args.bloch)) if args.bloch else None,
        t_start=args.t_start, t_end=args.t_end, t_steps=args.t_steps,
        series_order=args.series_order, tolerance=args.tolerance,
        alpha_inf=args.alpha_inf, infinite_spin_count=args.infinite_spin_count,
        rescale=args.rescale, law=args.law, oracle_blocked=args.blocked,
    )
    return cfgmod.with_overrides(base, **over)


def _emit(args, text: str):
    if args.out is None:
        sys.stdout.write(text)
        return
    args.out.parent.mkdir(parents=True, exist_ok=True)
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _cmd_run(args, cfg):
    table = run_table(cfg, threads=args.threads)
    if args.format == "json":
        return to_json({"config": cfg.to_dict(), "columns": table_json(table)})
    return to_csv(table)


def _cmd_oracle(args, cfg):
    cfg = cfgmod.with_overrides(cfg, methods=("oracle",))
    table = run_table(cfg)
    table = {"t": table["t"], "f_perp": table["oracle_f_perp"], "f_z": table["oracle_f_z"]}
    if args.format == "json":
        return to_json({"config": cfg.to_dict(), "columns": table_json(table)})
    return to_csv(table)


def _cmd_sweep(args, cfg):
    values = _floats(args.values)
    tables = sweep_tables(cfg, args.param, values, threads=args.threads)
    if args.format == "json":
        return to_json({"config": cfg.to_dict(),
                        "sweep": {"param": args.param, "values": values},
                        "blocks": [{"value": v, "columns": table_json(t)}
                                   for v, t in zip(values, tables)]})
    chunks = [to_csv(t, prefix={"value": v}) for v, t in zip(values, tables)]
    # one header, then the blocks in input order
    return chunks[0] + "".join(c.split("\n", 1)[1] for c in chunks[1:])


def _cmd_correlations(args, cfg):
    if args.source == "moment":
        table = moment_table(joint_distribution(cfg.bath), args.order)
    elif args.source == "bruteforce":
        table = bruteforce_table(cfg.bath, args.order)
    else:
        alphas = cfg.limit.alphas or cfg.bath.couplings
        table = infinite_table(alphas, args.order)
    ls, ns, gs, os_ = [], [], [], []
    for l in range(table.max_order + 1):
        for n in range(l + 1):
            ls.append(l)
            ns.append(n)
            gs.append(table.gammas[l, n])
            os_.append(table.omegas[l])
    cols = {"l": np.array(ls), "n": np.array(ns), "omega_l": np.array(os_), "gamma": np.array(gs)}
    if args.format == "json":
        return to_json({"config": cfg.to_dict(), "source": table.source, "columns": table_json(cols)})
    return to_csv(cols)


def _cmd_fig(args):
    if args.which == "all":
        if args.out is None:
            raise ConfigError("fig all needs --out DIRECTORY")
        args.out.mkdir(parents=True, exist_ok=True)
        for k in sorted(FIGURES):
            table = figure_table(k, args.t_start, args.t_end, args.t_steps)
            ext = "json" if args.format == "json" else "csv"
            text = to_json({"figure": k, "columns": table_json(table)}) if ext == "json" else to_csv(table)
            (args.out / f"fig{k}.{ext}").write_text(text, encoding="utf-8", newline="\n")
        return None
    try:
        which = int(args.which)
    except ValueError as exc:
        raise ConfigError(f"figure must be 2..7 or 'all', got {args.which!r}") from exc
    table = figure_table(which, args.t_start, args.t_end, args.t_steps)
    if args.format == "json":
        return to_json({"figure": which, "columns": table_json(table)})
    return to_csv(table)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        if args.command == "fig":
            text = _cmd_fig(args)
        else:
            cfg = _resolve(args)
            text = {"run": _cmd_run, "oracle": _cmd_oracle, "sweep": _cmd_sweep,
                    "correlations": _cmd_correlations}[args.command](args, cfg)
        if text is not None:
            _emit(args, text)
    except ConfigError as exc:
        print(f"spinstar: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ResourceError as exc:
        print(f"spinstar: resource cap: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except AccuracyError as exc:
        print(f"spinstar: accuracy failure: {exc}", file=sys.stderr)
        return EXIT_ACCURACY
    except (DomainError, UnsupportedError) as exc:
        print(f"spinstar: invalid input: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
