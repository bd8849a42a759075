"""Command-line interface: ``gnpx {sample,max,exceed,limits,tail,experiment}``.

Every subcommand prints a JSON object that echoes its resolved configuration.
Exit codes: 0 on success, 2 on usage or parameter errors, 1 on I/O failures.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import asdict
from pathlib import Path

from . import serialize
from .binomial import (
    BinomialParams,
    binom_tail,
    chernoff_tail_bound,
    deviation_threshold,
    tail_approx,
    tail_diagnostics,
)
from .extremes import count_exceedances, top_m_common_neighbors
from .graph import Graph, dump_edge_list, load_edge_list, sample_gnp
from .limits import check_conditions, lambda_exact, normalization
from .montecarlo import (
    ExperimentConfig,
    default_y_grid,
    resolve_threads,
    run_trials,
    summarize,
    write_outputs,
)

log = logging.getLogger("gnpx")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse exits 2 by default; keep that
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def _add_graph_source(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--in", dest="input", help="edge-list file to load")
    sp.add_argument("--n", type=int)
    sp.add_argument("--p", type=float)
    sp.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gnpx", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("sample", help="sample G(n, p) and write an edge list")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--out", help="output file (default: stdout)")

    sp = sub.add_parser("max", help="m largest common-neighbor counts over k-sets")
    _add_graph_source(sp)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--m", type=int, default=1)

    sp = sub.add_parser("exceed", help="count k-sets with more than a threshold of common neighbors")
    _add_graph_source(sp)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--threshold", type=float, required=True)

    sp = sub.add_parser("limits", help="normalizing constants, conditions and lambda")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--k", type=int, default=1)
    sp.add_argument("--y", type=float, default=0.0)

    sp = sub.add_parser("tail", help="exact binomial upper tail versus its asymptotics")
    sp.add_argument("--trials", type=int, required=True)
    sp.add_argument("--q", type=float, required=True)
    sp.add_argument("--threshold", type=float)
    sp.add_argument("--x", type=float, help="deviation in units of sqrt(n ln n q(1-q))")
    sp.add_argument("--nlog", type=int, help="n inside ln n (default: trials)")

    sp = sub.add_parser("experiment", help="Monte Carlo run of normalized maxima")
    sp.add_argument("--config", help="flat JSON file with ExperimentConfig fields")
    sp.add_argument("--n", type=int)
    sp.add_argument("--p", type=float)
    sp.add_argument("--k", type=int)
    sp.add_argument("--m", type=int)
    sp.add_argument("--trials", type=int)
    sp.add_argument("--master-seed", dest="master_seed", type=int)
    sp.add_argument("--threads", help="worker processes or 'auto' (env GNPX_THREADS)")
    sp.add_argument("--y-grid", dest="y_grid", help="comma-separated evaluation points")
    sp.add_argument("--out-dir", help="write summary.json and cdf.csv here")
    sp.add_argument("--dump-trials", action="store_true", help="also write trials.csv")
    sp.add_argument("--progress-every", type=int, default=0)
    return parser


def _graph_from(args: argparse.Namespace) -> tuple[Graph, dict]:
    if args.input:
        if args.n is not None or args.p is not None:
            raise UsageError("--in cannot be combined with --n/--p")
        return load_edge_list(args.input), {"in": args.input}
    if args.n is None or args.p is None:
        raise UsageError("provide --in or both --n and --p")
    g = sample_gnp(args.n, args.p, args.seed)
    return g, {"n": args.n, "p": args.p, "seed": args.seed, "sampling_method": g.method}


def cmd_sample(args: argparse.Namespace) -> dict:
    g = sample_gnp(args.n, args.p, args.seed)
    text = dump_edge_list(g)
    if args.out:
        Path(args.out).write_text(text, encoding="ascii")
    else:
        sys.stdout.write(text)
    return {
        "config": {"n": args.n, "p": args.p, "seed": args.seed, "out": args.out},
        "sampling_method": g.method,
        "edges": g.edge_count,
    }


def cmd_max(args: argparse.Namespace) -> dict:
    g, source = _graph_from(args)
    top = top_m_common_neighbors(g, args.k, args.m)
    return {
        "config": {**source, "k": args.k, "m": args.m},
        "values": list(top.values),
        "witnesses": [list(w) for w in top.witnesses],
        "truncated": top.truncated,
    }


def cmd_exceed(args: argparse.Namespace) -> dict:
    g, source = _graph_from(args)
    res = count_exceedances(g, args.k, args.threshold)
    return {"config": {**source, "k": args.k, "threshold": args.threshold}, "count": res.count}


def cmd_limits(args: argparse.Namespace) -> dict:
    params = normalization(args.n, args.p, args.k)
    out = {
        "config": {"n": args.n, "p": args.p, "k": args.k, "y": args.y},
        "normalization": asdict(params),
    }
    if args.n >= 16:
        cond = check_conditions(args.n, args.p, args.k)
        out["conditions"] = {**asdict(cond), "satisfied_hint": cond.satisfied_hint}
    else:
        out["conditions"] = None
    rep = lambda_exact(args.n, args.p, args.k, args.y)
    out["janson"] = {
        "y": rep.y,
        "b": rep.b,
        "lambda": rep.lam,
        "lower_bound": rep.lower_bound,
        "gumbel_ref": rep.gumbel_ref,
    }
    return out


def cmd_tail(args: argparse.Namespace) -> dict:
    bp = BinomialParams(args.trials, args.q)
    nlog = args.nlog if args.nlog is not None else args.trials
    if (args.threshold is None) == (args.x is None):
        raise UsageError("provide exactly one of --threshold and --x")
    if nlog < 2:
        raise UsageError("--nlog (or --trials) must be at least 2 to form ln n")
    if args.x is not None:
        x = args.x
        threshold = deviation_threshold(bp, x, nlog)
    else:
        threshold = args.threshold
        scale = math.sqrt(bp.variance * math.log(nlog))
        x = (threshold - bp.mean) / scale
    exact = binom_tail(bp, threshold)
    approx = tail_approx(bp, x, nlog) if x > 0 else None
    rel = abs(approx - exact) / exact if approx is not None and exact > 0 else None
    return {
        "config": {"trials": args.trials, "q": args.q, "threshold": threshold, "x": x, "nlog": nlog},
        "exact": exact,
        "approx": approx,
        "chernoff": chernoff_tail_bound(bp, max(0.0, threshold - bp.mean)),
        "rel_error": rel,
        "diagnostics": tail_diagnostics(bp, x, nlog),
    }


_CONFIG_FLAGS = ("n", "p", "k", "m", "trials", "master_seed", "threads")


def _experiment_config(args: argparse.Namespace) -> ExperimentConfig:
    data: dict = {}
    if args.config:
        data = json.loads(Path(args.config).read_text())
        if not isinstance(data, dict):
            raise UsageError("config file must hold a JSON object")
    for key in _CONFIG_FLAGS:
        val = getattr(args, key)
        if val is not None:
            data[key] = val
    if args.y_grid:
        data["y_grid"] = [float(v) for v in args.y_grid.split(",")]
    data.setdefault("y_grid", list(default_y_grid()))
    if "threads" not in data:
        data["threads"] = resolve_threads(None)
    elif data["threads"] != "auto":
        data["threads"] = int(data["threads"])
    missing = [f for f in ("n", "p") if f not in data]
    if missing:
        raise UsageError(f"missing experiment fields: {', '.join(missing)}")
    try:
        return ExperimentConfig.from_dict(data)
    except TypeError as exc:
        raise UsageError(str(exc)) from exc


def cmd_experiment(args: argparse.Namespace) -> dict:
    cfg = _experiment_config(args)
    records = run_trials(cfg, args.progress_every)
    summary = summarize(cfg, records)
    if args.out_dir:
        write_outputs(summary, args.out_dir, records if args.dump_trials else None)
    return summary.to_dict()


COMMANDS = {
    "sample": cmd_sample,
    "max": cmd_max,
    "exceed": cmd_exceed,
    "limits": cmd_limits,
    "tail": cmd_tail,
    "experiment": cmd_experiment,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose or getattr(args, "progress_every", 0) else logging.WARNING,
        format="%(asctime)s %(name)s %(message)s",
        stream=sys.stderr,
    )
    try:
        result = COMMANDS[args.command](args)
    except (UsageError, ValueError) as exc:
        print(f"gnpx {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"gnpx {args.command}: I/O error: {exc}", file=sys.stderr)
        return 1
    text = serialize.dumps(result)
    # sample writes the graph itself to stdout when no --out is given.
    stream = sys.stderr if args.command == "sample" and not args.out else sys.stdout
    stream.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
