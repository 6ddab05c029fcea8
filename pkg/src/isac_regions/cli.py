"""Command-line interface.

Exit status is 0 on success, 1 when the computation rejects its input (the
error class name is printed) and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path

import numpy as np

from .channel import check_degraded, load_channel
from .errors import IsacError, ParseError
from .examples import make_example1, make_example2
from .frontier import SearchConfig, cardinality_sweep, frontier_to_csv, gnuplot_script, optimize_frontier, parse_grid
from .montecarlo import SampleConfig, analytic_distortion, empirical_distortion
from .regions import JointInputDistribution, evaluate, region_equivalence_check, time_sharing_baselines
from .verify import SUITES, run_suite

ALL_STRATEGIES = ("blind", "partial", "full", "outer")


def _version() -> str:
    try:
        return version("artifact")
    except PackageNotFoundError:
        return "0+unknown"


def _threads(args) -> int:
    if getattr(args, "threads", None):
        return args.threads
    env = os.environ.get("ISAC_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ParseError(f"ISAC_THREADS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def _channel(args):
    if args.channel:
        try:
            text = Path(args.channel).read_text(encoding="utf-8")
        except OSError as exc:
            raise ParseError(f"cannot read {args.channel}: {exc.strerror}") from None
        return load_channel(text)
    make = make_example1 if args.example == 1 else make_example2
    return make(args.e, args.q)


def _parse_matrix(text: str) -> np.ndarray:
    """``"a,b;c,d"`` -> 2-D array (rows separated by ``;``)."""
    try:
        rows = [[float(v) for v in row.split(",")] for row in text.split(";")]
    except ValueError:
        raise ParseError(f"cannot parse distribution {text!r}") from None
    if len({len(r) for r in rows}) != 1:
        raise ParseError(f"ragged distribution {text!r}")
    return np.array(rows)


def _distribution(args, c) -> np.ndarray:
    if args.dist:
        return _parse_matrix(args.dist)
    return np.full((1, c.nx), 1.0 / c.nx)


def _digest(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write_outputs(args, files: dict[str, str], config: dict) -> None:
    """Write data files and a manifest next to the first one."""
    written = []
    for name, text in files.items():
        p = Path(name)
        p.write_text(text, encoding="utf-8")
        written.append({"path": p.name, "sha256": _digest(p)})
    first = Path(next(iter(files)))
    manifest = {
        "command_line": args.argv,
        "config": config,
        "seed": getattr(args, "seed", None),
        "tool_version": _version(),
        "outputs": written,
    }
    mpath = first.with_name(first.stem + ".manifest.json")
    mpath.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _emit(args, text: str, config: dict, extra: dict | None = None) -> None:
    if args.out:
        files = {args.out: text}
        files.update(extra or {})
        _write_outputs(args, files, config)
    else:
        sys.stdout.write(text)


def _search_cfg(args) -> SearchConfig:
    return SearchConfig(seed=args.seed, samples=args.samples, keep=args.keep, nu=args.nu, threads=_threads(args))


# ---------------------------------------------------------------------------
# subcommands


def cmd_frontier(args) -> int:
    c = _channel(args)
    grid = parse_grid(args.dgrid)
    strategies = ALL_STRATEGIES if args.strategy == "all" else (args.strategy,)
    cfg = _search_cfg(args)
    fronts = [optimize_frontier(c, s, grid, cfg) for s in strategies]
    text = frontier_to_csv(fronts)
    extra = {}
    if args.plot == "gnuplot":
        if not args.out:
            raise ParseError("--plot needs --out")
        script = Path(args.out).with_suffix(".gp")
        extra[str(script)] = gnuplot_script(args.out, strategies)
    config = {"dgrid": args.dgrid, "strategies": list(strategies), "samples": cfg.samples, "keep": cfg.keep, "nu": cfg.nu}
    config["search_metadata"] = {f.strategy: f.search_metadata for f in fronts}
    _emit(args, text, config, extra)
    for f in fronts:
        n_inf = sum(not p.feasible for p in f.points)
        if n_inf:
            print(f"{f.strategy}: {n_inf} budget(s) below the minimum achievable distortion", file=sys.stderr)
    return 0


def cmd_evaluate(args) -> int:
    c = _channel(args)
    dist = _distribution(args, c)
    if args.strategy in ("blind", "full"):
        dist = dist.sum(axis=0)
    rp = evaluate(c, args.strategy, dist)
    doc = {
        "strategy": rp.strategy,
        "r0": rp.r0,
        "r1": rp.r1,
        "r_sum": rp.r_sum,
        "r_effective": rp.r_effective,
        "d": rp.d,
        "witness": np.asarray(rp.witness).tolist(),
    }
    _emit(args, json.dumps(doc, indent=2) + "\n", {"strategy": args.strategy})
    return 0


def cmd_check_degraded(args) -> int:
    c = _channel(args)
    v = check_degraded(c, tol=args.tol)
    lines = [f"degraded: {'true' if v.is_degraded else 'false'}", f"residual: {v.residual:.3e}"]
    if v.is_degraded:
        lines.append("witness P(z|y):")
        lines += ["  " + " ".join(f"{p:.9f}" for p in row) for row in v.witness_kernel]
    _emit(args, "\n".join(lines) + "\n", {"tol": args.tol})
    return 0


def cmd_mc(args) -> int:
    c = _channel(args)
    dist = JointInputDistribution(_distribution(args, c))
    kinds = ("z", "uz", "xz") if args.kind == "all" else (args.kind,)
    rows = ["kind,n,seed,d_hat,std_error,d_analytic,z_score"]
    for kind in kinds:
        cfg = SampleConfig(args.n, args.seed, kind, _threads(args))
        d_hat, se = empirical_distortion(c, dist, cfg)
        d = analytic_distortion(c, dist, kind)
        z = (d_hat - d) / se if se > 0 else 0.0
        rows.append(f"{kind},{args.n},{args.seed},{d_hat:.12g},{se:.12g},{d:.12g},{z:.6g}")
    _emit(args, "\n".join(rows) + "\n", {"n": args.n, "kinds": list(kinds)})
    return 0


def cmd_verify(args) -> int:
    checks = run_suite(args.suite, args.samples, args.seed)
    text = "\n".join(chk.line() for chk in checks) + "\n"
    _emit(args, text, {"suite": args.suite, "samples": args.samples})
    return 0 if all(chk.passed for chk in checks) else 1


def cmd_baselines(args) -> int:
    c = _channel(args)
    rows = ["name,d_start,r_start,d_end,r_end"]
    for seg in time_sharing_baselines(c):
        rows.append(f"{seg.name},{seg.start[0]:.12g},{seg.start[1]:.12g},{seg.end[0]:.12g},{seg.end[1]:.12g}")
    _emit(args, "\n".join(rows) + "\n", {})
    return 0


def cmd_equivalence(args) -> int:
    c = _channel(args)
    rep = region_equivalence_check(c, args.samples, args.seed, tol=args.tol)
    cases = ", ".join(f"{k}={v}" for k, v in sorted(rep.corner_counts.items()))
    text = f"samples: {rep.n_samples}\nmax containment defect: {rep.max_defect:.3e}\ntolerance: {rep.tolerance:.1e}\ncorner cases: {cases}\npassed: {'true' if rep.passed else 'false'}\n"
    _emit(args, text, {"samples": args.samples, "tol": args.tol})
    return 0 if rep.passed else 1


def cmd_cardinality(args) -> int:
    c = _channel(args)
    try:
        nus = [int(v) for v in args.nu_values.split(",")]
    except ValueError:
        raise ParseError(f"--nu-values must be comma-separated integers, got {args.nu_values!r}") from None
    grid = parse_grid(args.dgrid)
    cfg = SearchConfig(seed=args.seed, samples=args.samples, keep=args.keep, threads=_threads(args))
    rep = cardinality_sweep(c, nus, grid, cfg)
    others = [nu for nu in sorted(rep.frontiers) if nu != rep.base_nu]
    rows = ["d_budget," + ",".join(f"rate_nu{nu}" for nu in sorted(rep.frontiers)) + "," + ",".join(f"gap_nu{nu}" for nu in others)]
    for i, b in enumerate(grid):
        rates = [rep.frontiers[nu].rates()[i] for nu in sorted(rep.frontiers)]
        gaps = [rep.gaps[nu][i] for nu in others]
        fmt = lambda v: "" if np.isnan(v) else f"{v:.12g}"  # noqa: E731
        rows.append(f"{b:.12g}," + ",".join(fmt(v) for v in rates) + "," + ",".join(fmt(v) for v in gaps))
    _emit(args, "\n".join(rows) + "\n", {"nu_values": nus, "dgrid": args.dgrid})
    print(f"max gap over nu={rep.base_nu}: {rep.max_gap:.3e} bits", file=sys.stderr)
    return 0


# ---------------------------------------------------------------------------
# parser


def _add_channel(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("channel")
    g.add_argument("--channel", metavar="FILE", help="JSON channel description")
    g.add_argument("--example", type=int, choices=(1, 2), help="built-in example channel")
    g.add_argument("--e", type=float, help="noise crossover probability of the example")
    g.add_argument("--q", type=float, help="state probability P(S=1) of the example")


def _add_common(p: argparse.ArgumentParser, seed: bool = True) -> None:
    if seed:
        p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", metavar="FILE", help="write data here (and a manifest next to it) instead of stdout")
    p.add_argument("--threads", type=int, help="worker threads (default: $ISAC_THREADS or all CPUs)")


def _add_search(p: argparse.ArgumentParser) -> None:
    p.add_argument("--samples", type=int, default=SearchConfig.samples, help="random candidates per search")
    p.add_argument("--keep", type=int, default=SearchConfig.keep, help="candidates refined per budget")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="isac-regions", description="Capacity-distortion regions of state-dependent broadcast channels.")
    parser.add_argument("--version", action="version", version=_version())
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("frontier", help="optimize rate-distortion frontiers on a budget grid")
    _add_channel(p)
    _add_common(p)
    _add_search(p)
    p.add_argument("--strategy", default="all", choices=("all",) + ALL_STRATEGIES + ("degraded",))
    p.add_argument("--dgrid", required=True, metavar="START:STOP:STEP")
    p.add_argument("--nu", type=int, help="auxiliary alphabet size (default |X|+1)")
    p.add_argument("--plot", choices=("gnuplot",), help="also write a plot script next to --out")
    p.set_defaults(func=cmd_frontier)

    p = sub.add_parser("evaluate", help="rates and distortion of one input distribution")
    _add_channel(p)
    _add_common(p, seed=False)
    p.add_argument("--strategy", required=True, choices=ALL_STRATEGIES + ("degraded",))
    p.add_argument("--dist", metavar="P", help="P_UX as 'a,b;c,d' (rows are u) or P_X as 'a,b'; default uniform P_X")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("check-degraded", help="test whether Z is a degraded version of Y")
    _add_channel(p)
    _add_common(p, seed=False)
    p.add_argument("--tol", type=float, default=1e-7)
    p.set_defaults(func=cmd_check_degraded)

    p = sub.add_parser("mc", help="Monte Carlo check of estimator distortions")
    _add_channel(p)
    _add_common(p)
    p.add_argument("--n", type=int, default=10**6)
    p.add_argument("--kind", default="all", choices=("all", "z", "uz", "xz"))
    p.add_argument("--dist", metavar="P", help="P_UX as 'a,b;c,d' or P_X as 'a,b'; default uniform P_X")
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("verify", help="run self-check suites")
    _add_common(p)
    p.add_argument("--suite", default="all", choices=("all",) + SUITES)
    p.add_argument("--samples", type=int, default=50)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("baselines", help="time-sharing (TS) and improved time-sharing (ITS) lines")
    _add_channel(p)
    _add_common(p, seed=False)
    p.set_defaults(func=cmd_baselines)

    p = sub.add_parser("equivalence", help="check that the superposition regions coincide")
    _add_channel(p)
    _add_common(p)
    p.add_argument("--samples", type=int, default=500)
    p.add_argument("--tol", type=float, default=5e-3)
    p.set_defaults(func=cmd_equivalence)

    p = sub.add_parser("cardinality", help="compare partial frontiers across auxiliary sizes")
    _add_channel(p)
    _add_common(p)
    _add_search(p)
    p.add_argument("--nu-values", default="3,4", metavar="N,N,...")
    p.add_argument("--dgrid", required=True, metavar="START:STOP:STEP")
    p.set_defaults(func=cmd_cardinality)
    return parser


def _check_channel_args(parser, args) -> None:
    if not hasattr(args, "example"):
        return
    if args.channel and args.example:
        parser.error("use either --channel or --example, not both")
    if not args.channel:
        if not args.example:
            parser.error("a channel is required: --channel FILE or --example {1,2} --e E --q Q")
        if args.e is None or args.q is None:
            parser.error("--example needs --e and --q")


def run_cli(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _check_channel_args(parser, args)
    except SystemExit as exc:
        return int(exc.code or 0)
    args.argv = argv
    try:
        return args.func(args)
    except IsacError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run_cli())
