"""Command line entry point: ``antnet <command> ...``."""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import harness, oracle, theory, urns
from .sp_graph import FlatGraph, SPSyntaxError, flatten, parse_sp


def _floats(text: str, n: int | None = None) -> list[float]:
    try:
        vals = [float(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if n is not None and len(vals) != n:
        raise argparse.ArgumentTypeError(f"expected {n} values, got {len(vals)}")
    return vals


def _lengths(text: str) -> list[float]:
    return _floats(text, 3)


def _point(text: str) -> list[float]:
    return _floats(text, 2)


def _write(path: Path | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")


def _load_config(args) -> harness.ExperimentConfig:
    data = {}
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise harness.ConfigError([("<json>", f"line {exc.lineno} column {exc.colno}: {exc.msg}")]) from None
    if getattr(args, "seed", None):
        data["seeds"] = args.seed
    if getattr(args, "n_steps", None) is not None:
        data["n_steps"] = args.n_steps
    if getattr(args, "output_dir", None) is not None:
        data["output_dir"] = args.output_dir
    return harness.ExperimentConfig.from_dict(data)


def cmd_simulate(args) -> int:
    cfg = _load_config(args)
    out = harness.run_experiment(cfg)
    print(f"wrote {len(cfg.seeds)} replica(s) to {out}")
    return 0


def cmd_verify(args) -> int:
    cfg = _load_config(args)
    report = harness.verify_theorem(cfg, args.tolerance)
    if args.json:
        print(report.to_json())
    else:
        print("\n".join(report.lines()))
    if args.overlay:
        rows, summary = harness.report_flow_overlay(cfg)
        _write(Path(args.overlay), harness.rows_to_csv(rows))
        print(json.dumps(summary))
    return 0 if report.passed else 1


def cmd_theory(args) -> int:
    params = theory.TheoryParams(args.alpha, *args.lengths)
    lim = theory.classify_case(params)
    out = Path(args.out_dir) if args.out_dir else None

    info = lim.as_dict()
    if out is None:
        print(json.dumps(info, indent=2))
        return 0

    zs = theory.zeros(params)
    if params.normalized().swapped != params.swapped:
        zs = [(1 - a, b) for a, b in zs]
    lines = ["w1,w3,F1,F3"]
    for a, b in zs:
        try:
            f = theory.F(a, b, params)
            lines.append(f"{a!r},{b!r},{f[0]!r},{f[1]!r}")
        except (theory.SingularField, ZeroDivisionError):
            lines.append(f"{a!r},{b!r},,")
    _write(out / "zeros.csv", "\n".join(lines) + "\n")

    k = args.grid
    lines = ["w1,w3,F1,F3"]
    for i in range(k):
        for j in range(k):
            a, b = (i + 0.5) / k, (j + 0.5) / k
            f = theory.F(a, b, params)
            lines.append(f"{a:.6f},{b:.6f},{f[0]:.9g},{f[1]:.9g}")
    _write(out / "phase_grid.csv", "\n".join(lines) + "\n")

    rng = np.random.default_rng(args.seed)
    lines = ["flow,t,w1,w3"]
    for f_id in range(args.flows):
        start = rng.uniform(0.05, 0.95, size=2)
        res = theory.integrate_flow(start, params, t_max=args.t_max)
        for t, (a, b) in zip(res.times, res.path):
            lines.append(f"{f_id},{t:.6g},{a:.9g},{b:.9g}")
    _write(out / "flows.csv", "\n".join(lines) + "\n")
    _write(out / "beta.json", json.dumps(info, indent=2) + "\n")
    print(f"wrote zeros.csv, phase_grid.csv, flows.csv, beta.json to {out}")
    return 0


def cmd_flow(args) -> int:
    if args.config:
        cfg = _load_config(args)
        rows, summary = harness.report_flow_overlay(cfg, args.seed_for_overlay)
        _write(Path(args.output) if args.output else None, harness.rows_to_csv(rows))
        print(json.dumps(summary), file=sys.stderr)
        return 0
    if args.alpha is None or args.lengths is None or args.start is None:
        raise SystemExit("flow needs either -c CONFIG or --alpha, --lengths and --start")
    params = theory.TheoryParams(args.alpha, *args.lengths)
    res = theory.integrate_flow(args.start, params, dt=args.dt, t_max=args.t_max)
    lines = ["t,w1,w3"] + [f"{t:.6g},{a:.12g},{b:.12g}" for t, (a, b) in zip(res.times, res.path)]
    _write(Path(args.output) if args.output else None, "\n".join(lines) + "\n")
    print(json.dumps({"converged": res.converged, "limit": res.limit, "t_end": res.t_end,
                      "clamped": res.clamped}), file=sys.stderr)
    return 0


def _parse_weight(x):
    if isinstance(x, int):
        return x
    if isinstance(x, str):
        return Fraction(x)
    return float(x)


def cmd_oracle(args) -> int:
    if args.sp:
        graph = flatten(parse_sp(args.sp))
    else:
        graph = FlatGraph.from_json(Path(args.graph).read_text(encoding="utf-8"))
    weights = None
    if args.weights:
        raw = json.loads(Path(args.weights).read_text(encoding="utf-8"))
        if isinstance(raw, list):
            weights = {i: _parse_weight(w) for i, w in enumerate(raw)}
        else:
            weights = {int(k): _parse_weight(w) for k, w in raw.items()}
    start = graph.source if args.start is None else args.start
    absorb = graph.sink if args.absorb is None else args.absorb
    if args.hit_before is not None:
        q = oracle.exact_hit_before(graph, weights, start, absorb, args.hit_before)
        print(json.dumps({"prob": str(q)}))
        return 0
    fn = oracle.excursion_le_distribution if args.excursion else oracle.exact_le_distribution
    dist = fn(graph, weights, start, absorb, max_vertices=args.max_vertices)
    _write(Path(args.output) if args.output else None, dist.to_json() + "\n")
    return 0


def cmd_urn(args) -> int:
    if args.kind == "g":
        c, s = args.center, args.slope

        def G(x: float) -> float:
            return min(1.0, max(0.0, c + s * (x - c)))

        xs = urns.g_urn_run(G, args.steps, args.seed)
        every = max(1, args.every)
        lines = ["n,Xhat"] + [f"{n},{xs[n]:.9g}" for n in range(0, args.steps + 1, every)]
        if args.steps % every:
            lines.append(f"{args.steps},{xs[-1]:.9g}")
    else:
        l1, l2p, l3p = args.lengths
        rows = urns.polya_coupled_run(l1, l2p, l3p, args.alpha, args.steps, args.seed)
        lines = ["n,N1,N2"] + [f"{n},{a},{b}" for n, a, b in rows]
    _write(Path(args.output) if args.output else None, "\n".join(lines) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="antnet", description="Multi-nest ants process toolkit.")
    sub = ap.add_subparsers(dest="command", required=True)

    def cfg_opts(p):
        p.add_argument("-c", "--config", required=True, help="experiment config (JSON)")
        p.add_argument("--seed", type=int, action="append", help="override seeds (repeatable)")
        p.add_argument("--n-steps", type=int)
        p.add_argument("--output-dir")

    p = sub.add_parser("simulate", help="run the seeded replicas of a config")
    cfg_opts(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="compare run artifacts with the predicted limits")
    cfg_opts(p)
    p.add_argument("--tolerance", type=float)
    p.add_argument("--json", action="store_true")
    p.add_argument("--overlay", help="also write the flow overlay CSV here")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("theory", help="zeros, limits and phase portrait data")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--lengths", type=_lengths, required=True, help="l1,l2,l3")
    p.add_argument("--out-dir")
    p.add_argument("--grid", type=int, default=25)
    p.add_argument("--flows", type=int, default=20)
    p.add_argument("--t-max", type=float, default=200.0)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_theory)

    p = sub.add_parser("flow", help="integrate the limiting ODE, or overlay it on a run")
    p.add_argument("-c", "--config")
    p.add_argument("--seed", type=int, action="append")
    p.add_argument("--n-steps", type=int)
    p.add_argument("--output-dir")
    p.add_argument("--seed-for-overlay", type=int)
    p.add_argument("--alpha", type=float)
    p.add_argument("--lengths", type=_lengths)
    p.add_argument("--start", type=_point, help="w1,w3")
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--t-max", type=float, default=1e3)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_flow)

    p = sub.add_parser("oracle", help="exact loop-erased path law on a small graph")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--graph", help="graph JSON file")
    src.add_argument("--sp", help="SP expression, e.g. 'par(e,series(e,e))'")
    p.add_argument("--weights", help="JSON list or {edge id: weight}; strings are read as fractions")
    p.add_argument("--start", type=int)
    p.add_argument("--absorb", type=int)
    p.add_argument("--excursion", action="store_true")
    p.add_argument("--hit-before", type=int, metavar="B",
                   help="print P(hit ABSORB before B) instead of a path law")
    p.add_argument("--max-vertices", type=int, default=8)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("urn", help="G-urn or thinned two-colour urn trajectories")
    p.add_argument("--kind", choices=("g", "polya"), default="g")
    p.add_argument("--steps", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--center", type=float, default=0.5, help="G(x) = center + slope (x - center)")
    p.add_argument("--slope", type=float, default=0.5)
    p.add_argument("--every", type=int, default=1)
    p.add_argument("--lengths", type=_lengths, default=[1.0, 1.0, 1.0], help="l1,l2',l3' (polya)")
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_urn)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except harness.ConfigError as exc:
        for key, msg in exc.problems:
            print(f"config error [{key}]: {msg}", file=sys.stderr)
        return 2
    except (SPSyntaxError, oracle.StateSpaceTooLarge, harness.MissingArtifacts, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
