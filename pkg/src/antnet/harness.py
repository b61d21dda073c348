"""Experiment orchestration: configs, seeded replicas, artifacts and verification reports."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np

from . import ants, theory
from .sp_graph import shortest_path_edges
from .triangle import TriangleSP, from_config


class ConfigError(ValueError):
    """Invalid experiment config; ``problems`` lists (field, message) pairs."""

    def __init__(self, problems: list[tuple[str, str]]):
        self.problems = problems
        super().__init__("; ".join(f"{k}: {m}" for k, m in problems))


class MissingArtifacts(FileNotFoundError):
    pass


_KNOWN = {"triangle", "alpha", "n_steps", "seeds", "checkpoints", "tolerance", "floor", "output_dir"}


@dataclass
class ExperimentConfig:
    triangle: dict
    alpha: float
    n_steps: int
    seeds: list[int]
    checkpoints: str | list[int] = "geometric"
    tolerance: float = 0.02
    floor: float = 0.01
    output_dir: str = "runs"

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ExperimentConfig":
        problems: list[tuple[str, str]] = []
        if not isinstance(data, Mapping):
            raise ConfigError([("<root>", "config must be a JSON object")])
        for k in data:
            if k not in _KNOWN:
                problems.append((k, "unknown field"))
        for k in ("triangle", "alpha", "n_steps", "seeds"):
            if k not in data:
                problems.append((k, "required field is missing"))
        if problems:
            raise ConfigError(problems)

        tri = data["triangle"]
        if not isinstance(tri, Mapping):
            problems.append(("triangle", "must be an object with 'lengths' or 'g1'/'g2'/'g3'"))
        else:
            try:
                from_config(tri)
            except (ValueError, KeyError, TypeError) as exc:
                problems.append(("triangle", str(exc)))

        alpha = data["alpha"]
        if isinstance(alpha, bool) or not isinstance(alpha, (int, float)) or not 0 < alpha < 1:
            problems.append(("alpha", f"must be a number in (0, 1), got {alpha!r}"))
        n_steps = data["n_steps"]
        if isinstance(n_steps, bool) or not isinstance(n_steps, int) or n_steps < 1:
            problems.append(("n_steps", f"must be an integer >= 1, got {n_steps!r}"))
        seeds = data["seeds"]
        if not isinstance(seeds, list) or not seeds:
            problems.append(("seeds", "must be a non-empty list of integers"))
        elif not all(isinstance(s, int) and not isinstance(s, bool) for s in seeds):
            problems.append(("seeds", "every seed must be an integer"))
        elif len(set(seeds)) != len(seeds):
            problems.append(("seeds", "seeds must be distinct"))

        cps = data.get("checkpoints", "geometric")
        if cps != "geometric":
            if not isinstance(cps, list) or not all(isinstance(c, int) and c >= 1 for c in cps):
                problems.append(("checkpoints", "must be 'geometric' or a list of positive integers"))
        for k in ("tolerance", "floor"):
            v = data.get(k, 0.02)
            if not isinstance(v, (int, float)) or isinstance(v, bool) or v <= 0:
                problems.append((k, f"must be a positive number, got {v!r}"))
        if not isinstance(data.get("output_dir", "runs"), str):
            problems.append(("output_dir", "must be a string"))
        if problems:
            raise ConfigError(problems)
        return cls(**{k: data[k] for k in data})

    @classmethod
    def from_file(cls, path: str | os.PathLike) -> "ExperimentConfig":
        text = Path(path).read_text(encoding="utf-8")
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError([("<json>", f"line {exc.lineno} column {exc.colno}: {exc.msg}")]) from exc
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        return asdict(self)

    def build_triangle(self) -> TriangleSP:
        return from_config(self.triangle)

    def checkpoint_list(self) -> list[int]:
        if self.checkpoints == "geometric":
            return ants.geometric_checkpoints(0, self.n_steps)
        return sorted({c for c in self.checkpoints if c <= self.n_steps} | {self.n_steps})

    def params(self) -> theory.TheoryParams:
        return theory.TheoryParams(self.alpha, *self.build_triangle().lengths)


def max_workers(n_jobs: int) -> int:
    raw = os.environ.get("ANTNET_THREADS", "1")
    try:
        cap = int(raw)
    except ValueError:
        raise ConfigError([("ANTNET_THREADS", f"must be an integer, got {raw!r}")]) from None
    return max(1, min(cap, n_jobs))


def _replica(job: tuple[dict, int]) -> tuple[list[dict], dict]:
    cfg_dict, seed = job
    cfg = ExperimentConfig(**cfg_dict)
    state = ants.AntsState(cfg.build_triangle(), cfg.alpha, seed)
    res = ants.run(state, cfg.n_steps, cfg.checkpoint_list(), with_weights=True, check=True)
    return res.snapshots, res.floors


def seed_path(cfg: ExperimentConfig, seed: int) -> Path:
    return Path(cfg.output_dir) / f"seed_{seed}.jsonl"


def run_experiment(cfg: ExperimentConfig) -> Path:
    """Run every seed and write ``seed_<s>.jsonl`` plus ``summary.csv``.

    Replicas run in worker processes (at most ANTNET_THREADS); the parent
    writes all files, in seed order.
    """
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    jobs = [(cfg.to_dict(), s) for s in cfg.seeds]
    workers = max_workers(len(jobs))
    if workers == 1:
        results = [_replica(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_replica, jobs))

    rows = []
    for seed, (snaps, floors) in zip(cfg.seeds, results):
        with open(seed_path(cfg, seed), "w", encoding="utf-8", newline="\n") as fh:
            for s in snaps:
                fh.write(json.dumps(s) + "\n")
        last = snaps[-1]
        rows.append([seed, last["n"], *last["N"], *(f"{x:.6f}" for x in last["Nhat"]),
                     f"{floors['N1+N3']:.6f}", f"{floors['N2+N3']:.6f}"])
    with open(out / "summary.csv", "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["seed", "n", "N1", "N2", "N3", "Nhat1", "Nhat2", "Nhat3", "floor13", "floor23"])
        w.writerows(rows)
    (out / "config.json").write_text(json.dumps(cfg.to_dict(), indent=2) + "\n", encoding="utf-8")
    return out


def load_snapshots(cfg: ExperimentConfig, seed: int) -> list[dict]:
    path = seed_path(cfg, seed)
    if not path.exists():
        raise MissingArtifacts(f"no artifacts for seed {seed} at {path}; run 'simulate' first")
    with open(path, encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]


# -- verification -----------------------------------------------------------


def predicted_edges(tri: TriangleSP, limits: Sequence[float]) -> tuple[set[int], dict[int, float]]:
    """Predicted support of lim W_e/n, and the limit itself where it is determined.

    The support is the union of shortest-path edges of the components with a
    positive limit. The per-edge value is only pinned down when a component
    has a unique shortest path, in which case each of its edges carries the
    component's limit.
    """
    support: set[int] = set()
    values: dict[int, float] = {}
    for i, part in enumerate(tri.parts):
        on_short = shortest_path_edges(tri.component_graph(i))
        unique = len(on_short) == tri.lengths[i]
        for e in part:
            if limits[i] <= 0 or e not in on_short:
                values[e] = 0.0
            elif unique:
                values[e] = limits[i]
        if limits[i] > 0:
            support |= on_short
    return support, values


@dataclass
class VerificationReport:
    case: str
    predicted: tuple[float, float, float]
    tolerance: float
    floor: float
    per_seed_nhat: dict[int, list[float]]
    per_seed_edges: dict[int, list[float]]
    median_nhat: list[float]
    nhat_errors: list[float]
    median_edges: list[float]
    edge_predictions: dict[int, float]
    edge_errors: dict[int, float]
    support_expected: list[int]
    support_failures: list[int]
    passed: bool = field(default=False)

    def to_json(self) -> str:
        d = asdict(self)
        d["per_seed_nhat"] = {str(k): v for k, v in self.per_seed_nhat.items()}
        d["per_seed_edges"] = {str(k): v for k, v in self.per_seed_edges.items()}
        d["edge_predictions"] = {str(k): v for k, v in self.edge_predictions.items()}
        d["edge_errors"] = {str(k): v for k, v in self.edge_errors.items()}
        return json.dumps(d, indent=2)

    def lines(self) -> list[str]:
        out = [f"case {self.case}: predicted Nhat {tuple(round(x, 4) for x in self.predicted)}"]
        out.append(f"median Nhat {[round(x, 4) for x in self.median_nhat]} "
                   f"errors {[round(x, 4) for x in self.nhat_errors]} (tol {self.tolerance})")
        if self.edge_errors:
            out.append(f"max edge-ratio error {max(self.edge_errors.values()):.4f}")
        out.append("support check: " + ("ok" if not self.support_failures
                                         else f"mismatch on edges {self.support_failures}"))
        out.append("PASS" if self.passed else "FAIL")
        return out


def verify_theorem(cfg: ExperimentConfig, tolerance: float | None = None) -> VerificationReport:
    tol = cfg.tolerance if tolerance is None else tolerance
    tri = cfg.build_triangle()
    lim = theory.classify_case(cfg.params())
    per_nhat, per_edges = {}, {}
    for s in cfg.seeds:
        last = load_snapshots(cfg, s)[-1]
        if last["n"] != cfg.n_steps:
            raise MissingArtifacts(f"seed {s} artifacts stop at n={last['n']}, config says {cfg.n_steps}")
        per_nhat[s] = last["Nhat"]
        per_edges[s] = [w / last["n"] for w in last["W"]]
    med = [statistics.median(v[i] for v in per_nhat.values()) for i in range(3)]
    n_edges = len(next(iter(per_edges.values())))
    med_edges = [statistics.median(v[e] for v in per_edges.values()) for e in range(n_edges)]
    errs = [abs(m - p) for m, p in zip(med, lim.limits)]
    support, values = predicted_edges(tri, lim.limits)
    edge_errs = {e: abs(med_edges[e] - v) for e, v in values.items()}
    failures = [e for e in range(n_edges) if (med_edges[e] > cfg.floor) != (e in support)]
    passed = max(errs) <= tol and all(x <= tol for x in edge_errs.values()) and not failures
    return VerificationReport(lim.case, lim.limits, tol, cfg.floor, per_nhat, per_edges, med, errs,
                              med_edges, values, edge_errs, sorted(support), failures, passed)


# -- flow overlay -----------------------------------------------------------


def harmonic(n: int) -> float:
    """H_n = sum_{k<=n} 1/k (exact sum below 10^4, asymptotic series above)."""
    if n < 10_000:
        return math.fsum(1.0 / k for k in range(1, n + 1))
    return math.log(n) + 0.5772156649015329 + 1 / (2 * n) - 1 / (12 * n * n)


def report_flow_overlay(cfg: ExperimentConfig, seed: int | None = None, n_start: int = 64,
                        dt: float = 1e-3) -> tuple[list[dict], dict]:
    """Pair the empirical (Nhat1, Nhat3) of one seed with the flow from its first checkpoint.

    Empirical step n corresponds to flow time h(n) - h(n0) where h is the
    harmonic sum. Returns the table rows and a summary with the long-time
    flow limit next to the theorem's limit.
    """
    seed = cfg.seeds[0] if seed is None else seed
    params = cfg.params()
    snaps = [s for s in load_snapshots(cfg, seed) if s["n"] >= n_start]
    if not snaps:
        raise MissingArtifacts(f"no checkpoints with n >= {n_start}")
    n0 = snaps[0]["n"]
    y0 = (snaps[0]["Nhat"][0], snaps[0]["Nhat"][2])
    h0 = harmonic(n0)
    t_end = harmonic(snaps[-1]["n"]) - h0
    flow = theory.integrate_flow(y0, params, dt=dt, t_max=max(t_end, dt), tol=0.0, record_every=1)
    ts = flow.times
    rows = []
    for s in snaps:
        t = harmonic(s["n"]) - h0
        f1 = float(np.interp(t, ts, flow.path[:, 0]))
        f3 = float(np.interp(t, ts, flow.path[:, 1]))
        e1, e3 = s["Nhat"][0], s["Nhat"][2]
        rows.append({"n": s["n"], "h": harmonic(s["n"]), "t": t, "emp_w1": e1, "emp_w3": e3,
                     "flow_w1": f1, "flow_w3": f3, "d1": e1 - f1, "d3": e3 - f3})
    long_run = theory.integrate_flow(y0, params)
    lim = theory.classify_case(params).limits
    summary = {"seed": seed, "n0": n0, "start": list(y0),
               "flow_limit": None if long_run.limit is None else list(long_run.limit),
               "flow_end": list(map(float, long_run.path[-1])),
               "theorem_limit": [lim[0], lim[2]],
               "final_empirical": [snaps[-1]["Nhat"][0], snaps[-1]["Nhat"][2]]}
    return rows, summary


def rows_to_csv(rows: Sequence[Mapping[str, Any]], header: Sequence[str] | None = None) -> str:
    buf = io.StringIO()
    header = list(header or (rows[0].keys() if rows else []))
    w = csv.DictWriter(buf, fieldnames=header, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(r)
    return buf.getvalue()
