"""The two-nest ants process on a triangle graph, and the single-nest process.

Each step: pick a nest (N1 with probability alpha), walk to the food F with
transition probabilities proportional to the current edge weights, erase
loops backwards from F, and add 1 to the weight of every edge on the
resulting simple path. ``N[i]`` counts the steps whose path met component
G_{i+1}.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from . import theory
from .sp_graph import FlatGraph, SPExpr, effective_conductance, flatten, heights
from .triangle import FOOD, N1, N2, TriangleSP
from .walk import DEFAULT_STEP_CAP, WalkEngine

CATEGORIES = ("G1", "G3+G2", "G2", "G3+G1")


class InvariantViolation(AssertionError):
    pass


@dataclass(frozen=True)
class StepRecord:
    n: int
    nest: int  # 1 or 2
    walk_length: int
    path: tuple[int, ...]  # edge ids, nest -> F
    category: str
    delta: tuple[int, int, int]


def _categorize(nest: int, hits: Sequence[int]) -> str:
    h1, h2, h3 = hits
    if nest == 1:
        if h1 and not h2 and not h3:
            return "G1"
        if h2 and h3 and not h1:
            return "G3+G2"
    else:
        if h2 and not h1 and not h3:
            return "G2"
        if h1 and h3 and not h2:
            return "G3+G1"
    raise InvariantViolation(f"path from nest {nest} hits components {hits}")


def geometric_checkpoints(n_from: int, n_to: int) -> list[int]:
    """Powers of two in (n_from, n_to], plus n_to."""
    out = []
    k = 1
    while k <= n_to:
        if k > n_from:
            out.append(k)
        k *= 2
    if not out or out[-1] != n_to:
        out.append(n_to)
    return out


class AntsState:
    """Mutable state of one replica of the two-nest process."""

    def __init__(self, triangle: TriangleSP, alpha: float, seed: int | None = None,
                 step_cap: int = DEFAULT_STEP_CAP):
        if not 0 <= alpha <= 1:
            raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
        self.triangle = triangle
        self.alpha = alpha
        self.seed = seed
        self.rng = random.Random(seed)
        self.n = 0
        self.N = [0, 0, 0]
        self.engine = WalkEngine(triangle.graph, step_cap=step_cap)
        self.comp = triangle.component_of()
        self._exprs = [triangle.global_expr(i) for i in range(3)]

    @property
    def W(self) -> list[int]:
        return self.engine.weights

    @property
    def lengths(self) -> tuple[int, int, int]:
        return self.triangle.lengths

    def step(self) -> StepRecord:
        nest = 1 if self.rng.random() < self.alpha else 2
        start = N1 if nest == 1 else N2
        rev_path, length = self.engine.loop_erased(start, FOOD, self.rng)
        self.engine.reinforce(rev_path)
        hits = [0, 0, 0]
        for e in rev_path:
            hits[self.comp[e]] = 1
        category = _categorize(nest, hits)
        for i in range(3):
            self.N[i] += hits[i]
        self.n += 1
        return StepRecord(self.n, nest, length, tuple(reversed(rev_path)), category, tuple(hits))

    # -- diagnostics -------------------------------------------------------

    def conductances(self) -> tuple[Fraction, Fraction, Fraction]:
        """Effective conductance of each component under its own current weights."""
        w = self.engine.weights
        return tuple(effective_conductance(x, w) for x in self._exprs)  # type: ignore[return-value]

    def nhat(self) -> tuple[float, float, float]:
        if self.n == 0:
            return (0.0, 0.0, 0.0)
        return tuple(x / self.n for x in self.N)  # type: ignore[return-value]

    def delta_hat(self, C=None) -> Fraction | None:
        """max_i |l_i C_i / N_i - 1|, or None while some N_i is 0."""
        if min(self.N) == 0:
            return None
        C = self.conductances() if C is None else C
        return max(abs(l * c / k - 1) for l, c, k in zip(self.lengths, C, self.N))

    def residual(self, C=None) -> tuple[Fraction, Fraction, Fraction] | None:
        """r(n) = P(C(n)) - p(N(n)/n), exact; None while some N_i is 0."""
        return residual(self, C)

    def snapshot(self, with_weights: bool = False) -> dict:
        C = self.conductances()
        r = self.residual(C)
        d = self.delta_hat(C)
        snap = {
            "n": self.n,
            "N": list(self.N),
            "Nhat": list(self.nhat()),
            "C": [float(c) for c in C],
            "r": [None, None, None] if r is None else [float(x) for x in r],
            "delta": None if d is None else float(d),
        }
        if with_weights:
            snap["W"] = list(self.engine.weights)
        return snap


def init(triangle: TriangleSP, alpha: float, seed: int | None = None) -> AntsState:
    return AntsState(triangle, alpha, seed)


def step(state: AntsState) -> tuple[AntsState, StepRecord]:
    record = state.step()
    return state, record


def residual(state: AntsState, C=None):
    if min(state.N) == 0:
        return None
    C = state.conductances() if C is None else C
    a = Fraction(state.alpha).limit_denominator(10**12) if isinstance(state.alpha, float) else state.alpha
    P = theory.P(*C, a)
    params = _ExactParams(a, *state.lengths)
    n = state.n
    q = theory.p(*(Fraction(k, n) for k in state.N), params)
    return tuple(x - y for x, y in zip(P, q))


@dataclass(frozen=True)
class _ExactParams:
    # duck-types TheoryParams for theory.p without its (0, 1) check on alpha
    alpha: Fraction
    l1: int
    l2: int
    l3: int


@dataclass
class RunResult:
    snapshots: list[dict]
    records: list[StepRecord] = field(default_factory=list)
    floors: dict = field(default_factory=dict)


def run(
    state: AntsState,
    n_steps: int,
    checkpoints: Iterable[int] | None = None,
    keep_records: bool = False,
    with_weights: bool = False,
    check: bool = True,
) -> RunResult:
    """Advance ``state`` by ``n_steps`` and snapshot it at the given absolute n values.

    With ``check`` every step is verified against the structural invariants
    (simple path, one of the four categories, N1 + N2 = n) and an
    :class:`InvariantViolation` is raised on the first failure. ``floors``
    in the result holds the minima of (N1+N3)/(n+2) and (N2+N3)/(n+2) over the
    second half of the run.
    """
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    end = state.n + n_steps
    cps = sorted(set(geometric_checkpoints(state.n, end) if checkpoints is None else checkpoints))
    cps = [c for c in cps if state.n < c <= end]
    out = RunResult([])
    half = state.n + n_steps // 2
    floor13 = floor23 = math.inf

    # the loop below is step() unrolled; keep the two in sync
    rng, engine, comp, N = state.rng, state.engine, state.comp, state.N
    alpha = state.alpha
    walk, reinforce, rand = engine.loop_erased, engine.reinforce, rng.random
    ends = engine.endpoints
    ci = 0
    while state.n < end:
        nest = 1 if rand() < alpha else 2
        start = N1 if nest == 1 else N2
        rev_path, length = walk(start, FOOD, rng)
        reinforce(rev_path)
        h = [0, 0, 0]
        for e in rev_path:
            h[comp[e]] = 1
        N[0] += h[0]
        N[1] += h[1]
        N[2] += h[2]
        state.n += 1
        n = state.n
        if check:
            category = _categorize(nest, h)
            _check_simple(rev_path, ends, start)
            if N[0] + N[1] != n:
                raise InvariantViolation(f"N1 + N2 = {N[0] + N[1]} != n = {n}")
        if keep_records:
            cat = category if check else _categorize(nest, h)
            out.records.append(StepRecord(n, nest, length, tuple(reversed(rev_path)), cat, tuple(h)))
        if n > half:
            f13 = (N[0] + N[2]) / (n + 2)
            f23 = (N[1] + N[2]) / (n + 2)
            if f13 < floor13:
                floor13 = f13
            if f23 < floor23:
                floor23 = f23
        if ci < len(cps) and n == cps[ci]:
            out.snapshots.append(state.snapshot(with_weights))
            ci += 1
    out.floors = {"N1+N3": floor13, "N2+N3": floor23}
    return out


def _check_simple(rev_path: Sequence[int], ends, start: int) -> None:
    x = FOOD
    seen = {x}
    for e in rev_path:
        a, b = ends[e]
        x = b if x == a else a
        if x in seen:
            raise InvariantViolation(f"reinforced path is not simple: {rev_path}")
        seen.add(x)
    if x != start:
        raise InvariantViolation("reinforced path does not end at the nest")


def restriction_times(records: Sequence[StepRecord], triangle: TriangleSP, i: int):
    """Times at which component ``i`` (0-based) was reinforced, with its weights after each.

    Returns a list of ``(tau, weights)`` where ``weights`` maps the
    component's edge ids to their values just after step ``tau``.
    """
    part = triangle.parts[i]
    w = {e: 1 for e in part}
    keep = set(part)
    out = []
    for rec in records:
        touched = [e for e in rec.path if e in keep]
        if touched:
            for e in touched:
                w[e] += 1
            out.append((rec.n, dict(w)))
    return out


def growth_exponents(snapshots: Sequence[dict], tail: float = 0.5) -> list[float | None]:
    """Least-squares slope of log N_i against log n over the last ``tail`` of the log-n range."""
    pts = [s for s in snapshots if s["n"] > 1]
    if len(pts) < 2:
        return [None, None, None]
    lo = math.log(pts[0]["n"]) + (1 - tail) * (math.log(pts[-1]["n"]) - math.log(pts[0]["n"]))
    pts = [s for s in pts if math.log(s["n"]) >= lo]
    out: list[float | None] = []
    for i in range(3):
        xy = [(math.log(s["n"]), math.log(s["N"][i])) for s in pts if s["N"][i] > 0]
        if len(xy) < 2:
            out.append(None)
            continue
        mx = sum(x for x, _ in xy) / len(xy)
        my = sum(y for _, y in xy) / len(xy)
        sxx = sum((x - mx) ** 2 for x, _ in xy)
        out.append(None if sxx == 0 else sum((x - mx) * (y - my) for x, y in xy) / sxx)
    return out


# ---------------------------------------------------------------------------
# single-nest process


class SingleNestState:
    """Ants process on one SP graph with nest = source and food = sink."""

    def __init__(self, expr: SPExpr, seed: int | None = None, step_cap: int = DEFAULT_STEP_CAP):
        if heights(expr)[0] < 1:
            raise ValueError("graph height must be >= 1")
        self.expr = expr
        self.graph: FlatGraph = flatten(expr)
        self.rng = random.Random(seed)
        self.engine = WalkEngine(self.graph, step_cap=step_cap)
        self.n = 0

    @property
    def W(self) -> list[int]:
        return self.engine.weights

    def step(self) -> tuple[int, ...]:
        rev_path, _ = self.engine.loop_erased(self.graph.source, self.graph.sink, self.rng)
        self.engine.reinforce(rev_path)
        self.n += 1
        return tuple(reversed(rev_path))

    def conductance(self) -> Fraction:
        return effective_conductance(self.expr, self.engine.weights)


def single_nest_run(expr: SPExpr, n_steps: int, seed: int | None = None,
                    checkpoints: Iterable[int] | None = None, with_weights: bool = True) -> list[dict]:
    """Snapshots ``{"n", "C", "W"}`` of a single-nest run (C exact)."""
    state = SingleNestState(expr, seed)
    cps = set(geometric_checkpoints(0, n_steps) if checkpoints is None else checkpoints)
    out = []
    if 0 in cps:
        out.append(_single_snap(state, with_weights))
    for _ in range(n_steps):
        state.step()
        if state.n in cps:
            out.append(_single_snap(state, with_weights))
    return out


def _single_snap(state: SingleNestState, with_weights: bool) -> dict:
    snap = {"n": state.n, "C": state.conductance()}
    if with_weights:
        snap["W"] = list(state.engine.weights)
    return snap
