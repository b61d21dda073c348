"""Reference urn processes: G-urns and a two-colour urn with thinned replacement."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Callable

import numpy as np

GFunc = Callable[[float], float]


def g_urn_run(G: GFunc, n_steps: int, seed: int | None = None, c: float = 0.0) -> np.ndarray:
    """Simulate a G-urn; returns X_n / (n + c) for n = 0..n_steps.

    X_0 = 1 and X_{n+1} = X_n + 1 with probability G(X_n / (n + c)). With
    c = 0 the n = 0 entry uses X_0 / 1 so the start is well defined. For
    c < 1 the ratio can exceed 1 early on (X_n can be n + 1), so G is
    evaluated at the ratio capped to 1.
    """
    if c < 0:
        raise ValueError("normalisation offset c must be >= 0")
    rng = random.Random(seed)
    x = 1
    out = np.empty(n_steps + 1)
    out[0] = x / (c if c > 0 else 1)
    for n in range(n_steps):
        xhat = x / (n + c) if n + c > 0 else 1.0
        q = G(min(xhat, 1.0))
        if not 0.0 <= q <= 1.0:
            raise ValueError(f"G({xhat}) = {q} is outside [0, 1]")
        if rng.random() < q:
            x += 1
        out[n + 1] = x / (n + 1 + c)
    return out


@dataclass(frozen=True)
class FixedPoints:
    stable: list[float]
    unstable: list[float]
    degenerate: bool = False


def stable_fixed_points(G: GFunc, tol: float = 1e-6, grid: int = 2001, h: float = 1e-6) -> FixedPoints:
    """Fixed points of G on [0, 1] with G'(p) <= 1 + tol.

    Roots of G(x) - x are located on a uniform grid and refined by
    bisection; derivatives use central differences with step ``h``
    (one-sided at the ends). If G(x) - x vanishes on the whole grid the
    result is flagged ``degenerate`` instead of being enumerated.
    """
    xs = np.linspace(0.0, 1.0, grid)
    d = np.array([G(float(x)) - float(x) for x in xs])
    if np.all(np.abs(d) < 1e-12):
        return FixedPoints([], [], degenerate=True)

    roots: list[float] = []
    for i in range(grid):
        if abs(d[i]) < 1e-12:
            roots.append(float(xs[i]))
        elif i + 1 < grid and d[i] * d[i + 1] < 0:
            a, b = float(xs[i]), float(xs[i + 1])
            fa = d[i]
            for _ in range(80):
                m = 0.5 * (a + b)
                fm = G(m) - m
                if fm == 0:
                    a = b = m
                    break
                if (fm < 0) == (fa < 0):
                    a, fa = m, fm
                else:
                    b = m
            roots.append(0.5 * (a + b))
    # merge neighbours that hit the same root
    merged: list[float] = []
    for r in sorted(roots):
        if not merged or r - merged[-1] > 1e-9:
            merged.append(r)

    stable, unstable = [], []
    for r in merged:
        lo, hi = max(r - h, 0.0), min(r + h, 1.0)
        slope = (G(hi) - G(lo)) / (hi - lo)
        (stable if slope <= 1 + tol else unstable).append(r)
    return FixedPoints(stable, unstable)


def polya_coupled_run(l1: float, l2p: float, l3p: float, alpha: float, n_steps: int,
                      seed: int | None = None, checkpoints=None, uniforms=None) -> list[tuple[int, int, int]]:
    """Two-colour urn with activities N1/l1 and N2/(l2p + l3p), colour 2 thinned by alpha.

    Each step picks colour 1 with probability proportional to N1 / l1 and
    colour 2 with probability proportional to N2 / (l2p + l3p); a colour-2
    pick adds a ball only with probability alpha. Starts from (1, 1).
    Returns ``(n, N1, N2)`` at the checkpoints (default: every power of 2
    and the last step).

    ``uniforms`` may supply the two uniforms per step (for common-random-
    number comparisons); otherwise they come from ``random.Random(seed)``.
    """
    if min(l1, l2p, l3p) < 1:
        raise ValueError("lengths must be >= 1")
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    rng = random.Random(seed)
    draw = rng.random if uniforms is None else iter(uniforms).__next__
    if checkpoints is None:
        cps = {2**k for k in range(int(math.log2(max(n_steps, 1))) + 1)} | {n_steps}
    else:
        cps = set(checkpoints)
    a, b = 1, 1
    m23 = l2p + l3p
    out = []
    for n in range(1, n_steps + 1):
        u, v = draw(), draw()
        s1 = a / l1
        if u * (s1 + b / m23) < s1:
            a += 1
        elif v < alpha:
            b += 1
        if n in cps:
            out.append((n, a, b))
    return out


def polya_exponent(l1: float, l2p: float, l3p: float, alpha: float) -> float:
    """Growth exponent of colour 2: mu23 / mu1 when mu1 > mu23, else 1."""
    mu1 = 1 / l1
    mu23 = alpha / (l2p + l3p)
    return mu23 / mu1 if mu1 > mu23 else 1.0
