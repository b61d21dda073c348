"""Closed-form limits and the mean-field vector field of the two-nest process.

Everything here is written with plain arithmetic so it works unchanged on
floats, :class:`fractions.Fraction` and numpy arrays.

The planar field acts on ``(w1, w3)`` with ``w2 = 1 - w1`` implied. Theorem
formulas assume ``l1 <= l2``; :meth:`TheoryParams.normalized` exchanges the
labels of the two nests when needed and :func:`classify_case` undoes the
exchange in what it returns.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np


class SingularField(ValueError):
    """The field's shared denominator vanishes at the requested point."""


@dataclass(frozen=True)
class TheoryParams:
    alpha: float
    l1: float
    l2: float
    l3: float
    swapped: bool = False

    def __post_init__(self) -> None:
        if not 0 < self.alpha < 1:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if min(self.l1, self.l2, self.l3) < 1:
            raise ValueError("component lengths must be >= 1")

    @property
    def lengths(self) -> tuple[float, float, float]:
        return self.l1, self.l2, self.l3

    def normalized(self) -> "TheoryParams":
        """Relabel the nests so that l1 <= l2 (alpha becomes 1 - alpha)."""
        if self.l1 <= self.l2:
            return self
        return TheoryParams(1 - self.alpha, self.l2, self.l1, self.l3, swapped=not self.swapped)


def _has_zero(x) -> bool:
    if isinstance(x, np.ndarray):
        return bool(np.any(x == 0))
    return x == 0


# ---------------------------------------------------------------------------
# hitting probabilities


def P(c1, c2, c3, alpha):
    """Probabilities that the next reinforced path meets G1, G2, G3.

    ``c_i`` are the effective conductances of the three components.
    """
    den = c1 * c2 + c1 * c3 + c2 * c3
    if _has_zero(den):
        raise ZeroDivisionError("P undefined: all pairwise conductance products vanish")
    p1 = (alpha * c1 * c2 + c1 * c3) / den
    p3 = (alpha * c2 * c3 + (1 - alpha) * c1 * c3) / den
    return p1, 1 - p1, p3


def p(w1, w2, w3, params: TheoryParams):
    """P at the conductances ``w_i / l_i`` a line-triangle would have."""
    return P(w1 / params.l1, w2 / params.l2, w3 / params.l3, params.alpha)


# ---------------------------------------------------------------------------
# planar vector field


def field_denominator(w1, w3, params: TheoryParams):
    l1, l2, l3 = params.lengths
    return w3 * (l1 + w1 * (l2 - l1)) + l3 * w1 * (1 - w1)


def F(w1, w3, params: TheoryParams):
    """Drift (F1, F3) of (N1/n, N3/n), in its factored form."""
    l1, l2, l3 = params.lengths
    a = params.alpha
    den = field_denominator(w1, w3, params)
    if _has_zero(den):
        raise SingularField(f"field denominator vanishes at ({w1}, {w3})")
    f1 = w1 * (1 - w1) * (l3 * (a - w1) + (l2 - l1) * w3) / den
    f3 = w3 * (l2 * (1 - a) * w1 + l1 * a * (1 - w1) - l3 * w1 * (1 - w1)
               - w3 * (l1 + w1 * (l2 - l1))) / den
    return f1, f3


def F_composed(w1, w3, params: TheoryParams):
    """The same drift built as p(w) - w; used to cross-check :func:`F`."""
    p1, _, p3 = p(w1, 1 - w1, w3, params)
    return p1 - w1, p3 - w3


def gamma_line(w1, params: TheoryParams):
    """Non-trivial branch of F1 = 0: w3 = l3 (w1 - alpha) / (l2 - l1)."""
    l1, l2, l3 = params.lengths
    if l2 == l1:
        raise ValueError("gamma line undefined for l1 == l2; F1 = 0 iff w1 in {0, alpha, 1}")
    return l3 * (w1 - params.alpha) / (l2 - l1)


def g_curve(w1, params: TheoryParams):
    """Non-trivial branch of F3 = 0."""
    l1, l2, l3 = params.lengths
    a = params.alpha
    return (l2 * (1 - a) * w1 + l1 * a * (1 - w1) - l3 * w1 * (1 - w1)) / (l1 + w1 * (l2 - l1))


def beta(params: TheoryParams) -> tuple[float, float]:
    """Interior zero (beta1, beta3); requires l1 <= l2."""
    l1, l2, l3 = params.lengths
    a = params.alpha
    if l1 > l2:
        raise ValueError("beta assumes l1 <= l2; call params.normalized() first")
    den1 = l1 * l3 + (l2 - l1) * ((1 - a) * (l3 - l2) + a * l1)
    den3 = a * (l2 - l1) * (l1 + l2 - l3) + l2 * (l1 - l2 + l3)
    if den1 == 0 or den3 == 0:
        raise ZeroDivisionError(f"beta undefined for lengths {params.lengths}")
    b1 = a * l1 * (l3 + l2 - l1) / den1
    b3 = a * (1 - a) * l3 * (l1 + l2 - l3) / den3
    return b1, b3


def zeros(params: TheoryParams) -> list[tuple[float, float]]:
    """The six zeros of the planar field (beta may lie outside the unit square)."""
    params = params.normalized()
    a = params.alpha
    out = [(0.0, 0.0), (0.0, a), (a, 0.0)]
    try:
        out.append(beta(params))
    except ZeroDivisionError:
        pass
    out += [(1.0, 1 - a), (1.0, 0.0)]
    return out


# ---------------------------------------------------------------------------
# cases and limits


@dataclass(frozen=True)
class TheoryLimits:
    case: str
    limits: tuple[float, float, float]
    beta: tuple[float, float] | None
    active: tuple[bool, bool, bool]
    swapped: bool

    def as_dict(self) -> dict:
        return {
            "case": self.case,
            "limits": list(self.limits),
            "beta": None if self.beta is None else list(self.beta),
            "active": list(self.active),
            "swapped": self.swapped,
        }


def classify_case(params: TheoryParams) -> TheoryLimits:
    """Which regime applies and the limit of (N1, N2, N3)/n.

    Limits are reported in the caller's labelling. ``beta`` is only set in
    case II and, like the case boundaries, refers to the l1 <= l2 labelling.
    """
    q = params.normalized()
    l1, l2, l3 = q.lengths
    a = q.alpha
    b = None
    if l2 >= l1 + l3:
        case, lim = "I", (1.0, 0.0, 1 - a)
    elif l3 >= l1 + l2:
        case, lim = "III", (a, 1 - a, 0.0)
    else:
        b = beta(q)
        case, lim = "II", (b[0], 1 - b[0], b[1])
    if q.swapped != params.swapped:
        lim = (lim[1], lim[0], lim[2])
    active = tuple(x > 0 for x in lim)
    return TheoryLimits(case, lim, b, active, q.swapped != params.swapped)  # type: ignore[arg-type]


def limit_point(params: TheoryParams) -> tuple[float, float]:
    """Predicted limit of (N1/n, N3/n) in the caller's labelling."""
    lim = classify_case(params).limits
    return lim[0], lim[2]


# ---------------------------------------------------------------------------
# flow


@dataclass
class FlowResult:
    times: np.ndarray
    path: np.ndarray  # shape (k, 2)
    limit: tuple[float, float] | None
    converged: bool
    clamped: bool = False
    t_end: float = field(default=0.0)


def _rk4(x, z, dt, params):
    # scalar floats: numpy temporaries would dominate the cost here
    a1, b1 = F(x, z, params)
    a2, b2 = F(x + 0.5 * dt * a1, z + 0.5 * dt * b1, params)
    a3, b3 = F(x + 0.5 * dt * a2, z + 0.5 * dt * b2, params)
    a4, b4 = F(x + dt * a3, z + dt * b3, params)
    return x + dt / 6 * (a1 + 2 * a2 + 2 * a3 + a4), z + dt / 6 * (b1 + 2 * b2 + 2 * b3 + b4)


def integrate_flow(
    start: Sequence[float],
    params: TheoryParams,
    dt: float = 1e-3,
    t_max: float = 1e3,
    tol: float = 1e-9,
    record_every: int = 100,
) -> FlowResult:
    """Fixed-step RK4 for y' = F(y) from ``start``.

    Stops once |F(y)| < tol with y within 10 tol of an analytic zero, and
    reports that zero as the limit. Without convergence by ``t_max`` the
    limit is None.
    """
    x, z = float(start[0]), float(start[1])
    zs = zeros(params)
    # zeros() works in the l1 <= l2 labelling; map back if it swapped
    if params.normalized().swapped != params.swapped:
        zs = [(1 - a, b) for a, b in zs]
    times = [0.0]
    path = [(x, z)]
    clamped = False
    n_steps = int(math.ceil(t_max / dt))
    t = 0.0
    for k in range(1, n_steps + 1):
        f1, f3 = F(x, z, params)
        if math.hypot(f1, f3) < tol:
            near = [q for q in zs if max(abs(x - q[0]), abs(z - q[1])) <= 10 * tol]
            if near:
                best = min(near, key=lambda q: max(abs(x - q[0]), abs(z - q[1])))
                times.append(t)
                path.append((x, z))
                return FlowResult(np.array(times), np.array(path),
                                  (float(best[0]), float(best[1])), True, clamped, t)
        x, z = _rk4(x, z, dt, params)
        t = k * dt
        if not (0.0 <= x <= 1.0 and 0.0 <= z <= 1.0):
            if not clamped:
                warnings.warn(f"flow left the unit square at t={t:.3g}; clamping", RuntimeWarning)
            clamped = True
            x, z = min(max(x, 0.0), 1.0), min(max(z, 0.0), 1.0)
        if k % record_every == 0:
            times.append(t)
            path.append((x, z))
    times.append(t)
    path.append((x, z))
    return FlowResult(np.array(times), np.array(path), None, False, clamped, t)


# ---------------------------------------------------------------------------
# Dulac function


def dulac_weight(w1, w3, params: TheoryParams):
    """The Dulac multiplier -D(w) / (w1 w3 (1 - w1)) on (0,1) x (0,1]."""
    return -field_denominator(w1, w3, params) / (w1 * w3 * (1 - w1))


def dulac_field(w1, w3, params: TheoryParams):
    """The rescaled field (g F1, g F3)."""
    g = dulac_weight(w1, w3, params)
    f1, f3 = F(w1, w3, params)
    return g * f1, g * f3


def dulac_divergence(w1, w3, params: TheoryParams):
    """Closed-form divergence of the rescaled field."""
    l1, l2, l3 = params.lengths
    if np.any((w1 <= 0) | (w1 >= 1) | (w3 <= 0) | (w3 > 1)):
        raise ValueError("divergence needs w1 in (0, 1) and w3 in (0, 1]")
    return l3 / w3 + (l2 - l1) / (1 - w1) + l1 / (w1 * (1 - w1))
