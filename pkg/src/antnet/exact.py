"""Small dense linear solves: exact over Fractions, float with a residual check."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

import numpy as np


class SingularSystem(ValueError):
    pass


def solve_fraction(A: Sequence[Sequence[Fraction]], b: Sequence[Fraction]) -> list[Fraction]:
    """Solve A x = b exactly by Gauss-Jordan elimination.

    Pivoting picks the first non-zero entry in the column; with exact
    arithmetic any non-zero pivot is as good as any other.
    """
    n = len(A)
    M = [[Fraction(x) for x in row] + [Fraction(bi)] for row, bi in zip(A, b)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            raise SingularSystem("matrix is singular")
        if piv != col:
            M[col], M[piv] = M[piv], M[col]
        pivot_row = M[col]
        inv = 1 / pivot_row[col]
        if inv != 1:
            for j in range(col, n + 1):
                pivot_row[j] *= inv
        for r in range(n):
            if r != col:
                f = M[r][col]
                if f != 0:
                    row = M[r]
                    for j in range(col, n + 1):
                        if pivot_row[j] != 0:
                            row[j] -= f * pivot_row[j]
    return [M[i][n] for i in range(n)]


def solve_float(A, b, residual_tol: float = 1e-12) -> np.ndarray:
    """numpy solve plus a relative residual check."""
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    try:
        x = np.linalg.solve(A, b)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(str(exc)) from exc
    scale = max(1.0, float(np.max(np.abs(b))) if b.size else 1.0)
    res = float(np.max(np.abs(A @ x - b))) if b.size else 0.0
    if res > residual_tol * scale:
        raise SingularSystem(f"residual {res:.3g} exceeds tolerance")
    return x


def solve(A, b, exact: bool):
    if exact:
        return solve_fraction(A, b)
    return list(solve_float(A, b))
