"""Dense-tableau two-phase simplex with Bland's anti-cycling rule.

Solves ``min c @ x  s.t.  A x = b,  x >= 0``. Problems here are tiny (under a
thousand columns, a handful of rows) and highly degenerate, so the code
favours robustness: Bland's rule for both entering and leaving choices and
an explicit clean-up of artificial variables between the two phases.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class LpError(Exception):
    pass


class InfeasibleError(LpError):
    pass


class UnboundedError(LpError):
    pass


@dataclass(frozen=True)
class StandardFormSolution:
    x: np.ndarray
    objective: float
    basis: tuple[int, ...]
    iterations: int


def _pivot(T: np.ndarray, row: int, col: int) -> None:
    T[row] /= T[row, col]
    col_vals = T[:, col].copy()
    col_vals[row] = 0.0
    T -= np.outer(col_vals, T[row])


def _run_bland(T: np.ndarray, basis: list[int], ncols: int, tol: float, max_iter: int) -> int:
    """Pivot until no reduced cost in the first ``ncols`` columns is negative."""
    m = T.shape[0] - 1
    for it in range(max_iter):
        reduced = T[m, :ncols]
        candidates = np.flatnonzero(reduced < -tol)
        if candidates.size == 0:
            return it
        col = int(candidates[0])
        column = T[:m, col]
        rows = np.flatnonzero(column > tol)
        if rows.size == 0:
            raise UnboundedError(f"objective unbounded along column {col}")
        ratios = T[rows, -1] / column[rows]
        best = ratios.min()
        tied = rows[ratios <= best + tol * max(1.0, abs(best))]
        row = int(min(tied, key=lambda i: basis[i]))
        _pivot(T, row, col)
        basis[row] = col
    raise LpError(f"simplex did not terminate in {max_iter} iterations")


def solve_standard_form(
    c: np.ndarray,
    A: np.ndarray,
    b: np.ndarray,
    tol: float = 1e-9,
    max_iter: int = 100_000,
) -> StandardFormSolution:
    c = np.asarray(c, dtype=float)
    A = np.array(A, dtype=float, copy=True)
    b = np.array(b, dtype=float, copy=True)
    m, n = A.shape
    if c.shape != (n,) or b.shape != (m,):
        raise ValueError(f"shape mismatch: c {c.shape}, A {A.shape}, b {b.shape}")

    flip = b < 0
    A[flip] *= -1.0
    b[flip] *= -1.0

    # Phase I: minimize the sum of artificials, one per row.
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n : n + m] = np.eye(m)
    T[:m, -1] = b
    T[m, :n] = -A.sum(axis=0)
    T[m, -1] = -b.sum()
    basis = list(range(n, n + m))
    iters = _run_bland(T, basis, n + m, tol, max_iter)

    infeasibility = -T[m, -1]
    if infeasibility > tol * max(1.0, float(np.abs(b).max(initial=0.0))):
        raise InfeasibleError(f"phase I ended with infeasibility {infeasibility:.3e}")

    # Drive artificials out of the basis; rows where that is impossible are redundant.
    keep = []
    for i in range(m):
        if basis[i] >= n:
            nz = np.flatnonzero(np.abs(T[i, :n]) > tol)
            if nz.size == 0:
                continue
            _pivot(T, i, int(nz[0]))
            basis[i] = int(nz[0])
        keep.append(i)

    T2 = np.zeros((len(keep) + 1, n + 1))
    T2[:-1, :n] = T[keep, :n]
    T2[:-1, -1] = T[keep, -1]
    basis = [basis[i] for i in keep]

    # Phase II cost row in reduced form.
    T2[-1, :n] = c
    for i, j in enumerate(basis):
        T2[-1] -= c[j] * T2[i]
    iters += _run_bland(T2, basis, n, tol, max_iter)

    x = np.zeros(n)
    x[basis] = T2[:-1, -1]
    x[np.abs(x) < tol * 1e-3] = 0.0
    return StandardFormSolution(x=x, objective=float(c @ x), basis=tuple(basis), iterations=iters)


def solve_bounded(
    c: np.ndarray,
    A_eq: np.ndarray,
    b_eq: np.ndarray,
    upper: np.ndarray,
    maximize: bool = False,
    tol: float = 1e-9,
) -> StandardFormSolution:
    """Optimize with ``0 <= x <= upper`` (``inf`` allowed) by adding slack rows for finite bounds."""
    c = np.asarray(c, dtype=float)
    A_eq = np.asarray(A_eq, dtype=float)
    upper = np.asarray(upper, dtype=float)
    m, n = A_eq.shape
    bounded = np.flatnonzero(np.isfinite(upper))
    k = bounded.size

    A = np.zeros((m + k, n + k))
    A[:m, :n] = A_eq
    for row, j in enumerate(bounded):
        A[m + row, j] = 1.0
        A[m + row, n + row] = 1.0
    b = np.concatenate([np.asarray(b_eq, dtype=float), upper[bounded]])
    cost = np.concatenate([-c if maximize else c, np.zeros(k)])

    sol = solve_standard_form(cost, A, b, tol=tol)
    x = sol.x[:n]
    return StandardFormSolution(x=x, objective=float(c @ x), basis=sol.basis, iterations=sol.iterations)
