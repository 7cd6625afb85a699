"""Shared types and postprocessing for the nonnegative-orthogonal solvers."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..graph_core import IndicatorMatrix, Partition, indicator_from_partition


class InfeasibleResultError(AssertionError):
    """A solver produced an indicator outside the feasible set."""


@dataclass(frozen=True, eq=False)
class ProblemInstance:
    """Estimated structural eigenvectors (n, k) and the number of cells r."""

    p_hat: np.ndarray
    r: int

    def __post_init__(self):
        p = np.asarray(self.p_hat, dtype=float)
        if p.ndim == 1:
            p = p[:, None]
        if p.ndim != 2:
            raise ValueError("p_hat must be a 2-D array")
        if not 1 <= self.r <= p.shape[0]:
            raise ValueError(f"need 1 <= r <= n, got r={self.r}, n={p.shape[0]}")
        object.__setattr__(self, "p_hat", p)

    @classmethod
    def from_eigenvectors(cls, p_hat, tol: float = 1e-8) -> "ProblemInstance":
        """Validated instance: columns orthonormal to ``tol``, r = #columns."""
        p = np.asarray(p_hat, dtype=float)
        err = np.linalg.norm(p.T @ p - np.eye(p.shape[1]))
        if err > tol:
            raise ValueError(f"columns of p_hat are not orthonormal (error {err:.3g})")
        return cls(p, p.shape[1])

    @property
    def n(self) -> int:
        return self.p_hat.shape[0]


@dataclass(eq=False)
class SolverResult:
    h_hat: IndicatorMatrix
    objective: float
    iterations: int
    solver_id: str
    converged: bool = True
    diagnostics: dict = field(default_factory=dict)

    @property
    def partition(self) -> Partition:
        return self.h_hat.partition

    @property
    def labels(self) -> np.ndarray:
        return np.argmax(self.h_hat.binary, axis=1)


def _as_instance(inst, r: int | None) -> ProblemInstance:
    if isinstance(inst, ProblemInstance):
        if r is not None and r != inst.r:
            raise ValueError(f"r={r} conflicts with instance r={inst.r}")
        return inst
    p = np.asarray(inst, dtype=float)
    if p.ndim == 1:
        p = p[:, None]
    return ProblemInstance(p, p.shape[1] if r is None else r)


def objective(p_hat, h) -> float:
    """Projection error ||P - H H^T P||_F^2."""
    p = np.asarray(p_hat, dtype=float)
    if p.ndim == 1:
        p = p[:, None]
    h = np.asarray(h, dtype=float)
    resid = p - h @ (h.T @ p)
    return float(np.sum(resid * resid))


def labels_to_indicator(labels, r: int) -> IndicatorMatrix:
    """Normalized indicator with column k holding label k (all r labels used)."""
    labels = np.asarray(labels, dtype=np.int64)
    counts = np.bincount(labels, minlength=r)
    if counts.size != r or np.any(counts == 0):
        raise ValueError(f"labels must use every value in range({r})")
    return indicator_from_partition(Partition.from_labels(labels))


def row_argmax_postprocess(h) -> IndicatorMatrix:
    """Turn a nonnegative (n, r) matrix into a normalized indicator.

    Every row keeps its argmax column (lowest index on ties).  A column left
    empty receives one row taken from a cell with at least two members: the
    row with the largest ratio of its entry in the empty column to its row
    maximum, or, if all those ratios vanish, the row whose second-largest
    entry is closest to its largest.  Remaining ties go to the lowest row.
    """
    h = np.asarray(h, dtype=float)
    if h.ndim != 2:
        raise ValueError("expected an (n, r) matrix")
    n, r = h.shape
    if np.any(h < 0):
        raise ValueError("row_argmax_postprocess needs a nonnegative matrix")
    if n < r:
        raise ValueError(f"cannot form {r} nonempty cells from {n} rows")
    labels = np.argmax(h, axis=1)
    rowmax = h[np.arange(n), labels]
    safe = np.where(rowmax > 0, rowmax, 1.0)
    if r > 1:
        second = np.sort(h, axis=1)[:, -2] / safe
    else:
        second = np.zeros(n)
    for c in range(r):
        counts = np.bincount(labels, minlength=r)
        if counts[c]:
            continue
        movable = counts[labels] >= 2
        score = np.where(movable, h[:, c] / safe, -1.0)
        if score.max() <= 0:
            score = np.where(movable, second, -1.0)
        i = int(np.argmax(score))
        labels[i] = c
    return labels_to_indicator(labels, r)


def feasibility_violations(hn, tol: float = 1e-12) -> list[str]:
    """Constraint violations of a normalized indicator (empty list if feasible)."""
    hn = np.asarray(hn, dtype=float)
    n, r = hn.shape
    out = []
    if np.any(hn < 0):
        out.append("negative entries")
    per_row = np.count_nonzero(hn, axis=1)
    if np.any(per_row != 1):
        out.append(f"{int(np.sum(per_row != 1))} rows without exactly one nonzero")
    gram = np.max(np.abs(hn.T @ hn - np.eye(r)))
    if gram > tol:
        out.append(f"H^T H deviates from I by {gram:.3g}")
    ones = np.max(np.abs(hn @ (hn.T @ np.ones(n)) - 1.0))
    if ones > tol:
        out.append(f"H H^T 1 deviates from 1 by {ones:.3g}")
    return out


def assert_feasible(result: SolverResult, tol: float = 1e-12) -> SolverResult:
    problems = feasibility_violations(result.h_hat.normalized, tol)
    if problems:
        raise InfeasibleResultError(f"{result.solver_id}: " + "; ".join(problems))
    return result
