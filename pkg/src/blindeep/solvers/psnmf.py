"""Projective semi-NMF via the multiplicative Lagrangian update."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .base import SolverResult, _as_instance, assert_feasible, objective, row_argmax_postprocess

DENOM_FLOOR = 1e-15
_TINY = np.finfo(float).tiny


@dataclass(frozen=True, eq=False)
class KernelSplit:
    k_plus: np.ndarray
    k_minus: np.ndarray


def kernel_split(p_hat) -> KernelSplit:
    """Positive and negative parts of the linear kernel K = P P^T."""
    p = np.asarray(p_hat, dtype=float)
    if p.ndim == 1:
        p = p[:, None]
    k = p @ p.T
    a = np.abs(k)
    return KernelSplit((a + k) / 2.0, (a - k) / 2.0)


def psnmf_step(h: np.ndarray, ks: KernelSplit, p: np.ndarray | None = None) -> np.ndarray:
    """One multiplicative update of H (entrywise, keeps H >= 0).

    When the factor ``p`` of K = P P^T is given, K^- H is formed as
    K^+ H - P (P^T H), saving one n x n product.
    """
    kph = ks.k_plus @ h
    kmh = ks.k_minus @ h if p is None else np.maximum(kph - p @ (p.T @ h), 0.0)
    num = kph + h @ (h.T @ kmh)
    den = kmh + h @ (h.T @ kph)
    out = h * num / np.maximum(den, DENOM_FLOOR)
    # flush subnormals: they cannot grow back and make every later step slow
    out[out < _TINY] = 0.0
    return out


def solve_psnmf(inst, r: int | None = None, max_iter: int = 5000,
                tol: float = 1e-8, seed=None, restarts: int = 3) -> SolverResult:
    """Iterate the projective semi-NMF update, then round by row argmax.

    Starts from Uniform(0, 1) entries with unit-norm columns.  Stops when
    the relative Frobenius change falls to ``tol``, when the iterates settle
    into a period-2 cycle (change over two steps below ``tol``), after
    ``max_iter`` updates, or as soon as an update zeroes a whole row; in
    that last case the previous iterate is kept, since zero entries can
    never recover.  The update is not scale-stable and some starts end in
    a poor cycle, hence several ``restarts``; the run with the lowest
    rounded objective wins.
    """
    inst = _as_instance(inst, r)
    p, k = inst.p_hat, inst.r
    ks = kernel_split(p)
    rng = np.random.default_rng(seed)
    best = None
    for attempt in range(max(1, restarts)):
        h = rng.uniform(0.0, 1.0, size=(inst.n, k))
        h /= np.linalg.norm(h, axis=0)
        min_entry = float(h.min())
        trace = []
        converged = False
        zero_row_stop = False
        cycle = False
        prev = None
        it = 0
        for it in range(1, max_iter + 1):
            new = psnmf_step(h, ks, p)
            min_entry = min(min_entry, float(new.min()))
            if not np.all(np.any(new > 0, axis=1)):
                zero_row_stop = True
                it -= 1
                break
            scale = max(np.linalg.norm(h), DENOM_FLOOR)
            change = np.linalg.norm(new - h) / scale
            if prev is not None and change > tol:
                cycle = np.linalg.norm(new - prev) / scale <= tol
            prev, h = h, new
            if it % 50 == 0 or change <= tol or cycle:
                trace.append((it, float(change)))
            if change <= tol:
                converged = True
                break
            if cycle:
                break
        if min_entry < 0:
            raise AssertionError(f"PSNMF iterate went negative ({min_entry:.3g})")
        ind = row_argmax_postprocess(h)
        obj = objective(p, ind.normalized)
        diag = {
            "trace": trace,
            "min_iterate_entry": min_entry,
            "zero_row_stop": zero_row_stop,
            "cycle": cycle,
            "orthogonality_error": float(np.linalg.norm(h.T @ h - np.eye(k))),
            "restart": attempt,
        }
        cand = SolverResult(ind, obj, it, "psnmf", converged or zero_row_stop or cycle, diag)
        if best is None or obj < best.objective:
            best = cand
    return assert_feasible(best)
