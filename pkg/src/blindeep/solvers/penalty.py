"""Simplified exact-penalty solver for orthonormal projective NMF.

After shifting P-hat to a nonnegative P-bar, minimizes

    ||P_bar - H H^T P_bar||_F^2 + rho * ||min(H, 0)||_F^2

over matrices with orthonormal columns by Riemannian gradient steps with a
QR retraction, for an increasing sequence of penalty weights rho, and
rounds the result by row argmax.  This is a compact stand-in for a full
exact-penalty method; outputs are labelled "exact-penalty (simplified)".
"""

from __future__ import annotations

import numpy as np

from .base import SolverResult, _as_instance, assert_feasible, objective, row_argmax_postprocess

LABEL = "exact-penalty (simplified)"
DEFAULT_RHO = (1.0, 10.0, 100.0, 1000.0, 1e4)


def shift_nonnegative(p_hat) -> tuple[np.ndarray, float]:
    """P - a * 1 with a the smallest entry of P; returns (P_bar, a)."""
    p = np.asarray(p_hat, dtype=float)
    a = float(p.min())
    return p - a, a


def _qf(x: np.ndarray) -> np.ndarray:
    q, rr = np.linalg.qr(x)
    d = np.sign(np.diag(rr))
    d[d == 0] = 1.0
    return q * d


def _polar(x: np.ndarray) -> np.ndarray:
    u, _, vt = np.linalg.svd(x, full_matrices=False)
    return u @ vt


def penalized_value(pbar, h, rho):
    neg = np.minimum(h, 0.0)
    return objective(pbar, h) + rho * float(np.sum(neg * neg))


def _riemannian_grad(pbar, h, rho):
    g = -2.0 * pbar @ (pbar.T @ h) + 2.0 * rho * np.minimum(h, 0.0)
    s = h.T @ g
    return g - h @ (0.5 * (s + s.T))


def _descend(pbar, h, rho, max_inner, tol, step):
    """Fixed-step Riemannian descent; halves the step after 5 non-improving steps."""
    f = penalized_value(pbar, h, rho)
    best_h, best_f = h, f
    bad = 0
    stalled = False
    it = 0
    for it in range(1, max_inner + 1):
        xi = _riemannian_grad(pbar, h, rho)
        if np.linalg.norm(xi) <= tol:
            break
        h = _qf(h - step * xi)
        f = penalized_value(pbar, h, rho)
        if f < best_f - 1e-15 * max(1.0, abs(best_f)):
            best_h, best_f, bad = h, f, 0
        else:
            bad += 1
            if bad >= 5:
                step *= 0.5
                h, bad = best_h, 0
                if step < 1e-12:
                    stalled = True
                    break
    return best_h, best_f, it, step, stalled


def solve_exact_penalty(inst, r: int | None = None, rho_schedule=DEFAULT_RHO,
                        max_outer: int | None = None, max_inner: int = 500,
                        tol: float = 1e-8, seed=None, restarts: int = 1) -> SolverResult:
    """Penalty continuation on the Stiefel manifold, then row-argmax rounding.

    The first start is the polar factor of P-bar (a basis of its column
    space); further ``restarts`` rotate it by random orthogonal matrices
    drawn from ``seed``.  The restart with the lowest rounded objective is
    returned.
    """
    inst = _as_instance(inst, r)
    p, k = inst.p_hat, inst.r
    pbar, shift = shift_nonnegative(p)
    rng = np.random.default_rng(seed)
    cols = pbar.shape[1]
    if cols == k:
        h0 = _polar(pbar)
    elif cols > k:
        h0 = np.linalg.svd(pbar, full_matrices=False)[0][:, :k]
    else:
        h0 = _qf(np.hstack([pbar, rng.standard_normal((inst.n, k - cols))]))
    rhos = list(rho_schedule)[: max_outer or None]
    lip = 2.0 * float(np.linalg.norm(pbar, 2)) ** 2
    best = None
    for attempt in range(max(1, restarts)):
        h = h0 if attempt == 0 else h0 @ _qf(rng.standard_normal((k, k)))
        total = 0
        stalled = False
        trace = []
        for rho in rhos:
            step = 1.0 / (lip + 2.0 * rho)
            h, f, it, step, st = _descend(pbar, h, rho, max_inner, tol, step)
            total += it
            stalled |= st
            pen = float(np.sum(np.minimum(h, 0.0) ** 2))
            trace.append({"rho": rho, "value": f, "penalty": pen, "inner": it})
            if pen <= tol * tol:
                break
        ind = row_argmax_postprocess(np.maximum(h, 0.0))
        obj = objective(p, ind.normalized)
        diag = {"shift": shift, "trace": trace, "stalled": stalled,
                "final_penalty": trace[-1]["penalty"], "label": LABEL,
                "restart": attempt}
        cand = SolverResult(ind, obj, total, "penalty", not stalled, diag)
        if best is None or obj < best.objective:
            best = cand
    return assert_feasible(best)
