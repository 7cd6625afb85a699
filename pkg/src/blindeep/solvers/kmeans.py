"""Lloyd's algorithm with k-means++ seeding on the rows of P-hat."""

from __future__ import annotations

import itertools
import math

import numpy as np

from .base import SolverResult, _as_instance, assert_feasible, labels_to_indicator, objective


def kmeans_plusplus(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """Indices of k seed rows drawn by D^2 weighting."""
    n = x.shape[0]
    idx = [int(rng.integers(n))]
    d2 = np.sum((x - x[idx[0]]) ** 2, axis=1)
    for _ in range(1, k):
        total = d2.sum()
        i = int(rng.choice(n, p=d2 / total)) if total > 0 else int(rng.integers(n))
        idx.append(i)
        d2 = np.minimum(d2, np.sum((x - x[i]) ** 2, axis=1))
    return np.array(idx)


def _seedings(x, k, rng, restarts, redraws=25):
    """Seed index sets for the restarts.

    When there are no more k-subsets than restarts, every subset is used
    once; otherwise k-means++ draws, redrawing sets already tried.
    """
    n = x.shape[0]
    if math.comb(n, k) <= restarts:
        yield from (np.array(c) for c in itertools.combinations(range(n), k))
        return
    seen = set()
    for _ in range(restarts):
        for _ in range(redraws):
            idx = kmeans_plusplus(x, k, rng)
            key = frozenset(idx.tolist())
            if key not in seen:
                break
        seen.add(key)
        yield idx


def _sq_dists(x, centers):
    return (np.sum(x * x, axis=1)[:, None] - 2.0 * x @ centers.T
            + np.sum(centers * centers, axis=1)[None, :]).clip(min=0.0)


def _repair_empty(x, labels, centers, k):
    # move the point farthest from its own centre into each empty cluster
    repaired = 0
    for c in range(k):
        counts = np.bincount(labels, minlength=k)
        if counts[c]:
            continue
        d = np.sum((x - centers[labels]) ** 2, axis=1)
        d[counts[labels] < 2] = -1.0
        i = int(np.argmax(d))
        labels[i] = c
        centers[c] = x[i]
        repaired += 1
    return repaired


def hartigan_refine(x: np.ndarray, labels: np.ndarray, k: int, max_sweeps: int = 100):
    """Single-point transfers that strictly lower the within-cluster scatter.

    Moving x from cluster a (size n_a) to b changes the scatter by
    n_b/(n_b+1) |x - c_b|^2 - n_a/(n_a-1) |x - c_a|^2.  Every Hartigan
    optimum is also a Lloyd fixed point, but not conversely.
    Returns the number of moves made.
    """
    counts = np.bincount(labels, minlength=k).astype(float)
    centers = np.array([x[labels == c].mean(axis=0) for c in range(k)])
    moves = 0
    for _ in range(max_sweeps):
        moved = False
        for i in range(x.shape[0]):
            a = labels[i]
            if counts[a] < 2:
                continue
            d = np.sum((centers - x[i]) ** 2, axis=1)
            gain = counts / (counts + 1.0) * d
            gain[a] = np.inf
            b = int(np.argmin(gain))
            loss = counts[a] / (counts[a] - 1.0) * d[a]
            if gain[b] < loss * (1.0 - 1e-12) - 1e-300:
                centers[a] = (centers[a] * counts[a] - x[i]) / (counts[a] - 1.0)
                centers[b] = (centers[b] * counts[b] + x[i]) / (counts[b] + 1.0)
                counts[a] -= 1.0
                counts[b] += 1.0
                labels[i] = b
                moved = True
                moves += 1
        if not moved:
            break
    return moves


def lloyd(x: np.ndarray, k: int, seeds: np.ndarray, max_iter: int = 300):
    """One k-means run from the seed rows ``seeds``.

    Returns (labels, inertia, iterations, converged, repairs).
    """
    centers = x[seeds].astype(float)
    labels = np.full(x.shape[0], -1)
    repairs = 0
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        new = np.argmin(_sq_dists(x, centers), axis=1)
        repairs += _repair_empty(x, new, centers, k)
        if np.array_equal(new, labels):
            converged = True
            break
        labels = new
        for c in range(k):
            centers[c] = x[labels == c].mean(axis=0)
    inertia = float(np.sum((x - centers[labels]) ** 2))
    return labels, inertia, it, converged, repairs


def _inertia(x, labels, k):
    return float(sum(np.sum((x[labels == c] - x[labels == c].mean(axis=0)) ** 2)
                     for c in range(k) if np.any(labels == c)))


def solve_kmeans(inst, r: int | None = None, restarts: int = 10,
                 max_iter: int = 300, seed=None, refine: bool = True) -> SolverResult:
    """Best-of-``restarts`` k-means clustering of the rows of P-hat.

    Each restart runs Lloyd's iteration from k-means++ seeds and, with
    ``refine``, polishes the result by Hartigan single-point transfers.

    The reported objective is ||P - H H^T P||_F^2 for the normalized
    indicator of the winning clustering, which equals its k-means inertia.
    """
    inst = _as_instance(inst, r)
    x, k = inst.p_hat, inst.r
    rng = np.random.default_rng(seed)
    best = None
    inertias = []
    unconverged = 0
    total_iter = 0
    repairs = 0
    for seeds in _seedings(x, k, rng, max(1, restarts)):
        labels, inertia, it, ok, rep = lloyd(x, k, seeds, max_iter)
        if refine and hartigan_refine(x, labels, k):
            inertia = _inertia(x, labels, k)
        inertias.append(inertia)
        total_iter += it
        repairs += rep
        unconverged += not ok
        if best is None or inertia < best[1]:
            best = (labels.copy(), inertia)
    h = labels_to_indicator(best[0], k)
    result = SolverResult(
        h_hat=h,
        objective=objective(x, h.normalized),
        iterations=total_iter,
        solver_id="kmeans",
        converged=unconverged == 0,
        diagnostics={"inertias": inertias, "unconverged_restarts": unconverged,
                     "empty_cluster_repairs": repairs},
    )
    return assert_feasible(result)
