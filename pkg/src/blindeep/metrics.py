"""Partition quality metrics and covariance-deviation diagnostics."""

from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .filters import FilterMatrix, exact_covariance
from .graph_core import Partition
from .signals import sample_covariance, sample_observations
from .spectral import eig_sym, structural_residual


def cost_fc(found: Partition, true_vecs) -> float:
    """Within-cell scatter of the true structural eigenvectors under ``found``."""
    return structural_residual(true_vecs, found)


def _sizes(found) -> list[int]:
    if isinstance(found, Partition):
        return list(found.sizes)
    return [int(s) for s in found]


def group_accuracy(found, true_sizes: Sequence[int]) -> float:
    """(n - C_w) / n with C_w the total size mismatch between matched cells.

    Cells are matched by sorting both size lists in descending order;
    missing cells count as size zero.  ``found`` is a :class:`Partition` or
    a list of cell sizes.  The value is not clamped and can be negative.
    """
    a = sorted(_sizes(found), reverse=True)
    b = sorted((int(s) for s in true_sizes), reverse=True)
    width = max(len(a), len(b))
    a += [0] * (width - len(a))
    b += [0] * (width - len(b))
    n = sum(b)
    c_w = sum(abs(x - y) for x, y in zip(a, b))
    return (n - c_w) / n


def confusion(found: Partition, truth: Partition) -> np.ndarray:
    """Counts ``c[k, l] = |found_k & truth_l|``."""
    if found.n != truth.n:
        raise ValueError("partitions cover different vertex sets")
    c = np.zeros((found.r, truth.r), dtype=np.int64)
    np.add.at(c, (found.labels, truth.labels), 1)
    return c


@dataclass(frozen=True)
class Matching:
    accuracy: float
    permutation: tuple[int, ...]  # permutation[k]: truth cell matched to found cell k (-1: none)
    correct: int


def matched_accuracy(found: Partition, truth: Partition) -> Matching:
    """Fraction of vertices classified correctly under the best cell matching.

    Exhaustive over permutations when both partitions have at most 5 cells,
    Hungarian assignment otherwise.
    """
    c = confusion(found, truth)
    width = max(c.shape)
    sq = np.zeros((width, width), dtype=np.int64)
    sq[: c.shape[0], : c.shape[1]] = c
    if width <= 5:
        best, best_perm = -1, None
        for perm in itertools.permutations(range(width)):
            s = int(sq[np.arange(width), perm].sum())
            if s > best:
                best, best_perm = s, perm
        perm = np.asarray(best_perm)
    else:
        rows, perm = linear_sum_assignment(-sq)
        best = int(sq[rows, perm].sum())
    mapping = tuple(int(perm[k]) if perm[k] < truth.r else -1 for k in range(found.r))
    return Matching(best / truth.n, mapping, best)


def per_cell_counts(found: Partition, truth: Partition,
                    matching: Matching | None = None) -> list[tuple[int, int]]:
    """(correct, incorrect) vertex counts for each found cell."""
    if matching is None:
        matching = matched_accuracy(found, truth)
    c = confusion(found, truth)
    out = []
    for k, size in enumerate(found.sizes):
        l = matching.permutation[k]
        good = int(c[k, l]) if l >= 0 else 0
        out.append((good, size - good))
    return out


@dataclass
class EvalReport:
    cost_fc: float
    group_accuracy: float
    matched_accuracy: float
    permutation: tuple[int, ...]
    per_cell_counts: list[tuple[int, int]] = field(default_factory=list)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["permutation"] = list(self.permutation)
        d["per_cell_counts"] = [list(x) for x in self.per_cell_counts]
        return d


def evaluate(found: Partition, truth: Partition, true_vecs) -> EvalReport:
    match = matched_accuracy(found, truth)
    return EvalReport(
        cost_fc=cost_fc(found, true_vecs),
        group_accuracy=group_accuracy(found, truth.sizes),
        matched_accuracy=match.accuracy,
        permutation=match.permutation,
        per_cell_counts=per_cell_counts(found, truth, match),
    )


def spectral_norm_sym(a) -> float:
    """Largest absolute eigenvalue of a symmetric matrix."""
    w = eig_sym(a).values
    return float(max(abs(w[0]), abs(w[-1])))


def effective_rank(cov) -> float:
    cov = np.asarray(cov, dtype=float)
    return float(np.trace(cov)) / spectral_norm_sym(cov)


@dataclass(frozen=True)
class DeviationDiagnostics:
    m: int
    seed: int
    spectral_deviation: float
    effective_rank: float
    gap_margin: float  # xi_r(Sigma) - xi_{r+1}(Sigma_hat); nan without r


@dataclass
class DeviationScan:
    rows: list[DeviationDiagnostics]

    def medians(self) -> dict[int, float]:
        ms = sorted({d.m for d in self.rows})
        return {m: float(np.median([d.spectral_deviation for d in self.rows if d.m == m]))
                for m in ms}

    def ratios(self) -> list[float]:
        """Consecutive median ratios dev(m_k) / dev(m_{k+1})."""
        med = list(self.medians().values())
        return [a / b for a, b in zip(med, med[1:])]


def deviation_scan(fm: FilterMatrix, noise_var: float, m_list: Iterable[int],
                   seeds: Iterable[int], r: int | None = None) -> DeviationScan:
    """||Sigma_hat - Sigma||_2 for every (m, seed), with effective rank and gap margin."""
    m_list = [int(m) for m in m_list]
    if not m_list:
        raise ValueError("m_list must be nonempty")
    seeds = [int(s) for s in seeds]
    cov = exact_covariance(fm, noise_var)
    cov_dec = eig_sym(cov)
    b = float(np.trace(cov)) / float(np.max(np.abs(cov_dec.values)))
    xi_r = float(cov_dec.values[::-1][r - 1]) if r else float("nan")
    rows = []
    for m in m_list:
        for s in seeds:
            est = sample_covariance(sample_observations(fm, m, noise_var, seed=[s, m])).matrix
            dev = spectral_norm_sym(est - cov)
            gap = float("nan")
            if r:
                gap = xi_r - float(eig_sym(est).values[::-1][r])
            rows.append(DeviationDiagnostics(m, s, dev, b, gap))
    return DeviationScan(rows)
