"""Graphs, partitions, indicator matrices and external equitable partitions.

Vertices are 0-indexed everywhere in the library; the file formats in
:mod:`blindeep.io` translate to and from 1-indexed vertex labels.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np


class NotEEPError(ValueError):
    """Raised when an operation requires an EEP and the partition is not one."""

    def __init__(self, witness: "EEPWitness"):
        self.witness = witness
        super().__init__(
            f"not an external equitable partition: {witness.describe()}")


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected simple graph stored as a dense 0/1 adjacency matrix."""

    adjacency: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.adjacency)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"adjacency must be square, got shape {a.shape}")
        if not np.all((a == 0) | (a == 1)):
            raise ValueError("adjacency must be binary")
        if np.any(np.diag(a) != 0):
            raise ValueError("adjacency must have a zero diagonal (no loops)")
        if not np.array_equal(a, a.T):
            raise ValueError("adjacency must be symmetric")
        object.__setattr__(self, "adjacency", _frozen(a.astype(np.int64)))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        a = np.zeros((n, n), dtype=np.int64)
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            a[u, v] = a[v, u] = 1
        return cls(a)

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    @property
    def degrees(self) -> np.ndarray:
        return self.adjacency.sum(axis=1)

    @property
    def max_degree(self) -> int:
        return int(self.degrees.max()) if self.n else 0

    @property
    def edges(self) -> list[tuple[int, int]]:
        """Edge list with ``u < v``, sorted lexicographically."""
        iu, iv = np.nonzero(np.triu(self.adjacency, 1))
        return [(int(u), int(v)) for u, v in zip(iu, iv)]


@dataclass(frozen=True)
class Partition:
    """Ordered list of disjoint, nonempty cells covering ``range(n)``."""

    cells: tuple[tuple[int, ...], ...]
    n: int = field(default=-1)

    def __post_init__(self):
        cells = tuple(tuple(sorted(int(v) for v in c)) for c in self.cells)
        n = self.n if self.n >= 0 else sum(len(c) for c in cells)
        seen = np.zeros(n, dtype=bool)
        for k, c in enumerate(cells):
            if not c:
                raise ValueError(f"cell {k} is empty")
            for v in c:
                if not 0 <= v < n:
                    raise ValueError(f"vertex {v} in cell {k} out of range for n={n}")
                if seen[v]:
                    raise ValueError(f"vertex {v} appears in more than one cell")
                seen[v] = True
        if not seen.all():
            missing = np.flatnonzero(~seen)
            raise ValueError(f"partition does not cover vertices {missing.tolist()}")
        object.__setattr__(self, "cells", cells)
        object.__setattr__(self, "n", n)

    @classmethod
    def from_labels(cls, labels: Sequence[int]) -> "Partition":
        """Build cells from a label vector; empty labels are dropped, order kept."""
        labels = np.asarray(labels, dtype=np.int64)
        cells = [np.flatnonzero(labels == k) for k in np.unique(labels)]
        return cls(tuple(tuple(c.tolist()) for c in cells), n=len(labels))

    @property
    def r(self) -> int:
        return len(self.cells)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.cells)

    @property
    def labels(self) -> np.ndarray:
        out = np.empty(self.n, dtype=np.int64)
        for k, c in enumerate(self.cells):
            out[list(c)] = k
        return out

    def canonical(self) -> "Partition":
        """Same partition with cells ordered by their smallest vertex."""
        return Partition(tuple(sorted(self.cells)), n=self.n)

    def same_as(self, other: "Partition") -> bool:
        """Equality up to relabelling of cells."""
        return self.canonical().cells == other.canonical().cells


@dataclass(frozen=True, eq=False)
class IndicatorMatrix:
    binary: np.ndarray
    normalized: np.ndarray

    @property
    def partition(self) -> Partition:
        return partition_from_indicator(self.binary)


@dataclass(frozen=True, eq=False)
class QuotientGraph:
    """Quotient of a graph by an EEP; ``adjacency[i, j]`` is b_ij."""

    adjacency: np.ndarray
    laplacian: np.ndarray

    @property
    def r(self) -> int:
        return self.adjacency.shape[0]


@dataclass(frozen=True, eq=False)
class PlantedInstance:
    graph: Graph
    truth: Partition
    quotient: QuotientGraph


class EEPWitness(NamedTuple):
    """Two vertices of ``cell`` with different neighbour counts in ``target``."""

    cell: int
    target: int
    u: int
    v: int
    count_u: int
    count_v: int

    def describe(self) -> str:
        return (f"vertices {self.u + 1} and {self.v + 1} of cell {self.cell + 1} "
                f"have {self.count_u} and {self.count_v} neighbours in cell "
                f"{self.target + 1}")


def laplacian(g: Graph) -> np.ndarray:
    """Combinatorial Laplacian D - A as an integer matrix."""
    a = g.adjacency
    return np.diag(a.sum(axis=1)) - a


def indicator_from_partition(p: Partition, n: int | None = None) -> IndicatorMatrix:
    if n is not None and n != p.n:
        raise ValueError(f"partition covers {p.n} vertices, expected {n}")
    h = np.zeros((p.n, p.r), dtype=np.int64)
    for k, c in enumerate(p.cells):
        h[list(c), k] = 1
    scale = 1.0 / np.sqrt(np.asarray(p.sizes, dtype=float))
    return IndicatorMatrix(_frozen(h), _frozen(h * scale))


def partition_from_indicator(h: np.ndarray) -> Partition:
    """Read cells off an indicator-like matrix with one nonzero per row.

    Columns with no nonzero entry are dropped from the result.
    """
    h = np.asarray(h)
    if h.ndim != 2:
        raise ValueError("indicator must be a 2-D array")
    nz = h != 0
    per_row = nz.sum(axis=1)
    bad = np.flatnonzero(per_row != 1)
    if bad.size:
        i = int(bad[0])
        raise ValueError(f"row {i} has {per_row[i]} nonzero entries, expected exactly 1")
    return Partition.from_labels(np.argmax(nz, axis=1))


def _neighbour_counts(g: Graph, p: Partition) -> np.ndarray:
    # (n, r) exact integer counts of neighbours of each vertex in each cell
    return g.adjacency @ indicator_from_partition(p).binary


def is_eep(g: Graph, p: Partition) -> tuple[bool, EEPWitness | None]:
    """Check the EEP property by exact neighbour counting.

    Returns ``(True, None)`` or ``(False, witness)`` for the first violating
    (cell, target cell) pair in row-major order.
    """
    if p.n != g.n:
        raise ValueError(f"partition covers {p.n} vertices, graph has {g.n}")
    counts = _neighbour_counts(g, p)
    for i, cell in enumerate(p.cells):
        idx = list(cell)
        for j in range(p.r):
            if j == i:
                continue
            col = counts[idx, j]
            diff = np.flatnonzero(col != col[0])
            if diff.size:
                k = int(diff[0])
                return False, EEPWitness(i, j, idx[0], idx[k], int(col[0]), int(col[k]))
    return True, None


def quotient(g: Graph, p: Partition) -> QuotientGraph:
    ok, witness = is_eep(g, p)
    if not ok:
        raise NotEEPError(witness)
    counts = _neighbour_counts(g, p)
    reps = [c[0] for c in p.cells]
    b = counts[reps, :].copy()
    np.fill_diagonal(b, 0)
    lq = np.diag(b.sum(axis=1)) - b
    return QuotientGraph(_frozen(b), _frozen(lq))


def check_feasible_design(sizes: Sequence[int], b: np.ndarray) -> None:
    """Raise ``ValueError`` if no graph can realise the cross-cell degrees ``b``."""
    sizes = [int(s) for s in sizes]
    r = len(sizes)
    if r == 0 or min(sizes) < 1:
        raise ValueError("cell sizes must be positive")
    b = np.asarray(b)
    if b.shape != (r, r):
        raise ValueError(f"b must be {r}x{r}, got {b.shape}")
    if not np.all(b == np.round(b)) or np.any(b < 0):
        raise ValueError("b must hold nonnegative integers")
    for i in range(r):
        for j in range(r):
            if i == j:
                continue
            if b[i, j] > sizes[j]:
                raise ValueError(
                    f"b[{i},{j}]={b[i, j]} exceeds the size {sizes[j]} of cell {j}")
            if sizes[i] * b[i, j] != sizes[j] * b[j, i]:
                raise ValueError(
                    f"handshake violated between cells {i} and {j}: "
                    f"{sizes[i]}*{b[i, j]} != {sizes[j]}*{b[j, i]}")


def _bipartite_regular(left: np.ndarray, right: np.ndarray, d_left: int,
                       d_right: int, rng: np.random.Generator,
                       max_tries: int) -> np.ndarray:
    """Random bipartite graph with fixed degrees on both sides.

    Configuration-model pairing with rejection of repeated pairs; after
    ``max_tries`` rejections falls back to a shuffled circulant pattern,
    which is always simple.
    """
    stubs_l = np.repeat(left, d_left)
    if stubs_l.size == 0:
        return np.empty((0, 2), dtype=np.int64)
    stubs_r = np.repeat(right, d_right)
    for _ in range(max_tries):
        pairs = np.column_stack([stubs_l, rng.permutation(stubs_r)])
        if np.unique(pairs, axis=0).shape[0] == pairs.shape[0]:
            return pairs
    # stub t of the (sorted) left side goes to right vertex t mod |right|;
    # a left vertex owns d_left <= |right| consecutive stubs, so no repeats
    pl = rng.permutation(left)
    pr = rng.permutation(right)
    t = np.arange(stubs_l.size)
    return np.column_stack([pl[t // d_left], pr[t % right.size]])


def generate_planted_eep(sizes: Sequence[int], b, p_intra=0.5, seed=None,
                         max_tries: int = 200) -> PlantedInstance:
    """Sample a graph with a planted EEP.

    Cells are contiguous vertex blocks in the order of ``sizes``.  Every
    vertex of cell i gets exactly ``b[i][j]`` neighbours in cell j; edges
    inside a cell are independent Bernoulli(``p_intra``) draws.

    Parameters
    ----------
    sizes : sequence of int
        Cell sizes.
    b : (r, r) array_like of int
        Cross-cell degrees; the diagonal is ignored.  Must satisfy
        ``sizes[i] * b[i][j] == sizes[j] * b[j][i]``.
    p_intra : float or sequence of float
        Intra-cell edge probability, scalar or one value per cell.
    seed : int, SeedSequence or Generator, optional
    """
    sizes = [int(s) for s in sizes]
    r = len(sizes)
    b = np.array(b, dtype=np.int64).reshape(r, r) if r else np.zeros((0, 0))
    b = b.copy()
    np.fill_diagonal(b, 0)
    check_feasible_design(sizes, b)
    p_intra = np.broadcast_to(np.asarray(p_intra, dtype=float), (r,))
    if np.any((p_intra < 0) | (p_intra > 1)):
        raise ValueError("p_intra must lie in [0, 1]")
    rng = np.random.default_rng(seed)

    n = sum(sizes)
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    cells = [np.arange(offsets[k], offsets[k + 1]) for k in range(r)]
    a = np.zeros((n, n), dtype=np.int64)
    for i in range(r):
        for j in range(i + 1, r):
            if b[i, j] == 0:
                continue
            pairs = _bipartite_regular(cells[i], cells[j], int(b[i, j]),
                                       int(b[j, i]), rng, max_tries)
            a[pairs[:, 0], pairs[:, 1]] = 1
    for k, c in enumerate(cells):
        s = c.size
        if s < 2 or p_intra[k] == 0:
            continue
        iu, iv = np.triu_indices(s, 1)
        keep = rng.random(iu.size) < p_intra[k]
        a[c[iu[keep]], c[iv[keep]]] = 1
    a = np.maximum(a, a.T)

    g = Graph(a)
    truth = Partition(tuple(tuple(c.tolist()) for c in cells), n=n)
    return PlantedInstance(g, truth, quotient(g, truth))


def chain_design(sizes: Sequence[int], cross: int | Sequence[int]) -> np.ndarray:
    """Cross-degree matrix linking consecutive cells only.

    ``cross[k]`` is the number of edges each vertex of the larger of cells k
    and k+1 sends to the other; the reverse degree follows from the
    handshake rule and must be an integer.
    """
    r = len(sizes)
    cross = np.broadcast_to(np.asarray(cross, dtype=np.int64), (max(r - 1, 0),))
    b = np.zeros((r, r), dtype=np.int64)
    for k in range(r - 1):
        s, t = sizes[k], sizes[k + 1]
        total = int(cross[k]) * max(s, t)
        if total % s or total % t:
            raise ValueError(f"cells {k} and {k + 1}: degree {cross[k]} not realisable")
        b[k, k + 1] = total // s
        b[k + 1, k] = total // t
    return b
