from __future__ import annotations

import math
from pathlib import Path

import numpy as np
import pytest

from blindeep import (Graph, Partition, chain_design, generate_planted_eep, laplacian,
                      structural_eigenpairs)
from blindeep import pipeline
from blindeep.solvers import feasibility_violations
from blindeep.solvers import psnmf as psnmf_mod

DATA = Path(__file__).parent / "data"

# Laplacian of the 11-node worked example, typed in row by row
ELEVEN_LAPLACIAN = np.array([
    [3, 0, -1, -1, -1, 0, 0, 0, 0, 0, 0],
    [0, 3, -1, -1, -1, 0, 0, 0, 0, 0, 0],
    [-1, -1, 4, 0, 0, -1, -1, 0, 0, 0, 0],
    [-1, -1, 0, 5, -1, 0, 0, -1, -1, 0, 0],
    [-1, -1, 0, -1, 5, 0, 0, 0, 0, -1, -1],
    [0, 0, -1, 0, 0, 2, -1, 0, 0, 0, 0],
    [0, 0, -1, 0, 0, -1, 2, 0, 0, 0, 0],
    [0, 0, 0, -1, 0, 0, 0, 1, 0, 0, 0],
    [0, 0, 0, -1, 0, 0, 0, 0, 1, 0, 0],
    [0, 0, 0, 0, -1, 0, 0, 0, 0, 1, 0],
    [0, 0, 0, 0, -1, 0, 0, 0, 0, 0, 1],
])
ELEVEN_INDICATOR = np.array([[1, 0, 0]] * 2 + [[0, 1, 0]] * 3 + [[0, 0, 1]] * 6)
ELEVEN_QUOTIENT = np.array([[3, -3, 0], [-2, 4, -2], [0, -1, 1]])


@pytest.fixture
def eleven():
    """(graph, partition) of the 11-node worked example, 0-indexed."""
    a = np.diag(np.diag(ELEVEN_LAPLACIAN)) - ELEVEN_LAPLACIAN
    g = Graph(a)
    p = Partition(((0, 1), (2, 3, 4), tuple(range(5, 11))))
    return g, p


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_design(rng, max_n: int = 60):
    """Random feasible (sizes, b) with n <= max_n, including unequal cells."""
    while True:
        r = int(rng.integers(2, 5))
        sizes = [int(s) for s in rng.choice([2, 3, 4, 6, 8, 12], size=r)]
        if sum(sizes) > max_n:
            continue
        b = np.zeros((r, r), dtype=np.int64)
        for i in range(r):
            for j in range(i + 1, r):
                if rng.random() < 0.6:
                    # smallest balanced pair, times a random multiple that fits
                    g = math.gcd(sizes[i], sizes[j])
                    bij, bji = sizes[j] // g, sizes[i] // g
                    mult = int(rng.integers(1, max(2, g // 2 + 1)))
                    if mult * bij <= sizes[j] and mult * bji <= sizes[i]:
                        b[i, j], b[j, i] = mult * bij, mult * bji
        return sizes, b


def low_pass_design(rng):
    """Planted design whose structural band sits at the bottom of the spectrum.

    Cells of 12-20 vertices with dense interiors and at most two cross
    neighbours per vertex; ``structural_band_is_lowest`` still has to be
    checked on the sampled graph.
    """
    s = int(rng.integers(12, 21))
    p_intra = float(rng.uniform(0.8, 0.95))
    if rng.random() < 0.3:
        return [s, 2 * s], np.array([[0, 2], [1, 0]]), p_intra
    r = int(rng.integers(2, 4))
    return [s] * r, chain_design([s] * r, int(rng.integers(1, 3))), p_intra


def structural_band_is_lowest(inst, gap: float = 1e-6) -> bool:
    """True when the cell-constant eigenvalues are the r smallest, with a gap above."""
    lam = np.linalg.eigvalsh(laplacian(inst.graph).astype(float))
    struct = np.sort(structural_eigenpairs(inst.graph, inst.truth)[0])
    r = struct.size
    return bool(np.allclose(struct, lam[:r], atol=1e-9) and lam[r] - lam[r - 1] > gap)


def planted(rng, design=random_design):
    out = design(rng)
    sizes, b = out[0], out[1]
    p_intra = out[2] if len(out) > 2 else float(rng.uniform(0.1, 0.9))
    return generate_planted_eep(sizes, b, p_intra, seed=int(rng.integers(2**31)))


class SolverHooks:
    """Records every solver result produced by the pipeline and every PSNMF iterate minimum."""

    def __init__(self, monkeypatch):
        self.results = 0
        self.violations: list[str] = []
        self.psnmf_steps = 0
        self.min_iterate = float("inf")
        solve, step = pipeline.solve, psnmf_mod.psnmf_step

        def checked_solve(inst, config):
            res = solve(inst, config)
            self.results += 1
            self.violations += [f"{res.solver_id}: {v}"
                                for v in feasibility_violations(res.h_hat.normalized)]
            return res

        def checked_step(h, ks, p=None):
            out = step(h, ks, p)
            self.psnmf_steps += 1
            self.min_iterate = min(self.min_iterate, float(out.min()))
            return out

        monkeypatch.setattr(pipeline, "solve", checked_solve)
        monkeypatch.setattr(psnmf_mod, "psnmf_step", checked_step)

    @property
    def ok(self) -> bool:
        return self.results > 0 and not self.violations and self.min_iterate >= 0


@pytest.fixture
def solver_hooks(monkeypatch):
    return SolverHooks(monkeypatch)


# acceptance report: one line per criterion, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
