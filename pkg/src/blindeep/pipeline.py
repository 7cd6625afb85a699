"""Blind EEP extraction and the synthetic benchmark harness."""

from __future__ import annotations

import csv
import io
import logging
import math
import warnings
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .filters import (build_filter_matrix, filter_from_spec, filter_spec_label,
                      low_pass_ratio)
from .graph_core import (Graph, Partition, PlantedInstance, chain_design,
                         check_feasible_design, generate_planted_eep, is_eep, laplacian,
                         quotient)
from .metrics import EvalReport, evaluate
from .signals import SignalBatch, sample_covariance, sample_observations
from .solvers import SOLVER_NAMES, ProblemInstance, SolverResult, solve
from .spectral import TopREigenspace, eig_sym, structural_eigenpairs, top_r

log = logging.getLogger(__name__)


class DegenerateGapWarning(RuntimeWarning):
    pass


@dataclass(eq=False)
class Extraction:
    partition: Partition
    solver: SolverResult
    eigenspace: TopREigenspace
    report: EvalReport | None = None
    warnings: list[str] = field(default_factory=list)

    @property
    def h_hat(self):
        return self.solver.h_hat


def extract_from_covariance(cov, r: int, solver_config: dict | str = "kmeans",
                            truth: PlantedInstance | None = None,
                            true_vecs=None) -> Extraction:
    """Steps 2-4 of the pipeline: top-r eigenvectors, solve, read off cells."""
    dec = eig_sym(cov)
    space = top_r(dec, r)
    notes = []
    if space.tie:
        msg = (f"eigenvalues {r} and {r + 1} of the covariance coincide "
               f"({space.values[-1]:.6g}); the top-{r} space is not unique")
        warnings.warn(msg, DegenerateGapWarning, stacklevel=2)
        notes.append(msg)
    res = solve(ProblemInstance(space.vectors, r), solver_config)
    found = res.partition
    report = None
    if truth is not None:
        if true_vecs is None:
            true_vecs = structural_eigenpairs(truth.graph, truth.truth)[1]
        report = evaluate(found, truth.truth, true_vecs)
    return Extraction(found, res, space, report, notes)


def be_eeps(signals: SignalBatch, r: int, solver_config: dict | str = "kmeans",
            truth: PlantedInstance | None = None, true_vecs=None) -> Extraction:
    """Blind EEP extraction from observed graph signals.

    Sample covariance, its top-``r`` eigenvectors, a solve of the
    nonnegative-orthogonal indicator model with the configured solver, and
    the partition read off the indicator.  With ``truth`` the result carries
    an :class:`EvalReport`.
    """
    if not 1 <= r < signals.n:
        raise ValueError(f"need 1 <= r < n, got r={r}, n={signals.n}")
    cov = sample_covariance(signals).matrix
    return extract_from_covariance(cov, r, solver_config, truth, true_vecs)


# verification ---------------------------------------------------------------

@dataclass
class VerifyReport:
    is_eep: bool
    quotient_laplacian: list[list[int]] | None
    witness: dict | None

    def text(self) -> str:
        if self.is_eep:
            rows = "\n".join("  " + " ".join(f"{x:3d}" for x in row)
                             for row in self.quotient_laplacian)
            return "EEP: yes\nquotient Laplacian:\n" + rows
        w = self.witness
        return ("EEP: no\n"
                f"witness: vertices {w['u']} and {w['v']} of cell {w['cell']} have "
                f"{w['count_u']} and {w['count_v']} neighbours in cell {w['target']}")


def verify(g: Graph, p: Partition) -> VerifyReport:
    ok, witness = is_eep(g, p)
    if ok:
        return VerifyReport(True, quotient(g, p).laplacian.tolist(), None)
    w = witness._asdict()
    for key in ("cell", "target", "u", "v"):
        w[key] += 1  # report 1-indexed
    return VerifyReport(False, None, w)


# benchmark -----------------------------------------------------------------

STRONG = {"kind": "heat", "sigma": 10.0, "per_max_degree": True}
WEAK = {"kind": "iir", "alpha": 0.5, "per_max_degree": True}


@dataclass
class ExperimentConfig:
    """Benchmark protocol.

    ``cross`` gives the chain cross-degrees used when ``b`` is omitted; filter
    specs may be degree-relative (see :func:`blindeep.filters.filter_from_spec`).
    """

    sizes: tuple[int, ...] = (126, 126, 126)
    b: list[list[int]] | None = None
    cross: int | list[int] = 5
    p_intra: float | list[float] = 0.5
    filters: list[dict] = field(default_factory=lambda: [dict(STRONG)])
    noise_var: float = 0.01
    r: int | None = None
    m_list: tuple[int, ...] = (100, 300, 1000)
    trials: int = 50
    solvers: list = field(default_factory=lambda: list(SOLVER_NAMES))
    seed: int = 0
    fixed_instance: bool = False

    def __post_init__(self):
        self.sizes = tuple(int(s) for s in self.sizes)
        self.m_list = tuple(int(m) for m in self.m_list)
        if self.r is None:
            self.r = len(self.sizes)
        self.solvers = [s if isinstance(s, dict) else {"solver": s} for s in self.solvers]
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.r < 2:
            raise ValueError("r must be >= 2")
        if not self.m_list or min(self.m_list) < 1:
            raise ValueError("m_list must hold positive sample counts")
        for s in self.solvers:
            if s.get("solver") not in SOLVER_NAMES:
                raise ValueError(f"unknown solver {s.get('solver')!r}")
        if not self.filters:
            raise ValueError("at least one filter is required")
        self.design()  # validates sizes / b

    def design(self) -> np.ndarray:
        b = np.asarray(self.b, dtype=np.int64) if self.b is not None else \
            chain_design(self.sizes, self.cross)
        check_feasible_design(self.sizes, b)
        return b

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        if "filter" in d and "filters" not in d:
            d["filters"] = [d.pop("filter")]
        known = cls.__dataclass_fields__
        unknown = set(d) - set(known)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["sizes"] = list(self.sizes)
        d["m_list"] = list(self.m_list)
        return d


def benchmark_config(kind: str = "strong", **overrides) -> ExperimentConfig:
    """Three equal cells of 126 vertices with a strong (heat) or weak (IIR) filter."""
    filt = {"strong": STRONG, "weak": WEAK}[kind]
    return ExperimentConfig(filters=[dict(filt)], **overrides)


TRIAL_COLUMNS = ["solver", "filter", "m", "seed", "F_c", "gamma", "matched_acc",
                 "iters", "objective"]


def _trial_seed(seed: int, t: int) -> int:
    return int(np.random.SeedSequence([seed, t]).generate_state(1)[0])


def run_trial(cfg: ExperimentConfig, t: int) -> list[dict]:
    """All (filter, m, solver) rows of trial ``t``."""
    tseed = _trial_seed(cfg.seed, t)
    inst_seed = [cfg.seed] if cfg.fixed_instance else [tseed, 0]
    inst = generate_planted_eep(cfg.sizes, cfg.design(), cfg.p_intra, seed=inst_seed)
    dec = eig_sym(laplacian(inst.graph))
    true_vecs = structural_eigenpairs(inst.graph, inst.truth)[1]
    rows = []
    for fi, spec in enumerate(cfg.filters):
        fm = build_filter_matrix(filter_from_spec(spec, inst.graph), inst.graph, dec)
        for m in cfg.m_list:
            batch = sample_observations(fm, m, cfg.noise_var, seed=[tseed, 1, fi, m])
            cov = sample_covariance(batch).matrix
            for si, scfg in enumerate(cfg.solvers):
                scfg = dict(scfg)
                scfg.setdefault("seed", [tseed, 2, fi, m, si])
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore", DegenerateGapWarning)
                    ex = extract_from_covariance(cov, cfg.r, scfg, inst, true_vecs)
                rep = ex.report
                rows.append({
                    "trial": t,
                    "solver": scfg["solver"],
                    "filter": filter_spec_label(spec),
                    "m": m,
                    "seed": tseed,
                    "F_c": rep.cost_fc,
                    "gamma": rep.group_accuracy,
                    "matched_acc": rep.matched_accuracy,
                    "iters": ex.solver.iterations,
                    "objective": ex.solver.objective,
                    "cells": _cells_by_truth(rep, cfg.r),
                })
    return rows


def _cells_by_truth(rep: EvalReport, r: int) -> list[tuple[int, int]]:
    # (correct, incorrect) of the found cell matched to each true cell
    out = [(0, 0)] * r
    for k, l in enumerate(rep.permutation):
        if 0 <= l < r:
            out[l] = rep.per_cell_counts[k]
    return out


@dataclass
class BenchmarkResult:
    config: ExperimentConfig
    trials: list[dict]
    table: list[dict]
    failures: list[tuple[int, str]]

    def trials_csv(self) -> str:
        return _to_csv(self.trials, TRIAL_COLUMNS)

    def table_csv(self) -> str:
        cols = list(self.table[0]) if self.table else []
        return _to_csv(self.table, cols)

    def plot_csv(self) -> str:
        rows = []
        for row in self.table:
            for metric in ("F_c", "gamma", "matched_acc"):
                rows.append({"m": row["m"], "solver": row["solver"], "filter": row["filter"],
                             "metric": metric, "mean": row[f"mean_{metric}"],
                             "stderr": row[f"stderr_{metric}"]})
        return _to_csv(rows, ["m", "solver", "filter", "metric", "mean", "stderr"])

    def write(self, out_dir) -> dict[str, Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        paths = {"trials": out / "trials.csv", "table": out / "table.csv",
                 "plot": out / "plot.csv"}
        paths["trials"].write_text(self.trials_csv())
        paths["table"].write_text(self.table_csv())
        paths["plot"].write_text(self.plot_csv())
        return paths


def _fmt(x):
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _to_csv(rows, cols) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for row in rows:
        w.writerow([_fmt(row[c]) for c in cols])
    return buf.getvalue()


def _aggregate(cfg: ExperimentConfig, rows: list[dict]) -> list[dict]:
    table = []
    for spec in cfg.filters:
        flabel = filter_spec_label(spec)
        for m in cfg.m_list:
            for scfg in cfg.solvers:
                sel = [x for x in rows if x["filter"] == flabel and x["m"] == m
                       and x["solver"] == scfg["solver"]]
                entry = {"solver": scfg["solver"], "filter": flabel, "m": m,
                         "trials": len(sel)}
                for metric in ("F_c", "gamma", "matched_acc", "objective", "iters"):
                    vals = np.array([x[metric] for x in sel], dtype=float)
                    mean = float(vals.mean()) if vals.size else math.nan
                    se = float(vals.std(ddof=1) / math.sqrt(vals.size)) if vals.size > 1 else 0.0
                    entry[f"mean_{metric}"] = mean
                    if metric in ("F_c", "gamma", "matched_acc"):
                        entry[f"stderr_{metric}"] = se
                for k in range(cfg.r):
                    good = [x["cells"][k][0] for x in sel]
                    bad = [x["cells"][k][1] for x in sel]
                    entry[f"correct_{k + 1}"] = float(np.mean(good)) if sel else math.nan
                    entry[f"incorrect_{k + 1}"] = float(np.mean(bad)) if sel else math.nan
                table.append(entry)
    return table


def run_benchmark(cfg: ExperimentConfig, out_dir=None, workers: int = 1,
                  progress=None) -> BenchmarkResult:
    """Run ``cfg.trials`` independent trials and aggregate them.

    Every trial draws its own planted graph (unless ``fixed_instance``) and
    fresh signals for each (filter, m); all solvers see the same signals.
    Results depend only on ``cfg`` and not on ``workers``.  Failing trials
    are logged and dropped, and counted in ``failures``.
    """
    results: dict[int, list[dict]] = {}
    failures = []
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(workers) as pool:
            futs = {t: pool.submit(run_trial, cfg, t) for t in range(cfg.trials)}
            for t, fut in futs.items():
                try:
                    results[t] = fut.result()
                except Exception as e:  # noqa: BLE001 - trial isolation
                    log.warning("trial %d failed: %s", t, e)
                    failures.append((t, repr(e)))
    else:
        for t in range(cfg.trials):
            try:
                results[t] = run_trial(cfg, t)
            except Exception as e:  # noqa: BLE001 - trial isolation
                log.warning("trial %d failed: %s", t, e)
                failures.append((t, repr(e)))
            if progress:
                progress(t + 1, cfg.trials)
    rows = [row for t in sorted(results) for row in results[t]]
    res = BenchmarkResult(cfg, rows, _aggregate(cfg, rows), failures)
    if out_dir is not None:
        res.write(out_dir)
    return res


def low_pass_summary(g: Graph, specs: Sequence[dict], r: int) -> list[dict]:
    """Low-pass ratio of each filter spec on ``g``."""
    lam = eig_sym(laplacian(g)).values
    out = []
    for spec in specs:
        lp = low_pass_ratio(filter_from_spec(spec, g), lam, r)
        out.append({"filter": filter_spec_label(spec), "eta": lp.eta,
                    "is_low_pass": lp.is_low_pass})
    return out
