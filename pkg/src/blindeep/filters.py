"""Laplacian graph filters: heat, IIR and polynomial responses."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .graph_core import Graph, Partition, QuotientGraph, laplacian
from .spectral import EigenDecomposition, eig_sym

KINDS = ("heat", "iir", "poly")


@dataclass(frozen=True)
class GraphFilter:
    """Spectral response h(mu) of a filter in the graph Laplacian.

    ``heat``:  h(mu) = exp(-sigma * mu)
    ``iir``:   h(mu) = 1 / (1 + alpha * mu)
    ``poly``:  h(mu) = sum_t coeffs[t] * mu**t

    ``sigma`` here is the filter strength, unrelated to the noise level of
    the observation model.
    """

    kind: str
    sigma: float = 0.0
    alpha: float = 0.0
    coeffs: tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown filter kind {self.kind!r}; expected one of {KINDS}")
        if self.kind == "heat" and self.sigma < 0:
            raise ValueError("heat filter needs sigma >= 0")
        if self.kind == "iir" and self.alpha < 0:
            raise ValueError("iir filter needs alpha >= 0")
        if self.kind == "poly":
            if not self.coeffs:
                raise ValueError("polynomial filter needs at least one coefficient")
            object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))

    @classmethod
    def heat(cls, sigma: float) -> "GraphFilter":
        return cls("heat", sigma=float(sigma))

    @classmethod
    def iir(cls, alpha: float) -> "GraphFilter":
        return cls("iir", alpha=float(alpha))

    @classmethod
    def polynomial(cls, coeffs: Sequence[float]) -> "GraphFilter":
        return cls("poly", coeffs=tuple(coeffs))

    @classmethod
    def identity(cls) -> "GraphFilter":
        return cls.polynomial([1.0])

    def __call__(self, mu):
        mu = np.asarray(mu, dtype=float)
        if self.kind == "heat":
            return np.exp(-self.sigma * mu)
        if self.kind == "iir":
            return 1.0 / (1.0 + self.alpha * mu)
        out = np.zeros_like(mu)
        for c in reversed(self.coeffs):
            out = out * mu + c
        return out

    def to_spec(self) -> dict:
        if self.kind == "heat":
            return {"kind": "heat", "sigma": self.sigma}
        if self.kind == "iir":
            return {"kind": "iir", "alpha": self.alpha}
        return {"kind": "poly", "coeffs": list(self.coeffs)}

    @property
    def label(self) -> str:
        if self.kind == "heat":
            return f"heat(sigma={self.sigma:.6g})"
        if self.kind == "iir":
            return f"iir(alpha={self.alpha:.6g})"
        return "poly(" + ",".join(f"{c:.6g}" for c in self.coeffs) + ")"


def filter_from_spec(spec: dict, graph: Graph | None = None) -> GraphFilter:
    """Parse a filter spec dict.

    ``{"kind": "heat", "sigma": 10, "per_max_degree": true}`` means
    sigma = 10 / D_max of ``graph`` (likewise for ``alpha``).
    """
    spec = dict(spec)
    kind = spec.get("kind")
    if kind == "polynomial":
        kind = "poly"
    scale = 1.0
    if spec.get("per_max_degree"):
        if graph is None:
            raise ValueError("per_max_degree filter spec needs a graph")
        scale = 1.0 / max(graph.max_degree, 1)
    if kind == "heat":
        return GraphFilter.heat(float(spec["sigma"]) * scale)
    if kind == "iir":
        return GraphFilter.iir(float(spec["alpha"]) * scale)
    if kind == "poly":
        return GraphFilter.polynomial(spec["coeffs"])
    raise ValueError(f"unknown filter kind {kind!r}")


def filter_spec_label(spec: dict) -> str:
    """Short stable name for a (possibly degree-relative) filter spec."""
    kind = spec.get("kind")
    suffix = "/Dmax" if spec.get("per_max_degree") else ""
    if kind == "heat":
        return f"heat(sigma={float(spec['sigma']):g}{suffix})"
    if kind == "iir":
        return f"iir(alpha={float(spec['alpha']):g}{suffix})"
    return GraphFilter.polynomial(spec["coeffs"]).label


@dataclass(frozen=True, eq=False)
class FilterMatrix:
    matrix: np.ndarray
    filter: GraphFilter
    laplacian_eig: EigenDecomposition

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


def build_filter_matrix(f: GraphFilter, g: Graph,
                        dec: EigenDecomposition | None = None) -> FilterMatrix:
    """V diag(h(lambda)) V^T from the Laplacian eigendecomposition.

    ``dec`` may be passed to reuse an existing decomposition of L(g).
    """
    if dec is None:
        dec = eig_sym(laplacian(g))
    v = dec.vectors
    m = (v * f(dec.values)) @ v.T
    m = 0.5 * (m + m.T)
    return FilterMatrix(m, f, dec)


def apply_filter(f: GraphFilter, m) -> np.ndarray:
    """h applied to a diagonalizable (possibly nonsymmetric) square matrix."""
    m = np.asarray(m, dtype=float)
    w, v = np.linalg.eig(m)
    if np.linalg.cond(v) > 1e8:
        raise np.linalg.LinAlgError("matrix is numerically defective")
    out = (v * f(w.real if np.allclose(w.imag, 0) else w)) @ np.linalg.inv(v)
    return np.real_if_close(out, tol=1e6)


def quotient_filter_matrix(f: GraphFilter, q: QuotientGraph,
                           p: Partition | None = None) -> np.ndarray:
    """h(L_q) for a quotient Laplacian.

    With the cell sizes S known, S^(1/2) L_q S^(-1/2) is symmetric, so the
    filter is evaluated through a symmetric eigendecomposition.  Without a
    partition this falls back to :func:`apply_filter`.
    """
    lq = np.asarray(q.laplacian, dtype=float)
    if p is None:
        return apply_filter(f, lq)
    s = np.sqrt(np.asarray(p.sizes, dtype=float))
    sym = (s[:, None] * lq) / s[None, :]
    dec = eig_sym(0.5 * (sym + sym.T))
    hs = (dec.vectors * f(dec.values)) @ dec.vectors.T
    return hs * (s[None, :] / s[:, None])


class LowPassRatio(NamedTuple):
    eta: float | None      # None when the low band contains a zero response
    is_low_pass: bool
    degenerate: bool


def low_pass_ratio(f: GraphFilter, laplacian_eigs, r: int) -> LowPassRatio:
    """Ratio of the largest high-band to the smallest low-band response.

    ``laplacian_eigs`` must be ascending; the low band is the first ``r``.
    """
    lam = np.asarray(laplacian_eigs, dtype=float)
    n = lam.size
    if not 1 <= r <= n - 1:
        raise ValueError(f"need 1 <= r <= n-1, got r={r}, n={n}")
    resp = np.abs(f(lam))
    low = float(resp[:r].min())
    high = float(resp[r:].max())
    if low == 0.0:
        return LowPassRatio(None, False, True)
    eta = high / low
    return LowPassRatio(eta, eta < 1.0, False)


def exact_covariance(fm: FilterMatrix, noise_var: float = 0.0) -> np.ndarray:
    """Covariance H H^T + noise_var * I of the filtered white-noise model."""
    if noise_var < 0:
        raise ValueError("noise_var must be nonnegative")
    h = fm.matrix
    cov = h @ h.T + noise_var * np.eye(fm.n)
    return 0.5 * (cov + cov.T)
