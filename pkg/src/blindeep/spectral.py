"""Dense symmetric eigendecomposition and structural eigenvectors."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph_core import Graph, Partition, indicator_from_partition, laplacian, quotient


@dataclass(frozen=True, eq=False)
class EigenDecomposition:
    values: np.ndarray   # ascending
    vectors: np.ndarray  # columns, orthonormal


@dataclass(frozen=True, eq=False)
class TopREigenspace:
    vectors: np.ndarray  # (n, r), ordered by decreasing eigenvalue
    values: np.ndarray   # descending
    next_value: float    # (r+1)-th largest eigenvalue
    tie: bool            # values[-1] and next_value coincide to 1e-12 (relative)

    @property
    def gap(self) -> float:
        return float(self.values[-1] - self.next_value)


def _fix_signs(vecs: np.ndarray) -> np.ndarray:
    # largest-magnitude entry of every column made positive (first one on ties)
    idx = np.argmax(np.abs(vecs), axis=0)
    signs = np.sign(vecs[idx, np.arange(vecs.shape[1])])
    signs[signs == 0] = 1.0
    return vecs * signs


def jacobi_eigh(a: np.ndarray, tol: float = 1e-12, max_sweeps: int = 100):
    """Cyclic Jacobi eigenvalue iteration for a symmetric matrix.

    Sweeps over all off-diagonal pairs, annihilating each with a plane
    rotation, until the off-diagonal Frobenius norm drops below
    ``tol * ||a||_F``.  Returns unsorted ``(values, vectors)``.
    """
    a = np.array(a, dtype=float, copy=True)
    n = a.shape[0]
    v = np.eye(n)
    target = tol * np.linalg.norm(a)
    for _ in range(max_sweeps):
        off = np.sqrt(2.0) * np.linalg.norm(np.triu(a, 1))
        if off <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                diff = a[q, q] - a[p, p]
                # negligible against both diagonal entries: drop it
                if abs(apq) <= 1e-18 * (abs(a[p, p]) + abs(a[q, q])) or apq == 0.0:
                    a[p, q] = a[q, p] = 0.0
                    continue
                theta = diff / (2.0 * apq)
                if abs(theta) > 1e100:
                    t = 0.5 / theta
                elif theta == 0.0:
                    t = 1.0
                else:
                    t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                ap = a[:, p].copy()
                aq = a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                ap = a[p, :].copy()
                aq = a[q, :].copy()
                a[p, :] = c * ap - s * aq
                a[q, :] = s * ap + c * aq
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                v[:, p] = c * vp - s * v[:, q]
                v[:, q] = s * vp + c * v[:, q]
    else:
        raise np.linalg.LinAlgError("Jacobi iteration did not converge")
    return np.diag(a).copy(), v


def eig_sym(a, method: str = "lapack") -> EigenDecomposition:
    """Full eigendecomposition of a real symmetric matrix.

    Eigenvalues come back ascending and each eigenvector has its
    largest-magnitude component positive.

    Parameters
    ----------
    a : (n, n) array_like
        Symmetric to within 1e-12 (relative to its largest entry).
    method : {"lapack", "jacobi"}
        ``"lapack"`` uses :func:`numpy.linalg.eigh`; ``"jacobi"`` runs the
        cyclic Jacobi iteration in :func:`jacobi_eigh` (meant for small n).
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    scale = max(1.0, float(np.max(np.abs(a)))) if a.size else 1.0
    if a.size and np.max(np.abs(a - a.T)) > 1e-12 * scale:
        raise ValueError("matrix is not symmetric")
    a = 0.5 * (a + a.T)
    if method == "lapack":
        w, v = np.linalg.eigh(a)
    elif method == "jacobi":
        w, v = jacobi_eigh(a)
        order = np.argsort(w, kind="stable")
        w, v = w[order], v[:, order]
    else:
        raise ValueError(f"unknown eigensolver {method!r}")
    return EigenDecomposition(w, _fix_signs(v))


def top_r(dec: EigenDecomposition, r: int) -> TopREigenspace:
    n = dec.values.size
    if not 1 <= r < n:
        raise ValueError(f"need 1 <= r < n, got r={r}, n={n}")
    vals = dec.values[::-1]
    vecs = dec.vectors[:, ::-1]
    xi_r, nxt = float(vals[r - 1]), float(vals[r])
    tie = abs(xi_r - nxt) <= 1e-12 * max(1.0, abs(float(vals[0])))
    return TopREigenspace(vecs[:, :r].copy(), vals[:r].copy(), nxt, tie)


def structural_residual(vecs, p: Partition) -> float:
    """Within-cell scatter of the rows of ``vecs``.

    Zero exactly when every column is constant on every cell.
    """
    vecs = np.asarray(vecs, dtype=float)
    if vecs.ndim == 1:
        vecs = vecs[:, None]
    if vecs.shape[0] != p.n:
        raise ValueError(f"vectors have {vecs.shape[0]} rows, partition covers {p.n}")
    total = 0.0
    for cell in p.cells:
        rows = vecs[list(cell)]
        total += float(np.sum((rows - rows.mean(axis=0)) ** 2))
    return total


def structural_eigenpairs(g: Graph, p: Partition):
    """Laplacian eigenpairs that are constant on the cells of an EEP.

    With S the diagonal of cell sizes, ``S^(1/2) L_q S^(-1/2)`` equals the
    symmetric matrix ``Hn^T L Hn`` (Hn the normalized indicator); its
    eigenvectors w lift to Laplacian eigenvectors ``Hn w``.  Returns
    ascending values and the (n, r) orthonormal lifted vectors.
    """
    quotient(g, p)  # raises NotEEPError with a witness
    hn = indicator_from_partition(p).normalized
    m = hn.T @ laplacian(g) @ hn
    dec = eig_sym(0.5 * (m + m.T))
    return dec.values, _fix_signs(hn @ dec.vectors)
