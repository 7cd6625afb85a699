"""File formats: edge lists, instance/partition JSON and signal batches.

All external formats use 1-indexed vertex labels.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .graph_core import Graph, Partition
from .signals import SignalBatch


class FormatError(ValueError):
    def __init__(self, path, line: int | None, msg: str):
        self.path, self.line = str(path), line
        where = f"{path}:{line}" if line is not None else str(path)
        super().__init__(f"{where}: {msg}")


def _load_json(path):
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(path, e.lineno, e.msg) from None


def read_edge_list(path, n: int | None = None) -> Graph:
    """Read "u v" lines (1-indexed).  ``# n <count>`` declares isolated vertices."""
    edges = []
    declared = None
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            parts = line[1:].split()
            if len(parts) == 2 and parts[0] == "n":
                try:
                    declared = int(parts[1])
                except ValueError:
                    raise FormatError(path, lineno, f"bad vertex count {parts[1]!r}") from None
            continue
        parts = line.split()
        if len(parts) != 2:
            raise FormatError(path, lineno, f"expected 'u v', got {line!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise FormatError(path, lineno, f"non-integer vertex in {line!r}") from None
        if u < 1 or v < 1:
            raise FormatError(path, lineno, "vertex labels start at 1")
        if u == v:
            raise FormatError(path, lineno, f"self-loop at vertex {u}")
        edges.append((u - 1, v - 1))
    size = n or declared or max((max(e) + 1 for e in edges), default=0)
    if edges and max(max(e) for e in edges) >= size:
        raise FormatError(path, None, f"vertex label exceeds n={size}")
    return Graph.from_edges(size, edges)


def write_edge_list(g: Graph, path) -> None:
    lines = [f"# n {g.n}"] + [f"{u + 1} {v + 1}" for u, v in g.edges]
    Path(path).write_text("\n".join(lines) + "\n")


def _cells_from_json(path, cells, n):
    if not isinstance(cells, list) or not all(isinstance(c, list) for c in cells):
        raise FormatError(path, None, "cells must be a list of lists")
    try:
        return Partition(tuple(tuple(int(v) - 1 for v in c) for c in cells), n=n)
    except (TypeError, ValueError) as e:
        raise FormatError(path, None, f"invalid partition: {e}") from None


def read_instance(path) -> tuple[Graph, Partition | None]:
    """Read ``{"n": .., "edges": [[u, v], ..], "cells": [[..], ..]}``."""
    d = _load_json(path)
    if not isinstance(d, dict) or "n" not in d or "edges" not in d:
        raise FormatError(path, None, "instance needs keys 'n' and 'edges'")
    n = int(d["n"])
    try:
        edges = [(int(u) - 1, int(v) - 1) for u, v in d["edges"]]
        g = Graph.from_edges(n, edges)
    except (TypeError, ValueError) as e:
        raise FormatError(path, None, f"invalid edges: {e}") from None
    cells = d.get("cells")
    return g, (_cells_from_json(path, cells, n) if cells is not None else None)


def instance_to_dict(g: Graph, p: Partition | None = None) -> dict:
    d = {"n": g.n, "edges": [[u + 1, v + 1] for u, v in g.edges]}
    if p is not None:
        d["cells"] = partition_to_list(p)
    return d


def write_instance(g: Graph, p: Partition | None, path) -> None:
    Path(path).write_text(json.dumps(instance_to_dict(g, p)) + "\n")


def partition_to_list(p: Partition) -> list[list[int]]:
    return [[v + 1 for v in c] for c in p.cells]


def read_partition(path, n: int | None = None) -> Partition:
    cells = _load_json(path)
    if isinstance(cells, dict):
        cells = cells.get("cells")
    if n is None and isinstance(cells, list):
        n = sum(len(c) for c in cells if isinstance(c, list))
    return _cells_from_json(path, cells, n)


def write_partition(p: Partition, path) -> None:
    Path(path).write_text(json.dumps(partition_to_list(p)) + "\n")


# signal batches ------------------------------------------------------------

def write_signals_csv(b: SignalBatch, path) -> None:
    np.savetxt(path, b.samples, delimiter=",", fmt="%.17g")


def read_signals_csv(path) -> SignalBatch:
    rows = []
    width = None
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            vals = [float(x) for x in line.split(",")]
        except ValueError:
            raise FormatError(path, lineno, "non-numeric value") from None
        if width is None:
            width = len(vals)
        elif len(vals) != width:
            raise FormatError(path, lineno, f"expected {width} values, got {len(vals)}")
        rows.append(vals)
    if not rows:
        raise FormatError(path, None, "no samples")
    return SignalBatch(np.array(rows))


def write_signals_bin(b: SignalBatch, path) -> None:
    """Header ``<u32 n><u32 m>`` then the n x m matrix of samples as
    little-endian float64 in column-major order (one sample after another)."""
    with open(path, "wb") as f:
        f.write(struct.pack("<II", b.n, b.m))
        f.write(np.ascontiguousarray(b.samples, dtype="<f8").tobytes())


def read_signals_bin(path) -> SignalBatch:
    data = Path(path).read_bytes()
    if len(data) < 8:
        raise FormatError(path, None, "truncated header")
    n, m = struct.unpack("<II", data[:8])
    body = data[8:]
    if len(body) != 8 * n * m:
        raise FormatError(path, None, f"expected {8 * n * m} data bytes, got {len(body)}")
    return SignalBatch(np.frombuffer(body, dtype="<f8").reshape(m, n).astype(float))


def read_signals(path) -> SignalBatch:
    path = Path(path)
    if path.suffix in (".bin", ".f64"):
        return read_signals_bin(path)
    return read_signals_csv(path)


def write_signals(b: SignalBatch, path, fmt: str | None = None) -> None:
    path = Path(path)
    fmt = fmt or ("bin" if path.suffix in (".bin", ".f64") else "csv")
    if fmt == "bin":
        write_signals_bin(b, path)
    else:
        write_signals_csv(b, path)


def load_config(path) -> dict:
    d = _load_json(path)
    if not isinstance(d, dict):
        raise FormatError(path, None, "config must be a JSON object")
    return d
