"""Readers and writers for graphs, vertex weights, vertex sets and embeddings."""

from __future__ import annotations

import json
import math

import numpy as np

from .graph import Graph, GraphError

FREE_CELLS = frozenset(".GS")


def parse_edge_list(text: str, *, keep_all: bool = False) -> Graph:
    """Parse ``n m`` followed by ``u v [w]`` lines.

    Reversed repeats of an edge are rejected as directed input; negative
    weights are rejected. Only the largest component is kept unless ``keep_all``.
    """
    rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows:
        raise GraphError("empty edge list")
    try:
        n, m = int(rows[0][0]), int(rows[0][1])
    except (ValueError, IndexError) as exc:
        raise GraphError("header must be 'n m'") from exc
    body = rows[1:]
    if len(body) != m:
        raise GraphError(f"header announces {m} edges, found {len(body)}")
    u, v, w = [], [], []
    seen = {}
    for lineno, parts in enumerate(body, start=2):
        if len(parts) not in (2, 3):
            raise GraphError(f"line {lineno}: expected 'u v [w]'")
        try:
            a, b = int(parts[0]), int(parts[1])
            wt = float(parts[2]) if len(parts) == 3 else 1.0
        except ValueError as exc:
            raise GraphError(f"line {lineno}: malformed number") from exc
        if wt < 0 or not math.isfinite(wt):
            raise GraphError(f"line {lineno}: negative or non-finite weight {parts[2]}")
        if (b, a) in seen:
            raise GraphError(f"line {lineno}: edge {a}-{b} also listed as {b}-{a}; directed input is not supported")
        if (a, b) in seen:
            raise GraphError(f"line {lineno}: duplicate edge {a}-{b}")
        seen[(a, b)] = wt
        u.append(a)
        v.append(b)
        w.append(wt)
    g = Graph(n, u, v, w)
    return g if keep_all else g.largest_component()[0]


def read_edge_list(path, *, keep_all: bool = False) -> Graph:
    with open(path, encoding="utf-8") as fh:
        return parse_edge_list(fh.read(), keep_all=keep_all)


def format_edge_list(g: Graph) -> str:
    lines = [f"{g.n} {g.m}"]
    lines += [f"{a} {b} {w!r}" for a, b, w in g.edges()]
    return "\n".join(lines) + "\n"


def write_edge_list(g: Graph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_edge_list(g))


def parse_grid_map(text: str, *, eight_connected: bool = False, keep_all: bool = False):
    """Grid map with ``.`` free cells (``G``/``S`` also free) and anything else blocked.

    A movingAI header (``type``/``height``/``width``/``map``) is skipped when
    present. Diagonal moves cost sqrt(2) and may not cut blocked corners.
    Returns the graph and the ``(row, col)`` cell of every vertex.
    """
    lines = text.splitlines()
    if lines and lines[0].startswith("type"):
        idx = next(i for i, ln in enumerate(lines) if ln.strip() == "map")
        lines = lines[idx + 1:]
    grid = [ln.rstrip("\n") for ln in lines if ln.strip()]
    if not grid:
        raise GraphError("empty grid map")
    width = max(len(r) for r in grid)
    free = np.array([[c in FREE_CELLS for c in r.ljust(width, "@")] for r in grid])
    ids = -np.ones(free.shape, dtype=np.int64)
    cells = np.argwhere(free)
    ids[free] = np.arange(len(cells))
    u, v, w = [], [], []
    h, wd = free.shape
    steps = [(0, 1, 1.0), (1, 0, 1.0)]
    if eight_connected:
        steps += [(1, 1, math.sqrt(2.0)), (1, -1, math.sqrt(2.0))]
    for r, c in cells.tolist():
        for dr, dc, cost in steps:
            rr, cc = r + dr, c + dc
            if not (0 <= rr < h and 0 <= cc < wd) or not free[rr, cc]:
                continue
            if dr and dc and not (free[r + dr, c] and free[r, c + dc]):
                continue
            u.append(ids[r, c])
            v.append(ids[rr, cc])
            w.append(cost)
    g = Graph(len(cells), u, v, w)
    if keep_all:
        return g, cells
    g, keep = g.largest_component()
    return g, cells[keep]


def read_grid_map(path, **kw):
    with open(path, encoding="utf-8") as fh:
        return parse_grid_map(fh.read(), **kw)


def read_vertex_weights(path, n: int) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        vals = [float(x) for x in fh.read().split()]
    if len(vals) != n:
        raise GraphError(f"expected {n} vertex weights, found {len(vals)}")
    return np.array(vals)


def read_vertex_set(path) -> list[int]:
    """Whitespace/comma separated vertex ids."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read().replace(",", " ")
    try:
        return [int(x) for x in text.split()]
    except ValueError as exc:
        raise GraphError("vertex set file must hold integer ids") from exc


def format_embedding_text(emb) -> str:
    lines = [f"{emb.coords.shape[0]} {emb.kappa_used}"]
    lines += [" ".join(repr(float(x)) for x in row) for row in emb.coords]
    return "\n".join(lines) + "\n"


def embedding_to_json(emb, config: dict | None = None) -> dict:
    return {
        "n": int(emb.coords.shape[0]),
        "r": int(emb.kappa_used),
        "vertices": emb.vertices.tolist(),
        "pivots": [list(p) for p in emb.pivots],
        "pivot_residuals": [float(x) for x in emb.pivot_residuals],
        "mode": emb.mode.describe(),
        "seed": emb.seed,
        "config": config or {},
        "coords": emb.coords.tolist(),
    }


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"
