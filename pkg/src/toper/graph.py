"""Undirected graphs, TU Dortmund dataset I/O and synthetic generators."""

from __future__ import annotations

import json
import os
import random
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import EmptyInput, InvalidParam, ParseError


def _frozen(arr):
    arr = np.ascontiguousarray(arr)
    arr.setflags(write=False)
    return arr


class Graph:
    """Immutable simple undirected graph.

    Nodes are ``0..node_count-1``. Edges are stored once each as ``(i, j)``
    with ``i < j``; the order in which they were supplied is preserved, so
    per-edge arrays (weights, curvature values) line up with ``edges``.

    Parameters
    ----------
    node_count : int
    edges : array-like of shape (m, 2)
    edge_weights : array-like of shape (m,), optional
    node_labels : array-like of shape (n,), optional
        Categorical integer label per node (e.g. atom type).
    node_attributes : array-like of shape (n, k), optional
        Real-valued attribute vector per node.
    """

    __slots__ = (
        "node_count",
        "edges",
        "edge_weights",
        "node_labels",
        "node_attributes",
        "_indptr",
        "_indices",
        "_edge_ids",
    )

    def __init__(
        self,
        node_count: int,
        edges=(),
        edge_weights=None,
        node_labels=None,
        node_attributes=None,
    ):
        node_count = int(node_count)
        if node_count < 0:
            raise InvalidParam("node_count must be >= 0")
        e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if len(e):
            if e.min() < 0 or e.max() >= node_count:
                raise InvalidParam("edge endpoint out of range")
            if np.any(e[:, 0] == e[:, 1]):
                raise InvalidParam("self-loops are not allowed")
        e = np.sort(e, axis=1)
        key = e[:, 0] * max(node_count, 1) + e[:, 1]
        if len(np.unique(key)) != len(key):
            raise InvalidParam("duplicate undirected edge")
        self.node_count = node_count
        self.edges = _frozen(e)

        if edge_weights is not None:
            edge_weights = np.asarray(edge_weights, dtype=np.float64).reshape(-1)
            if len(edge_weights) != len(e):
                raise InvalidParam("edge_weights length must equal edge count")
            edge_weights = _frozen(edge_weights)
        self.edge_weights = edge_weights

        if node_labels is not None:
            node_labels = np.asarray(node_labels, dtype=np.int64).reshape(-1)
            if len(node_labels) != node_count:
                raise InvalidParam("node_labels length must equal node_count")
            node_labels = _frozen(node_labels)
        self.node_labels = node_labels

        if node_attributes is not None:
            node_attributes = np.asarray(node_attributes, dtype=np.float64)
            if node_attributes.ndim == 1:
                node_attributes = node_attributes.reshape(-1, 1)
            if node_attributes.shape[0] != node_count:
                raise InvalidParam("node_attributes rows must equal node_count")
            node_attributes = _frozen(node_attributes)
        self.node_attributes = node_attributes

        # CSR adjacency; _edge_ids[k] is the edge index of the k-th half-edge.
        m = len(e)
        src = np.concatenate([e[:, 0], e[:, 1]])
        dst = np.concatenate([e[:, 1], e[:, 0]])
        eid = np.concatenate([np.arange(m), np.arange(m)])
        order = np.lexsort((dst, src))
        counts = np.bincount(src, minlength=node_count) if m else np.zeros(node_count, np.int64)
        indptr = np.zeros(node_count + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        self._indptr = _frozen(indptr)
        self._indices = _frozen(dst[order])
        self._edge_ids = _frozen(eid[order])

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self._indptr)

    def neighbors(self, v: int) -> np.ndarray:
        return self._indices[self._indptr[v] : self._indptr[v + 1]]

    def incident_edges(self, v: int) -> np.ndarray:
        return self._edge_ids[self._indptr[v] : self._indptr[v + 1]]

    @property
    def csr(self):
        """``(indptr, indices)`` of the symmetric adjacency structure."""
        return self._indptr, self._indices

    def relabel(self, perm) -> "Graph":
        """Return the graph with node ``v`` renamed to ``perm[v]``.

        Edge order is kept, so per-edge arrays stay aligned.
        """
        perm = np.asarray(perm, dtype=np.int64)
        if sorted(perm.tolist()) != list(range(self.node_count)):
            raise InvalidParam("perm must be a permutation of the nodes")
        inv = np.empty_like(perm)
        inv[perm] = np.arange(self.node_count)
        return Graph(
            self.node_count,
            perm[self.edges] if self.edge_count else self.edges,
            edge_weights=self.edge_weights,
            node_labels=None if self.node_labels is None else self.node_labels[inv],
            node_attributes=None if self.node_attributes is None else self.node_attributes[inv],
        )

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented

        def same(a, b):
            if a is None or b is None:
                return a is None and b is None
            return a.shape == b.shape and np.array_equal(a, b)

        return (
            self.node_count == other.node_count
            and same(self.edges, other.edges)
            and same(self.edge_weights, other.edge_weights)
            and same(self.node_labels, other.node_labels)
            and same(self.node_attributes, other.node_attributes)
        )

    __hash__ = None

    def __repr__(self):
        return f"Graph(nodes={self.node_count}, edges={self.edge_count})"


def from_edge_list(node_count, edges, **kwargs) -> Graph:
    """Build a graph from a possibly redundant edge list.

    Repeated pairs (in either orientation) are kept once, at their first
    occurrence; self-loops are dropped.
    """
    e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    keep = _dedupe_mask(e, node_count)
    weights = kwargs.pop("edge_weights", None)
    if weights is not None:
        weights = np.asarray(weights, dtype=np.float64)[keep]
    return Graph(node_count, e[keep], edge_weights=weights, **kwargs)


def _dedupe_mask(e, node_count):
    if not len(e):
        return np.zeros(0, dtype=bool)
    lo = np.minimum(e[:, 0], e[:, 1])
    hi = np.maximum(e[:, 0], e[:, 1])
    key = lo * max(int(node_count), 1) + hi
    _, first = np.unique(key, return_index=True)
    keep = np.zeros(len(e), dtype=bool)
    keep[first] = True
    keep &= lo != hi
    return keep


@dataclass
class GraphCollection:
    graphs: list
    graph_labels: np.ndarray
    name: str = ""
    # original label value for each 0-based class id
    label_names: list = field(default_factory=list)

    def __post_init__(self):
        self.graph_labels = np.asarray(self.graph_labels, dtype=np.int64).reshape(-1)
        if len(self.graph_labels) != len(self.graphs):
            raise InvalidParam("graph_labels length must equal graph count")
        if len(self.graph_labels):
            classes = np.unique(self.graph_labels)
            if classes[0] != 0 or classes[-1] != len(classes) - 1:
                raise InvalidParam("class ids must be 0-based and contiguous")
        if not self.label_names:
            k = int(self.graph_labels.max()) + 1 if len(self.graph_labels) else 0
            self.label_names = [str(i) for i in range(k)]

    def __len__(self):
        return len(self.graphs)

    @property
    def class_count(self) -> int:
        return len(np.unique(self.graph_labels))


@dataclass(frozen=True)
class DatasetStats:
    graph_count: int
    mean_nodes: float
    mean_edges: float
    class_count: int


def dataset_stats(c: GraphCollection) -> DatasetStats:
    if len(c.graphs) == 0:
        raise EmptyInput("collection has no graphs")
    nodes = sum(g.node_count for g in c.graphs)
    edges = sum(g.edge_count for g in c.graphs)
    n = len(c.graphs)
    return DatasetStats(n, nodes / n, edges / n, c.class_count)


# ---------------------------------------------------------------------------
# TU Dortmund text format

def _read_lines(path):
    with open(path, "r") as fh:
        return [ln.strip() for ln in fh]


def _parse_rows(path, ncols=None, conv=float):
    """Parse comma separated rows; blank trailing lines are ignored."""
    rows = []
    width = ncols
    for lineno, raw in enumerate(_read_lines(path), start=1):
        if not raw:
            continue
        parts = [p.strip() for p in raw.split(",")]
        if width is None:
            width = len(parts)
        if len(parts) != width:
            raise ParseError(f"expected {width} columns, got {len(parts)}", path, lineno)
        try:
            rows.append([conv(p) for p in parts])
        except ValueError:
            raise ParseError(f"cannot parse {raw!r}", path, lineno) from None
    return rows


def _int(s):
    return int(float(s)) if ("." in s or "e" in s.lower()) else int(s)


def parse_tu_dataset(directory, prefix: str | None = None, attribute_columns=None) -> GraphCollection:
    """Load a graph-classification dataset stored in TU Dortmund format.

    Parameters
    ----------
    directory : path
        Folder holding ``<prefix>_A.txt``, ``<prefix>_graph_indicator.txt``
        and ``<prefix>_graph_labels.txt`` (plus optional node label,
        node attribute and edge attribute files).
    prefix : str, optional
        File prefix; defaults to the directory name.
    attribute_columns : sequence of int, optional
        Keep only these node-attribute columns (all by default).
    """
    directory = Path(directory)
    if prefix is None:
        prefix = directory.name

    def p(suffix):
        return directory / f"{prefix}_{suffix}.txt"

    for suffix in ("A", "graph_indicator", "graph_labels"):
        if not p(suffix).is_file():
            raise ParseError("missing mandatory file", str(p(suffix)))

    indicator = np.array([r[0] for r in _parse_rows(p("graph_indicator"), 1, _int)], dtype=np.int64)
    raw_labels = np.array([r[0] for r in _parse_rows(p("graph_labels"), 1, _int)], dtype=np.int64)
    n_total = len(indicator)
    n_graphs = len(raw_labels)
    if n_total == 0 or n_graphs == 0:
        raise ParseError("dataset is empty", str(p("graph_indicator")))
    if indicator.min() < 1 or indicator.max() > n_graphs:
        bad = int(np.flatnonzero((indicator < 1) | (indicator > n_graphs))[0]) + 1
        raise ParseError("graph id out of range", str(p("graph_indicator")), bad)
    if np.any(np.diff(indicator) < 0):
        bad = int(np.flatnonzero(np.diff(indicator) < 0)[0]) + 2
        raise ParseError("graph indicator must be non-decreasing", str(p("graph_indicator")), bad)

    a_path = p("A")
    pairs = []
    line_of = []
    for lineno, raw in enumerate(_read_lines(a_path), start=1):
        if not raw:
            continue
        parts = raw.split(",")
        if len(parts) != 2:
            raise ParseError("expected 'i, j'", str(a_path), lineno)
        try:
            i, j = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"cannot parse {raw!r}", str(a_path), lineno) from None
        if not (1 <= i <= n_total and 1 <= j <= n_total):
            raise ParseError(f"node id out of range 1..{n_total}", str(a_path), lineno)
        pairs.append((i - 1, j - 1))
        line_of.append(lineno)
    pairs = np.array(pairs, dtype=np.int64).reshape(-1, 2)
    line_of = np.array(line_of, dtype=np.int64)

    gi = indicator - 1
    cross = gi[pairs[:, 0]] != gi[pairs[:, 1]] if len(pairs) else np.zeros(0, bool)
    if np.any(cross):
        k = int(np.flatnonzero(cross)[0])
        raise ParseError("edge joins nodes of different graphs", str(a_path), int(line_of[k]))

    node_labels = None
    if p("node_labels").is_file():
        rows = _parse_rows(p("node_labels"), None, _int)
        if len(rows) != n_total:
            raise ParseError(f"expected {n_total} rows, got {len(rows)}", str(p("node_labels")))
        node_labels = np.array([r[0] for r in rows], dtype=np.int64)

    node_attrs = None
    if p("node_attributes").is_file():
        rows = _parse_rows(p("node_attributes"))
        if len(rows) != n_total:
            raise ParseError(f"expected {n_total} rows, got {len(rows)}", str(p("node_attributes")))
        node_attrs = np.array(rows, dtype=np.float64)
        if attribute_columns is not None:
            node_attrs = node_attrs[:, list(attribute_columns)]

    edge_w = None
    if p("edge_attributes").is_file():
        rows = _parse_rows(p("edge_attributes"))
        if len(rows) != len(pairs):
            raise ParseError(f"expected {len(pairs)} rows, got {len(rows)}", str(p("edge_attributes")))
        edge_w = np.array([r[0] for r in rows], dtype=np.float64)

    classes = np.unique(raw_labels)
    graph_labels = np.searchsorted(classes, raw_labels)

    # nodes of graph g occupy [starts[g], starts[g+1])
    starts = np.searchsorted(indicator, np.arange(1, n_graphs + 2))
    edge_graph = gi[pairs[:, 0]] if len(pairs) else np.zeros(0, np.int64)
    order = np.argsort(edge_graph, kind="stable")
    estarts = np.searchsorted(edge_graph[order], np.arange(n_graphs + 1))

    graphs = []
    for g in range(n_graphs):
        lo, hi = starts[g], starts[g + 1]
        sel = order[estarts[g] : estarts[g + 1]]
        e = pairs[sel] - lo
        graphs.append(
            from_edge_list(
                hi - lo,
                e,
                edge_weights=None if edge_w is None else edge_w[sel],
                node_labels=None if node_labels is None else node_labels[lo:hi],
                node_attributes=None if node_attrs is None else node_attrs[lo:hi],
            )
        )
    return GraphCollection(graphs, graph_labels, name=prefix, label_names=[str(c) for c in classes])


def _fmt(x):
    return repr(float(x))


def write_tu_dataset(c: GraphCollection, directory, prefix: str | None = None):
    """Write ``c`` in TU format; every undirected edge is written in both directions."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    prefix = prefix or c.name or directory.name
    offset = 0
    a_lines, ind, nl, na, ew = [], [], [], [], []
    has_nl = all(g.node_labels is not None for g in c.graphs)
    has_na = all(g.node_attributes is not None for g in c.graphs)
    has_ew = all(g.edge_weights is not None for g in c.graphs)
    for gid, g in enumerate(c.graphs, start=1):
        for k, (i, j) in enumerate(g.edges):
            a_lines.append(f"{i + offset + 1}, {j + offset + 1}")
            a_lines.append(f"{j + offset + 1}, {i + offset + 1}")
            if has_ew:
                w = _fmt(g.edge_weights[k])
                ew += [w, w]
        ind += [str(gid)] * g.node_count
        if has_nl:
            nl += [str(int(v)) for v in g.node_labels]
        if has_na:
            na += [", ".join(_fmt(x) for x in row) for row in g.node_attributes]
        offset += g.node_count

    def put(suffix, lines):
        with open(directory / f"{prefix}_{suffix}.txt", "w") as fh:
            fh.write("\n".join(lines) + ("\n" if lines else ""))

    names = c.label_names if len(c.label_names) == c.class_count else None
    put("A", a_lines)
    put("graph_indicator", ind)
    put("graph_labels", [names[l] if names else str(int(l)) for l in c.graph_labels])
    if has_nl:
        put("node_labels", nl)
    if has_na:
        put("node_attributes", na)
    if has_ew:
        put("edge_attributes", ew)
    return directory


# ---------------------------------------------------------------------------
# native JSON serialization

def collection_to_dict(c: GraphCollection) -> dict:
    out = []
    for g in c.graphs:
        d = {"node_count": g.node_count, "edges": g.edges.tolist()}
        if g.edge_weights is not None:
            d["edge_weights"] = g.edge_weights.tolist()
        if g.node_labels is not None:
            d["node_labels"] = g.node_labels.tolist()
        if g.node_attributes is not None:
            d["node_attributes"] = g.node_attributes.tolist()
        out.append(d)
    return {
        "name": c.name,
        "graph_labels": c.graph_labels.tolist(),
        "label_names": list(c.label_names),
        "graphs": out,
    }


def collection_from_dict(d: dict) -> GraphCollection:
    graphs = [
        Graph(
            g["node_count"],
            g.get("edges", []),
            edge_weights=g.get("edge_weights"),
            node_labels=g.get("node_labels"),
            node_attributes=g.get("node_attributes"),
        )
        for g in d["graphs"]
    ]
    return GraphCollection(graphs, d["graph_labels"], name=d.get("name", ""), label_names=d.get("label_names", []))


def save_native(c: GraphCollection, path):
    with open(path, "w") as fh:
        json.dump(collection_to_dict(c), fh)


def load_native(path) -> GraphCollection:
    try:
        with open(path) as fh:
            d = json.load(fh)
    except FileNotFoundError:
        raise ParseError("missing mandatory file", str(path)) from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", str(path), exc.lineno) from None
    try:
        return collection_from_dict(d)
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed collection: {exc}", str(path)) from None


def load_dataset(path, fmt: str = "tu", **kwargs) -> GraphCollection:
    if fmt == "tu":
        return parse_tu_dataset(path, **kwargs)
    if fmt == "native":
        return load_native(path)
    raise InvalidParam(f"unknown dataset format {fmt!r}")


# ---------------------------------------------------------------------------
# generators and primitives

def generate_power_law_graph(n: int, m: int, p: float, seed: int = 0) -> Graph:
    """Holme-Kim growing graph with tunable clustering.

    The seed graph is the complete graph on ``m`` nodes. Each new node makes
    ``m`` links: the first by preferential attachment, and each subsequent
    one, with probability ``p``, closes a triangle with a neighbor of the
    node it last attached to preferentially (falling back to preferential
    attachment when no such neighbor is free).
    """
    n, m = int(n), int(m)
    if m < 1 or m >= n:
        raise InvalidParam("need 1 <= m < n")
    if not 0.0 <= p <= 1.0:
        raise InvalidParam("p must lie in [0, 1]")
    rng = random.Random(seed)
    adj = [set() for _ in range(n)]
    nbrs = [[] for _ in range(n)]
    src, dst = [], []

    def link(u, v):
        adj[u].add(v)
        adj[v].add(u)
        nbrs[u].append(v)
        nbrs[v].append(u)
        src.append(u)
        dst.append(v)

    for i in range(m):
        for j in range(i + 1, m):
            link(j, i)
    # each node appears once per incident edge (at least once)
    repeated = [v for v in range(m) for _ in range(max(m - 1, 1))]

    for source in range(m, n):
        targets = set()
        while len(targets) < m:
            targets.add(repeated[int(rng.random() * len(repeated))])
        pool = sorted(targets)
        rng.shuffle(pool)
        target = pool.pop()
        link(source, target)
        repeated.append(target)
        count = 1
        while count < m:
            if rng.random() < p:
                cand = _free_neighbor(rng, nbrs[target], adj[source], source)
                if cand is not None:
                    link(source, cand)
                    repeated.append(cand)
                    count += 1
                    continue
            # the preferential pool may already be linked via triad steps
            while pool and pool[-1] in adj[source]:
                pool.pop()
            if not pool:
                extra = repeated[int(rng.random() * len(repeated))]
                if extra == source or extra in adj[source]:
                    continue
                pool.append(extra)
            target = pool.pop()
            link(source, target)
            repeated.append(target)
            count += 1
        repeated.extend([source] * m)

    return Graph(n, np.column_stack([np.array(dst, np.int64), np.array(src, np.int64)]))


def _free_neighbor(rng, candidates, taken, source, tries=8):
    """Uniform pick among ``candidates`` not in ``taken`` (and not ``source``)."""
    k = len(candidates)
    if k == 0:
        return None
    for _ in range(tries):
        c = candidates[int(rng.random() * k)]
        if c != source and c not in taken:
            return c
    free = [c for c in candidates if c != source and c not in taken]
    if not free:
        return None
    return free[int(rng.random() * len(free))]


def bfs_distances(g: Graph, source: int) -> np.ndarray:
    """Hop distances from ``source``; unreachable nodes get ``inf``."""
    if not 0 <= source < g.node_count:
        raise InvalidParam("source out of range")
    indptr, indices = g.csr
    dist = np.full(g.node_count, np.inf)
    dist[source] = 0.0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        du = dist[u] + 1.0
        for v in indices[indptr[u] : indptr[u + 1]]:
            if dist[v] == np.inf:
                dist[v] = du
                queue.append(v)
    return dist


def triangle_count_per_edge(g: Graph) -> np.ndarray:
    """Number of common neighbors of the two endpoints of each edge."""
    nb = [set(g.neighbors(v).tolist()) for v in range(g.node_count)]
    return np.array([len(nb[i] & nb[j]) for i, j in g.edges.tolist()], dtype=np.int64)
