"""TopER vectors: line fits to filtration sequences."""

from __future__ import annotations

import csv
import io
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import EmptyInput, GraphComputeError, ToperError
from .filtfn import compute_function
from .filtration import FiltrationSequence, FiltrationSpec, ThresholdSet, build_thresholds, filtration_sequence
from .graph import Graph, GraphCollection


def refine_sequence(seq, kind: str = "node") -> np.ndarray:
    """Remove repeated points and axis-parallel runs before fitting.

    Exact duplicate pairs are dropped first. For node filtrations each
    maximal run of equal ``y`` is then replaced by one point at the mean of
    its ``x`` values; for edge filtrations runs of equal ``x`` collapse to
    the mean of their ``y`` values.
    """
    pts = np.asarray(getattr(seq, "points", seq), dtype=np.float64).reshape(-1, 2)
    if len(pts) == 0:
        raise EmptyInput("empty filtration sequence")
    _, first = np.unique(pts, axis=0, return_index=True)
    pts = pts[np.sort(first)]

    key, other = (1, 0) if kind == "node" else (0, 1)
    out = []
    start = 0
    for i in range(1, len(pts) + 1):
        if i == len(pts) or pts[i, key] != pts[start, key]:
            run = pts[start:i]
            p = np.empty(2)
            p[key] = run[0, key]
            p[other] = run[:, other].mean()
            out.append(p)
            start = i
    return np.array(out)


def fit_line(points):
    """Least-squares line ``y = a + b x``; returns ``(a, b)``.

    A single point, or several sharing one ``x``, gives ``(mean y, 0)``.
    """
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    if len(pts) == 0:
        raise EmptyInput("cannot fit a line to no points")
    x, y = pts[:, 0], pts[:, 1]
    if len(pts) == 1 or np.all(x == x[0]):
        return float(y.mean()), 0.0
    xm, ym = x.mean(), y.mean()
    dx = x - xm
    b = float(dx @ (y - ym)) / float(dx @ dx)
    return float(ym - b * xm), b


def fit_quadratic(points):
    """Least-squares ``y = a + b x + c x^2``; returns ``(a, b, c)``.

    Falls back to the line fit (``c = 0``) with fewer than three distinct
    ``x`` values.
    """
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    if len(pts) == 0:
        raise EmptyInput("cannot fit a quadratic to no points")
    x, y = pts[:, 0], pts[:, 1]
    if len(np.unique(x)) < 3:
        a, b = fit_line(pts)
        return a, b, 0.0
    # fit in standardized u = (x - m) / s, then expand back to powers of x
    m = x.mean()
    s = x.std()
    u = (x - m) / s
    V = np.column_stack([np.ones_like(u), u, u * u])
    (al, be, ga), *_ = np.linalg.lstsq(V, y, rcond=None)
    c = ga / s**2
    b = be / s - 2.0 * ga * m / s**2
    a = al - be * m / s + ga * m * m / s**2
    return float(a), float(b), float(c)


@dataclass(frozen=True)
class ToperVector:
    a: float
    b: float
    spec: FiltrationSpec
    c: float | None = None

    @property
    def pivot(self):
        return self.a

    @property
    def growth(self):
        return self.b

    def as_array(self) -> np.ndarray:
        if self.c is None:
            return np.array([self.a, self.b])
        return np.array([self.a, self.b, self.c])


def spec_columns(spec: FiltrationSpec) -> list:
    names = ["a", "b"] + (["c"] if spec.fit_order == "quadratic" else [])
    return [f"{spec.name}.{n}" for n in names]


def sequence_for(g: Graph, spec: FiltrationSpec, thresholds: ThresholdSet | None = None, values=None):
    if values is None:
        values = compute_function(g, spec.function_id, spec.params)
    if thresholds is None:
        thresholds = build_thresholds(values, spec)
    return filtration_sequence(g, values, thresholds, spec.quantity)


def toper_embed(g: Graph, spec: FiltrationSpec, thresholds: ThresholdSet | None = None, values=None) -> ToperVector:
    """Filtration, refinement and fit for one graph and one spec.

    ``thresholds`` overrides the threshold set built from the values;
    ``values`` supplies precomputed function values.
    """
    seq = sequence_for(g, spec, thresholds, values)
    pts = refine_sequence(seq, spec.kind)
    if spec.fit_order == "quadratic":
        a, b, c = fit_quadratic(pts)
        return ToperVector(a, b, spec, c)
    a, b = fit_line(pts)
    return ToperVector(a, b, spec)


def _embed_graph(g: Graph, specs) -> np.ndarray:
    cache = {}
    row = []
    for spec in specs:
        key = (spec.function_id, repr(sorted(spec.params.items(), key=lambda kv: kv[0])))
        if key not in cache:
            cache[key] = compute_function(g, spec.function_id, spec.params)
        row.append(toper_embed(g, spec, values=cache[key]).as_array())
    return np.concatenate(row)


def _embed_chunk(args):
    start, graphs, specs = args
    out = []
    for k, g in enumerate(graphs):
        try:
            out.append(_embed_graph(g, specs))
        except ToperError as exc:
            raise GraphComputeError(start + k, exc) from exc
    return out


@dataclass
class EmbeddingMatrix:
    values: np.ndarray
    columns: list
    labels: np.ndarray
    graph_ids: np.ndarray | None = None
    specs: tuple = ()

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64).reshape(len(self.labels), -1)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.graph_ids is None:
            self.graph_ids = np.arange(len(self.labels))
        if self.values.shape[1] != len(self.columns):
            raise ValueError("column names do not match matrix width")

    @property
    def shape(self):
        return self.values.shape

    def block(self, spec_or_index) -> "EmbeddingMatrix":
        """The sub-matrix holding one spec's columns."""
        spec = self.specs[spec_or_index] if isinstance(spec_or_index, int) else spec_or_index
        cols = spec_columns(spec)
        idx = [self.columns.index(c) for c in cols]
        return EmbeddingMatrix(self.values[:, idx], cols, self.labels, self.graph_ids, (spec,))

    def csv_text(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["graph_id", "label"] + list(self.columns))
        for gid, lab, row in zip(self.graph_ids, self.labels, self.values):
            w.writerow([int(gid), int(lab)] + [f"{v:.9g}" for v in row])
        return buf.getvalue()

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            fh.write(self.csv_text())

    @classmethod
    def from_csv(cls, path) -> "EmbeddingMatrix":
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        header, body = rows[0], rows[1:]
        if header[:2] != ["graph_id", "label"]:
            raise ValueError("not an embedding CSV")
        ids = np.array([int(r[0]) for r in body], dtype=np.int64)
        labels = np.array([int(r[1]) for r in body], dtype=np.int64)
        vals = np.array([[float(v) for v in r[2:]] for r in body], dtype=np.float64).reshape(len(body), -1)
        return cls(vals, header[2:], labels, ids)


def embed_dataset(c: GraphCollection, specs, workers: int = 1, chunk_size: int = 32) -> EmbeddingMatrix:
    """Embed every graph of ``c`` under each spec, concatenated in spec order."""
    specs = tuple(specs)
    if not specs:
        raise EmptyInput("no filtration specs given")
    columns = [col for s in specs for col in spec_columns(s)]
    chunks = [(i, c.graphs[i : i + chunk_size], specs) for i in range(0, len(c.graphs), chunk_size)]
    if workers is None or workers <= 0:
        workers = os.cpu_count() or 1
    if workers == 1 or len(chunks) <= 1:
        parts = [_embed_chunk(ch) for ch in chunks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(_embed_chunk, chunks))
    rows = [r for part in parts for r in part]
    values = np.vstack(rows) if rows else np.zeros((0, len(columns)))
    return EmbeddingMatrix(values, columns, c.graph_labels.copy(), specs=specs)


def default_specs(
    functions=("degree", "popularity", "closeness", "degree_centrality", "forman", "ollivier"),
    direction="sublevel",
    steps=100,
    fit_order="linear",
    quantity="node_edge_counts",
    params=None,
):
    """Specs for a list of function ids sharing one threshold/fit setting.

    ``params`` maps function id -> option dict. ``direction="both"`` emits a
    sublevel and a superlevel spec per function.
    """
    params = params or {}
    dirs = ("sublevel", "superlevel") if direction == "both" else (direction,)
    return [
        FiltrationSpec(f, direction=d, steps=steps, fit_order=fit_order, quantity=quantity, params=dict(params.get(f, {})))
        for f in functions
        for d in dirs
    ]
