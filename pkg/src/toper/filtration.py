"""Threshold sets and filtration sequences.

A sublevel filtration over thresholds ``e_1 < ... < e_n`` admits an element
at the first threshold ``e_i`` with ``value <= e_i``; a superlevel one, over
decreasing thresholds, at the first ``e_i`` with ``value >= e_i``. Once the
entry step of every element is known, all ``n`` counts follow from one
cumulative sum, so a sequence costs ``O((|V| + |E|) log n + n)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyInput, InvalidParam
from .filtfn import EdgeValues, NodeValues, function_kind
from .graph import Graph

DIRECTIONS = ("sublevel", "superlevel")
FIT_ORDERS = ("linear", "quadratic")
QUANTITIES = ("node_edge_counts", "betti_pairs")
_QUANTITY_ALIASES = {"counts": "node_edge_counts", "betti": "betti_pairs"}


@dataclass(frozen=True)
class ThresholdSet:
    thresholds: np.ndarray
    direction: str = "sublevel"
    strategy: str = "explicit"

    def __post_init__(self):
        t = np.asarray(self.thresholds, dtype=np.float64).reshape(-1)
        if len(t) == 0:
            raise EmptyInput("threshold set is empty")
        if self.direction not in DIRECTIONS:
            raise InvalidParam(f"direction must be one of {DIRECTIONS}")
        step = np.diff(t)
        if self.direction == "sublevel" and np.any(step <= 0):
            raise InvalidParam("sublevel thresholds must be strictly increasing")
        if self.direction == "superlevel" and np.any(step >= 0):
            raise InvalidParam("superlevel thresholds must be strictly decreasing")
        object.__setattr__(self, "thresholds", t)

    def __len__(self):
        return len(self.thresholds)


@dataclass(frozen=True)
class FiltrationSpec:
    """One filtration setting: which function, how thresholded, how fitted.

    ``params`` holds function options such as ``{"alpha": 0.5}`` for
    Ollivier-Ricci or a label table for atomic weights.
    """

    function_id: str
    kind: str = ""
    direction: str = "sublevel"
    steps: int = 100
    fit_order: str = "linear"
    quantity: str = "node_edge_counts"
    params: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        natural = function_kind(self.function_id)
        if not self.kind:
            object.__setattr__(self, "kind", natural)
        elif self.kind != natural:
            raise InvalidParam(f"{self.function_id!r} is a {natural} function, not {self.kind}")
        if self.direction not in DIRECTIONS:
            raise InvalidParam(f"direction must be one of {DIRECTIONS}")
        if int(self.steps) < 2:
            raise InvalidParam("steps must be >= 2")
        object.__setattr__(self, "steps", int(self.steps))
        if self.fit_order not in FIT_ORDERS:
            raise InvalidParam(f"fit_order must be one of {FIT_ORDERS}")
        q = _QUANTITY_ALIASES.get(self.quantity, self.quantity)
        if q not in QUANTITIES:
            raise InvalidParam(f"quantity must be one of {QUANTITIES}")
        object.__setattr__(self, "quantity", q)

    @property
    def name(self) -> str:
        base = f"{self.function_id}.{self.direction}"
        if self.quantity == "betti_pairs":
            base += ".betti"
        return base

    def to_config(self) -> dict:
        d = {
            "function": self.function_id,
            "kind": self.kind,
            "direction": self.direction,
            "steps": self.steps,
            "fit": self.fit_order,
            "quantity": self.quantity,
        }
        plain = {k: v for k, v in self.params.items() if k != "table"}
        if "table" in self.params:
            plain["table"] = {str(k): v for k, v in dict(self.params["table"]).items()}
        if plain:
            d["params"] = plain
        return d

    @classmethod
    def from_config(cls, d: dict) -> "FiltrationSpec":
        params = dict(d.get("params", {}))
        if "table" in params:
            params["table"] = {int(k): float(v) for k, v in params["table"].items()}
        return cls(
            function_id=d["function"],
            kind=d.get("kind", ""),
            direction=d.get("direction", "sublevel"),
            steps=d.get("steps", 100),
            fit_order=d.get("fit", "linear"),
            quantity=d.get("quantity", "node_edge_counts"),
            params=params,
        )


@dataclass(frozen=True)
class FiltrationSequence:
    """``points[i] = (x_i, y_i)`` at the i-th threshold."""

    points: np.ndarray
    quantity: str = "node_edge_counts"

    def __post_init__(self):
        p = np.asarray(self.points, dtype=np.int64).reshape(-1, 2)
        object.__setattr__(self, "points", p)

    @property
    def x(self):
        return self.points[:, 0]

    @property
    def y(self):
        return self.points[:, 1]

    def __len__(self):
        return len(self.points)

    def __eq__(self, other):
        if not isinstance(other, FiltrationSequence):
            return NotImplemented
        return self.quantity == other.quantity and np.array_equal(self.points, other.points)

    __hash__ = None


def build_thresholds(values, spec_or_steps=100, direction: str | None = None) -> ThresholdSet:
    """Choose at most ``steps`` thresholds from the observed values.

    With no more distinct values than steps, every distinct value is a
    threshold. Otherwise the thresholds are the order statistics at
    ``steps`` evenly spaced ranks of the sorted values (nearest rank, so
    the minimum and maximum are always kept), with repeats removed.
    """
    if isinstance(spec_or_steps, FiltrationSpec):
        steps = spec_or_steps.steps
        direction = direction or spec_or_steps.direction
    else:
        steps = int(spec_or_steps)
    direction = direction or "sublevel"
    v = np.asarray(getattr(values, "values", values), dtype=np.float64).reshape(-1)
    if len(v) == 0:
        raise EmptyInput("no values to threshold")
    if steps < 1:
        raise InvalidParam("steps must be >= 1")
    distinct = np.unique(v)
    if len(distinct) <= steps:
        t, strategy = distinct, "all_unique"
    else:
        s = np.sort(v)
        N = len(s)
        if steps == 1:
            ranks = np.array([N - 1])
        else:
            k = np.arange(steps, dtype=np.int64)
            # nearest rank to k*(N-1)/(steps-1), in exact integer arithmetic
            ranks = (2 * k * (N - 1) + (steps - 1)) // (2 * (steps - 1))
        t, strategy = np.unique(s[ranks]), f"quantile({steps})"
    if direction == "superlevel":
        t = t[::-1]
    return ThresholdSet(t, direction, strategy)


def _entry_steps(values, ts: ThresholdSet) -> np.ndarray:
    """Index of the first threshold admitting each value (``len(ts)`` if never)."""
    v = np.asarray(values, dtype=np.float64)
    t = ts.thresholds
    if ts.direction == "superlevel":
        v, t = -v, -t
    return np.searchsorted(t, v, side="left")


def _check_direction(ts, direction):
    if direction is not None and direction != ts.direction:
        raise InvalidParam(f"threshold set is {ts.direction}, requested {direction}")


def _node_and_edge_steps(g: Graph, f, ts: ThresholdSet):
    n_steps = len(ts)
    if f.kind == "node":
        if len(f) != g.node_count:
            raise InvalidParam("node values do not match the graph")
        node_in = _entry_steps(f.values, ts)
        e = g.edges
        edge_in = np.maximum(node_in[e[:, 0]], node_in[e[:, 1]]) if len(e) else np.zeros(0, np.int64)
    else:
        if len(f) != g.edge_count:
            raise InvalidParam("edge values do not match the graph")
        edge_in = _entry_steps(f.values, ts)
        node_in = np.full(g.node_count, n_steps, dtype=np.int64)
        if g.edge_count:
            np.minimum.at(node_in, g.edges[:, 0], edge_in)
            np.minimum.at(node_in, g.edges[:, 1], edge_in)
    return node_in, edge_in


def _cumulative(steps, n_steps):
    return np.cumsum(np.bincount(steps, minlength=n_steps + 1)[:n_steps])


def _counts(g, f, ts):
    node_in, edge_in = _node_and_edge_steps(g, f, ts)
    n = len(ts)
    return node_in, edge_in, _cumulative(node_in, n), _cumulative(edge_in, n)


def node_filtration_sequence(g: Graph, f: NodeValues, t: ThresholdSet, direction=None) -> FiltrationSequence:
    """Node and edge counts of the induced subgraphs ``{v : f(v) <= e_i}``."""
    _check_direction(t, direction)
    if f.kind != "node":
        raise InvalidParam("node_filtration_sequence needs node values")
    _, _, x, y = _counts(g, f, t)
    return FiltrationSequence(np.column_stack([x, y]))


def edge_filtration_sequence(g: Graph, w: EdgeValues, t: ThresholdSet, direction=None) -> FiltrationSequence:
    """Counts for edge sets ``{e : w(e) <= e_i}`` and their endpoints.

    Isolated nodes never enter an edge filtration.
    """
    _check_direction(t, direction)
    if w.kind != "edge":
        raise InvalidParam("edge_filtration_sequence needs edge values")
    _, _, x, y = _counts(g, w, t)
    return FiltrationSequence(np.column_stack([x, y]))


def betti_pairs(g: Graph, f, t: ThresholdSet, direction=None) -> FiltrationSequence:
    """``(b0, b1)`` of the filtration subgraph at each threshold.

    ``b0`` comes from a union-find pass over the edges in entry order and
    ``b1 = |E_i| - |V_i| + b0`` is the cycle rank of the 1-skeleton.
    """
    _check_direction(t, direction)
    node_in, edge_in, x, y = _counts(g, f, t)
    n = len(t)
    parent = list(range(g.node_count))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    merges = np.zeros(n + 1, dtype=np.int64)
    order = np.argsort(edge_in, kind="stable")
    edges = g.edges.tolist()
    for k in order.tolist():
        step = int(edge_in[k])
        if step >= n:
            break
        i, j = edges[k]
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj
            merges[step] += 1
    b0 = x - np.cumsum(merges[:n])
    b1 = y - x + b0
    return FiltrationSequence(np.column_stack([b0, b1]), "betti_pairs")


def filtration_sequence(g: Graph, f, t: ThresholdSet, quantity: str = "node_edge_counts") -> FiltrationSequence:
    quantity = _QUANTITY_ALIASES.get(quantity, quantity)
    if quantity == "betti_pairs":
        return betti_pairs(g, f, t)
    if quantity != "node_edge_counts":
        raise InvalidParam(f"unknown quantity {quantity!r}")
    if f.kind == "node":
        return node_filtration_sequence(g, f, t)
    return edge_filtration_sequence(g, f, t)
