"""Node and edge filtration functions.

Node functions map every node to a real value, edge functions every edge.
Function ids are stable strings shared with configuration files and the
command line: ``degree``, ``popularity``, ``closeness``,
``degree_centrality``, ``attribute:<k>``, ``atomic_weight``, ``forman``,
``ollivier`` and ``edge_weight``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .errors import EmptyInput, InvalidParam, MissingAttribute
from .graph import Graph, bfs_distances, triangle_count_per_edge

NODE_FUNCTIONS = ("degree", "popularity", "closeness", "degree_centrality", "attribute", "atomic_weight")
EDGE_FUNCTIONS = ("forman", "ollivier", "edge_weight")

# Standard atomic weights (IUPAC, abridged conventional values).
ATOMIC_WEIGHTS = {
    "H": 1.008, "He": 4.0026, "Li": 6.94, "Be": 9.0122, "B": 10.81, "C": 12.011,
    "N": 14.007, "O": 15.999, "F": 18.998, "Ne": 20.180, "Na": 22.990, "Mg": 24.305,
    "Al": 26.982, "Si": 28.085, "P": 30.974, "S": 32.06, "Cl": 35.45, "Ar": 39.948,
    "K": 39.098, "Ca": 40.078, "Ti": 47.867, "V": 50.942, "Cr": 51.996, "Mn": 54.938,
    "Fe": 55.845, "Co": 58.933, "Ni": 58.693, "Cu": 63.546, "Zn": 65.38, "Ga": 69.723,
    "Ge": 72.630, "As": 74.922, "Se": 78.971, "Br": 79.904, "Kr": 83.798, "Rb": 85.468,
    "Sr": 87.62, "Zr": 91.224, "Mo": 95.95, "Ru": 101.07, "Rh": 102.91, "Pd": 106.42,
    "Ag": 107.87, "Cd": 112.41, "In": 114.82, "Sn": 118.71, "Sb": 121.76, "Te": 127.60,
    "I": 126.90, "Xe": 131.29, "Cs": 132.91, "Ba": 137.33, "Pt": 195.08, "Au": 196.97,
    "Hg": 200.59, "Tl": 204.38, "Pb": 207.2, "Bi": 208.98,
}

# Node label id -> element symbol, as documented in each dataset's README.
ATOM_LABELS = {
    "MUTAG": ["C", "N", "O", "F", "I", "Cl", "Br"],
}


def atomic_weight_table(symbols) -> dict:
    """Map label ids ``0..len(symbols)-1`` to atomic weights."""
    try:
        return {i: ATOMIC_WEIGHTS[s] for i, s in enumerate(symbols)}
    except KeyError as exc:
        raise MissingAttribute(f"unknown element symbol {exc.args[0]!r}") from None


@dataclass(frozen=True)
class NodeValues:
    values: np.ndarray
    function_id: str

    kind = "node"

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if not np.all(np.isfinite(v)):
            raise InvalidParam(f"{self.function_id}: non-finite node values")
        object.__setattr__(self, "values", v)

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True)
class EdgeValues:
    values: np.ndarray
    function_id: str

    kind = "edge"

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if not np.all(np.isfinite(v)):
            raise InvalidParam(f"{self.function_id}: non-finite edge values")
        object.__setattr__(self, "values", v)

    def __len__(self):
        return len(self.values)


# ---------------------------------------------------------------------------
# node functions

def degree_values(g: Graph) -> NodeValues:
    return NodeValues(g.degrees.astype(np.float64), "degree")


def popularity_values(g: Graph) -> NodeValues:
    """Degree plus the mean degree of the neighbors; 0 for isolated nodes."""
    deg = g.degrees.astype(np.float64)
    _, indices = g.csr
    owner = np.repeat(np.arange(g.node_count), g.degrees)
    nbr_sum = np.bincount(owner, weights=deg[indices], minlength=g.node_count)
    out = np.zeros(g.node_count)
    has = deg > 0
    out[has] = deg[has] + nbr_sum[has] / deg[has]
    return NodeValues(out, "popularity")


def closeness_values(g: Graph) -> NodeValues:
    """Closeness centrality computed within each node's component.

    ``(r - 1) / sum_d * (r - 1) / (n - 1)`` where ``r`` is the size of the
    reachable set and ``sum_d`` the total hop distance to it.
    """
    n = g.node_count
    out = np.zeros(n)
    if n <= 1:
        return NodeValues(out, "closeness")
    for v in range(n):
        d = bfs_distances(g, v)
        reach = d[np.isfinite(d)]
        r = len(reach)
        if r <= 1:
            continue
        total = reach.sum()
        out[v] = ((r - 1) / total) * ((r - 1) / (n - 1))
    return NodeValues(out, "closeness")


def degree_centrality_values(g: Graph) -> NodeValues:
    n = g.node_count
    if n < 2:
        return NodeValues(np.zeros(n), "degree_centrality")
    return NodeValues(g.degrees / (n - 1.0), "degree_centrality")


def attribute_values(g: Graph, column: int = 0, table=None) -> NodeValues:
    """Copy one node-attribute column, or map categorical labels through ``table``.

    ``table`` may be a dict or a sequence indexed by label id; it is only
    consulted when the graph carries no real-valued attributes.
    """
    fid = f"attribute:{column}"
    if g.node_attributes is not None:
        if not 0 <= column < g.node_attributes.shape[1]:
            raise MissingAttribute(
                f"attribute column {column} out of range (graph has {g.node_attributes.shape[1]})"
            )
        return NodeValues(g.node_attributes[:, column].copy(), fid)
    if g.node_labels is not None and table is not None:
        try:
            vals = [table[int(l)] for l in g.node_labels]
        except (KeyError, IndexError) as exc:
            raise MissingAttribute(f"label {exc.args[0]!r} missing from value table") from None
        return NodeValues(np.array(vals, dtype=np.float64), fid)
    if g.node_count == 0:
        return NodeValues(np.zeros(0), fid)
    raise MissingAttribute("graph has no node attributes" + ("" if table is None else " or labels"))


# ---------------------------------------------------------------------------
# edge functions

def forman_ricci_values(g: Graph, augmented: bool = False) -> EdgeValues:
    deg = g.degrees
    e = g.edges
    vals = 4.0 - deg[e[:, 0]] - deg[e[:, 1]] if len(e) else np.zeros(0)
    if augmented and len(e):
        vals = vals + 3.0 * triangle_count_per_edge(g)
    return EdgeValues(np.asarray(vals, dtype=np.float64), "forman")


def edge_weight_values(g: Graph) -> EdgeValues:
    if g.edge_weights is None:
        if g.edge_count == 0:
            return EdgeValues(np.zeros(0), "edge_weight")
        raise MissingAttribute("graph has no edge weights")
    return EdgeValues(g.edge_weights.copy(), "edge_weight")


def solve_transport(mu, nu, cost) -> float:
    """Optimal cost of moving distribution ``mu`` onto ``nu``.

    ``mu`` (length m) and ``nu`` (length k) hold the masses on their
    supports and ``cost`` is the (m, k) ground cost. The transportation LP
    is solved to a basic optimal solution with the HiGHS dual simplex.
    """
    mu = np.asarray(mu, dtype=np.float64).reshape(-1)
    nu = np.asarray(nu, dtype=np.float64).reshape(-1)
    cost = np.asarray(cost, dtype=np.float64)
    if cost.shape != (len(mu), len(nu)):
        raise InvalidParam(f"cost must have shape {(len(mu), len(nu))}, got {cost.shape}")
    if len(mu) == 0 or len(nu) == 0:
        raise EmptyInput("empty distribution")
    if np.any(mu < 0) or np.any(nu < 0):
        raise InvalidParam("masses must be non-negative")
    if abs(mu.sum() - 1.0) > 1e-12 or abs(nu.sum() - 1.0) > 1e-12:
        raise InvalidParam(f"unbalanced masses: sum(mu)={mu.sum()!r}, sum(nu)={nu.sum()!r}")
    if not np.all(np.isfinite(cost)) or np.any(cost < 0):
        raise InvalidParam("cost must be finite and non-negative")

    rows = np.flatnonzero(mu > 0)
    cols = np.flatnonzero(nu > 0)
    mu, nu, cost = mu[rows], nu[cols], cost[np.ix_(rows, cols)]
    m, k = len(mu), len(nu)
    if m == 1:
        return float(cost[0] @ nu)
    if k == 1:
        return float(cost[:, 0] @ mu)

    a_eq = np.zeros((m + k, m * k))
    for i in range(m):
        a_eq[i, i * k : (i + 1) * k] = 1.0
    for j in range(k):
        a_eq[m + j, j::k] = 1.0
    res = linprog(
        cost.reshape(-1),
        A_eq=a_eq,
        b_eq=np.concatenate([mu, nu]),
        bounds=(0, None),
        method="highs-ds",
    )
    if res.status != 0:
        raise InvalidParam(f"transport LP failed: {res.message}")
    return float(res.fun)


def _lazy_measure(g: Graph, v: int, alpha: float):
    nb = g.neighbors(v)
    support = np.concatenate([[v], nb])
    mass = np.empty(len(support))
    mass[0] = alpha
    mass[1:] = (1.0 - alpha) / len(nb)
    return support, mass


def ollivier_ricci_values(g: Graph, alpha: float = 0.5, decimals: int = 12) -> EdgeValues:
    """Ollivier-Ricci curvature of every edge with the ``alpha``-lazy walk.

    Values are rounded to ``decimals`` places so that edges which are
    equivalent under a graph automorphism tie exactly in the filtration.
    """
    if not 0.0 <= alpha < 1.0:
        raise InvalidParam("alpha must lie in [0, 1)")
    if g.edge_count == 0:
        raise EmptyInput("ollivier-ricci needs at least one edge")
    dist_cache = {}

    def dist(v):
        d = dist_cache.get(v)
        if d is None:
            d = dist_cache[v] = bfs_distances(g, v)
        return d

    out = np.empty(g.edge_count)
    for k, (u, v) in enumerate(g.edges.tolist()):
        su, mu = _lazy_measure(g, u, alpha)
        sv, mv = _lazy_measure(g, v, alpha)
        cost = np.stack([dist(int(a))[sv] for a in su])
        w1 = solve_transport(mu, mv, cost)
        out[k] = 1.0 - w1 / dist(u)[v]
    return EdgeValues(np.round(out, decimals), "ollivier")


# ---------------------------------------------------------------------------
# registry

def function_kind(function_id: str) -> str:
    base = function_id.split(":", 1)[0]
    if base in NODE_FUNCTIONS:
        return "node"
    if base in EDGE_FUNCTIONS:
        return "edge"
    raise InvalidParam(f"unknown filtration function {function_id!r}")


def compute_function(g: Graph, function_id: str, params: dict | None = None):
    """Evaluate a filtration function by id.

    ``params`` carries per-function options: ``alpha`` (ollivier),
    ``augmented`` (forman), ``table`` (atomic_weight and attribute
    label tables).
    """
    params = dict(params or {})
    base, _, arg = function_id.partition(":")
    if base == "degree":
        return degree_values(g)
    if base == "popularity":
        return popularity_values(g)
    if base == "closeness":
        return closeness_values(g)
    if base == "degree_centrality":
        return degree_centrality_values(g)
    if base == "attribute":
        try:
            col = int(arg) if arg else 0
        except ValueError:
            raise InvalidParam(f"bad attribute column in {function_id!r}") from None
        return attribute_values(g, col, params.get("table"))
    if base == "atomic_weight":
        table = params.get("table")
        if table is None:
            raise MissingAttribute("atomic_weight needs a label -> weight table")
        if g.node_labels is None:
            raise MissingAttribute("atomic_weight needs categorical node labels")
        try:
            vals = [table[int(l)] for l in g.node_labels]
        except (KeyError, IndexError) as exc:
            raise MissingAttribute(f"label {exc.args[0]!r} missing from atomic weight table") from None
        return NodeValues(np.array(vals, dtype=np.float64), "atomic_weight")
    if base == "forman":
        return forman_ricci_values(g, bool(params.get("augmented", False)))
    if base == "ollivier":
        return ollivier_ricci_values(g, float(params.get("alpha", 0.5)))
    if base == "edge_weight":
        return edge_weight_values(g)
    raise InvalidParam(f"unknown filtration function {function_id!r}")
