"""Command-line frontend: ``toper {embed,classify,cluster,viz,bench,stats}``."""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from .embed import EmbeddingMatrix, embed_dataset, toper_embed
from .errors import InvalidParam, MetricUndefined, ParseError, ToperError
from .filtfn import ATOM_LABELS, atomic_weight_table
from .filtration import FiltrationSpec
from .graph import dataset_stats, generate_power_law_graph, load_dataset
from .evaluation import DATASET_CONFIGS, MlpConfig, clustering_scores, config_from_row, cross_validate, full_grid, table_config
from .evaluation.mlp import DATASET_ALIASES
from .viz import scatter_svg

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_COMPUTE, EXIT_METRIC = 0, 2, 3, 4, 5

STRUCTURAL = ("degree", "popularity", "closeness", "degree_centrality", "forman", "ollivier")


class UsageError(Exception):
    pass


def _seed(args) -> int:
    env = os.environ.get("TOPER_SEED")
    if env is not None and env.strip():
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"TOPER_SEED must be an integer, got {env!r}") from None
    return args.seed


def _parse_value(v: str):
    low = v.lower()
    if low in ("true", "yes"):
        return True
    if low in ("false", "no"):
        return False
    try:
        return int(v)
    except ValueError:
        pass
    try:
        return float(v)
    except ValueError:
        return v


def parse_function_list(text: str, collection=None, atom_table=None):
    """Expand ``--functions`` into ``(function_id, params)`` pairs.

    Entries are comma separated; each is a function id optionally followed
    by ``@key=value`` options, e.g. ``ollivier@alpha=0`` or ``attribute:1``.
    ``default`` expands to the structural functions plus ``atomic_weight``
    and ``attribute`` when the dataset supports them.
    """
    out = []
    for raw in [t.strip() for t in text.split(",") if t.strip()]:
        if raw == "default":
            out.extend(_default_functions(collection, atom_table))
            continue
        fid, *opts = raw.split("@")
        params = {}
        for o in opts:
            if "=" not in o:
                raise UsageError(f"bad option {o!r} in {raw!r}; expected key=value")
            k, v = o.split("=", 1)
            params[k] = _parse_value(v)
        if fid.split(":", 1)[0] == "atomic_weight":
            table = _atom_table(collection, atom_table)
            if table is None:
                raise UsageError("atomic_weight needs --atom-table for this dataset")
            params["table"] = table
        out.append((fid, params))
    if not out:
        raise UsageError("no filtration functions given")
    return out


def _atom_table(collection, atom_table):
    if atom_table:
        return atomic_weight_table([s.strip() for s in atom_table.split(",")])
    if collection is not None and collection.name in ATOM_LABELS:
        return atomic_weight_table(ATOM_LABELS[collection.name])
    return None


def _default_functions(collection, atom_table):
    fns = [(f, {}) for f in STRUCTURAL]
    if collection is None:
        return fns
    table = _atom_table(collection, atom_table)
    if table is not None and all(g.node_labels is not None for g in collection.graphs):
        fns.append(("atomic_weight", {"table": table}))
    if all(g.node_attributes is not None for g in collection.graphs):
        fns.append(("attribute", {}))
    return fns


def build_specs(args, collection=None):
    dirs = ("sublevel", "superlevel") if args.direction == "both" else (args.direction,)
    return [
        FiltrationSpec(fid, direction=d, steps=args.steps, fit_order=args.fit, quantity=args.quantity, params=params)
        for fid, params in parse_function_list(args.functions, collection, args.atom_table)
        for d in dirs
    ]


def _workers(args):
    return args.workers if args.workers and args.workers > 0 else (os.cpu_count() or 1)


def _load(path, fmt):
    p = Path(path)
    if not p.exists():
        raise ParseError("dataset path does not exist", path=str(p))
    return load_dataset(p, fmt)


def _embed_all(args):
    """Load every --dataset and embed it; returns ``[(collection, matrix)]``."""
    out = []
    for path in args.dataset:
        c = _load(path, args.format)
        specs = build_specs(args, c)
        out.append((c, embed_dataset(c, specs, workers=_workers(args))))
    return out


def _write(text, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        with open(out, "w", newline="") as fh:
            fh.write(text)


def cmd_embed(args):
    pairs = _embed_all(args)
    if len(pairs) > 1 and args.out not in (None, "-"):
        raise UsageError("embed writes one dataset per file; pass one --dataset")
    _, E = pairs[0]
    _write(E.csv_text(), args.out)
    return EXIT_OK


def _hyper(args, dataset_name, seed):
    src = args.hyper
    if src == "table":
        key = DATASET_ALIASES.get(dataset_name, dataset_name)
        if key in DATASET_CONFIGS:
            return table_config(key, seed)
        print(f"no table hyperparameters for {dataset_name!r}; using defaults", file=sys.stderr)
        return MlpConfig(seed=seed)
    if src == "grid":
        return full_grid(seed)
    p = Path(src)
    if not p.exists():
        raise UsageError(f"--hyper expects table, grid or a JSON file; {src!r} not found")
    with open(p) as fh:
        rows = json.load(fh)
    if isinstance(rows, dict) and dataset_name in rows:
        rows = rows[dataset_name]
    elif isinstance(rows, dict) and DATASET_ALIASES.get(dataset_name) in rows:
        rows = rows[DATASET_ALIASES[dataset_name]]
    if isinstance(rows, list):
        return [config_from_row(r, seed) for r in rows]
    if not isinstance(rows, dict) or not any(k in rows for k in ("neurons", "hidden_neurons", "activation")):
        raise UsageError(f"--hyper file has no row for {dataset_name!r}")
    return config_from_row(rows, seed)


def cmd_classify(args):
    seed = _seed(args)
    reports = {}
    if args.embeddings:
        matrices = [(Path(args.embeddings).stem, EmbeddingMatrix.from_csv(args.embeddings))]
    else:
        matrices = [(c.name, E) for c, E in _embed_all(args)]
    for name, E in matrices:
        cfg = _hyper(args, name, seed)
        r = cross_validate(E, cfg, seed=seed, k=args.folds, selection=args.selection, workers=_workers(args))
        print(f"{name}: {r.summary()}")
        reports[name] = r.to_dict()
    payload = next(iter(reports.values())) if len(reports) == 1 else reports
    if args.out:
        _write(json.dumps(payload, indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_cluster(args):
    pairs = _embed_all(args)
    if args.label_by == "dataset":
        if len(pairs) < 2:
            raise MetricUndefined("labeling by dataset needs at least two --dataset inputs")
        cols = pairs[0][1].columns
        if any(E.columns != cols for _, E in pairs):
            raise UsageError("datasets produced different embedding columns")
        X = np.vstack([E.values for _, E in pairs])
        y = np.concatenate([np.full(len(E.labels), i) for i, (_, E) in enumerate(pairs)])
        scores = {"+".join(c.name for c, _ in pairs): clustering_scores(X, y)}
    else:
        scores = {c.name: clustering_scores(E.values, E.labels) for c, E in pairs}
    for name, s in scores.items():
        print(f"{name}: " + " ".join(f"{k}={v:.3f}" for k, v in s.items()))
    payload = next(iter(scores.values())) if len(scores) == 1 else scores
    if args.out:
        _write(json.dumps(payload, indent=2) + "\n", args.out)
    return EXIT_OK


def _pick_spec(specs, axes):
    if axes is None:
        if len(specs) != 1:
            raise UsageError("viz needs exactly one spec; choose one with --axes " + ",".join(s.name for s in specs))
        return specs[0]
    hits = [s for s in specs if s.name == axes or s.function_id == axes]
    if len(hits) != 1:
        raise UsageError(f"--axes {axes!r} must name exactly one of: " + ", ".join(s.name for s in specs))
    return hits[0]


def cmd_viz(args):
    groups = []
    chosen = None
    collections = [_load(p, args.format) for p in args.dataset]
    for c in collections:
        spec = _pick_spec(build_specs(args, c), args.axes)
        if chosen is not None and spec.name != chosen.name:
            raise UsageError("datasets resolved to different specs")
        chosen = spec
    # one dataset: color by class; several: color by dataset of origin
    for c in collections:
        E = embed_dataset(c, [chosen], workers=_workers(args))
        a, b = E.values[:, 0], E.values[:, 1]
        if len(collections) == 1:
            for k in range(c.class_count):
                sel = E.labels == k
                name = c.label_names[k] if k < len(c.label_names) else str(k)
                groups.append((f"class {name}", a[sel], b[sel]))
        else:
            groups.append((c.name or "dataset", a, b))
    title = args.title if args.title is not None else " + ".join(c.name for c in collections) + f" / {chosen.name}"
    svg = scatter_svg(groups, title=title)
    _write(svg, args.out)
    return EXIT_OK


def bench_times(n_list, m=15, p=0.5, steps=100, seed=0, repeats=3):
    """Seconds for degree sublevel TopER on generated graphs (best of ``repeats``).

    Graph generation is excluded from the timed region. ``m`` is capped at
    ``n - 1`` so tiny graphs stay valid.
    """
    spec = FiltrationSpec("degree", steps=steps)
    out = []
    for n in n_list:
        if n < 2:
            raise InvalidParam("bench needs n >= 2")
        g = generate_power_law_graph(int(n), min(m, int(n) - 1), p, seed)
        best = float("inf")
        for _ in range(max(1, repeats)):
            t0 = time.perf_counter()
            toper_embed(g, spec)
            best = min(best, time.perf_counter() - t0)
        out.append((int(n), best))
    return out


def cmd_bench(args):
    try:
        n_list = [int(float(t)) for t in args.n.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"--n must be a comma separated list of integers, got {args.n!r}") from None
    if not n_list:
        raise UsageError("--n is empty")
    rows = bench_times(n_list, args.m, args.p, args.steps, _seed(args), args.repeats)
    text = "n,seconds\n" + "".join(f"{n},{s:.6f}\n" for n, s in rows)
    _write(text, args.out)
    return EXIT_OK


def cmd_stats(args):
    out = {}
    for path in args.dataset:
        c = _load(path, args.format)
        s = dataset_stats(c)
        out[c.name] = {
            "graphs": s.graph_count,
            "mean_nodes": round(s.mean_nodes, 4),
            "mean_edges": round(s.mean_edges, 4),
            "classes": s.class_count,
        }
        print(f"{c.name}: graphs={s.graph_count} nodes={s.mean_nodes:.2f} edges={s.mean_edges:.2f} classes={s.class_count}")
    if args.out:
        _write(json.dumps(out, indent=2) + "\n", args.out)
    return EXIT_OK


def _common(p, needs_dataset=True):
    p.add_argument("--dataset", action="append", required=needs_dataset, default=None, help="dataset directory (TU) or JSON file (native); repeatable")
    p.add_argument("--format", choices=("tu", "native"), default="tu")
    p.add_argument("--functions", default="default", help="comma separated function ids, or 'default'")
    p.add_argument("--atom-table", default=None, help="element symbols indexed by node label id, e.g. C,N,O")
    p.add_argument("--direction", choices=("sublevel", "superlevel", "both"), default="sublevel")
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--fit", choices=("linear", "quadratic"), default="linear")
    p.add_argument("--quantity", choices=("counts", "betti"), default="counts")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=0, help="worker processes (0 = logical cores)")
    p.add_argument("--out", default=None)


def build_parser():
    ap = argparse.ArgumentParser(prog="toper", description="TopER graph embeddings and evaluation")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("embed", help="write the embedding CSV")
    _common(p)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("classify", help="10-fold MLP accuracy")
    _common(p, needs_dataset=False)
    p.add_argument("--embeddings", default=None, help="precomputed embedding CSV instead of --dataset")
    p.add_argument("--hyper", default="table", help="table, grid, or a JSON file of per-dataset hyperparameter rows")
    p.add_argument("--selection", choices=("both", "ttest", "lasso", "none"), default="both")
    p.add_argument("--folds", type=int, default=10)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("cluster", help="silhouette, Calinski-Harabasz and Davies-Bouldin scores")
    _common(p)
    p.add_argument("--label-by", choices=("class", "dataset"), default="class")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("viz", help="SVG scatter of pivot vs growth")
    _common(p)
    p.add_argument("--axes", default=None, help="spec name (e.g. closeness.sublevel) or function id to plot")
    p.add_argument("--title", default=None)
    p.set_defaults(func=cmd_viz)

    p = sub.add_parser("bench", help="TopER run time on generated power-law graphs")
    p.add_argument("--n", default="10000,30000,100000")
    p.add_argument("--m", type=int, default=15)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("stats", help="graph count and mean sizes")
    p.add_argument("--dataset", action="append", required=True)
    p.add_argument("--format", choices=("tu", "native"), default="tu")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_stats)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        if args.command == "classify" and not args.embeddings and not args.dataset:
            raise UsageError("classify needs --dataset or --embeddings")
        return args.func(args)
    except UsageError as exc:
        print(f"toper: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvalidParam as exc:
        print(f"toper: invalid parameter: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"toper: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except MetricUndefined as exc:
        print(f"toper: metric undefined: {exc}", file=sys.stderr)
        return EXIT_METRIC
    except (ToperError, ValueError, OSError) as exc:
        print(f"toper: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
