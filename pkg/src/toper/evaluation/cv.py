"""Stratified k-fold evaluation of TopER embeddings."""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from ..errors import InvalidParam, StratificationError
from .metrics import clustering_scores
from .mlp import MlpConfig, train_mlp
from .selection import lasso_select, t_test_filter


def stratified_kfold(labels, k: int = 10, seed: int = 0):
    """Split indices into ``k`` folds preserving class proportions.

    Each class is shuffled and its members dealt to the folds in turn,
    continuing where the previous class stopped, so per-class counts and
    overall fold sizes both differ by at most one.
    """
    labels = np.asarray(labels)
    if k < 2:
        raise InvalidParam("k must be >= 2")
    rng = np.random.default_rng(seed)
    classes, counts = np.unique(labels, return_counts=True)
    if np.any(counts < k):
        small = classes[counts < k][0]
        raise StratificationError(f"class {small!r} has fewer than k={k} members")
    order = np.concatenate([rng.permutation(np.flatnonzero(labels == c)) for c in classes])
    fold_of = np.empty(len(labels), dtype=np.int64)
    fold_of[order] = np.arange(len(order)) % k
    return [np.sort(np.flatnonzero(fold_of == f)) for f in range(k)]


def standardize(train_X, test_X=None):
    """Z-score columns with train-set mean and population std.

    Zero-variance columns are passed through unchanged.
    """
    train_X = np.asarray(train_X, dtype=np.float64)
    mu = train_X.mean(axis=0)
    sd = train_X.std(axis=0)
    const = sd == 0
    mu = np.where(const, 0.0, mu)
    sd = np.where(const, 1.0, sd)
    out = (train_X - mu) / sd
    if test_X is None:
        return out
    return out, (np.asarray(test_X, dtype=np.float64) - mu) / sd


def select_features(X, y, alpha: float = 0.05, lasso_cv: int = 10, seed: int = 0, mode: str = "both", groups=None):
    """Feature mask from the t-test filter and/or Lasso.

    ``mode`` is ``both`` (pass the t-test and keep a non-zero Lasso
    coefficient), ``ttest``, ``lasso`` or ``none``. With ``groups`` (one
    group id per column, e.g. the filtration spec it came from) a test is
    passed by a group when any of its columns passes, and whole groups are
    kept or dropped. An empty result falls back to all columns.
    """
    d = X.shape[1]
    if mode == "none":
        return np.ones(d, dtype=bool)
    groups = np.arange(d) if groups is None else np.asarray(groups)

    def lift(col_mask):
        hit = set(groups[col_mask].tolist())
        return np.array([gid in hit for gid in groups.tolist()], dtype=bool)

    mask = np.ones(d, dtype=bool)
    if mode in ("both", "ttest"):
        mask &= lift(t_test_filter(X, y, alpha))
    if mode in ("both", "lasso"):
        mask &= lift(lasso_select(X, y.astype(np.float64), cv=lasso_cv, seed=seed))
    if not mask.any():
        mask = np.ones(d, dtype=bool)
    return mask


@dataclass
class EvalReport:
    fold_accuracies: list
    mean: float
    std: float
    selected_features: list = field(default_factory=list)
    columns: list = field(default_factory=list)
    clustering: dict | None = None
    wall_time: float = 0.0
    configs: list = field(default_factory=list)

    def summary(self) -> str:
        return f"{100 * self.mean:.2f}±{100 * self.std:.2f}"

    def to_dict(self):
        return asdict(self)

    def to_json(self, path=None, **kw):
        text = json.dumps(self.to_dict(), indent=2, **kw)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


def _pick_config(X, y, grid, n_classes, seed, inner_k=3):
    """Grid search on the training fold only, by inner stratified CV accuracy."""
    _, counts = np.unique(y, return_counts=True)
    k = int(min(inner_k, counts.min()))
    if k < 2 or len(grid) == 1:
        return grid[0]
    folds = stratified_kfold(y, k, seed)
    best, best_acc = grid[0], -1.0
    for cfg in grid:
        accs = []
        for f in folds:
            tr = np.setdiff1d(np.arange(len(y)), f)
            Xtr, Xva = standardize(X[tr], X[f])
            m = train_mlp(Xtr, y[tr], cfg, n_classes)
            accs.append(m.score(Xva, y[f]))
        acc = float(np.mean(accs))
        if acc > best_acc:
            best, best_acc = cfg, acc
    return best


def _run_fold(args):
    i, train, test, X, y, grid, n_classes, seed, alpha, lasso_cv, selection, groups = args
    Xtr, Xte = standardize(X[train], X[test])
    mask = select_features(Xtr, y[train], alpha, lasso_cv, seed + i, selection, groups)
    chosen = _pick_config(Xtr[:, mask], y[train], grid, n_classes, seed + i)
    chosen = MlpConfig(**{**chosen.to_dict(), "seed": chosen.seed + i})
    model = train_mlp(Xtr[:, mask], y[train], chosen, n_classes)
    return model.score(Xte[:, mask], y[test]), mask.tolist(), chosen.to_dict()


def cross_validate(
    embeddings,
    cfg=None,
    seed: int = 0,
    k: int = 10,
    selection: str = "both",
    alpha: float = 0.05,
    lasso_cv: int = 10,
    labels=None,
    groups="spec",
    workers: int = 1,
) -> EvalReport:
    """k-fold accuracy of the MLP on an embedding matrix.

    ``cfg`` is one :class:`MlpConfig` (fixed hyperparameters) or a list of
    them (selected per fold on the training part). Each fold is
    standardized with training statistics, feature-selected on the
    training part, trained on it and scored on the held-out part.
    ``groups="spec"`` selects whole filtration functions (columns sharing
    a spec prefix); ``None`` selects single columns. With ``workers > 1``
    folds run in separate processes; results do not depend on it.
    """
    t0 = time.perf_counter()
    X = np.asarray(getattr(embeddings, "values", embeddings), dtype=np.float64)
    y = np.asarray(getattr(embeddings, "labels", labels) if labels is None else labels, dtype=np.int64)
    columns = list(getattr(embeddings, "columns", [f"f{j}" for j in range(X.shape[1])]))
    if selection not in ("both", "ttest", "lasso", "none"):
        raise InvalidParam(f"unknown selection mode {selection!r}")
    n_classes = int(y.max()) + 1
    if isinstance(groups, str) and groups == "spec":
        groups = [c.rsplit(".", 1)[0] for c in columns]
    grid = [cfg or MlpConfig(seed=seed)] if not isinstance(cfg, (list, tuple)) else list(cfg)
    folds = stratified_kfold(y, k, seed)
    jobs = [
        (i, np.setdiff1d(np.arange(len(y)), test), test, X, y, grid, n_classes, seed, alpha, lasso_cv, selection, groups)
        for i, test in enumerate(folds)
    ]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_run_fold, jobs))
    else:
        results = [_run_fold(j) for j in jobs]
    accs = np.array([r[0] for r in results])
    return EvalReport(
        fold_accuracies=accs.tolist(),
        mean=float(accs.mean()),
        std=float(accs.std()),
        selected_features=[r[1] for r in results],
        columns=columns,
        wall_time=time.perf_counter() - t0,
        configs=[r[2] for r in results],
    )


def cluster_report(embeddings, labels=None) -> dict:
    X = np.asarray(getattr(embeddings, "values", embeddings), dtype=np.float64)
    y = np.asarray(getattr(embeddings, "labels", labels) if labels is None else labels)
    return clustering_scores(X, y)
