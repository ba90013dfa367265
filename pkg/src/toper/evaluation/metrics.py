"""Internal cluster-quality indices with Euclidean geometry."""

import numpy as np
from scipy.spatial.distance import cdist

from ..errors import MetricUndefined


def _prepare(X, labels):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    labels = np.asarray(labels)
    if len(X) != len(labels):
        raise MetricUndefined("X and labels differ in length")
    classes, inv = np.unique(labels, return_inverse=True)
    if len(classes) < 2:
        raise MetricUndefined("need at least two clusters")
    return X, inv, len(classes)


def silhouette(X, labels) -> float:
    """Mean silhouette width; singleton clusters and 0/0 contribute 0."""
    X, inv, k = _prepare(X, labels)
    D = cdist(X, X)
    sizes = np.bincount(inv, minlength=k)
    sums = np.zeros((len(X), k))
    np.add.at(sums.T, inv, D)  # sums[i, c] = total distance from i to cluster c
    own = sizes[inv]
    a = np.where(own > 1, sums[np.arange(len(X)), inv] / np.maximum(own - 1, 1), 0.0)
    means = sums / sizes
    means[np.arange(len(X)), inv] = np.inf
    b = means.min(axis=1)
    denom = np.maximum(a, b)
    s = np.zeros(len(X))
    ok = (own > 1) & (denom > 0)
    s[ok] = (b[ok] - a[ok]) / denom[ok]
    return float(s.mean())


def calinski_harabasz(X, labels) -> float:
    X, inv, k = _prepare(X, labels)
    n = len(X)
    if n == k:
        raise MetricUndefined("Calinski-Harabasz needs more samples than clusters")
    centre = X.mean(axis=0)
    sizes = np.bincount(inv, minlength=k)
    cents = np.zeros((k, X.shape[1]))
    np.add.at(cents, inv, X)
    cents /= sizes[:, None]
    between = float((sizes * ((cents - centre) ** 2).sum(axis=1)).sum())
    within = float(((X - cents[inv]) ** 2).sum())
    if within == 0.0:
        raise MetricUndefined("zero within-cluster dispersion")
    return between * (n - k) / (within * (k - 1))


def davies_bouldin(X, labels) -> float:
    X, inv, k = _prepare(X, labels)
    sizes = np.bincount(inv, minlength=k)
    cents = np.zeros((k, X.shape[1]))
    np.add.at(cents, inv, X)
    cents /= sizes[:, None]
    scatter = np.bincount(inv, weights=np.linalg.norm(X - cents[inv], axis=1), minlength=k) / sizes
    sep = cdist(cents, cents)
    off = ~np.eye(k, dtype=bool)
    if np.any(sep[off] == 0):
        raise MetricUndefined("two cluster centroids coincide")
    ratio = np.full((k, k), -np.inf)
    ratio[off] = ((scatter[:, None] + scatter[None, :]) / np.where(off, sep, 1.0))[off]
    return float(ratio.max(axis=1).mean())


def clustering_scores(X, labels) -> dict:
    return {
        "silhouette": silhouette(X, labels),
        "calinski_harabasz": calinski_harabasz(X, labels),
        "davies_bouldin": davies_bouldin(X, labels),
    }
