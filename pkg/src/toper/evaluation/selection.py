"""Feature selection: Welch t-test filter and cross-validated Lasso."""

from __future__ import annotations

import numpy as np
from scipy import stats

from ..errors import InvalidParam


def welch_t_test(a, b):
    """Two-sided Welch test per column; returns ``(t, dof, p)`` arrays."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim == 1:
        a, b = a[:, None], b[:, None]
    n1, n2 = len(a), len(b)
    if n1 < 2 or n2 < 2:
        raise InvalidParam("each group needs at least 2 samples")
    v1 = a.var(axis=0, ddof=1) / n1
    v2 = b.var(axis=0, ddof=1) / n2
    diff = a.mean(axis=0) - b.mean(axis=0)
    se2 = v1 + v2
    with np.errstate(divide="ignore", invalid="ignore"):
        t = diff / np.sqrt(se2)
        dof = se2**2 / (v1**2 / (n1 - 1) + v2**2 / (n2 - 1))
    p = np.ones_like(t)
    zero = se2 == 0
    # zero spread on both sides: identical means carry no evidence, distinct ones are certain
    p[zero] = np.where(diff[zero] == 0, 1.0, 0.0)
    t[zero & (diff == 0)] = 0.0
    ok = ~zero
    p[ok] = 2.0 * stats.t.sf(np.abs(t[ok]), dof[ok])
    return t, dof, p


def t_test_filter(X, y, alpha: float = 0.05) -> np.ndarray:
    """Keep columns whose Welch p-value is below ``alpha``.

    With more than two classes each class is tested against the rest and a
    column is kept if any of those tests passes.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    classes = np.unique(y)
    if len(classes) < 2:
        raise InvalidParam("t-test needs at least two classes")
    pairs = [(classes[0], classes[1])] if len(classes) == 2 else [(c, None) for c in classes]
    keep = np.zeros(X.shape[1], dtype=bool)
    for c, other in pairs:
        inside = y == c
        outside = (y == other) if other is not None else ~inside
        _, _, p = welch_t_test(X[inside], X[outside])
        keep |= p < alpha
    return keep


def soft_threshold(x, t):
    return np.sign(x) * max(abs(x) - t, 0.0)


def lasso_coordinate_descent(X, y, lam: float, w0=None, tol: float = 1e-7, max_sweeps: int = 10_000):
    """Minimise ``(1/2N)||y - Xw||^2 + lam ||w||_1`` by cyclic coordinate descent.

    Stops when a full sweep changes no coefficient by more than ``tol``.
    There is no intercept; center the data beforehand if one is wanted.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n, d = X.shape
    w0 = np.zeros(d) if w0 is None else np.asarray(w0, dtype=np.float64)
    # covariance form: q tracks G @ w so a coordinate that stays put costs O(1)
    G = X.T @ X / n
    Gl = G.tolist()
    c = (X.T @ y / n).tolist()
    diag = np.diag(G).tolist()
    q = (G @ w0).tolist()
    w = w0.tolist()
    for _ in range(max_sweeps):
        delta = 0.0
        for j in range(d):
            gjj = diag[j]
            old = w[j]
            if gjj == 0.0:
                new = 0.0
            else:
                rho = c[j] - q[j] + gjj * old
                new = max(abs(rho) - lam, 0.0) / gjj
                if rho < 0:
                    new = -new
            if new != old:
                step = new - old
                row = Gl[j]
                for i in range(d):
                    q[i] += row[i] * step
                w[j] = new
                delta = max(delta, abs(step))
        if delta <= tol:
            break
    return np.array(w)


def default_lambda_grid():
    return np.logspace(-4, 1, 20)


def _kfold(n, k, rng):
    idx = rng.permutation(n)
    return np.array_split(idx, k)


def lasso_cv_path(X, y, lambda_grid=None, cv: int = 10, seed: int = 0):
    """Mean held-out MSE for each lambda (grid order preserved)."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    grid = default_lambda_grid() if lambda_grid is None else np.asarray(lambda_grid, dtype=np.float64)
    k = min(cv, len(y))
    folds = _kfold(len(y), k, np.random.default_rng(seed))
    # sweep from large to small lambda so each fit warm-starts from a sparser one
    order = np.argsort(grid)[::-1]
    mse = np.zeros(len(grid))
    for test in folds:
        train = np.setdiff1d(np.arange(len(y)), test)
        xm = X[train].mean(axis=0)
        ym = y[train].mean()
        Xtr, ytr = X[train] - xm, y[train] - ym
        Xte, yte = X[test] - xm, y[test] - ym
        w = None
        for i in order:
            w = lasso_coordinate_descent(Xtr, ytr, grid[i], w0=w)
            mse[i] += np.mean((yte - Xte @ w) ** 2) / len(folds)
    return grid, mse


def lasso_select(X, y, lambda_grid=None, cv: int = 10, seed: int = 0, return_details: bool = False):
    """Columns with non-zero Lasso coefficient at the CV-chosen lambda.

    Class ids serve directly as the numeric response. Ties in CV error go
    to the larger lambda.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    grid, mse = lasso_cv_path(X, y, lambda_grid, cv, seed)
    best = min(range(len(grid)), key=lambda i: (mse[i], -grid[i]))
    lam = float(grid[best])
    w = lasso_coordinate_descent(X - X.mean(axis=0), y - y.mean(), lam)
    mask = np.abs(w) > 1e-10
    if return_details:
        return mask, {"lambda": lam, "coef": w, "grid": grid, "cv_mse": mse}
    return mask
