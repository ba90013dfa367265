"""Single-hidden-layer MLP classifier trained with full-batch Adam.

Architecture: affine -> optional batch norm -> activation -> dropout ->
affine -> log-softmax, trained on the mean negative log-likelihood.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
from scipy.special import erf, log_softmax

from ..errors import InvalidParam, TrainingDiverged

HIDDEN = (16, 64, 128)
ACTIVATIONS = ("relu", "gelu", "elu")
DROPOUTS = (0.0, 0.5)
DECAYS = (1e-3, 1e-4)
LEARNING_RATES = (0.01, 0.001)

_SQRT2 = np.sqrt(2.0)
_INV_SQRT2PI = 1.0 / np.sqrt(2.0 * np.pi)


@dataclass(frozen=True)
class MlpConfig:
    hidden_neurons: int = 16
    activation: str = "relu"
    dropout: float = 0.0
    batch_norm: bool = False
    weight_decay: float = 1e-3
    learning_rate: float = 0.01
    epochs: int = 500
    seed: int = 0
    # off-grid values are accepted only with strict=False (tests, probes)
    strict: bool = True

    def __post_init__(self):
        if self.activation not in ACTIVATIONS:
            raise InvalidParam(f"activation must be one of {ACTIVATIONS}")
        if self.epochs < 0 or self.hidden_neurons < 1:
            raise InvalidParam("epochs must be >= 0 and hidden_neurons >= 1")
        if not 0.0 <= self.dropout < 1.0:
            raise InvalidParam("dropout must lie in [0, 1)")
        if self.strict:
            if self.hidden_neurons not in HIDDEN:
                raise InvalidParam(f"hidden_neurons must be one of {HIDDEN}")
            if self.dropout not in DROPOUTS:
                raise InvalidParam(f"dropout must be one of {DROPOUTS}")
            if self.weight_decay not in DECAYS:
                raise InvalidParam(f"weight_decay must be one of {DECAYS}")
            if self.learning_rate not in LEARNING_RATES:
                raise InvalidParam(f"learning_rate must be one of {LEARNING_RATES}")

    def to_dict(self):
        d = asdict(self)
        d.pop("strict")
        return d


# Per-dataset settings (neurons, dropout, batch norm, decay, lr, activation).
DATASET_CONFIGS = {
    "BZR": MlpConfig(64, "gelu", 0.5, True, 1e-4, 0.001),
    "COX2": MlpConfig(128, "relu", 0.0, True, 1e-4, 0.01),
    "MUTAG": MlpConfig(16, "gelu", 0.5, False, 1e-3, 0.01),
    "PROTEINS": MlpConfig(64, "elu", 0.5, True, 1e-3, 0.01),
    "IMDB-B": MlpConfig(128, "relu", 0.0, False, 1e-3, 0.001),
    "IMDB-M": MlpConfig(16, "elu", 0.0, False, 1e-3, 0.01),
    "REDDIT-B": MlpConfig(64, "relu", 0.5, False, 1e-3, 0.01),
    "REDDIT-5K": MlpConfig(128, "elu", 0.0, False, 1e-3, 0.01),
}
DATASET_ALIASES = {"IMDB-BINARY": "IMDB-B", "IMDB-MULTI": "IMDB-M", "REDDIT-BINARY": "REDDIT-B", "REDDIT-MULTI-5K": "REDDIT-5K"}


def config_from_row(row: dict, seed: int = 0) -> MlpConfig:
    """Build a config from a per-dataset hyperparameter row.

    Accepts keys ``neurons``, ``dropout``, ``batchnorm``/``batch_norm``,
    ``decay``, ``lr``/``learning_rate`` and ``activation``.
    """
    bn = row.get("batch_norm", row.get("batchnorm", False))
    if isinstance(bn, str):
        bn = bn.strip().lower() in ("true", "1", "yes")
    return MlpConfig(
        hidden_neurons=int(row.get("neurons", row.get("hidden_neurons", 16))),
        activation=str(row.get("activation", "relu")),
        dropout=float(row.get("dropout", 0.0)),
        batch_norm=bool(bn),
        weight_decay=float(row.get("decay", row.get("weight_decay", 1e-3))),
        learning_rate=float(row.get("lr", row.get("learning_rate", 0.01))),
        epochs=int(row.get("epochs", 500)),
        seed=seed,
    )


def table_config(dataset: str, seed: int = 0) -> MlpConfig:
    key = DATASET_ALIASES.get(dataset, dataset)
    try:
        base = DATASET_CONFIGS[key]
    except KeyError:
        raise InvalidParam(f"no table hyperparameters for dataset {dataset!r}") from None
    return MlpConfig(**{**base.to_dict(), "seed": seed})


def full_grid(seed: int = 0):
    return [
        MlpConfig(h, act, dr, bn, wd, lr, seed=seed)
        for h in HIDDEN
        for act in ACTIVATIONS
        for dr in DROPOUTS
        for bn in (False, True)
        for wd in DECAYS
        for lr in LEARNING_RATES
    ]


def _act(name, z):
    if name == "relu":
        return np.maximum(z, 0.0)
    if name == "gelu":
        return z * 0.5 * (1.0 + erf(z / _SQRT2))
    return np.where(z > 0, z, np.expm1(np.minimum(z, 0.0)))


def _act_grad(name, z):
    if name == "relu":
        return (z > 0).astype(z.dtype)
    if name == "gelu":
        return 0.5 * (1.0 + erf(z / _SQRT2)) + z * _INV_SQRT2PI * np.exp(-0.5 * z * z)
    return np.where(z > 0, 1.0, np.exp(np.minimum(z, 0.0)))


class MLP:
    """Parameters and forward/backward passes; see :func:`train_mlp`."""

    bn_eps = 1e-5
    bn_momentum = 0.1

    def __init__(self, n_in: int, n_classes: int, cfg: MlpConfig, rng=None):
        self.cfg = cfg
        self.n_classes = n_classes
        rng = np.random.default_rng(cfg.seed) if rng is None else rng
        self.rng = rng
        h = cfg.hidden_neurons
        b1, b2 = 1.0 / np.sqrt(max(n_in, 1)), 1.0 / np.sqrt(h)
        self.params = {
            "W1": rng.uniform(-b1, b1, (n_in, h)),
            "b1": rng.uniform(-b1, b1, h),
            "W2": rng.uniform(-b2, b2, (h, n_classes)),
            "b2": rng.uniform(-b2, b2, n_classes),
        }
        if cfg.batch_norm:
            self.params["gamma"] = np.ones(h)
            self.params["beta"] = np.zeros(h)
            self.running_mean = np.zeros(h)
            self.running_var = np.ones(h)

    def forward(self, X, train=False, dropout_mask=None):
        p, cfg = self.params, self.cfg
        cache = {"X": X}
        z1 = X @ p["W1"] + p["b1"]
        cache["z1"] = z1
        if cfg.batch_norm:
            if train:
                mu = z1.mean(axis=0)
                var = z1.var(axis=0)
                n = len(z1)
                m = self.bn_momentum
                self.running_mean = (1 - m) * self.running_mean + m * mu
                unbiased = var * n / (n - 1) if n > 1 else var
                self.running_var = (1 - m) * self.running_var + m * unbiased
            else:
                mu, var = self.running_mean, self.running_var
            inv = 1.0 / np.sqrt(var + self.bn_eps)
            zhat = (z1 - mu) * inv
            cache.update(zhat=zhat, inv=inv)
            z = p["gamma"] * zhat + p["beta"]
        else:
            z = z1
        cache["z"] = z
        a = _act(cfg.activation, z)
        if train and cfg.dropout > 0:
            if dropout_mask is None:
                keep = 1.0 - cfg.dropout
                dropout_mask = (self.rng.random(a.shape) < keep) / keep
            a = a * dropout_mask
        cache["mask"] = dropout_mask if train else None
        cache["a"] = a
        logits = a @ p["W2"] + p["b2"]
        return log_softmax(logits, axis=1), cache

    def loss_and_grads(self, X, y, train=True, dropout_mask=None):
        """Mean NLL and its gradient with respect to every parameter."""
        p, cfg = self.params, self.cfg
        logp, c = self.forward(X, train=train, dropout_mask=dropout_mask)
        n = len(X)
        loss = -logp[np.arange(n), y].mean()
        dlogits = np.exp(logp)
        dlogits[np.arange(n), y] -= 1.0
        dlogits /= n
        g = {"W2": c["a"].T @ dlogits, "b2": dlogits.sum(axis=0)}
        da = dlogits @ p["W2"].T
        if c["mask"] is not None:
            da = da * c["mask"]
        dz = da * _act_grad(cfg.activation, c["z"])
        if cfg.batch_norm:
            zhat = c["zhat"]
            g["gamma"] = (dz * zhat).sum(axis=0)
            g["beta"] = dz.sum(axis=0)
            dzhat = dz * p["gamma"]
            if train:
                dz1 = c["inv"] / n * (n * dzhat - dzhat.sum(axis=0) - zhat * (dzhat * zhat).sum(axis=0))
            else:
                dz1 = dzhat * c["inv"]
        else:
            dz1 = dz
        g["W1"] = c["X"].T @ dz1
        g["b1"] = dz1.sum(axis=0)
        return float(loss), g

    def predict_log_proba(self, X):
        return self.forward(np.asarray(X, dtype=np.float64), train=False)[0]

    def predict(self, X):
        # argmax returns the first maximum: ties go to the lowest class id
        return np.argmax(self.predict_log_proba(X), axis=1)

    def score(self, X, y):
        return float(np.mean(self.predict(X) == np.asarray(y)))


def train_mlp(X, y, cfg: MlpConfig, n_classes: int | None = None, history: list | None = None) -> MLP:
    """Full-batch Adam (AdamW-style decoupled weight decay) for ``cfg.epochs`` steps.

    If ``history`` is a list, the training loss of every epoch is appended.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if X.ndim != 2 or len(X) != len(y):
        raise InvalidParam("X must be 2-D with one row per label")
    if len(y) and y.min() < 0:
        raise InvalidParam("labels must be 0..C-1")
    if n_classes is None:
        n_classes = int(y.max()) + 1 if len(y) else 1
    model = MLP(X.shape[1], n_classes, cfg)
    b1, b2, eps = 0.9, 0.999, 1e-8
    lr, wd = cfg.learning_rate, cfg.weight_decay
    m = {k: np.zeros_like(v) for k, v in model.params.items()}
    v = {k: np.zeros_like(v) for k, v in model.params.items()}
    for t in range(1, cfg.epochs + 1):
        loss, grads = model.loss_and_grads(X, y, train=True)
        if not np.isfinite(loss):
            raise TrainingDiverged(f"loss became {loss} at epoch {t}")
        if history is not None:
            history.append(loss)
        c1, c2 = 1 - b1**t, 1 - b2**t
        for k, w in model.params.items():
            gk = grads[k]
            m[k] = b1 * m[k] + (1 - b1) * gk
            v[k] = b2 * v[k] + (1 - b2) * gk * gk
            w *= 1.0 - lr * wd
            w -= lr * (m[k] / c1) / (np.sqrt(v[k] / c2) + eps)
    return model
