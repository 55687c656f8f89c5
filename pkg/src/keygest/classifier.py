"""One-vs-rest linear SVMs on the hinge loss, trained by dual coordinate descent."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

DEFAULT_C = 1.0
DEFAULT_EPOCHS = 200


@dataclass(frozen=True, eq=False)
class LinearModel:
    """``weights[k]`` and ``bias[k]`` score class ``k``; ``classes[k]`` names it."""

    weights: np.ndarray
    bias: np.ndarray
    classes: tuple
    objective_history: list = field(default_factory=list, repr=False, compare=False)

    @property
    def dim(self) -> int:
        return self.weights.shape[1]

    @property
    def n_classes(self) -> int:
        return self.weights.shape[0]

    def scores(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.shape[-1] != self.dim:
            raise ValueError(f"feature dim {x.shape[-1]} does not match model dim {self.dim}")
        return x @ self.weights.T + self.bias

    def predict(self, x):
        """Class id (or ids, for a 2-D input); ties go to the lowest id."""
        s = self.scores(x)
        return np.argmax(s, axis=-1) if s.ndim > 1 else int(np.argmax(s))


def hinge_objective(w, b, x, y, c) -> float:
    margins = 1.0 - y * (x @ w + b)
    return 0.5 * float(w @ w) + c * float(np.maximum(margins, 0.0).sum())


def _objectives(weights, bias, x, signs, c) -> np.ndarray:
    """Hinge objective of every one-vs-rest problem; ``signs`` is (n, classes) of +-1."""
    margins = 1.0 - signs * (x @ weights.T + bias)
    return 0.5 * np.einsum("kd,kd->k", weights, weights) + c * np.maximum(margins, 0.0).sum(axis=0)


def _line_search(u, v, z0, z1, signs, c) -> float:
    """Minimize the objective over ``w0 + t (w1 - w0)``, t in [0, 1], exactly.

    ``u``, ``v`` are the regularized parts of ``w0`` and ``w1 - w0``; ``z0``,
    ``z1`` the scores of both end points. The objective is convex and
    piecewise quadratic in t, so its minimum is at a breakpoint, an end point
    or a segment's stationary point. Ties go to the larger step.
    """
    a = 1.0 - signs * z0
    b = signs * (z1 - z0)
    with np.errstate(divide="ignore", invalid="ignore"):
        kinks = np.where(b != 0.0, a / b, np.nan)
    kinks = np.unique(kinks[(kinks > 0.0) & (kinks < 1.0)])
    edges = np.concatenate([[0.0], kinks, [1.0]])
    uv, vv = float(u @ v), float(v @ v)
    cand = [edges]
    if vv > 0:
        mids = (edges[:-1] + edges[1:]) / 2
        active = (a[None, :] - mids[:, None] * b[None, :]) > 0
        stat = (c * (active * b[None, :]).sum(axis=1) - uv) / vv
        cand.append(np.clip(stat, edges[:-1], edges[1:]))
    t = np.concatenate(cand)
    f = 0.5 * (2 * t * uv + t * t * vv) + c * np.maximum(a[None, :] - t[:, None] * b[None, :], 0.0).sum(axis=1)
    best = np.flatnonzero(f <= f.min())
    return float(t[best].max())


def train_svm(features, labels, c: float = DEFAULT_C, epochs: int = DEFAULT_EPOCHS, seed: int = 0,
              classes=None, tol: float = 1e-6) -> LinearModel:
    """Train one ``+1 class / -1 rest`` linear SVM per class.

    Each problem minimizes ``0.5 |w|^2 + c * sum(hinge)`` by dual coordinate
    descent: every epoch sweeps the samples once, in an order shuffled once
    from ``seed``, taking an exact clipped step on each sample's dual
    variable. Features are centered internally and the dual runs with the
    bias as the weight of a constant unit feature. The dual iterate's primal
    objective can oscillate, so a separate primal iterate moves toward it
    after every epoch by an exact line search; that iterate is returned and
    its objective never increases. Stops early once the projected-gradient
    gap drops below ``tol``. ``objective_history[k]`` is the primal
    objective of class ``k`` after each epoch.
    """
    x = np.asarray(features, dtype=np.float64)
    y = np.asarray(labels, dtype=np.int64)
    if x.ndim != 2:
        raise ValueError("features must be a 2-D array")
    if len(x) != len(y):
        raise ValueError(f"{len(x)} feature rows but {len(y)} labels")
    if c <= 0 or epochs < 1:
        raise ValueError("need c > 0 and epochs >= 1")
    if len(np.unique(y)) < 2:
        raise ValueError("need at least two classes to train")
    n_classes = int(y.max()) + 1 if classes is None else len(classes)
    if y.min() < 0 or y.max() >= n_classes:
        raise ValueError(f"labels must lie in 0..{n_classes - 1}")
    if classes is None:
        classes = tuple(str(k) for k in range(n_classes))

    m, dim = x.shape
    perm = np.random.default_rng(seed).permutation(m)
    x, y = x[perm], y[perm]
    mu = x.mean(axis=0)
    xa = np.hstack([x - mu, np.ones((m, 1))])
    q = np.einsum("ij,ij->i", xa, xa)
    signs = np.where(y[:, None] == np.arange(n_classes)[None, :], 1.0, -1.0)
    alpha = np.zeros((n_classes, m))
    w = np.zeros((n_classes, dim + 1))
    xc = x - mu
    wp = np.zeros((n_classes, dim))  # primal iterate, raw bias in bp
    bp = np.zeros(n_classes)
    history = []
    for _ in range(epochs):
        pg_max = np.full(n_classes, -np.inf)
        pg_min = np.full(n_classes, np.inf)
        for i in range(m):
            s = signs[i]
            g = s * (w @ xa[i]) - 1.0
            a = alpha[:, i]
            pg = np.where(a <= 0.0, np.minimum(g, 0.0), np.where(a >= c, np.maximum(g, 0.0), g))
            pg_max = np.maximum(pg_max, pg)
            pg_min = np.minimum(pg_min, pg)
            new = np.clip(a - g / q[i], 0.0, c)
            step = np.where(pg != 0.0, new - a, 0.0)
            alpha[:, i] = a + step
            w += (step * s)[:, None] * xa[i]
        z0 = xc @ wp.T + bp
        z1 = xc @ w[:, :dim].T + w[:, dim]
        for k in range(n_classes):
            t = _line_search(wp[k], w[k, :dim] - wp[k], z0[:, k], z1[:, k], signs[:, k], c)
            wp[k] += t * (w[k, :dim] - wp[k])
            bp[k] += t * (w[k, dim] - bp[k])
        history.append(_objectives(wp, bp, xc, signs, c))
        if np.all(pg_max - pg_min < tol):
            break
    weights = wp
    bias = bp - weights @ mu
    absent = ~np.isin(np.arange(n_classes), y)
    # classes without samples are never predicted
    weights[absent] = 0.0
    bias[absent] = np.finfo(np.float64).min
    return LinearModel(weights, bias, tuple(classes), [list(h) for h in np.array(history).T])


def predict(model: LinearModel, feature) -> int:
    return model.predict(feature)
