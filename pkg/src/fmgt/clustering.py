"""k-means variants, Gaussian mixtures and the two-level mixture used for eigenvector centrality."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.special import logsumexp

from .graph import _as_rng


@dataclass(frozen=True, eq=False)
class ClusterAssignment:
    labels: np.ndarray
    centers: np.ndarray
    cost: float
    history: tuple = field(default=(), repr=False)


def _sqdist(x, c):
    return np.maximum((x * x).sum(1)[:, None] - 2 * x @ c.T + (c * c).sum(1)[None, :], 0.0)


def assignment_cost(points, labels, centers, weights=None) -> float:
    x = np.asarray(points, dtype=float)
    w = np.ones(len(x)) if weights is None else np.asarray(weights, dtype=float)
    diff = x - centers[labels]
    return float(np.sum(w * np.einsum("nd,nd->n", diff, diff)))


def _check(points, k, weights):
    x = np.asarray(points, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if k < 1 or k > len(x):
        raise ValueError(f"need 1 <= k <= #points, got k={k} with {len(x)} points")
    w = np.ones(len(x)) if weights is None else np.asarray(weights, dtype=float)
    if w.shape != (len(x),) or np.any(w < 0) or not np.all(np.isfinite(w)):
        raise ValueError("weights must be one finite non-negative value per point")
    return x, w


def _plusplus(x, w, k, rng):
    n = len(x)
    p = w / w.sum() if w.sum() > 0 else np.full(n, 1.0 / n)
    centers = [x[rng.choice(n, p=p)]]
    d2 = _sqdist(x, np.array(centers))[:, 0]
    for _ in range(1, k):
        score = w * d2
        tot = score.sum()
        idx = rng.choice(n, p=score / tot) if tot > 0 else rng.integers(n)
        centers.append(x[idx])
        d2 = np.minimum(d2, _sqdist(x, x[idx:idx + 1])[:, 0])
    return np.array(centers)


def _update_centers(x, w, labels, centers):
    new = centers.copy()
    for j in range(len(centers)):
        sel = labels == j
        ws = w[sel].sum()
        if ws > 0:
            new[j] = (w[sel, None] * x[sel]).sum(0) / ws
    return new


def _lloyd(x, w, centers, assign, max_iter, tol):
    labels = assign(centers)
    history = [assignment_cost(x, labels, centers, w)]
    for _ in range(max_iter):
        centers = _update_centers(x, w, labels, centers)
        new_labels = assign(centers)
        history.append(assignment_cost(x, new_labels, centers, w))
        if np.array_equal(new_labels, labels) or history[-2] - history[-1] <= tol * max(history[-2], 1e-300):
            labels = new_labels
            break
        labels = new_labels
    # final centers are the means of the final labels
    centers = _update_centers(x, w, labels, centers)
    history.append(assignment_cost(x, labels, centers, w))
    return labels, centers, history


def kmeans(points, k: int, weights=None, rng=None, *, n_init: int = 10, max_iter: int = 300,
           tol: float = 0.0) -> ClusterAssignment:
    """Weighted Lloyd iterations from k-means++ seeds; the cheapest of ``n_init`` restarts wins."""
    x, w = _check(points, k, weights)
    rng = _as_rng(rng)

    def assign(c):
        return np.argmin(_sqdist(x, c), axis=1)

    best = None
    for _ in range(n_init):
        labels, centers, hist = _lloyd(x, w, _plusplus(x, w, k, rng), assign, max_iter, tol)
        if best is None or hist[-1] < best.cost:
            best = ClusterAssignment(labels, centers, hist[-1], tuple(hist))
    return best


def capacitated_assign(x, centers, tau: int) -> np.ndarray:
    """Minimum-cost assignment with at most ``tau`` points per center."""
    n, k = len(x), len(centers)
    if k * tau < n:
        raise ValueError(f"capacity {tau} x {k} clusters cannot hold {n} points")
    slots = min(tau, n)
    cost = np.repeat(_sqdist(x, centers), slots, axis=1)
    rows, cols = linear_sum_assignment(cost)
    labels = np.empty(n, dtype=np.int64)
    labels[rows] = cols // slots
    return labels


def constrained_kmeans(points, k: int, tau: int, rng=None, *, n_init: int = 10,
                       max_iter: int = 100) -> ClusterAssignment:
    """k-means where every cluster holds at most ``tau`` points."""
    x, w = _check(points, k, None)
    if k * tau < len(x):
        raise ValueError(f"infeasible capacity: {k} clusters x tau={tau} < {len(x)} points")
    rng = _as_rng(rng)

    def assign(c):
        return capacitated_assign(x, c, tau)

    best = None
    for _ in range(n_init):
        labels, centers, hist = _lloyd(x, w, _plusplus(x, w, k, rng), assign, max_iter, 0.0)
        if best is None or hist[-1] < best.cost:
            best = ClusterAssignment(labels, centers, hist[-1], tuple(hist))
    return best


@dataclass(frozen=True, eq=False)
class GmmModel:
    pi: np.ndarray
    mu: np.ndarray
    sigma: np.ndarray
    loglik: float
    history: tuple = field(default=(), repr=False)

    @property
    def components(self):
        return list(zip(self.pi, self.mu, self.sigma))

    def _log_joint(self, x):
        x = np.asarray(x, dtype=float)
        k, d = self.mu.shape
        out = np.empty((len(x), k))
        for c in range(k):
            chol = np.linalg.cholesky(self.sigma[c])
            z = np.linalg.solve(chol, (x - self.mu[c]).T)
            logdet = 2 * np.log(np.diag(chol)).sum()
            out[:, c] = np.log(self.pi[c]) - 0.5 * (d * np.log(2 * np.pi) + logdet + (z * z).sum(0))
        return out

    def responsibilities(self, x) -> np.ndarray:
        lj = self._log_joint(x)
        return np.exp(lj - logsumexp(lj, axis=1, keepdims=True))

    def predict(self, x) -> np.ndarray:
        return np.argmax(self._log_joint(x), axis=1)


def _reg(x):
    d = x.shape[1]
    tr = np.trace(np.atleast_2d(np.cov(x.T, bias=True))) if len(x) > 1 else 0.0
    return max(1e-6 * tr / d, 1e-10)


def gmm_fit(points, k: int, rng=None, *, max_iter: int = 200, tol: float = 1e-6) -> GmmModel:
    """Full-covariance EM from a k-means start; covariances get a small ridge."""
    x = np.asarray(points, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if k < 1:
        raise ValueError("k must be >= 1")
    n, d = x.shape
    if n == 0:
        raise ValueError("no points")
    rng = _as_rng(rng)
    reg = _reg(x)
    eye = np.eye(d)
    if k <= n:
        km = kmeans(x, k, rng=rng, n_init=1)
        resp = np.eye(k)[km.labels]
    else:
        resp = rng.dirichlet(np.ones(k), size=n)
    model = None
    history = []
    for _ in range(max_iter):
        nk = resp.sum(0) + 1e-12
        pi = nk / nk.sum()
        mu = (resp.T @ x) / nk[:, None]
        sigma = np.empty((k, d, d))
        for c in range(k):
            diff = x - mu[c]
            sigma[c] = (resp[:, c, None] * diff).T @ diff / nk[c] + reg * eye
            sigma[c] = (sigma[c] + sigma[c].T) / 2
        model = GmmModel(pi, mu, sigma, 0.0)
        lj = model._log_joint(x)
        norm = logsumexp(lj, axis=1, keepdims=True)
        history.append(float(norm.sum()))
        resp = np.exp(lj - norm)
        if len(history) > 1 and abs(history[-1] - history[-2]) < tol:
            break
    return GmmModel(model.pi, model.mu, model.sigma, history[-1], tuple(history))


def hierarchical_leaves(points, rng=None):
    """Two-level mixture: k=3 at the root, then k=3 inside each hard-assigned child.

    Returns ``(weight, mu)`` per leaf with weight = pi_leaf * pi_parent. A child
    with fewer than 3 points becomes a single leaf.
    """
    x = np.asarray(points, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    rng = _as_rng(rng)
    if len(x) < 3:
        return [(1.0, x.mean(0))]
    root = gmm_fit(x, 3, rng)
    labels = root.predict(x)
    leaves = []
    for c in range(3):
        sub = x[labels == c]
        if len(sub) < 3:
            mu = sub.mean(0) if len(sub) else root.mu[c]
            leaves.append((float(root.pi[c]), mu))
            continue
        child = gmm_fit(sub, 3, rng)
        leaves += [(float(root.pi[c] * p), m) for p, m in zip(child.pi, child.mu)]
    return leaves


def hierarchical_gmm_dominant(points, rng=None) -> np.ndarray:
    leaves = hierarchical_leaves(points, rng)
    return np.asarray(max(leaves, key=lambda t: t[0])[1])
