"""Two-dimensional Gaussian mixtures fitted by expectation-maximization.

Constellation points are treated as (I, Q) vectors. Means are seeded
k-means++ style, covariance eigenvalues are floored to keep components from
collapsing onto noiseless points, and a component that loses all its
responsibility is re-seeded at the point farthest from every current mean.
The per-iteration log-likelihood trace is returned so callers can check EM's
monotonicity; BIC scoring uses 6L-1 free parameters per L-component model
(L-1 weights, 2L means, 3L covariance entries).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .rng import as_rng

__all__ = ["GmmParams", "GmmFit", "fit_em", "bic_score", "responsibilities", "as_points"]

_LOG_2PI = math.log(2.0 * math.pi)


@dataclass
class GmmParams:
    weights: np.ndarray       # (L,)
    means: np.ndarray         # (L, 2)
    covariances: np.ndarray   # (L, 2, 2), SPD

    @property
    def n_components(self) -> int:
        return self.weights.size


@dataclass
class GmmFit:
    params: GmmParams
    log_likelihood: float
    trace: list = field(default_factory=list)   # per-iteration log-likelihood
    n_iter: int = 0
    converged: bool = False
    reseeds: list = field(default_factory=list)  # iterations where a dead component was re-seeded


def as_points(points) -> np.ndarray:
    """Complex vector or (n, 2) real array -> (n, 2) float64 array."""
    arr = np.asarray(points)
    if np.iscomplexobj(arr):
        if arr.ndim != 1:
            raise ValueError("complex input must be 1-D")
        return np.column_stack([arr.real, arr.imag]).astype(np.float64)
    if arr.ndim == 2 and arr.shape[1] == 2:
        return arr.astype(np.float64)
    raise ValueError(f"expected complex vector or (n, 2) array, got shape {arr.shape}")


def _log_gaussian(x: np.ndarray, params: GmmParams) -> np.ndarray:
    """Per-point, per-component Gaussian log density, shape (n, L)."""
    cov = params.covariances
    a, b, c = cov[:, 0, 0], cov[:, 0, 1], cov[:, 1, 1]
    det = a * c - b * b
    dx = x[:, 0, None] - params.means[None, :, 0]
    dy = x[:, 1, None] - params.means[None, :, 1]
    quad = (c * dx * dx - 2.0 * b * dx * dy + a * dy * dy) / det
    return -_LOG_2PI - 0.5 * np.log(det) - 0.5 * quad


def _e_step(x: np.ndarray, params: GmmParams):
    joint = _log_gaussian(x, params) + np.log(params.weights)[None, :]
    peak = joint.max(axis=1, keepdims=True)
    log_norm = peak + np.log(np.exp(joint - peak).sum(axis=1, keepdims=True))
    resp = np.exp(joint - log_norm)
    return float(log_norm.sum()), resp


def _floor_covariances(cov: np.ndarray, floor: float) -> np.ndarray:
    """Clamp both eigenvalues of each symmetric 2x2 matrix at `floor`."""
    a, b, c = cov[:, 0, 0], cov[:, 0, 1], cov[:, 1, 1]
    half_tr = 0.5 * (a + c)
    disc = np.sqrt((0.5 * (a - c)) ** 2 + b * b)
    lam1 = np.maximum(half_tr + disc, floor)
    lam2 = np.maximum(half_tr - disc, floor)
    # unit eigenvector for the larger eigenvalue; falls back to the dominant
    # axis when the off-diagonal vanishes
    vx, vy = b, half_tr + disc - a
    norm = np.hypot(vx, vy)
    degenerate = norm < 1e-12 * np.maximum(1.0, np.abs(half_tr + disc))
    vx = np.where(degenerate, np.where(a >= c, 1.0, 0.0), vx)
    vy = np.where(degenerate, np.where(a >= c, 0.0, 1.0), vy)
    norm = np.hypot(vx, vy)
    vx, vy = vx / norm, vy / norm
    out = np.empty_like(cov)
    out[:, 0, 0] = lam1 * vx * vx + lam2 * vy * vy
    out[:, 1, 1] = lam1 * vy * vy + lam2 * vx * vx
    out[:, 0, 1] = out[:, 1, 0] = (lam1 - lam2) * vx * vy
    return out


def _kmeanspp_means(x: np.ndarray, n_components: int, rng) -> np.ndarray:
    n = x.shape[0]
    means = np.empty((n_components, 2))
    means[0] = x[rng.integers(n)]
    d2 = ((x - means[0]) ** 2).sum(axis=1)
    for l in range(1, n_components):
        total = d2.sum()
        if total <= 0.0:
            idx = int(rng.integers(n))
        else:
            idx = int(rng.choice(n, p=d2 / total))
        means[l] = x[idx]
        d2 = np.minimum(d2, ((x - means[l]) ** 2).sum(axis=1))
    return means


def _global_covariance(x: np.ndarray, floor: float) -> np.ndarray:
    centered = x - x.mean(axis=0)
    cov = centered.T @ centered / max(1, x.shape[0])
    return _floor_covariances(cov[None], floor)[0]


def fit_em(points, n_components: int, seed=0, tol: float = 1e-6,
           max_iter: int = 200, covariance_floor: float = 1e-6) -> GmmFit:
    """Fit an `n_components` mixture to 2-D points by EM.

    Stops when the log-likelihood gain drops below `tol` or after `max_iter`
    iterations; the returned log-likelihood always matches the returned
    parameters.
    """
    x = as_points(points)
    n = x.shape[0]
    if n < n_components:
        raise ValueError(f"need at least {n_components} points, got {n}")
    rng = as_rng(seed)

    base_cov = _global_covariance(x, covariance_floor)
    params = GmmParams(
        weights=np.full(n_components, 1.0 / n_components),
        means=_kmeanspp_means(x, n_components, rng),
        covariances=np.repeat(base_cov[None], n_components, axis=0),
    )

    fit = GmmFit(params=params, log_likelihood=-np.inf)
    prev = -np.inf
    prev_was_reseed = False
    for it in range(max_iter):
        ll, resp = _e_step(x, params)
        fit.trace.append(ll)
        fit.n_iter = it + 1
        if not prev_was_reseed and ll - prev < tol and it > 0:
            fit.converged = True
            fit.log_likelihood = ll
            return fit
        prev = ll

        # M-step
        bulk = resp.sum(axis=0)
        dead = bulk < 1e-10
        safe_bulk = np.where(dead, 1.0, bulk)
        params.means = (resp.T @ x) / safe_bulk[:, None]
        diff = x[:, None, :] - params.means[None]
        cov = np.einsum("nl,nli,nlj->lij", resp, diff, diff) / safe_bulk[:, None, None]
        params.covariances = _floor_covariances(cov, covariance_floor)
        weights = bulk / n
        prev_was_reseed = bool(dead.any())
        if prev_was_reseed:
            # dead components restart on the points farthest from every mean
            fit.reseeds.append(it)
            dist = np.linalg.norm(x[:, None, :] - params.means[None], axis=2).min(axis=1)
            farthest = np.argsort(dist)[::-1]
            for rank, l in enumerate(np.flatnonzero(dead)):
                params.means[l] = x[int(farthest[rank % n])]
                params.covariances[l] = base_cov
                weights[l] = 1.0 / n_components
        params.weights = weights / weights.sum()

    # ran out of iterations: report the likelihood of the final parameters
    ll, _ = _e_step(x, params)
    fit.trace.append(ll)
    fit.log_likelihood = ll
    return fit


def bic_score(log_likelihood: float, n_components: int, n_points: int) -> float:
    """Bayesian information criterion, lower is better."""
    n_free = 6 * n_components - 1
    return -2.0 * log_likelihood + n_free * math.log(n_points)


def responsibilities(params: GmmParams, points) -> np.ndarray:
    """Posterior component probabilities per point, rows summing to 1."""
    _, resp = _e_step(as_points(points), params)
    return resp
