"""Exact t-SNE for desk-scale visualization of the joint space.

O(n^2) variant: per-point Gaussian bandwidths are calibrated by binary
search until each conditional distribution's entropy matches
log(perplexity), affinities are symmetrized, and the 2-D map is fit by
gradient descent with momentum, per-dimension gain adaptation, and early
exaggeration of the affinities for the first phase of iterations.
"""

from __future__ import annotations

import numpy as np

ENTROPY_TOL = 1e-7
EXAGGERATION = 12.0
EXAGGERATION_ITERS = 250
MOMENTUM_EARLY = 0.5
MOMENTUM_LATE = 0.8
LEARNING_RATE = 200.0
P_FLOOR = 1e-12


def squared_distances(x: np.ndarray) -> np.ndarray:
    sq = np.sum(x * x, axis=1)
    d = sq[:, None] + sq[None, :] - 2.0 * (x @ x.T)
    np.maximum(d, 0.0, out=d)
    np.fill_diagonal(d, 0.0)
    return d


def _row_entropy(dist_row: np.ndarray, beta: float):
    """Entropy (nats) and probabilities of one conditional distribution."""
    logits = -dist_row * beta
    shift = logits.max()
    p = np.exp(logits - shift)
    total = p.sum()
    p /= total
    h = float(shift + np.log(total) + beta * np.dot(dist_row, p))
    return h, p


def calibrate_affinities(x: np.ndarray, perplexity: float):
    """Per-point betas and the symmetrized joint affinity matrix P.

    Each row's beta = 1/(2 sigma^2) is binary-searched until the entropy
    of P(.|i) equals log(perplexity). Returns (P, betas).
    """
    n = x.shape[0]
    d = squared_distances(x)
    target = float(np.log(perplexity))
    cond = np.zeros((n, n))
    betas = np.ones(n)
    for i in range(n):
        row = np.delete(d[i], i)
        beta = 1.0
        lo, hi = 0.0, np.inf
        h, p = _row_entropy(row, beta)
        for _ in range(200):
            if abs(h - target) < ENTROPY_TOL:
                break
            if h > target:  # too flat: raise beta
                lo = beta
                beta = beta * 2.0 if hi == np.inf else (beta + hi) / 2.0
            else:
                hi = beta
                beta = beta / 2.0 if lo == 0.0 else (beta + lo) / 2.0
            h, p = _row_entropy(row, beta)
        betas[i] = beta
        cond[i, :i] = p[:i]
        cond[i, i + 1 :] = p[i:]
    joint = (cond + cond.T) / (2.0 * n)
    np.maximum(joint, P_FLOOR, out=joint)
    return joint, betas


def _kl_divergence(p: np.ndarray, q: np.ndarray) -> float:
    mask = ~np.eye(p.shape[0], dtype=bool)
    return float(np.sum(p[mask] * np.log(p[mask] / q[mask])))


def tsne_project(
    embeddings,
    perplexity: float = 30.0,
    iterations: int = 1000,
    seed: int = 0,
    diagnostics: dict | None = None,
) -> np.ndarray:
    """Project row vectors to n x 2 coordinates.

    ``diagnostics``, when a dict is supplied, receives the KL divergence
    at the end of the exaggeration phase and at the final iteration.
    """
    x = np.asarray(embeddings, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError("embeddings must form a 2-d matrix")
    n = x.shape[0]
    if n < 5:
        raise ValueError("t-SNE needs at least 5 points")
    if perplexity <= 0 or perplexity >= (n - 1) / 3.0:
        raise ValueError("perplexity must be positive and below (n-1)/3")
    if iterations < 1:
        raise ValueError("iterations must be >= 1")

    p, _ = calibrate_affinities(x, perplexity)
    rng = np.random.default_rng(seed)
    y = rng.standard_normal((n, 2)) * 1e-4
    velocity = np.zeros_like(y)
    gains = np.ones_like(y)
    exagg_until = min(EXAGGERATION_ITERS, iterations)
    kl_at_exaggeration_end = None

    for it in range(iterations):
        p_eff = p * EXAGGERATION if it < exagg_until else p
        dy2 = squared_distances(y)
        num = 1.0 / (1.0 + dy2)
        np.fill_diagonal(num, 0.0)
        q = num / num.sum()
        np.maximum(q, P_FLOOR, out=q)
        pq = (p_eff - q) * num
        grad = 4.0 * (pq.sum(axis=1)[:, None] * y - pq @ y)

        momentum = MOMENTUM_EARLY if it < exagg_until else MOMENTUM_LATE
        flipped = np.sign(grad) != np.sign(velocity)
        gains = np.where(flipped, gains + 0.2, gains * 0.8)
        np.maximum(gains, 0.01, out=gains)
        velocity = momentum * velocity - LEARNING_RATE * (gains * grad)
        y = y + velocity
        y = y - y.mean(axis=0)

        if it == exagg_until - 1:
            kl_at_exaggeration_end = _kl_divergence(p, q)

    dy2 = squared_distances(y)
    num = 1.0 / (1.0 + dy2)
    np.fill_diagonal(num, 0.0)
    q = np.maximum(num / num.sum(), P_FLOOR)
    if diagnostics is not None:
        diagnostics["kl_exaggeration_end"] = kl_at_exaggeration_end
        diagnostics["kl_final"] = _kl_divergence(p, q)
    return y


def write_coordinates(path, ids, coords) -> None:
    """Tab-separated rows: id, x, y."""
    with open(path, "w", encoding="utf-8") as fh:
        for item_id, (cx, cy) in zip(ids, coords):
            fh.write(f"{item_id}\t{cx:.10g}\t{cy:.10g}\n")
