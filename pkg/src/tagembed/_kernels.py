"""Compiled inner loops for distance-based skip-gram training.

Everything here works on raw float64 tables. ``hyperbolic`` selects the
Poincare distance plus RSGD; otherwise plain Euclidean distance plus SGD.
"""

import math

import numpy as np
from numba import njit, prange

OK = 0
SINGULAR = 1
NONFINITE = 2


@njit(cache=True, inline="always")
def _softplus(x):
    if x > 0.0:
        return x + math.log1p(math.exp(-x))
    return math.log1p(math.exp(x))


@njit(cache=True, inline="always")
def _sigmoid(x):
    if x >= 0.0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


@njit(cache=True)
def dist_and_grad(u, v, hyperbolic, gu, gv):
    """Distance between u and v; writes d/du into gu and d/dv into gv.

    Returns -1.0 when u == v (gradient undefined).
    """
    n = u.shape[0]
    s = 0.0
    nu = 0.0
    nv = 0.0
    for i in range(n):
        t = u[i] - v[i]
        s += t * t
        nu += u[i] * u[i]
        nv += v[i] * v[i]
    if s == 0.0:
        return -1.0
    if not hyperbolic:
        d = math.sqrt(s)
        for i in range(n):
            gu[i] = (u[i] - v[i]) / d
            gv[i] = -gu[i]
        return d
    a = 1.0 - nu
    b = 1.0 - nv
    x = 2.0 * s / (a * b)
    root = math.sqrt(x * (x + 2.0))
    d = math.log1p(x + root)
    c = 4.0 / (a * b * root)
    for i in range(n):
        t = u[i] - v[i]
        gu[i] = c * (t + s * u[i] / a)
        gv[i] = c * (-t + s * v[i] / b)
    return d


@njit(cache=True)
def pair_loss_grad(w, ctx_rows, hyperbolic, gw, gctx):
    """Negative-sampling loss for one center vector against its contexts.

    ``ctx_rows[0]`` is the true context, the rest are negatives. Fills the
    Euclidean gradient wrt ``w`` into ``gw`` and wrt each context row into
    ``gctx``. Returns (loss, status).
    """
    dim = w.shape[0]
    m = ctx_rows.shape[0]
    gu = np.empty(dim)
    gv = np.empty(dim)
    for i in range(dim):
        gw[i] = 0.0
    loss = 0.0
    for j in range(m):
        d = dist_and_grad(w, ctx_rows[j], hyperbolic, gu, gv)
        if d < 0.0:
            return 0.0, SINGULAR
        if j == 0:
            loss += _softplus(d)  # -log sigma(-d)
            coef = _sigmoid(d)
        else:
            loss += _softplus(-d)  # -log sigma(d)
            coef = -_sigmoid(-d)
        for i in range(dim):
            gw[i] += coef * gu[i]
            gctx[j, i] = coef * gv[i]
    if not math.isfinite(loss):
        return loss, NONFINITE
    for i in range(dim):
        if not math.isfinite(gw[i]):
            return loss, NONFINITE
    return loss, OK


@njit(cache=True)
def _step_row(row, grad, lr, hyperbolic, eps_ball, check):
    """In-place SGD/RSGD update of one table row; returns 1 if the ball bound is violated."""
    dim = row.shape[0]
    if not hyperbolic:
        for i in range(dim):
            row[i] -= lr * grad[i]
        return 0
    sq = 0.0
    for i in range(dim):
        sq += row[i] * row[i]
    scale = lr * (1.0 - sq) * (1.0 - sq) / 4.0
    sq = 0.0
    for i in range(dim):
        row[i] -= scale * grad[i]
        sq += row[i] * row[i]
    limit = 1.0 - eps_ball
    norm = math.sqrt(sq)
    if norm > limit:
        f = limit / norm
        for i in range(dim):
            row[i] *= f
        for _ in range(16):
            sq = 0.0
            for i in range(dim):
                sq += row[i] * row[i]
            if math.sqrt(sq) <= limit:
                break
            for i in range(dim):
                row[i] *= 1.0 - 2.0**-52
    if check:
        sq = 0.0
        for i in range(dim):
            sq += row[i] * row[i]
        if not math.sqrt(sq) <= limit:
            return 1
    return 0


@njit(cache=True)
def _apply_pair(W, C, center, idx, lr, hyperbolic, eps_ball, check, rows, gw, gctx):
    m = idx.shape[0]
    for j in range(m):
        rows[j, :] = C[idx[j]]
    loss, status = pair_loss_grad(W[center], rows, hyperbolic, gw, gctx)
    if status != OK:
        return loss, status, 0
    bad = 0
    for j in range(m):
        bad += _step_row(C[idx[j]], gctx[j], lr, hyperbolic, eps_ball, check)
    bad += _step_row(W[center], gw, lr, hyperbolic, eps_ball, check)
    return loss, status, bad


@njit(cache=True)
def sgns_epoch_serial(W, C, centers, contexts, negatives, lr, hyperbolic, eps_ball, check):
    """One pass over the pairs in order.

    Returns (loss_sum, pairs_used, violations, first_bad_pair or -1).
    """
    n, k = negatives.shape
    dim = W.shape[1]
    idx = np.empty(k + 1, dtype=np.int64)
    rows = np.empty((k + 1, dim))
    gw = np.empty(dim)
    gctx = np.empty((k + 1, dim))
    total = 0.0
    used = 0
    violations = 0
    for p in range(n):
        idx[0] = contexts[p]
        for j in range(k):
            idx[j + 1] = negatives[p, j]
        loss, status, bad = _apply_pair(W, C, centers[p], idx, lr, hyperbolic, eps_ball, check, rows, gw, gctx)
        if status == NONFINITE:
            return total, used, violations, p
        if status == SINGULAR:
            continue
        total += loss
        used += 1
        violations += bad
    return total, used, violations, -1


@njit(cache=True, parallel=True)
def sgns_epoch_parallel(W, C, centers, contexts, negatives, lr, hyperbolic, eps_ball, check):
    """Lock-free variant: pairs are split across threads that write shared rows unsynchronized."""
    n, k = negatives.shape
    dim = W.shape[1]
    total = 0.0
    used = 0
    violations = 0
    failed = np.full(n, False)
    for p in prange(n):
        idx = np.empty(k + 1, dtype=np.int64)
        rows = np.empty((k + 1, dim))
        gw = np.empty(dim)
        gctx = np.empty((k + 1, dim))
        idx[0] = contexts[p]
        for j in range(k):
            idx[j + 1] = negatives[p, j]
        loss, status, bad = _apply_pair(W, C, centers[p], idx, lr, hyperbolic, eps_ball, check, rows, gw, gctx)
        if status == NONFINITE:
            failed[p] = True
        elif status == OK:
            total += loss
            used += 1
            violations += bad
    first = -1
    for p in range(n):
        if failed[p]:
            first = p
            break
    return total, used, violations, first
