"""Poincare-ball geometry: distance, its gradient and the RSGD step."""

from __future__ import annotations

import numpy as np

EPS_BALL = 1e-5


def _check_in_ball(*points: np.ndarray) -> None:
    for x in points:
        if np.dot(x, x) >= 1.0:
            raise ValueError(f"point with norm {np.linalg.norm(x):.6g} is not inside the unit ball")


def _arcosh1p(x):
    # arcosh(1 + x) without cancellation for small x
    return np.log1p(x + np.sqrt(x * (x + 2.0)))


def hyperbolic_distance(u, v) -> float:
    """arcosh(1 + 2|u-v|^2 / ((1-|u|^2)(1-|v|^2)))."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    _check_in_ball(u, v)
    diff = u - v
    x = 2.0 * np.dot(diff, diff) / ((1.0 - np.dot(u, u)) * (1.0 - np.dot(v, v)))
    return float(_arcosh1p(x))


def euclidean_distance(u, v) -> float:
    return float(np.linalg.norm(np.asarray(u, dtype=float) - np.asarray(v, dtype=float)))


def pairwise_distances(x: np.ndarray, space: str = "hyperbolic") -> np.ndarray:
    """All-pairs distance matrix for the rows of ``x``."""
    x = np.asarray(x, dtype=float)
    sq = (x * x).sum(axis=1)
    d2 = np.maximum(sq[:, None] + sq[None, :] - 2.0 * x @ x.T, 0.0)
    np.fill_diagonal(d2, 0.0)
    if space == "euclidean":
        return np.sqrt(d2)
    if space != "hyperbolic":
        raise ValueError(f"unknown space {space!r}")
    if (sq >= 1.0).any():
        raise ValueError("points outside the unit ball")
    a = 1.0 - sq
    return _arcosh1p(2.0 * d2 / np.outer(a, a))


def distance_gradient(u, v) -> tuple[np.ndarray, np.ndarray]:
    """Euclidean partial derivatives of the hyperbolic distance wrt ``u`` and ``v``."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    _check_in_ball(u, v)
    diff = u - v
    s = np.dot(diff, diff)
    if s == 0.0:
        raise ValueError("distance gradient is undefined at u == v")
    a = 1.0 - np.dot(u, u)
    b = 1.0 - np.dot(v, v)
    x = 2.0 * s / (a * b)
    c = 4.0 / (a * b * np.sqrt(x * (x + 2.0)))
    return c * (diff + s * u / a), c * (-diff + s * v / b)


def project(x: np.ndarray, eps_ball: float = EPS_BALL) -> np.ndarray:
    """Pull ``x`` back to norm ``1 - eps_ball`` if it lies beyond that radius."""
    limit = 1.0 - eps_ball
    norm = np.linalg.norm(x)
    if norm <= limit:
        return x
    x = x * (limit / norm)
    while np.linalg.norm(x) > limit:
        x = x * (1.0 - 2.0**-52)
    return x


def rsgd_update(point, euclidean_grad, lr: float, eps_ball: float = EPS_BALL) -> np.ndarray:
    """One Riemannian SGD step on the Poincare ball.

    The Euclidean gradient is rescaled by the inverse metric
    ``(1 - |x|^2)^2 / 4`` before stepping; the result is projected so its
    norm never exceeds ``1 - eps_ball``.
    """
    x = np.asarray(point, dtype=float)
    g = np.asarray(euclidean_grad, dtype=float)
    _check_in_ball(x)
    scale = (1.0 - np.dot(x, x)) ** 2 / 4.0
    return project(x - lr * scale * g, eps_ball)

