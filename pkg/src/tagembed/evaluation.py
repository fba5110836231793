"""Evaluation protocols for node and tag embeddings.

* node classification with one-vs-rest logistic regression (micro/macro F1)
* similar-community detection scored by AUC
* hierarchy reconstruction by K-medoids clustering, scored by purity
* tag stability: tag vectors learned on one node sample reused on another
"""

from __future__ import annotations

import json
import logging
import warnings
from dataclasses import asdict, dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np
from scipy.stats import rankdata

from .geometry import pairwise_distances
from .graph import TaggedNetwork

logger = logging.getLogger(__name__)


class EvalWarning(UserWarning):
    pass


@dataclass
class EvalReport:
    task: str
    metrics: dict[str, float]
    config: dict = field(default_factory=dict)

    def __post_init__(self):
        for k, v in self.metrics.items():
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{k}={v} outside [0, 1]")

    @property
    def value(self) -> float:
        return next(iter(self.metrics.values()))

    def to_text(self) -> str:
        lines = [f"task={self.task}"]
        lines += [f"{k}={v!r}" for k, v in self.metrics.items()]
        lines += [f"config.{k}={v}" for k, v in sorted(self.config.items())]
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True, default=str)


# --- scoring primitives ---------------------------------------------------------------

def auc(scores, labels) -> float:
    """Area under the ROC curve from ranks; tied scores share their mean rank."""
    s = np.asarray(scores, dtype=float)
    y = np.asarray(labels).astype(bool)
    n_pos = int(y.sum())
    n_neg = len(y) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUC needs both positive and negative labels")
    ranks = rankdata(s)
    return float((ranks[y].sum() - n_pos * (n_pos + 1) / 2) / (n_pos * n_neg))


def f1_scores(y_true, y_pred) -> tuple[float, float]:
    """(micro, macro) F1 for single-label multiclass predictions."""
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    micro = float(np.mean(y_true == y_pred))
    f1s = []
    for c in np.union1d(y_true, y_pred):
        tp = np.sum((y_pred == c) & (y_true == c))
        fp = np.sum((y_pred == c) & (y_true != c))
        fn = np.sum((y_pred != c) & (y_true == c))
        f1s.append(2 * tp / (2 * tp + fp + fn) if tp else 0.0)
    return micro, float(np.mean(f1s))


def purity(clusters, classes) -> float:
    """Fraction of items that belong to the majority class of their cluster."""
    clusters = np.asarray(clusters)
    classes = np.asarray(classes)
    total = 0
    for k in np.unique(clusters):
        _, counts = np.unique(classes[clusters == k], return_counts=True)
        total += counts.max()
    return total / len(clusters)


# --- node classification --------------------------------------------------------------

class OneVsRestLogistic:
    """Binary logistic regressions per class, fit by full-batch gradient descent."""

    def __init__(self, lr: float = 0.5, iterations: int = 500, l2: float = 1e-3):
        self.lr = lr
        self.iterations = iterations
        self.l2 = l2

    def fit(self, x: np.ndarray, y: np.ndarray) -> OneVsRestLogistic:
        self.classes_ = np.unique(y)
        self.mean_ = x.mean(axis=0)
        std = x.std(axis=0)
        self.std_ = np.where(std > 0, std, 1.0)
        z = (x - self.mean_) / self.std_
        targets = (y[:, None] == self.classes_[None, :]).astype(float)
        n, d = z.shape
        self.coef_ = np.zeros((d, len(self.classes_)))
        self.bias_ = np.zeros(len(self.classes_))
        for _ in range(self.iterations):
            p = 1.0 / (1.0 + np.exp(-(z @ self.coef_ + self.bias_)))
            err = p - targets
            self.coef_ -= self.lr * (z.T @ err / n + self.l2 * self.coef_)
            self.bias_ -= self.lr * err.mean(axis=0)
        return self

    def decision_function(self, x: np.ndarray) -> np.ndarray:
        return ((x - self.mean_) / self.std_) @ self.coef_ + self.bias_

    def predict(self, x: np.ndarray) -> np.ndarray:
        return self.classes_[np.argmax(self.decision_function(x), axis=1)]


def stratified_split(labels: np.ndarray, train_fraction: float, seed: int) -> tuple[np.ndarray, np.ndarray]:
    rng = np.random.default_rng([seed & ((1 << 64) - 1), 0x5B1])
    train, test = [], []
    for c in np.unique(labels):
        idx = np.flatnonzero(labels == c)
        idx = idx[rng.permutation(len(idx))]
        k = min(max(int(round(train_fraction * len(idx))), 1), len(idx) - 1)
        train.append(idx[:k])
        test.append(idx[k:])
    return np.sort(np.concatenate(train)), np.sort(np.concatenate(test))


def node_features(node_vectors: np.ndarray, g: TaggedNetwork,
                  tag_vectors: Mapping[int, np.ndarray] | None = None,
                  nodes: Optional[Sequence[int]] = None, one_hot: bool = False) -> np.ndarray:
    """Node vector concatenated with the mean of its tags' vectors.

    ``nodes[i]`` is the id in ``g`` whose tags go with ``node_vectors[i]``
    (default: row i is node i). Untagged nodes get a zero tag block. With
    ``one_hot`` the tag block is a multi-hot indicator over ``g.tags``.
    """
    nodes = range(len(node_vectors)) if nodes is None else nodes
    if one_hot:
        col = {t: i for i, t in enumerate(g.tags)}
        block = np.zeros((len(nodes), len(col)))
        for i, v in enumerate(nodes):
            for t in g.tags_of.get(int(v), ()):
                block[i, col[t]] = 1.0
        return np.hstack([node_vectors, block])
    if not tag_vectors:
        raise ValueError("tag_vectors required unless one_hot")
    dim = len(next(iter(tag_vectors.values())))
    block = np.zeros((len(nodes), dim))
    for i, v in enumerate(nodes):
        known = [tag_vectors[t] for t in sorted(g.tags_of.get(int(v), ())) if t in tag_vectors]
        if known:
            block[i] = np.mean(known, axis=0)
    return np.hstack([node_vectors, block])


def classify_nodes(features: np.ndarray, labels, train_fraction: float = 0.5, seed: int = 0) -> EvalReport:
    x = np.asarray(features, dtype=float)
    y = np.asarray(labels)
    if len(x) != len(y):
        raise ValueError("features and labels differ in length")
    classes, counts = np.unique(y, return_counts=True)
    small = classes[counts < 2]
    if len(small):
        warnings.warn(f"classes with fewer than 2 members excluded: {small.tolist()}", EvalWarning, stacklevel=2)
        keep = ~np.isin(y, small)
        x, y = x[keep], y[keep]
    if len(np.unique(y)) < 2:
        raise ValueError("classification needs at least 2 classes with 2+ members")
    train, test = stratified_split(y, train_fraction, seed)
    clf = OneVsRestLogistic().fit(x[train], y[train])
    micro, macro = f1_scores(y[test], clf.predict(x[test]))
    return EvalReport("node_classification", {"micro_f1": micro, "macro_f1": macro},
                      {"seed": seed, "train_fraction": train_fraction, "dim": x.shape[1], "n": len(y)})


# --- similar communities --------------------------------------------------------------

def similar_community_pairs(ground_truth: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(rows, cols, positive) over off-diagonal pairs of usable rows.

    A pair (t, t') is positive when t' attains the row maximum of t's
    ground-truth similarity (ties all count). Rows that are all zero off
    the diagonal are dropped with a warning.
    """
    m = np.asarray(ground_truth, dtype=float)
    n = len(m)
    off = m.copy()
    np.fill_diagonal(off, -np.inf)
    rows, cols, pos = [], [], []
    dropped = []
    for i in range(n):
        r = off[i]
        best = r.max()
        if not best > 0:
            dropped.append(i)
            continue
        j = np.array([x for x in range(n) if x != i])
        rows.append(np.full(len(j), i))
        cols.append(j)
        pos.append(np.isclose(r[j], best, rtol=1e-12, atol=0.0))
    if dropped:
        warnings.warn(f"tags without any similar community excluded: {dropped}", EvalWarning, stacklevel=3)
    if not rows:
        raise ValueError("no tag has a similar community")
    return np.concatenate(rows), np.concatenate(cols), np.concatenate(pos)


def similar_community_auc(tag_vectors: np.ndarray, ground_truth: np.ndarray, space: str = "hyperbolic",
                          positive_rule: str = "argmax") -> EvalReport:
    """AUC of negative embedding distance at recovering each tag's most similar community."""
    if positive_rule != "argmax":
        raise ValueError(f"unknown positive rule {positive_rule!r}")
    x = np.asarray(tag_vectors, dtype=float)
    if len(x) < 3:
        raise ValueError("need at least 3 tags")
    if np.shape(ground_truth) != (len(x), len(x)):
        raise ValueError("ground truth must be a square matrix over the tags")
    d = pairwise_distances(x, space)
    i, j, y = similar_community_pairs(ground_truth)
    return EvalReport("similar_community", {"auc": auc(-d[i, j], y)},
                      {"space": space, "n_tags": len(x), "positives": int(y.sum())})


# --- hierarchy reconstruction ---------------------------------------------------------

def _kmedoids_once(dist: np.ndarray, k: int, first: int, max_iter: int) -> tuple[np.ndarray, np.ndarray]:
    medoids = [first]
    nearest = dist[first].copy()
    while len(medoids) < k:
        nxt = int(np.argmax(nearest))
        medoids.append(nxt)
        nearest = np.minimum(nearest, dist[nxt])
    medoids = np.array(medoids)
    assign = np.argmin(dist[:, medoids], axis=1)
    for _ in range(max_iter):
        new = medoids.copy()
        for c in range(k):
            members = np.flatnonzero(assign == c)
            if len(members):
                new[c] = members[np.argmin(dist[np.ix_(members, members)].sum(axis=1))]
        assign_new = np.argmin(dist[:, new], axis=1)
        if np.array_equal(new, medoids) and np.array_equal(assign_new, assign):
            break
        medoids, assign = new, assign_new
    return assign, medoids


def kmedoids(dist: np.ndarray, k: int, seed: int = 0, max_iter: int = 100,
             n_init: int = 10) -> tuple[np.ndarray, np.ndarray]:
    """Alternating K-medoids on a precomputed distance matrix.

    Each start takes one random point, then repeatedly the point farthest
    from all medoids chosen so far. Of ``n_init`` distinct starts the one
    with the lowest total distance to its medoids is kept.
    Returns (assignment, medoid indices).
    """
    n = len(dist)
    if not 1 <= k <= n:
        raise ValueError(f"cannot form {k} clusters from {n} points")
    if n_init < 1:
        raise ValueError("n_init must be >= 1")
    rng = np.random.default_rng([seed & ((1 << 64) - 1), 0x3ED])
    best, best_cost = None, np.inf
    for first in rng.permutation(n)[:n_init]:
        assign, medoids = _kmedoids_once(dist, k, int(first), max_iter)
        cost = dist[np.arange(n), medoids[assign]].sum()
        if cost < best_cost:
            best, best_cost = (assign, medoids), cost
    return best


def reconstruction_purity(tag_vectors: np.ndarray, true_classes, k: int, space: str = "hyperbolic",
                          seed: int = 0, n_init: int = 10) -> EvalReport:
    x = np.asarray(tag_vectors, dtype=float)
    classes = np.asarray(true_classes)
    if k < 2:
        raise ValueError("K must be >= 2")
    if k > len(x):
        raise ValueError(f"K={k} exceeds the number of tags ({len(x)})")
    assign, _ = kmedoids(pairwise_distances(x, space), k, seed, n_init=n_init)
    return EvalReport("hierarchy_reconstruction", {"purity": float(purity(assign, classes))},
                      {"space": space, "k": k, "seed": seed, "n_init": n_init, "n_tags": len(x), "dim": x.shape[1]})


# --- tag stability --------------------------------------------------------------------

@dataclass
class StabilityRun:
    """Intermediate products of one stability experiment."""

    known: np.ndarray
    held_out: np.ndarray
    tag_vectors: dict[int, np.ndarray]
    features: np.ndarray
    labels: np.ndarray
    report: EvalReport


def stability_run(g: TaggedNetwork, known_fraction: float, labels, walk_cfg=None, params=None,
                  space: str = "hyperbolic", dim: Optional[int] = None, window: int = 5,
                  train_fraction: float = 0.5, seed: int = 0) -> StabilityRun:
    """Tag vectors from a known-node sample, node vectors from the rest.

    Tags and nodes are embedded together on the subgraph induced by a
    ``known_fraction`` sample of nodes. The remaining nodes are embedded
    without tags on their own induced subgraph. Each held-out node is then
    described by its new vector plus the mean of its (frozen) tag vectors
    and classified.
    """
    from dataclasses import replace

    from .pipeline import embed_network
    from .walker import WalkConfig

    if not 0.0 < known_fraction < 1.0:
        raise ValueError("known_fraction must lie strictly between 0 and 1")
    labels = np.asarray(labels)
    walk_cfg = walk_cfg or WalkConfig()
    rng = np.random.default_rng([seed & ((1 << 64) - 1), 0x57AB])
    perm = rng.permutation(g.n_nodes)
    n_known = int(round(known_fraction * g.n_nodes))
    known, rest = np.sort(perm[:n_known]), np.sort(perm[n_known:])

    g_known, _ = g.induced(known, with_tags=True)
    g_rest, old = g.induced(rest, with_tags=False)
    for name, sub in (("known", g_known), ("held-out", g_rest)):
        if sub.n_nodes == 0 or (not sub.edges and not sub.tags_of):
            raise ValueError(f"empty induced subgraph for the {name} nodes")

    first = embed_network(g_known, replace(walk_cfg, rng_seed=seed), space, dim, params, window)
    frozen = {t: v.copy() for t, v in first.tag_table().items()}
    second = embed_network(g_rest, replace(walk_cfg, rng_seed=seed + 1), space, dim, params, window)
    feats = node_features(second.node_vectors(), g, frozen, nodes=old)
    report = classify_nodes(feats, labels[old], train_fraction, seed)
    report.task = "tag_stability"
    report.config.update(known_fraction=known_fraction, space=space)
    return StabilityRun(known, rest, frozen, feats, labels[old], report)


def stability_experiment(g: TaggedNetwork, known_fraction: float, labels, seed: int = 0, **cfg) -> EvalReport:
    return stability_run(g, known_fraction, labels, seed=seed, **cfg).report


def write_sweep_tsv(path, xs: Sequence[float], values: Sequence[float], header: str = "x\tvalue") -> None:
    with open(path, "w") as f:
        f.write(header + "\n")
        for x, v in zip(xs, values):
            f.write(f"{x!r}\t{v!r}\n")
