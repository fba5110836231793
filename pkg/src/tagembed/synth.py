"""Synthetic tagged networks with known hierarchy.

``gen_tree_dataset`` mimics a taxonomy: plain nodes are the leaves of a
complete tree and carry their nearest ancestors as tags.
``gen_community_dataset`` plants categories split into sub-categories; each
node is tagged with both, and the category/sub-category link is only
visible through shared membership.
"""

from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .graph import TaggedNetwork


@dataclass(frozen=True)
class SyntheticTreeSpec:
    branching: int = 3
    depth: int = 4
    k_order: int = 2
    p_sibling: float = 0.8
    p_cross: float = 0.2  # for leaves at tree distance 4; decays with distance
    decay_base: float = 2.0
    seed: int = 0

    def __post_init__(self):
        if self.branching < 2:
            raise ValueError("branching must be >= 2")
        if self.depth < 2:
            raise ValueError("depth must be >= 2")
        if not 1 <= self.k_order < self.depth:
            raise ValueError("k_order must satisfy 1 <= k_order < depth")
        for name in ("p_sibling", "p_cross"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if not self.decay_base > 1.0:
            raise ValueError("decay_base must be > 1")

    def to_dict(self) -> dict:
        return asdict(self)


def _prefix_name(prefix: tuple[int, ...]) -> str:
    return f"d{len(prefix)}:" + ".".join(map(str, prefix))


def parse_tree_tag(name: str) -> tuple[int, ...]:
    """Inverse of the tree generator's tag naming: the ancestor's path from the root."""
    level, path = name.split(":", 1)
    if not level.startswith("d"):
        raise ValueError(f"not a tree tag: {name!r}")
    return tuple(int(x) for x in path.split(".")) if path else ()


def gen_tree_dataset(spec: SyntheticTreeSpec) -> TaggedNetwork:
    b, D = spec.branching, spec.depth
    leaves = list(itertools.product(range(b), repeat=D))
    n = len(leaves)

    tag_id: dict[tuple[int, ...], int] = {}
    tags_of: dict[int, list[int]] = {}
    # deeper ancestors (order 1) get the smaller ids
    for order in range(1, spec.k_order + 1):
        for prefix in itertools.product(range(b), repeat=D - order):
            tag_id[prefix] = len(tag_id)
    for v, leaf in enumerate(leaves):
        tags_of[v] = [tag_id[leaf[: D - r]] for r in range(1, spec.k_order + 1)]

    arr = np.array(leaves)
    # length of the common prefix of every leaf pair
    same = arr[:, None, :] == arr[None, :, :]
    common = np.cumprod(same, axis=2).sum(axis=2)
    dist = 2 * (D - common)
    prob = spec.p_cross * spec.decay_base ** (-(dist - 4.0))
    prob[dist == 2] = spec.p_sibling
    rng = np.random.default_rng([spec.seed & ((1 << 64) - 1), 0x7EE])
    draw = rng.random((n, n))
    iu, ju = np.triu_indices(n, k=1)
    keep = draw[iu, ju] < prob[iu, ju]
    edges = [(int(i), int(j)) for i, j in zip(iu[keep], ju[keep])]
    names = {t: _prefix_name(p) for p, t in tag_id.items()}
    node_names = {v: "leaf:" + ".".join(map(str, leaf)) for v, leaf in enumerate(leaves)}
    return TaggedNetwork(n, edges, tags_of, names, node_names)


def tree_tag_classes(g: TaggedNetwork, level: int = 1) -> dict[int, int]:
    """Class of every tree tag: index of its ancestor at ``level`` (1 = children of the root)."""
    roots: dict[tuple[int, ...], int] = {}
    out = {}
    for t in g.tags:
        path = parse_tree_tag(g.tag_names[t])
        if len(path) < level:
            raise ValueError(f"tag {g.tag_names[t]} lies above level {level}")
        out[t] = roots.setdefault(path[:level], len(roots))
    return out


def tree_tag_order(g: TaggedNetwork, depth: int) -> dict[int, int]:
    """Ancestor order of every tree tag (1 = parent of the leaves)."""
    return {t: depth - len(parse_tree_tag(g.tag_names[t])) for t in g.tags}


def gen_community_dataset(categories: int = 6, subcats_per_cat: int = 5, nodes_per_subcat: int = 20,
                          p_in: float = 0.3, p_cross: float = 0.005, seed: int = 0,
                          p_mid: Optional[float] = None) -> TaggedNetwork:
    """Planted two-level communities.

    Edge probability is ``p_in`` inside a sub-category, ``p_mid`` between
    sub-categories of one category (default ``max(p_cross, p_in / 8)``) and
    ``p_cross`` across categories. Node ``v`` belongs to sub-category
    ``v // nodes_per_subcat``; tags ``0..categories-1`` are the categories.
    """
    for name, p in (("p_in", p_in), ("p_cross", p_cross)):
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"{name} must lie in [0, 1]")
    if not p_in > p_cross:
        raise ValueError("p_in must exceed p_cross")
    if p_mid is None:
        p_mid = max(p_cross, p_in / 8)
    if not 0.0 <= p_mid <= 1.0:
        raise ValueError("p_mid must lie in [0, 1]")
    S, N = subcats_per_cat, nodes_per_subcat
    n = categories * S * N
    sub = np.arange(n) // N
    cat = sub // S

    tag_names = {c: f"cat{c}" for c in range(categories)}
    for c in range(categories):
        for s in range(S):
            tag_names[categories + c * S + s] = f"cat{c}/sub{s}"
    tags_of = {v: [int(cat[v]), categories + int(sub[v])] for v in range(n)}

    prob = np.where(cat[:, None] == cat[None, :], p_mid, p_cross)
    prob = np.where(sub[:, None] == sub[None, :], p_in, prob)
    rng = np.random.default_rng([seed & ((1 << 64) - 1), 0xC0C])
    draw = rng.random((n, n))
    iu, ju = np.triu_indices(n, k=1)
    keep = draw[iu, ju] < prob[iu, ju]
    edges = [(int(i), int(j)) for i, j in zip(iu[keep], ju[keep])]
    return TaggedNetwork(n, edges, tags_of, tag_names)


def community_labels(g: TaggedNetwork, level: str = "category") -> np.ndarray:
    """Per-node class index from the planted tags (``"category"`` or ``"subcategory"``)."""
    want_sub = {"category": False, "subcategory": True}[level]
    labels = np.full(g.n_nodes, -1, dtype=np.int64)
    for v, ts in g.tags_of.items():
        for t in ts:
            if ("/" in g.tag_names[t]) == want_sub:
                labels[v] = t
    if (labels < 0).any():
        raise ValueError("some nodes lack a planted tag")
    _, dense = np.unique(labels, return_inverse=True)
    return dense
