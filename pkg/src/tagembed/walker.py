"""Parameterized random walks over a node-tag hybrid network.

From a tag node the walker always moves to a member, chosen in proportion
to the member's degree. From a plain node it moves to one of its tags with
probability ``p`` and to a plain neighbour otherwise. Which tag is chosen
depends on the last tag visited: with probability ``q`` tags of similar
community size are favoured (transverse), otherwise tags of different size
(vertical).
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .graph import HybridNetwork

Walk = list  # list[int] of hybrid vertex ids

_SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class WalkConfig:
    p: float = 0.5
    q: float = 0.5
    walk_length: int = 40
    walks_per_node: int = 10
    size_scale: Optional[float] = None  # None: largest community size
    rng_seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")
        if not 0.0 <= self.q <= 1.0:
            raise ValueError(f"q must lie in [0, 1], got {self.q}")
        if int(self.walk_length) < 2:
            raise ValueError(f"walk_length must be >= 2, got {self.walk_length}")
        if int(self.walks_per_node) < 1:
            raise ValueError(f"walks_per_node must be >= 1, got {self.walks_per_node}")
        if self.size_scale is not None and not self.size_scale > 0:
            raise ValueError(f"size_scale must be positive, got {self.size_scale}")

    def to_dict(self) -> dict:
        return asdict(self)


def resolve_size_scale(h: HybridNetwork, cfg: WalkConfig) -> float:
    if cfg.size_scale is not None:
        return float(cfg.size_scale)
    return float(h.sizes.max()) if len(h.sizes) and h.sizes.max() > 0 else 1.0


def _weighted_pick(items: np.ndarray, cumw: np.ndarray, rng: np.random.Generator) -> int:
    r = rng.random() * cumw[-1]
    i = int(np.searchsorted(cumw, r, side="right"))
    return int(items[min(i, len(items) - 1)])


def step_from_tag(h: HybridNetwork, t: int, rng: np.random.Generator) -> Optional[int]:
    """Member of tag ``t`` sampled proportionally to its degree; None if memberless."""
    i = h.tag_index[t]
    members = h.members[i]
    if len(members) == 0:
        return None
    return _weighted_pick(members, h.member_cumw[i], rng)


def tag_probabilities(
    h: HybridNetwork,
    candidates: Sequence[int],
    t_last: Optional[int],
    mode: str,
    size_scale: float,
) -> np.ndarray:
    """Selection probabilities over ``candidates`` for one weighting mode.

    ``mode`` is ``"transverse"`` (favour similar community size) or
    ``"vertical"`` (favour different size). Without a last tag the choice is
    uniform.
    """
    n = len(candidates)
    if t_last is None:
        return np.full(n, 1.0 / n)
    sizes = np.array([h.community_size[int(t)] for t in candidates], dtype=float)
    delta = (sizes - h.community_size[int(t_last)]) / size_scale
    if mode == "transverse":
        logits = -(delta**2)
    elif mode == "vertical":
        logits = delta**2
    else:
        raise ValueError(f"unknown mode {mode!r}")
    w = np.exp(logits - logits.max())
    return w / w.sum()


def select_tag(
    h: HybridNetwork,
    candidates: Sequence[int],
    t_last: Optional[int],
    cfg: WalkConfig,
    rng: np.random.Generator,
    size_scale: Optional[float] = None,
) -> int:
    if len(candidates) == 0:
        raise ValueError("no candidate tags")
    if t_last is None:
        return int(candidates[int(rng.integers(len(candidates)))])
    if size_scale is None:
        size_scale = resolve_size_scale(h, cfg)
    mode = "transverse" if rng.random() < cfg.q else "vertical"
    probs = tag_probabilities(h, candidates, t_last, mode, size_scale)
    return _weighted_pick(np.asarray(candidates), np.cumsum(probs), rng)


def step_from_plain(
    h: HybridNetwork,
    v: int,
    t_last: Optional[int],
    cfg: WalkConfig,
    rng: np.random.Generator,
    size_scale: Optional[float] = None,
) -> Optional[int]:
    """Next vertex after plain node ``v``; None if ``v`` is isolated."""
    tag_nb = h.tag_nbrs[v]
    plain_nb = h.plain_nbrs[v]
    if len(tag_nb) == 0 and len(plain_nb) == 0:
        return None
    if len(tag_nb) and (len(plain_nb) == 0 or rng.random() < cfg.p):
        candidates = [h.tag_of_vertex(int(x)) for x in tag_nb]
        return h.tag_vertex(select_tag(h, candidates, t_last, cfg, rng, size_scale))
    return _weighted_pick(plain_nb, h.plain_cumw[v], rng)


def walk_rng(cfg: WalkConfig, start: int, index: int) -> np.random.Generator:
    """Independent stream for one walk, derived from the run seed."""
    return np.random.default_rng([int(cfg.rng_seed) & _SEED_MASK, int(start), int(index)])


def random_walk(h: HybridNetwork, start: int, cfg: WalkConfig, rng: np.random.Generator,
                size_scale: Optional[float] = None) -> Walk:
    if size_scale is None:
        size_scale = resolve_size_scale(h, cfg)
    walk = [int(start)]
    t_last = h.tag_of_vertex(start) if h.is_tag(start) else None
    while len(walk) < cfg.walk_length:
        cur = walk[-1]
        if h.is_tag(cur):
            nxt = step_from_tag(h, h.tag_of_vertex(cur), rng)
        else:
            nxt = step_from_plain(h, cur, t_last, cfg, rng, size_scale)
        if nxt is None:
            break
        if h.is_tag(nxt):
            t_last = h.tag_of_vertex(nxt)
        walk.append(nxt)
    return walk


def _walk_block(h: HybridNetwork, cfg: WalkConfig, jobs: list[tuple[int, int]]) -> list[Walk]:
    scale = resolve_size_scale(h, cfg)
    return [random_walk(h, v, cfg, walk_rng(cfg, v, r), scale) for r, v in jobs]


def generate_corpus(h: HybridNetwork, cfg: WalkConfig, n_jobs: int = 1) -> list[Walk]:
    """``walks_per_node`` walks from every plain node, in round-then-node order.

    Each walk owns a seeded stream, so ``n_jobs > 1`` gives the same corpus.
    """
    if h.n_vertices == 0:
        raise ValueError("empty hybrid network")
    jobs = [(r, v) for r in range(cfg.walks_per_node) for v in range(h.n_nodes)]
    if n_jobs == 1 or len(jobs) < 2:
        return _walk_block(h, cfg, jobs)
    from joblib import Parallel, delayed

    chunks = np.array_split(np.arange(len(jobs)), n_jobs)
    parts = Parallel(n_jobs=n_jobs)(
        delayed(_walk_block)(h, cfg, [jobs[i] for i in c]) for c in chunks if len(c)
    )
    return [w for part in parts for w in part]


def walks_to_tokens(h: HybridNetwork, walks: Iterable[Walk]) -> list[list[str]]:
    return [[h.token(x) for x in w] for w in walks]


def write_walks(path, token_walks: Iterable[Sequence[str]]) -> None:
    with open(path, "w") as f:
        for w in token_walks:
            f.write(" ".join(w))
            f.write("\n")


def read_walks(path) -> list[list[str]]:
    return [line.split() for line in Path(path).read_text().splitlines() if line.strip()]
