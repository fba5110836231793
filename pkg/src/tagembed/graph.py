"""Tagged networks, ground-truth communities and the node-tag hybrid graph."""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np


class DegenerateClosenessWarning(UserWarning):
    """Social closeness had a zero denominator and was defined as 0."""


class Centrality(enum.Enum):
    DEGREE = "degree"


INTERACTION = 0
AFFILIATION = 1


class TaggedNetwork:
    """Undirected weighted graph whose nodes carry sets of tags.

    Node and tag ids are dense integers. ``edges`` maps a canonical pair
    ``(u, v)`` with ``u < v`` to a positive weight.
    """

    def __init__(
        self,
        n_nodes: int,
        edges: Mapping[tuple[int, int], float] | Iterable[tuple[int, int]],
        tags_of: Mapping[int, Iterable[int]] | None = None,
        tag_names: Mapping[int, str] | None = None,
        node_names: Mapping[int, str] | None = None,
    ):
        self.n_nodes = int(n_nodes)
        if isinstance(edges, Mapping):
            items = edges.items()
        else:
            items = ((e, 1.0) for e in edges)
        canon: dict[tuple[int, int], float] = {}
        for (u, v), w in items:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop on node {u}")
            for x in (u, v):
                if not 0 <= x < self.n_nodes:
                    raise ValueError(f"edge endpoint {x} is not a node")
            if w <= 0:
                raise ValueError(f"edge ({u}, {v}) has non-positive weight {w}")
            key = (u, v) if u < v else (v, u)
            if key in canon:
                raise ValueError(f"edge {key} listed twice")
            canon[key] = float(w)
        self.edges = canon

        tags_of = tags_of or {}
        self.tags_of: dict[int, frozenset[int]] = {}
        for v, ts in tags_of.items():
            v = int(v)
            if not 0 <= v < self.n_nodes:
                raise ValueError(f"tagged node {v} is not a node")
            ts = frozenset(int(t) for t in ts)
            if ts:
                self.tags_of[v] = ts
        used = set().union(*self.tags_of.values()) if self.tags_of else set()
        if tag_names is None:
            tag_names = {t: str(t) for t in used}
        self.tag_names = {int(t): str(s) for t, s in tag_names.items()}
        missing = used - set(self.tag_names)
        if missing:
            raise ValueError(f"tags without names: {sorted(missing)}")
        self.node_names = dict(node_names) if node_names else {}

        self._neighbors: list[list[int]] = [[] for _ in range(self.n_nodes)]
        for u, v in self.edges:
            self._neighbors[u].append(v)
            self._neighbors[v].append(u)

    @property
    def nodes(self) -> range:
        return range(self.n_nodes)

    @property
    def tags(self) -> list[int]:
        return sorted(self.tag_names)

    @property
    def n_tags(self) -> int:
        return len(self.tag_names)

    def neighbors(self, v: int) -> list[int]:
        return self._neighbors[v]

    def degree(self, v: int) -> int:
        return len(self._neighbors[v])

    def weight(self, u: int, v: int) -> float:
        return self.edges[(u, v) if u < v else (v, u)]

    def community(self, tag: int) -> Community:
        members = frozenset(v for v, ts in self.tags_of.items() if tag in ts)
        return Community(tag, members)

    def communities(self) -> dict[int, Community]:
        members: dict[int, set[int]] = {t: set() for t in self.tag_names}
        for v, ts in self.tags_of.items():
            for t in ts:
                members[t].add(v)
        return {t: Community(t, frozenset(m)) for t, m in members.items() if m}

    def induced(self, keep: Iterable[int], with_tags: bool = True) -> tuple[TaggedNetwork, np.ndarray]:
        """Subgraph on ``keep`` with nodes relabelled densely.

        Returns the subgraph and the array mapping new ids to old ids.
        Tag ids and names are preserved.
        """
        old = np.array(sorted(set(int(v) for v in keep)), dtype=np.int64)
        new_of = {int(o): i for i, o in enumerate(old)}
        edges = {
            (new_of[u], new_of[v]): w
            for (u, v), w in self.edges.items()
            if u in new_of and v in new_of
        }
        tags = {}
        if with_tags:
            tags = {new_of[v]: ts for v, ts in self.tags_of.items() if v in new_of}
        names = {new_of[int(o)]: self.node_names[int(o)] for o in old if int(o) in self.node_names}
        sub = TaggedNetwork(len(old), edges, tags, self.tag_names if with_tags else {}, names)
        return sub, old

    def canonical(self) -> str:
        """Deterministic text serialization used for equality checks."""
        lines = [f"{self.n_nodes}"]
        lines += [f"e {u} {v} {w!r}" for (u, v), w in sorted(self.edges.items())]
        lines += [f"t {v} {','.join(map(str, sorted(ts)))}" for v, ts in sorted(self.tags_of.items())]
        lines += [f"n {t} {s}" for t, s in sorted(self.tag_names.items())]
        return "\n".join(lines)

    def __repr__(self) -> str:
        return f"TaggedNetwork(nodes={self.n_nodes}, edges={len(self.edges)}, tags={self.n_tags})"


@dataclass(frozen=True)
class Community:
    """Members of the network carrying ``tag``."""

    tag: int
    members: frozenset[int]

    def __len__(self) -> int:
        return len(self.members)


def _require_nonempty(*cs: Community) -> None:
    for c in cs:
        if not c.members:
            raise ValueError(f"community of tag {c.tag} is empty")


def member_similarity(c1: Community, c2: Community) -> float:
    """Squared overlap over the product of community sizes."""
    _require_nonempty(c1, c2)
    common = len(c1.members & c2.members)
    return common * common / (len(c1.members) * len(c2.members))


def _cut_size(g: TaggedNetwork, a: frozenset[int]) -> int:
    return sum((u in a) != (v in a) for u, v in g.edges)


def _between(g: TaggedNetwork, a: frozenset[int], b: frozenset[int]) -> int:
    # edges with one endpoint in a and the other in b, each edge counted once
    return sum((u in a and v in b) or (u in b and v in a) for u, v in g.edges)


def social_closeness(c1: Community, c2: Community, g: TaggedNetwork) -> float:
    """Squared edge count between two communities over the product of their cut sizes.

    Returns 0 and emits :class:`DegenerateClosenessWarning` when either
    community has no outgoing edge.
    """
    _require_nonempty(c1, c2)
    denom = _cut_size(g, c1.members) * _cut_size(g, c2.members)
    if denom == 0:
        warnings.warn(
            f"tags {c1.tag} and {c2.tag}: community without external edges, closeness set to 0",
            DegenerateClosenessWarning,
            stacklevel=2,
        )
        return 0.0
    between = _between(g, c1.members, c2.members)
    return between * between / denom


class HybridNetwork:
    """Plain nodes and tag nodes in one graph.

    Vertex ids ``0..n_nodes-1`` are plain nodes; tag ``t`` is vertex
    ``n_nodes + tag_index[t]``. Adjacency is held in flat per-vertex arrays
    so walkers can sample without touching Python containers.
    """

    def __init__(self, g: TaggedNetwork, centrality: Centrality = Centrality.DEGREE):
        if Centrality(centrality) is not Centrality.DEGREE:
            raise ValueError(f"unsupported centrality {centrality}")
        self.network = g
        self.n_nodes = g.n_nodes
        self.tag_ids = np.array(g.tags, dtype=np.int64)
        self.tag_index = {int(t): i for i, t in enumerate(self.tag_ids)}
        self.n_vertices = self.n_nodes + len(self.tag_ids)

        edges: list[tuple[int, int, float, int]] = [
            (u, v, w, INTERACTION) for (u, v), w in sorted(g.edges.items())
        ]
        for v in sorted(g.tags_of):
            for t in sorted(g.tags_of[v]):
                edges.append((v, self.tag_vertex(t), float(g.degree(v)), AFFILIATION))
        self.edges = edges

        # plain -> plain
        self.plain_nbrs: list[np.ndarray] = []
        self.plain_cumw: list[np.ndarray] = []
        for v in range(self.n_nodes):
            nb = sorted(g.neighbors(v))
            w = np.array([g.weight(v, u) for u in nb], dtype=float)
            self.plain_nbrs.append(np.array(nb, dtype=np.int64))
            self.plain_cumw.append(np.cumsum(w))
        # plain -> tag
        self.tag_nbrs: list[np.ndarray] = [
            np.array([self.tag_vertex(t) for t in sorted(g.tags_of.get(v, ()))], dtype=np.int64)
            for v in range(self.n_nodes)
        ]
        # tag -> plain, weighted by centrality of the member
        comms = g.communities()
        self.community_size: dict[int, int] = {t: len(comms[t]) if t in comms else 0 for t in g.tags}
        self.members: list[np.ndarray] = []
        self.member_cumw: list[np.ndarray] = []
        for t in self.tag_ids:
            m = np.array(sorted(comms[int(t)].members) if int(t) in comms else [], dtype=np.int64)
            w = np.array([g.degree(int(v)) for v in m], dtype=float)
            if len(w) and w.sum() == 0:
                w = np.ones_like(w)
            self.members.append(m)
            self.member_cumw.append(np.cumsum(w))
        self.sizes = np.array([self.community_size[int(t)] for t in self.tag_ids], dtype=float)

    def tag_vertex(self, tag: int) -> int:
        return self.n_nodes + self.tag_index[tag]

    def is_tag(self, vertex: int) -> bool:
        return vertex >= self.n_nodes

    def tag_of_vertex(self, vertex: int) -> int:
        return int(self.tag_ids[vertex - self.n_nodes])

    def token(self, vertex: int) -> str:
        if vertex >= self.n_nodes:
            return f"t{self.tag_of_vertex(vertex)}"
        return f"n{vertex}"

    def member_weights(self, tag: int) -> tuple[np.ndarray, np.ndarray]:
        """Members of ``tag`` and their (unnormalized) sampling weights."""
        i = self.tag_index[tag]
        cw = self.member_cumw[i]
        return self.members[i], np.diff(cw, prepend=0.0)

    def edge_counts(self) -> tuple[int, int]:
        inter = sum(1 for e in self.edges if e[3] == INTERACTION)
        return inter, len(self.edges) - inter

    def __repr__(self) -> str:
        inter, aff = self.edge_counts()
        return (
            f"HybridNetwork(plain={self.n_nodes}, tags={len(self.tag_ids)}, "
            f"interaction={inter}, affiliation={aff})"
        )


def build_hybrid(g: TaggedNetwork, centrality: Centrality | str = Centrality.DEGREE) -> HybridNetwork:
    return HybridNetwork(g, Centrality(centrality))


def pairwise_similarity_matrix(g: TaggedNetwork, metric: str = "MS") -> np.ndarray:
    """Ground-truth tag similarity matrix, rows/columns in ``g.tags`` order.

    ``metric`` is ``"MS"`` (member similarity) or ``"SC"`` (social closeness).
    """
    metric = metric.upper()
    if metric not in ("MS", "SC"):
        raise ValueError(f"unknown metric {metric!r}")
    tags = g.tags
    if len(tags) < 2:
        raise ValueError("need at least 2 tags")
    comms = g.communities()
    n = len(tags)
    out = np.zeros((n, n))
    if metric == "MS":
        for i in range(n):
            for j in range(i, n):
                out[i, j] = out[j, i] = member_similarity(comms[tags[i]], comms[tags[j]])
        return out

    # vectorized social closeness over the edge list
    index = {t: i for i, t in enumerate(tags)}
    incidence = np.zeros((g.n_nodes, n), dtype=np.int64)
    for v, ts in g.tags_of.items():
        for t in ts:
            incidence[v, index[t]] = 1
    if g.edges:
        uv = np.array(list(g.edges), dtype=np.int64)
        a, b = incidence[uv[:, 0]], incidence[uv[:, 1]]
    else:
        a = b = np.zeros((0, n), dtype=np.int64)
    cut = (a != b).sum(axis=0)
    # edge counts between i and j if (a_i and b_j) or (b_i and a_j); inclusion-exclusion
    ab = a * b
    between = (a.T @ b + b.T @ a - ab.T @ ab).astype(float)
    denom = np.outer(cut, cut).astype(float)
    zero = denom == 0
    if zero.any():
        warnings.warn(
            f"{int(zero.sum())} tag pairs without external edges, closeness set to 0",
            DegenerateClosenessWarning,
            stacklevel=2,
        )
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(zero, 0.0, between * between / np.where(zero, 1.0, denom))
    return out
