"""Reading and writing networks, labels, configs and run manifests.

Edge file: ``src<TAB>dst[<TAB>weight]`` per line. Tag file:
``node<TAB>tag1,tag2,...``. ``#`` starts a comment line in both. An edge
file with integer ids may declare ``# nodes: N`` so that isolated nodes
survive a round trip.
"""

from __future__ import annotations

import hashlib
import json
import re
import warnings
from pathlib import Path
from typing import Optional

import numpy as np

from .graph import TaggedNetwork


class NetworkFormatError(ValueError):
    pass


class DuplicateEdgeWarning(UserWarning):
    pass


def _data_lines(path):
    with open(path) as f:
        for lineno, raw in enumerate(f, 1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            yield lineno, line


_NODES_HEADER = re.compile(r"#\s*nodes:\s*(\d+)\s*$")


def _declared_nodes(path) -> int:
    with open(path) as f:
        for raw in f:
            m = _NODES_HEADER.match(raw.strip())
            if m:
                return int(m.group(1))
    return 0


class _NodeIds:
    """Maps node tokens to dense ids; integer tokens are used verbatim."""

    def __init__(self, tokens: list[str], declared: int = 0):
        self.numeric = all(t.isdigit() for t in tokens)
        if self.numeric:
            self.ids = {t: int(t) for t in tokens}
            self.n = max(max(self.ids.values(), default=-1) + 1, declared)
            self.names: dict[int, str] = {}
        else:
            self.ids = {}
            for t in tokens:
                self.ids.setdefault(t, len(self.ids))
            self.n = len(self.ids)
            self.names = {i: t for t, i in self.ids.items()}


def load_network(edge_path, tag_path=None) -> TaggedNetwork:
    """Parse an edge file and an optional tag file into a :class:`TaggedNetwork`.

    Duplicate edges (in either direction) are merged by summing weights.
    Tag-file nodes that do not occur in the edge file are an error, except
    integer ids below the declared node count.
    """
    raw_edges = []
    for lineno, line in _data_lines(edge_path):
        parts = line.split("\t")
        if len(parts) not in (2, 3) or not all(p.strip() for p in parts):
            raise NetworkFormatError(f"{edge_path}:{lineno}: expected src<TAB>dst[<TAB>weight]")
        u, v = parts[0].strip(), parts[1].strip()
        w = 1.0
        if len(parts) == 3:
            try:
                w = float(parts[2])
            except ValueError:
                raise NetworkFormatError(f"{edge_path}:{lineno}: bad weight {parts[2]!r}") from None
            if not w > 0 or not np.isfinite(w):
                raise NetworkFormatError(f"{edge_path}:{lineno}: weight must be positive")
        if u == v:
            raise NetworkFormatError(f"{edge_path}:{lineno}: self-loop on {u}")
        raw_edges.append((lineno, u, v, w))

    raw_tags = []
    if tag_path is not None:
        for lineno, line in _data_lines(tag_path):
            parts = line.split("\t")
            if len(parts) != 2 or not parts[0].strip():
                raise NetworkFormatError(f"{tag_path}:{lineno}: expected node<TAB>tag1,tag2,...")
            names = [t.strip() for t in parts[1].split(",") if t.strip()]
            raw_tags.append((lineno, parts[0].strip(), names))

    ids = _NodeIds([x for _, u, v, _ in raw_edges for x in (u, v)], _declared_nodes(edge_path))
    edges: dict[tuple[int, int], float] = {}
    for lineno, u, v, w in raw_edges:
        a, b = ids.ids[u], ids.ids[v]
        key = (a, b) if a < b else (b, a)
        if key in edges:
            warnings.warn(f"{edge_path}:{lineno}: duplicate edge {u}-{v} merged", DuplicateEdgeWarning, stacklevel=2)
            edges[key] += w
        else:
            edges[key] = w

    tag_ids: dict[str, int] = {}
    tags_of: dict[int, set[int]] = {}
    for lineno, node, names in raw_tags:
        if node in ids.ids:
            v = ids.ids[node]
        elif ids.numeric and node.isdigit() and int(node) < ids.n:
            v = int(node)
        else:
            raise NetworkFormatError(f"{tag_path}:{lineno}: unknown node {node!r}")
        tags_of.setdefault(v, set()).update(tag_ids.setdefault(t, len(tag_ids)) for t in names)
    return TaggedNetwork(ids.n, edges, tags_of, {i: t for t, i in tag_ids.items()}, ids.names)


def save_network(g: TaggedNetwork, edge_path, tag_path=None) -> None:
    """Write ``g`` with integer node ids; tags are written by name."""
    with open(edge_path, "w") as f:
        f.write(f"# nodes: {g.n_nodes}\n")
        for (u, v), w in sorted(g.edges.items()):
            f.write(f"{u}\t{v}\t{w!r}\n")
    if tag_path is not None:
        with open(tag_path, "w") as f:
            for v, ts in sorted(g.tags_of.items()):
                f.write(f"{v}\t{','.join(sorted(g.tag_names[t] for t in ts))}\n")


def canonical_form(g: TaggedNetwork) -> str:
    """Serialization that ignores tag ids and node names (tags are compared by name)."""
    lines = [f"nodes {g.n_nodes}"]
    lines += [f"e {u} {v} {w!r}" for (u, v), w in sorted(g.edges.items())]
    lines += [f"t {v} {','.join(sorted(g.tag_names[t] for t in ts))}" for v, ts in sorted(g.tags_of.items())]
    return "\n".join(lines) + "\n"


def save_node_labels(labels, path) -> None:
    with open(path, "w") as f:
        for v, y in enumerate(labels):
            f.write(f"{v}\t{y}\n")


def load_node_labels(path, g: Optional[TaggedNetwork] = None) -> np.ndarray:
    """Labels file ``node<TAB>label``; every node of ``g`` must be labelled."""
    pairs = {}
    for lineno, line in _data_lines(path):
        parts = line.split("\t")
        if len(parts) != 2:
            raise NetworkFormatError(f"{path}:{lineno}: expected node<TAB>label")
        pairs[parts[0].strip()] = parts[1].strip()
    if g is not None and g.node_names:
        lookup = {name: v for v, name in g.node_names.items()}
    else:
        lookup = {k: int(k) for k in pairs if k.isdigit()}
    n = g.n_nodes if g is not None else max(lookup.values()) + 1
    out: list[Optional[str]] = [None] * n
    for k, y in pairs.items():
        if k not in lookup or lookup[k] >= n:
            raise NetworkFormatError(f"{path}: unknown node {k!r}")
        out[lookup[k]] = y
    missing = [v for v, y in enumerate(out) if y is None]
    if missing:
        raise NetworkFormatError(f"{path}: {len(missing)} nodes without a label, e.g. {missing[:5]}")
    return np.array(out)


def save_tag_classes(g: TaggedNetwork, classes: dict[int, int], path) -> None:
    with open(path, "w") as f:
        for t in g.tags:
            f.write(f"{g.tag_names[t]}\t{classes[t]}\n")


def load_tag_classes(path) -> dict[str, str]:
    out = {}
    for lineno, line in _data_lines(path):
        parts = line.split("\t")
        if len(parts) != 2:
            raise NetworkFormatError(f"{path}:{lineno}: expected tag<TAB>class")
        out[parts[0].strip()] = parts[1].strip()
    return out


def tag_token_names(g: TaggedNetwork) -> dict[str, str]:
    """Walk token (``t<id>``) -> tag name."""
    return {f"t{t}": name for t, name in g.tag_names.items()}


def parse_config(text: str) -> dict[str, str]:
    """Flat ``key=value`` lines; ``#`` comments and blank lines ignored."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected key=value")
        k, v = line.split("=", 1)
        out[k.strip().replace("-", "_")] = v.strip()
    return out


def read_config(path) -> dict:
    """Either a ``key=value`` file or a JSON run manifest (its ``config`` block is used)."""
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        data = json.loads(text)
        return dict(data.get("config", data))
    return parse_config(text)


def file_digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_manifest(path, command: str, config: dict, inputs=(), outputs=()) -> None:
    from . import __version__

    manifest = {
        "command": command,
        "version": __version__,
        "config": config,
        "inputs": {str(p): file_digest(p) for p in inputs if p and Path(p).exists()},
        "outputs": {str(p): file_digest(p) for p in outputs if p and Path(p).exists()},
    }
    Path(path).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
