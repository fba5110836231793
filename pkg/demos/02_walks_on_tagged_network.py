"""
Tag similarity and walks on a node-tag hybrid network
=====================================================

A tagged network has plain nodes joined by edges, and tags that group
nodes into communities. Tags become extra vertices linked to their
members, and random walks move between both kinds of vertex.
"""

import warnings
from collections import Counter

from tagembed.graph import TaggedNetwork, build_hybrid, pairwise_similarity_matrix
from tagembed.walker import WalkConfig, generate_corpus, walks_to_tokens

# Two groups of three nodes with one bridge. Tag "all" contains everybody,
# "left" and "right" the two groups, "pair" only nodes 2 and 3.
edges = [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)]
tags = {0: {0, 1}, 1: {0, 1}, 2: {0, 1, 3}, 3: {0, 2, 3}, 4: {0, 2}, 5: {0, 2}}
names = {0: "all", 1: "left", 2: "right", 3: "pair"}
g = TaggedNetwork(6, edges, tags, names)

# Member similarity rewards shared members, social closeness rewards edges
# running between two communities. "all" has no edge leaving it, so its
# closeness is undefined and reported as 0 with a warning. Overlapping
# communities can score above 1.
print("member similarity\n", pairwise_similarity_matrix(g, "MS").round(3))
with warnings.catch_warnings(record=True) as caught:
    warnings.simplefilter("always")
    print("social closeness\n", pairwise_similarity_matrix(g, "SC").round(3))
print("warning:", caught[0].message)

h = build_hybrid(g)
print("hybrid vertices:", h.n_vertices, " interaction/affiliation edges:", h.edge_counts())

# p is the chance of jumping to a tag from a plain node. With p = 1 every
# other vertex is a tag; with a small p there are longer stretches of
# plain nodes between tags.
for p in (1.0, 0.2):
    walks = walks_to_tokens(h, generate_corpus(h, WalkConfig(p=p, walk_length=12, walks_per_node=1)))
    print(f"p={p}:", " ".join(walks[0]))

# q decides how the next tag is picked once a tag has been seen: close to
# 1 prefers tags of similar size to the last one, close to 0 prefers
# different sizes (moving up or down the hierarchy).
for q in (1.0, 0.0):
    walks = walks_to_tokens(h, generate_corpus(h, WalkConfig(p=1.0, q=q, walk_length=40, walks_per_node=20)))
    counts = Counter(tok for w in walks for tok in w if tok.startswith("t"))
    print(f"q={q}: tag visits", {names[int(t[1:])]: c for t, c in sorted(counts.items())})
