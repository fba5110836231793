"""Vocabulary, skip-gram context pairs and the negative-sampling noise sampler."""

from __future__ import annotations

from collections import Counter
from typing import Hashable, Iterable, Iterator, Sequence

import numpy as np


class Vocabulary:
    """Token <-> dense index maps with corpus frequencies.

    Indices follow first appearance in the corpus.
    """

    def __init__(self, tokens: Sequence[Hashable], counts: Sequence[int]):
        if len(tokens) != len(counts):
            raise ValueError("tokens and counts differ in length")
        self.tokens = list(tokens)
        self.index = {t: i for i, t in enumerate(self.tokens)}
        if len(self.index) != len(self.tokens):
            raise ValueError("duplicate tokens")
        self.counts = np.asarray(counts, dtype=np.int64)
        if (self.counts <= 0).any():
            raise ValueError("frequencies must be positive")

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, token) -> bool:
        return token in self.index

    def __getitem__(self, token) -> int:
        return self.index[token]

    def freq(self, token) -> int:
        return int(self.counts[self.index[token]])

    def encode(self, walk: Iterable[Hashable]) -> np.ndarray:
        return np.fromiter((self.index[t] for t in walk), dtype=np.int64)

    def to_text(self) -> str:
        return "".join(f"{t}\t{c}\n" for t, c in zip(self.tokens, self.counts))

    @classmethod
    def from_text(cls, text: str) -> Vocabulary:
        rows = [line.split("\t") for line in text.splitlines() if line.strip()]
        return cls([r[0] for r in rows], [int(r[1]) for r in rows])


def build_vocab(walks: Iterable[Sequence[Hashable]]) -> Vocabulary:
    counts: Counter = Counter()
    for w in walks:
        counts.update(w)
    if not counts:
        raise ValueError("empty corpus")
    # Counter preserves insertion order, i.e. first appearance
    return Vocabulary(list(counts), list(counts.values()))


def _walk_pairs(walk: np.ndarray, window: int) -> tuple[np.ndarray, np.ndarray]:
    n = len(walk)
    offsets = np.concatenate([np.arange(-window, 0), np.arange(1, window + 1)])
    i = np.repeat(np.arange(n), len(offsets))
    j = i + np.tile(offsets, n)
    ok = (j >= 0) & (j < n)
    return walk[i[ok]], walk[j[ok]]


class PairStream:
    """(center, context) index pairs over encoded walks.

    Order is walk, then position, then offset (``-window..-1, 1..window``).
    Pairs are produced lazily; :meth:`chunks` yields them as arrays.
    """

    def __init__(self, walks: Sequence[np.ndarray], window: int):
        if window < 1:
            raise ValueError(f"window must be >= 1, got {window}")
        self.walks = [np.asarray(w, dtype=np.int64) for w in walks]
        self.window = int(window)

    def __len__(self) -> int:
        c = self.window
        total = 0
        for w in self.walks:
            n = len(w)
            # each position pairs with min(i, c) left and min(n-1-i, c) right tokens
            k = min(c, n - 1) if n else 0
            total += 2 * (k * (n - k) + k * (k - 1) // 2) if n else 0
        return total

    def __iter__(self) -> Iterator[tuple[int, int]]:
        for centers, contexts in self.chunks():
            yield from zip(centers.tolist(), contexts.tolist())

    def chunks(self, walks_per_chunk: int = 2048) -> Iterator[tuple[np.ndarray, np.ndarray]]:
        for start in range(0, len(self.walks), walks_per_chunk):
            parts = [_walk_pairs(w, self.window) for w in self.walks[start:start + walks_per_chunk]]
            if not parts:
                continue
            yield np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])

    def partition(self, n: int) -> list[PairStream]:
        """Split into ``n`` streams over disjoint, contiguous walk ranges."""
        bounds = np.linspace(0, len(self.walks), n + 1).astype(int)
        return [PairStream(self.walks[a:b], self.window) for a, b in zip(bounds[:-1], bounds[1:])]


def extract_pairs(walks: Iterable[Sequence[Hashable]], vocab: Vocabulary, window: int) -> PairStream:
    return PairStream([vocab.encode(w) for w in walks], window)


class AliasSampler:
    """Walker/Vose alias table: O(1) draws from a fixed discrete distribution."""

    def __init__(self, weights: Sequence[float]):
        w = np.asarray(weights, dtype=float)
        if w.ndim != 1 or len(w) == 0 or (w < 0).any() or w.sum() <= 0:
            raise ValueError("weights must be a non-empty, non-negative vector with positive sum")
        n = len(w)
        self.probabilities = w / w.sum()
        scaled = self.probabilities * n
        self.prob = np.ones(n)
        self.alias = np.arange(n, dtype=np.int64)
        small = [i for i in range(n) if scaled[i] < 1.0]
        large = [i for i in range(n) if scaled[i] >= 1.0]
        while small and large:
            s, g = small.pop(), large.pop()
            self.prob[s] = scaled[s]
            self.alias[s] = g
            scaled[g] = scaled[g] + scaled[s] - 1.0
            (small if scaled[g] < 1.0 else large).append(g)
        # leftovers are 1 up to rounding
        for i in small + large:
            self.prob[i] = 1.0

    def __len__(self) -> int:
        return len(self.prob)

    def sample(self, rng: np.random.Generator, size=None):
        i = rng.integers(len(self.prob), size=size)
        u = rng.random(size=size)
        return np.where(u < self.prob[i], i, self.alias[i])


def noise_distribution(vocab: Vocabulary, exponent: float = 0.75) -> AliasSampler:
    """Sampler over token indices with P(h) proportional to freq(h) ** exponent."""
    if exponent < 0:
        raise ValueError(f"exponent must be >= 0, got {exponent}")
    return AliasSampler(vocab.counts.astype(float) ** exponent)
