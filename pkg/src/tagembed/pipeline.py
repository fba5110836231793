"""End-to-end helper: tagged network -> walks -> pairs -> trained embedding."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .corpus import Vocabulary, build_vocab, extract_pairs, noise_distribution
from .graph import HybridNetwork, TaggedNetwork, build_hybrid
from .train import EmbeddingModel, TrainParams, init_model, train
from .walker import WalkConfig, generate_corpus, walks_to_tokens


@dataclass
class Embedding:
    network: TaggedNetwork
    hybrid: HybridNetwork
    walks: list[list[str]]
    model: EmbeddingModel
    loss_trace: list[float]

    @property
    def vocab(self) -> Vocabulary:
        return self.model.vocab

    def node_vectors(self) -> np.ndarray:
        """Input vectors of plain nodes in id order; unseen nodes get zeros."""
        return _rows(self.model, [f"n{v}" for v in self.network.nodes])

    def tag_vectors(self, tags=None) -> np.ndarray:
        """Input vectors of ``tags`` (default: all tags in id order); unseen tags get zeros."""
        tags = self.network.tags if tags is None else tags
        return _rows(self.model, [f"t{t}" for t in tags])

    def tag_table(self) -> dict[int, np.ndarray]:
        return {t: self.model.vector(f"t{t}") for t in self.network.tags if f"t{t}" in self.vocab}


def _rows(model: EmbeddingModel, tokens) -> np.ndarray:
    out = np.zeros((len(tokens), model.dim))
    for i, tok in enumerate(tokens):
        if tok in model.vocab:
            out[i] = model.vector(tok)
    return out


def embed_network(g: TaggedNetwork, walk_cfg: WalkConfig, space: str = "hyperbolic",
                  dim: Optional[int] = None, params: Optional[TrainParams] = None,
                  window: int = 5, seed: Optional[int] = None, parallel: bool = False,
                  check: bool = False) -> Embedding:
    """Walk the hybrid network and train skip-gram vectors for every visited token.

    ``seed`` seeds the model (defaults to the walk seed).
    """
    params = params or TrainParams()
    seed = walk_cfg.rng_seed if seed is None else seed
    hybrid = build_hybrid(g)
    walks = walks_to_tokens(hybrid, generate_corpus(hybrid, walk_cfg))
    vocab = build_vocab(walks)
    pairs = extract_pairs(walks, vocab, window)
    noise = noise_distribution(vocab, params.noise_exponent)
    model = init_model(vocab, space, dim, seed=seed, params=params)
    model, trace = train(model, pairs, noise, parallel=parallel, check=check)
    return Embedding(g, hybrid, walks, model, trace)
