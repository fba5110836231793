"""Distance-based skip-gram with negative sampling, Euclidean or hyperbolic.

Both spaces share one loss, ``softplus(d(w, h+)) + sum softplus(-d(w, h_n))``,
and one trainer; only the distance and the update rule differ.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from . import _kernels
from .corpus import AliasSampler, PairStream, Vocabulary
from .geometry import EPS_BALL, euclidean_distance, hyperbolic_distance

logger = logging.getLogger(__name__)

SPACES = ("euclidean", "hyperbolic")

DEFAULTS = {
    "hyperbolic": {"dim": 10, "lr": 0.05},
    "euclidean": {"dim": 64, "lr": 0.025},
}


class TrainingError(FloatingPointError):
    pass


@dataclass(frozen=True)
class TrainParams:
    lr: Optional[float] = None  # None: per-space default
    negatives: int = 5
    epochs: int = 5
    burn_in: float = 0.1  # learning-rate factor for the first epoch
    eps_ball: float = EPS_BALL
    seed: int = 0
    noise_exponent: float = 0.75

    def __post_init__(self):
        if self.negatives < 0:
            raise ValueError("negatives must be >= 0")
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")
        if not 0 < self.eps_ball < 1:
            raise ValueError("eps_ball must lie in (0, 1)")
        if self.burn_in <= 0:
            raise ValueError("burn_in must be positive")
        if self.lr is not None and self.lr <= 0:
            raise ValueError("lr must be positive")


@dataclass
class EmbeddingModel:
    space: str
    dim: int
    vocab: Vocabulary
    input_vectors: np.ndarray
    context_vectors: np.ndarray
    params: TrainParams = field(default_factory=TrainParams)

    @property
    def hyperbolic(self) -> bool:
        return self.space == "hyperbolic"

    @property
    def lr(self) -> float:
        return self.params.lr if self.params.lr is not None else DEFAULTS[self.space]["lr"]

    def distance(self, u, v) -> float:
        return hyperbolic_distance(u, v) if self.hyperbolic else euclidean_distance(u, v)

    def vector(self, token) -> np.ndarray:
        return self.input_vectors[self.vocab[token]]

    def vectors_for(self, tokens: Sequence) -> np.ndarray:
        return self.input_vectors[[self.vocab[t] for t in tokens]]

    def copy(self) -> EmbeddingModel:
        return replace(self, input_vectors=self.input_vectors.copy(),
                       context_vectors=self.context_vectors.copy())


def init_model(vocab: Vocabulary, space: str = "hyperbolic", dim: Optional[int] = None,
               seed: int = 0, params: Optional[TrainParams] = None) -> EmbeddingModel:
    """Random initialization: near the origin in the ball, +-0.5/d in Euclidean space."""
    if space not in SPACES:
        raise ValueError(f"unknown space {space!r}")
    dim = DEFAULTS[space]["dim"] if dim is None else int(dim)
    if dim < 2:
        raise ValueError(f"dimension must be >= 2, got {dim}")
    params = replace(params or TrainParams(), seed=int(seed))
    rng = np.random.default_rng([int(seed) & ((1 << 64) - 1), 0x1A17])
    bound = 1e-3 if space == "hyperbolic" else 0.5 / dim
    shape = (len(vocab), dim)
    w = rng.uniform(-bound, bound, size=shape)
    c = rng.uniform(-bound, bound, size=shape)
    return EmbeddingModel(space, dim, vocab, w, c, params)


def sgns_loss(model: EmbeddingModel, center: int, context: int, negatives: Sequence[int]) -> float:
    """Loss of one (center, context) pair with the given negative indices."""
    w = model.input_vectors[center]
    loss = np.logaddexp(0.0, model.distance(w, model.context_vectors[context]))
    for n in negatives:
        loss += np.logaddexp(0.0, -model.distance(w, model.context_vectors[n]))
    return float(loss)


def sgns_gradients(model: EmbeddingModel, center: int, context: int,
                   negatives: Sequence[int]) -> tuple[float, np.ndarray, np.ndarray]:
    """Loss, gradient wrt the center vector, and gradients wrt each context row.

    Row 0 of the context gradient belongs to ``context``, the rest to
    ``negatives`` in order. Uses the compiled kernel the trainer runs.
    """
    idx = np.array([context, *negatives], dtype=np.int64)
    rows = model.context_vectors[idx].copy()
    gw = np.empty(model.dim)
    gctx = np.empty((len(idx), model.dim))
    loss, status = _kernels.pair_loss_grad(model.input_vectors[center], rows, model.hyperbolic, gw, gctx)
    if status == _kernels.SINGULAR:
        raise ValueError("gradient undefined: center coincides with a context vector")
    return float(loss), gw, gctx


def draw_negatives(noise: AliasSampler, contexts: np.ndarray, k: int,
                   rng: np.random.Generator, retries: int = 10) -> np.ndarray:
    """``k`` noise draws per pair; draws equal to the true context are redrawn up to ``retries`` times."""
    negs = noise.sample(rng, size=(len(contexts), k)).astype(np.int64)
    for _ in range(retries):
        clash = negs == contexts[:, None]
        n = int(clash.sum())
        if n == 0:
            break
        negs[clash] = noise.sample(rng, size=n)
    return negs


def train(model: EmbeddingModel, pairs: PairStream, noise: AliasSampler, *,
          parallel: bool = False, check: bool = False, walks_per_chunk: int = 2048,
          on_epoch: Optional[Callable[[int, EmbeddingModel], None]] = None) -> tuple[EmbeddingModel, list[float]]:
    """Train ``model`` in place over ``pairs``; returns it with the mean loss of each epoch.

    With ``check`` every updated row is tested against the ball bound and a
    violation raises ``AssertionError``. Serial mode is deterministic for a
    fixed seed; ``parallel`` applies lock-free updates and is not.
    ``on_epoch(epoch, model)`` is called after every epoch.
    """
    if len(pairs.walks) == 0 or len(pairs) == 0:
        raise ValueError("no training pairs")
    if len(noise) != len(model.vocab):
        raise ValueError("noise sampler and vocabulary differ in size")
    prm = model.params
    kernel = _kernels.sgns_epoch_parallel if parallel else _kernels.sgns_epoch_serial
    W, C = model.input_vectors, model.context_vectors
    trace = []
    for epoch in range(prm.epochs):
        lr = model.lr * (prm.burn_in if epoch == 0 else 1.0)
        rng = np.random.default_rng([int(prm.seed) & ((1 << 64) - 1), 0x5EED, epoch])
        total, used = 0.0, 0
        for centers, contexts in pairs.chunks(walks_per_chunk):
            negs = draw_negatives(noise, contexts, prm.negatives, rng)
            s, u, bad, first = kernel(W, C, centers, contexts, negs, lr, model.hyperbolic, prm.eps_ball, check)
            if first >= 0:
                tok = model.vocab.tokens
                raise TrainingError(
                    f"non-finite loss or gradient at epoch {epoch} for pair "
                    f"({tok[centers[first]]}, {tok[contexts[first]]})"
                )
            if check and bad:
                raise AssertionError(f"{bad} updates left the ball bound in epoch {epoch}")
            total += s
            used += u
        trace.append(total / max(used, 1))
        logger.debug("epoch %d lr=%.4g mean loss %.6f", epoch, lr, trace[-1])
        if on_epoch is not None:
            on_epoch(epoch, model)
    return model, trace


def save_embeddings(model: EmbeddingModel, path, table: str = "input") -> None:
    """Text export: header ``V d space``, then ``token x1 ... xd`` per row at full precision."""
    x = model.input_vectors if table == "input" else model.context_vectors
    with open(path, "w") as f:
        f.write(f"{len(model.vocab)} {model.dim} {model.space}\n")
        for tok, row in zip(model.vocab.tokens, x):
            f.write(tok + " " + " ".join(repr(float(v)) for v in row) + "\n")


def load_embeddings(path) -> tuple[list[str], np.ndarray, str]:
    lines = Path(path).read_text().splitlines()
    v, d, space = lines[0].split()
    tokens, rows = [], []
    for line in lines[1:1 + int(v)]:
        parts = line.split()
        tokens.append(parts[0])
        rows.append([float(x) for x in parts[1:]])
    x = np.array(rows, dtype=float).reshape(int(v), int(d))
    return tokens, x, space


def save_loss_trace(trace: Sequence[float], path) -> None:
    with open(path, "w") as f:
        for i, loss in enumerate(trace):
            f.write(f"{i}\t{loss!r}\n")


def params_dict(model: EmbeddingModel) -> dict:
    out = asdict(model.params)
    out.update(space=model.space, dim=model.dim, lr=model.lr)
    return out
