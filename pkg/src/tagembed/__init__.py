"""Tag and node embeddings from parameterized walks on node-tag hybrid networks."""

__version__ = "0.1.0"

from .corpus import AliasSampler, PairStream, Vocabulary, build_vocab, extract_pairs, noise_distribution
from .evaluation import (
    EvalReport,
    auc,
    classify_nodes,
    node_features,
    reconstruction_purity,
    similar_community_auc,
    stability_experiment,
)
from .geometry import distance_gradient, hyperbolic_distance, rsgd_update
from .graph import (
    Community,
    HybridNetwork,
    TaggedNetwork,
    build_hybrid,
    member_similarity,
    pairwise_similarity_matrix,
    social_closeness,
)
from .pipeline import Embedding, embed_network
from .synth import SyntheticTreeSpec, gen_community_dataset, gen_tree_dataset
from .train import EmbeddingModel, TrainParams, init_model, sgns_loss, train
from .walker import WalkConfig, generate_corpus, select_tag, step_from_plain, step_from_tag
