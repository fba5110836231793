"""Command-line entry point: ``tagembed <subcommand> [options]``.

Options come from built-in defaults, then ``--config`` (``key=value`` file
or a previous run manifest), then flags. Each run writes a JSON manifest
with the resolved configuration next to its main output.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import evaluation, io, synth
from .corpus import build_vocab, extract_pairs, noise_distribution
from .graph import INTERACTION, build_hybrid, pairwise_similarity_matrix
from .train import TrainParams, init_model, load_embeddings, params_dict, save_embeddings, save_loss_trace, train
from .walker import WalkConfig, generate_corpus, read_walks, walks_to_tokens, write_walks

log = logging.getLogger("tagembed")


def _floats(s: str) -> list[float]:
    return [float(x) for x in str(s).split(",") if x.strip()]


def _bool(s) -> bool:
    if isinstance(s, bool):
        return s
    if str(s).lower() in ("1", "true", "yes", "on"):
        return True
    if str(s).lower() in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _opt_float(s):
    return None if s in (None, "", "None", "none") else float(s)


def _opt_int(s):
    return None if s in (None, "", "None", "none") else int(s)


WALK_OPTS = {
    "p": (float, 0.5), "q": (float, 0.5), "walk_length": (int, 40), "walks_per_node": (int, 10),
    "size_scale": (_opt_float, None), "seed": (int, 0), "jobs": (int, 1),
}
TRAIN_OPTS = {
    "space": (str, "hyperbolic"), "dim": (_opt_int, None), "lr": (_opt_float, None), "negatives": (int, 5),
    "epochs": (int, 5), "burn_in": (float, 0.1), "eps_ball": (float, 1e-5), "window": (int, 5),
    "noise_exponent": (float, 0.75), "seed": (int, 0), "parallel": (_bool, False),
}
NET_OPTS = {"edges": (str, None), "tags": (str, None)}

COMMANDS = {
    "synth-tree": {
        "branching": (int, 3), "depth": (int, 4), "k_order": (int, 2), "p_sibling": (float, 0.8),
        "p_cross": (float, 0.2), "decay_base": (float, 2.0), "class_level": (int, 1), "seed": (int, 0),
        "out": (str, None),
    },
    "synth-communities": {
        "categories": (int, 6), "subcats": (int, 5), "nodes_per_subcat": (int, 20), "p_in": (float, 0.3),
        "p_cross": (float, 0.005), "p_mid": (_opt_float, None), "seed": (int, 0), "out": (str, None),
    },
    "build": {**NET_OPTS, "out": (str, None)},
    "walk": {**NET_OPTS, **WALK_OPTS, "out": (str, None)},
    "train": {"walks": (str, None), **TRAIN_OPTS, "out": (str, None), "loss_out": (str, None),
              "vocab_out": (str, None)},
    "eval-classify": {**NET_OPTS, "embeddings": (str, None), "labels": (str, None),
                      "train_fraction": (float, 0.5), "one_hot": (_bool, False), "node_only": (_bool, False),
                      "seed": (int, 0), "out": (str, None)},
    "eval-community": {**NET_OPTS, "embeddings": (str, None), "metric": (str, "MS"), "out": (str, None)},
    "eval-purity": {**NET_OPTS, "embeddings": (str, None), "classes": (str, None), "k": (_opt_int, None),
                    "seed": (int, 0), "out": (str, None)},
    "eval-stability": {**NET_OPTS, "labels": (str, None), "fractions": (_floats, "0.2,0.4,0.6,0.8"),
                       **WALK_OPTS, **TRAIN_OPTS, "train_fraction": (float, 0.5), "out": (str, None)},
    "export": {**NET_OPTS, "out_edges": (str, None), "out_tags": (str, None), "embeddings": (str, None),
               "coords_out": (str, None)},
}

REQUIRED = {
    "synth-tree": ["out"], "synth-communities": ["out"], "build": ["edges", "out"],
    "walk": ["edges", "out"], "train": ["walks", "out"],
    "eval-classify": ["edges", "tags", "embeddings", "labels", "out"],
    "eval-community": ["edges", "tags", "embeddings", "out"],
    "eval-purity": ["edges", "tags", "embeddings", "classes", "out"],
    "eval-stability": ["edges", "tags", "labels", "out"],
    "export": ["edges"],
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tagembed", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, opts in COMMANDS.items():
        p = sub.add_parser(name, argument_default=argparse.SUPPRESS)
        p.add_argument("--config", help="key=value file or JSON manifest")
        p.add_argument("--manifest", help="manifest path (default: <out>.manifest.json)")
        for key, (typ, default) in opts.items():
            p.add_argument("--" + key.replace("_", "-"), dest=key, type=str,
                           help=f"default: {default}")
    return parser


def resolve(command: str, ns: argparse.Namespace) -> dict:
    """Defaults < config file < flags, each value converted with its option type."""
    opts = COMMANDS[command]
    raw = {k: d for k, (_, d) in opts.items()}
    if getattr(ns, "config", None):
        from_file = io.read_config(ns.config)
        unknown = set(from_file) - set(opts)
        if unknown:
            raise UsageError(f"unknown config keys for {command}: {sorted(unknown)}")
        raw.update(from_file)
    raw.update({k: v for k, v in vars(ns).items() if k in opts})
    cfg = {}
    for k, (typ, _) in opts.items():
        v = raw[k]
        try:
            cfg[k] = v if v is None or (typ is _floats and isinstance(v, list)) else typ(v)
        except (TypeError, ValueError) as e:
            raise UsageError(f"bad value for --{k.replace('_', '-')}: {v!r} ({e})") from None
    missing = [k for k in REQUIRED[command] if cfg.get(k) in (None, "")]
    if missing:
        raise UsageError("missing required option(s): " + ", ".join("--" + m.replace("_", "-") for m in missing))
    return cfg


def _walk_config(cfg) -> WalkConfig:
    return WalkConfig(p=cfg["p"], q=cfg["q"], walk_length=cfg["walk_length"],
                      walks_per_node=cfg["walks_per_node"], size_scale=cfg["size_scale"], rng_seed=cfg["seed"])


def _train_params(cfg) -> TrainParams:
    return TrainParams(lr=cfg["lr"], negatives=cfg["negatives"], epochs=cfg["epochs"], burn_in=cfg["burn_in"],
                       eps_ball=cfg["eps_ball"], seed=cfg["seed"], noise_exponent=cfg["noise_exponent"])


def _network(cfg):
    return io.load_network(cfg["edges"], cfg.get("tags"))


def _embedding_lookup(path):
    tokens, x, space = load_embeddings(path)
    return {t: i for i, t in enumerate(tokens)}, x, space


def _write_report(report: evaluation.EvalReport, out) -> list[str]:
    out = Path(out)
    out.write_text(report.to_text())
    js = out.with_suffix(out.suffix + ".json")
    js.write_text(report.to_json() + "\n")
    sys.stdout.write(report.to_text())
    return [str(out), str(js)]


# --- subcommands ---------------------------------------------------------------------

def cmd_synth_tree(cfg):
    spec = synth.SyntheticTreeSpec(cfg["branching"], cfg["depth"], cfg["k_order"], cfg["p_sibling"],
                                   cfg["p_cross"], cfg["decay_base"], cfg["seed"])
    g = synth.gen_tree_dataset(spec)
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    io.save_network(g, out / "edges.tsv", out / "tags.tsv")
    level = cfg["class_level"]
    io.save_tag_classes(g, synth.tree_tag_classes(g, level), out / "tag_classes.tsv")
    leaf_class = [int(g.node_names[v].split(":")[1].split(".")[level - 1]) for v in g.nodes]
    io.save_node_labels(leaf_class, out / "labels.tsv")
    return [str(out / f) for f in ("edges.tsv", "tags.tsv", "tag_classes.tsv", "labels.tsv")]


def cmd_synth_communities(cfg):
    g = synth.gen_community_dataset(cfg["categories"], cfg["subcats"], cfg["nodes_per_subcat"], cfg["p_in"],
                                    cfg["p_cross"], cfg["seed"], cfg["p_mid"])
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    io.save_network(g, out / "edges.tsv", out / "tags.tsv")
    io.save_node_labels(synth.community_labels(g, "category"), out / "labels.tsv")
    classes = {t: g.tag_names[t].split("/")[0] for t in g.tags}
    with open(out / "tag_classes.tsv", "w") as f:
        for t in g.tags:
            f.write(f"{g.tag_names[t]}\t{classes[t]}\n")
    return [str(out / f) for f in ("edges.tsv", "tags.tsv", "labels.tsv", "tag_classes.tsv")]


def cmd_build(cfg):
    h = build_hybrid(_network(cfg))
    with open(cfg["out"], "w") as f:
        for u, v, w, kind in h.edges:
            f.write(f"{h.token(u)}\t{h.token(v)}\t{w!r}\t{'interaction' if kind == INTERACTION else 'affiliation'}\n")
    inter, aff = h.edge_counts()
    print(f"vertices={h.n_vertices} plain={h.n_nodes} tags={len(h.tag_ids)} interaction={inter} affiliation={aff}")
    return [cfg["out"]]


def cmd_walk(cfg):
    h = build_hybrid(_network(cfg))
    walks = generate_corpus(h, _walk_config(cfg), n_jobs=cfg["jobs"])
    write_walks(cfg["out"], walks_to_tokens(h, walks))
    return [cfg["out"]]


def cmd_train(cfg):
    walks = read_walks(cfg["walks"])
    vocab = build_vocab(walks)
    pairs = extract_pairs(walks, vocab, cfg["window"])
    params = _train_params(cfg)
    noise = noise_distribution(vocab, params.noise_exponent)
    model = init_model(vocab, cfg["space"], cfg["dim"], seed=cfg["seed"], params=params)
    model, trace = train(model, pairs, noise, parallel=cfg["parallel"])
    save_embeddings(model, cfg["out"])
    outs = [cfg["out"]]
    loss_out = cfg["loss_out"] or cfg["out"] + ".loss.tsv"
    save_loss_trace(trace, loss_out)
    outs.append(loss_out)
    if cfg["vocab_out"]:
        Path(cfg["vocab_out"]).write_text(vocab.to_text())
        outs.append(cfg["vocab_out"])
    cfg.update({f"resolved_{k}": v for k, v in params_dict(model).items() if k in ("dim", "lr")})
    return outs


def _tag_rows(g, index, x):
    """Tags of ``g`` that have a vector, and those vectors."""
    tags = [t for t in g.tags if f"t{t}" in index]
    return tags, np.array([x[index[f"t{t}"]] for t in tags]).reshape(len(tags), x.shape[1])


def cmd_eval_classify(cfg):
    g = _network(cfg)
    labels = io.load_node_labels(cfg["labels"], g)
    index, x, space = _embedding_lookup(cfg["embeddings"])
    nodes = np.zeros((g.n_nodes, x.shape[1]))
    for v in g.nodes:
        if f"n{v}" in index:
            nodes[v] = x[index[f"n{v}"]]
    if cfg["node_only"]:
        feats = nodes
    elif cfg["one_hot"]:
        feats = evaluation.node_features(nodes, g, one_hot=True)
    else:
        tags, rows = _tag_rows(g, index, x)
        feats = evaluation.node_features(nodes, g, dict(zip(tags, rows)))
    report = evaluation.classify_nodes(feats, labels, cfg["train_fraction"], cfg["seed"])
    report.config["space"] = space
    return _write_report(report, cfg["out"])


def cmd_eval_community(cfg):
    g = _network(cfg)
    index, x, space = _embedding_lookup(cfg["embeddings"])
    tags, rows = _tag_rows(g, index, x)
    truth = pairwise_similarity_matrix(g, cfg["metric"])
    pos = [g.tags.index(t) for t in tags]
    report = evaluation.similar_community_auc(rows, truth[np.ix_(pos, pos)], space)
    report.config["metric"] = cfg["metric"]
    return _write_report(report, cfg["out"])


def cmd_eval_purity(cfg):
    g = _network(cfg)
    index, x, space = _embedding_lookup(cfg["embeddings"])
    classes = io.load_tag_classes(cfg["classes"])
    tags, rows = _tag_rows(g, index, x)
    y = [classes[g.tag_names[t]] for t in tags]
    k = cfg["k"] or len(set(y))
    report = evaluation.reconstruction_purity(rows, y, k, space, cfg["seed"])
    return _write_report(report, cfg["out"])


def cmd_eval_stability(cfg):
    g = _network(cfg)
    labels = io.load_node_labels(cfg["labels"], g)
    wc = _walk_config(cfg)
    params = _train_params(cfg)
    xs, ys = [], []
    for frac in cfg["fractions"]:
        rep = evaluation.stability_experiment(g, frac, labels, seed=cfg["seed"], walk_cfg=wc, params=params,
                                              space=cfg["space"], dim=cfg["dim"], window=cfg["window"],
                                              train_fraction=cfg["train_fraction"])
        xs.append(frac)
        ys.append(rep.metrics["micro_f1"])
        print(f"known_fraction={frac!r} micro_f1={ys[-1]!r} macro_f1={rep.metrics['macro_f1']!r}")
    evaluation.write_sweep_tsv(cfg["out"], xs, ys, header="known_fraction\tmicro_f1")
    return [cfg["out"]]


def cmd_export(cfg):
    g = _network(cfg)
    outs = []
    if cfg["out_edges"]:
        io.save_network(g, cfg["out_edges"], cfg["out_tags"])
        outs += [p for p in (cfg["out_edges"], cfg["out_tags"]) if p]
    else:
        sys.stdout.write(io.canonical_form(g))
    if cfg["embeddings"]:
        if not cfg["coords_out"]:
            raise UsageError("--coords-out is required with --embeddings")
        index, x, space = _embedding_lookup(cfg["embeddings"])
        tags, rows = _tag_rows(g, index, x)
        with open(cfg["coords_out"], "w") as f:
            f.write("tag\tname\tsize\tnorm\t" + "\t".join(f"x{i}" for i in range(x.shape[1])) + "\n")
            comms = g.communities()
            for t, r in zip(tags, rows):
                f.write(f"t{t}\t{g.tag_names[t]}\t{len(comms[t])}\t{np.linalg.norm(r)!r}\t"
                        + "\t".join(repr(float(c)) for c in r) + "\n")
        outs.append(cfg["coords_out"])
    return outs


HANDLERS = {
    "synth-tree": cmd_synth_tree, "synth-communities": cmd_synth_communities, "build": cmd_build,
    "walk": cmd_walk, "train": cmd_train, "eval-classify": cmd_eval_classify,
    "eval-community": cmd_eval_community, "eval-purity": cmd_eval_purity,
    "eval-stability": cmd_eval_stability, "export": cmd_export,
}

INPUT_KEYS = ("edges", "tags", "walks", "embeddings", "labels", "classes")


def _fail(kind: str, message: str, code: int) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")
    return code


def main(argv=None) -> int:
    try:
        ns = make_parser().parse_args(argv)
        logging.basicConfig(level=logging.DEBUG if ns.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        cfg = resolve(ns.command, ns)
    except UsageError as e:
        return _fail("usage", str(e), 2)
    try:
        outputs = HANDLERS[ns.command](cfg)
    except UsageError as e:
        return _fail("usage", str(e), 2)
    except FileNotFoundError as e:
        return _fail("missing-input", str(e), 2)
    except (ValueError, KeyError) as e:
        return _fail("invalid-input", str(e), 1)
    except FloatingPointError as e:
        return _fail("numerical", str(e), 1)
    main_out = cfg.get("out") or cfg.get("out_edges") or cfg.get("coords_out")
    manifest = getattr(ns, "manifest", None) or (f"{main_out}.manifest.json" if main_out else None)
    if manifest:
        recorded = {k: v for k, v in cfg.items() if not k.startswith("resolved_")}
        io.write_manifest(manifest, ns.command, recorded,
                          inputs=[cfg.get(k) for k in INPUT_KEYS], outputs=outputs)
    return 0


if __name__ == "__main__":
    sys.exit(main())
