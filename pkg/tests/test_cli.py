import json
import subprocess
import sys

import numpy as np
import pytest

from tagembed.cli import main
from tagembed.train import load_embeddings

FAST = ["--walk-length", "12", "--walks-per-node", "3"]


def run(*args):
    return main([str(a) for a in args])


@pytest.fixture(scope="module")
def tree(tmp_path_factory):
    d = tmp_path_factory.mktemp("tree")
    assert run("synth-tree", "--out", d / "data", "--seed", 1) == 0
    return d


def walk_train(d, space="hyperbolic", dim=2, tag="a"):
    data = d / "data"
    assert run("walk", "--edges", data / "edges.tsv", "--tags", data / "tags.tsv", *FAST,
               "--out", d / f"walks_{tag}.txt", "--seed", 3) == 0
    assert run("train", "--walks", d / f"walks_{tag}.txt", "--space", space, "--dim", dim, "--epochs", 2,
               "--out", d / f"emb_{tag}.txt", "--seed", 3) == 0
    return d / f"emb_{tag}.txt"


class TestPipeline:
    def test_walk_train_purity(self, tree, capsys):
        emb = walk_train(tree)
        data = tree / "data"
        code = run("eval-purity", "--edges", data / "edges.tsv", "--tags", data / "tags.tsv",
                   "--embeddings", emb, "--classes", data / "tag_classes.tsv", "--out", tree / "purity.txt")
        assert code == 0
        report = dict(line.split("=", 1) for line in (tree / "purity.txt").read_text().splitlines())
        assert report["task"] == "hierarchy_reconstruction"
        assert 0 < float(report["purity"]) <= 1
        assert report["config.k"] == "3"
        assert json.loads((tree / "purity.txt.json").read_text())["metrics"]["purity"] == float(report["purity"])
        assert "purity=" in capsys.readouterr().out

    def test_hyperbolic_vectors_in_ball(self, tree):
        _, x, space = load_embeddings(walk_train(tree, tag="ball"))
        assert space == "hyperbolic"
        assert np.linalg.norm(x, axis=1).max() < 1

    def test_manifest_rerun_identical(self, tree):
        emb = walk_train(tree, tag="m")
        for name in ("walks_m.txt", "emb_m.txt"):
            out = tree / name
            manifest = json.loads((tree / f"{name}.manifest.json").read_text())
            assert manifest["config"]["seed"] == 3
            assert manifest["outputs"][str(out)]
            before = out.read_bytes()
            command = manifest["command"]
            assert run(command, "--config", tree / f"{name}.manifest.json") == 0
            assert out.read_bytes() == before
        assert emb.exists()

    def test_config_file_and_override(self, tree):
        data = tree / "data"
        (tree / "walk.cfg").write_text(f"edges={data / 'edges.tsv'}\nwalk-length=5\nwalks_per_node=1\np=0.9\n")
        assert run("walk", "--config", tree / "walk.cfg", "--p", "0.1", "--out", tree / "w.txt") == 0
        cfg = json.loads((tree / "w.txt.manifest.json").read_text())["config"]
        assert cfg["p"] == 0.1 and cfg["walk_length"] == 5
        assert all(len(line.split()) <= 5 for line in (tree / "w.txt").read_text().splitlines())

    def test_other_evaluations(self, tmp_path):
        data = tmp_path / "c"
        assert run("synth-communities", "--out", data, "--categories", 3, "--subcats", 2,
                   "--nodes-per-subcat", 10, "--p-cross", 0) == 0
        net = ["--edges", data / "edges.tsv", "--tags", data / "tags.tsv"]
        assert run("walk", *net, *FAST, "--out", tmp_path / "w.txt") == 0
        assert run("train", "--walks", tmp_path / "w.txt", "--dim", 4, "--epochs", 1, "--out", tmp_path / "e.txt") == 0
        emb = ["--embeddings", tmp_path / "e.txt"]
        assert run("eval-classify", *net, *emb, "--labels", data / "labels.tsv", "--out", tmp_path / "f1.txt") == 0
        assert run("eval-classify", *net, *emb, "--labels", data / "labels.tsv", "--node-only", "true",
                   "--out", tmp_path / "f1n.txt") == 0
        assert run("eval-community", *net, *emb, "--out", tmp_path / "auc.txt") == 0
        assert "auc=" in (tmp_path / "auc.txt").read_text()
        assert run("eval-stability", *net, "--labels", data / "labels.tsv", "--fractions", "0.4,0.6", *FAST,
                   "--epochs", 1, "--dim", 3, "--out", tmp_path / "stab.tsv") == 0
        lines = (tmp_path / "stab.tsv").read_text().splitlines()
        assert lines[0] == "known_fraction\tmicro_f1" and len(lines) == 3
        assert run("build", *net, "--out", tmp_path / "h.tsv") == 0
        kinds = {line.split("\t")[3] for line in (tmp_path / "h.tsv").read_text().splitlines()}
        assert kinds == {"interaction", "affiliation"}
        assert run("export", *net, "--out-edges", tmp_path / "x.tsv", "--out-tags", tmp_path / "xt.tsv",
                   *emb, "--coords-out", tmp_path / "coords.tsv") == 0
        assert (tmp_path / "x.tsv").read_text() == (data / "edges.tsv").read_text()
        assert (tmp_path / "coords.tsv").read_text().startswith("tag\tname\tsize\tnorm\tx0")


class TestErrors:
    def one_line_error(self, capsys):
        err = capsys.readouterr().err.strip().splitlines()
        assert len(err) == 1
        return json.loads(err[0])

    def test_unknown_flag(self, capsys):
        assert run("walk", "--bogus", "1") == 2
        assert self.one_line_error(capsys)["error"] == "usage"

    def test_unknown_command(self, capsys):
        assert run("fly") == 2
        self.one_line_error(capsys)

    def test_missing_required(self, capsys):
        assert run("walk", "--out", "x") == 2
        assert "--edges" in self.one_line_error(capsys)["message"]

    def test_missing_input(self, tmp_path, capsys):
        assert run("walk", "--edges", tmp_path / "nope.tsv", "--out", tmp_path / "w") != 0
        assert self.one_line_error(capsys)["error"] == "missing-input"

    def test_invariant_violation(self, tree, capsys):
        data = tree / "data"
        assert run("walk", "--edges", data / "edges.tsv", "--p", "1.5", "--out", tree / "bad.txt") != 0
        assert "p" in self.one_line_error(capsys)["message"]
        assert not (tree / "bad.txt.manifest.json").exists()

    def test_bad_type(self, capsys):
        assert run("walk", "--edges", "e", "--out", "o", "--walk-length", "ten") == 2
        self.one_line_error(capsys)

    def test_console_entry(self, tmp_path):
        r = subprocess.run([sys.executable, "-m", "tagembed", "train", "--walks", str(tmp_path / "none")],
                           capture_output=True, text=True)
        assert r.returncode == 2
        assert json.loads(r.stderr)["error"] == "usage"
