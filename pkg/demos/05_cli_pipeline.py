"""
The command-line pipeline and its manifests
===========================================

Each stage reads files and writes files plus a JSON manifest. A manifest
holds the resolved configuration, so any stage can be rerun from it alone.
"""

import json
import subprocess
import sys
import tempfile
from pathlib import Path


def tagembed(*args):
    cmd = [sys.executable, "-m", "tagembed", *map(str, args)]
    print("$ tagembed", " ".join(map(str, args)))
    out = subprocess.run(cmd, capture_output=True, text=True)
    if out.stdout:
        print(out.stdout.rstrip())
    if out.stderr:
        print("stderr:", out.stderr.rstrip())
    return out.returncode


work = Path(tempfile.mkdtemp(prefix="tagembed-demo-"))
data = work / "tree"
net = ["--edges", data / "edges.tsv", "--tags", data / "tags.tsv"]

tagembed("synth-tree", "--out", data, "--seed", 1)
tagembed("walk", *net, "--p", 0.2, "--q", 0.1, "--walk-length", 20, "--walks-per-node", 5, "--out", work / "walks.txt")
tagembed("train", "--walks", work / "walks.txt", "--dim", 2, "--epochs", 3, "--negatives", 20, "--out", work / "emb.txt")
tagembed("eval-purity", *net, "--embeddings", work / "emb.txt", "--classes", data / "tag_classes.tsv",
         "--out", work / "purity.txt")

# The manifest records every option, including the defaults we never typed.
manifest = json.loads((work / "emb.txt.manifest.json").read_text())
print("train config:", {k: manifest["config"][k] for k in ("space", "dim", "lr", "negatives", "epochs", "seed")})

# Rerunning from the manifest overwrites the output with identical bytes.
before = (work / "emb.txt").read_bytes()
tagembed("train", "--config", work / "emb.txt.manifest.json")
print("identical after rerun:", (work / "emb.txt").read_bytes() == before)

# Mistakes come back as one JSON line on stderr and a nonzero exit status.
print("exit status:", tagembed("walk", *net, "--p", 1.5, "--out", work / "bad.txt"))
print("outputs in", work)
