"""Build src/hypolo/data/mammals_poincare.tsv from the WordNet 3.0 database files.

Usage::

    pip download wn==0.0.23 --no-deps -d /tmp/wn && tar xzf /tmp/wn/wn-0.0.23.tar.gz -C /tmp/wn
    python scripts/build_mammals_fixture.py /tmp/wn/wn-0.0.23/wn/data/wordnet-3.0

Inliers are the noun synsets below ``mammal.n.01`` along hyponym links. The
hierarchy is cut down to a BFS spanning tree and embedded in the disk by a
combinatorial construction: the root sits at the origin and every node puts
its children at Rao distance ``EDGE`` from itself, at equal angles that skip
the direction of its own parent. No optimisation is involved.

The 11 outliers are non-mammal animal nouns. They share no edge with the
mammal tree, so nothing ties them to a particular place: each gets a uniform
random angle and a Rao radius drawn uniformly between the 10th and 90th
percentile of the tree's node radii.
"""
from __future__ import annotations

import argparse
import cmath
import math
from collections import defaultdict, deque
from pathlib import Path

import numpy as np

from hypolo.datasets import INLIER, OUTLIER, Dataset, make_rng, save_embedding
from hypolo.geometry import pairwise_rao

EDGE = 2.0
SEED = 20240611
MAMMAL = "mammal.n.01"
OUTLIER_SYNSETS = (
    "goldfish.n.01", "salmon.n.01", "shark.n.01", "trout.n.01",
    "eagle.n.01", "sparrow.n.01", "penguin.n.01", "ostrich.n.02",
    "crocodile.n.01", "lizard.n.01", "tortoise.n.01",
)
OUT = Path(__file__).resolve().parents[1] / "src" / "hypolo" / "data" / "mammals_poincare.tsv"


def read_nouns(root: Path):
    """Offsets -> (lemmas, hyponym offsets), plus nltk-style names for each offset."""
    synsets = {}
    for line in (root / "data.noun").read_text(encoding="utf-8").splitlines():
        if line.startswith("  "):
            continue
        f = line.split(" | ")[0].split()
        off, wc = f[0], int(f[3], 16)
        lemmas = [f[4 + 2 * i] for i in range(wc)]
        i = 4 + 2 * wc
        pc = int(f[i])
        i += 1
        hypo = []
        for _ in range(pc):
            sym, target, pos = f[i], f[i + 1], f[i + 2]
            i += 4
            if sym == "~" and pos == "n":
                hypo.append(target)
        synsets[off] = (lemmas, hypo)
    senses = {}
    for line in (root / "index.noun").read_text(encoding="utf-8").splitlines():
        if line.startswith("  "):
            continue
        f = line.split()
        lemma, n_syn = f[0], int(f[2])
        for sense, off in enumerate(f[-n_syn:], start=1):
            senses[(lemma, off)] = sense
    names = {}
    for off, (lemmas, _) in synsets.items():
        lemma = lemmas[0].lower()
        names[off] = f"{lemma}.n.{senses[(lemma, off)]:02d}"
    return synsets, names


def spanning_tree(synsets, root):
    parent = {root: None}
    order = [root]
    queue = deque([root])
    while queue:
        node = queue.popleft()
        for child in sorted(synsets[node][1]):
            if child not in parent:
                parent[child] = node
                order.append(child)
                queue.append(child)
    return parent, order


def embed_tree(parent, order):
    children = defaultdict(list)
    for node in order[1:]:
        children[parent[node]].append(node)
    step = math.tanh(EDGE / 2.0)
    pos = {order[0]: 0j}
    for node in order:
        kids = children[node]
        if not kids:
            continue
        a = pos[node]
        if parent[node] is None:
            base, slots = 0.0, len(kids)
            angles = [base + 2 * math.pi * j / slots for j in range(len(kids))]
        else:
            p = pos[parent[node]]
            base = cmath.phase((p - a) / (1 - a.conjugate() * p))
            slots = len(kids) + 1
            angles = [base + 2 * math.pi * j / slots for j in range(1, slots)]
        for kid, theta in zip(kids, angles):
            w = step * cmath.exp(1j * theta)
            pos[kid] = (w + a) / (1 + a.conjugate() * w)
    return pos


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("wordnet_dir", type=Path)
    ap.add_argument("--out", type=Path, default=OUT)
    args = ap.parse_args(argv)

    synsets, names = read_nouns(args.wordnet_dir)
    by_name = {v: k for k, v in names.items()}
    root = by_name[MAMMAL]
    parent, order = spanning_tree(synsets, root)
    pos = embed_tree(parent, order)
    tree_pts = np.array([(pos[o].real, pos[o].imag) for o in order])

    radii = pairwise_rao(tree_pts, np.zeros((1, 2)))[:, 0]
    lo, hi = np.percentile(radii, [10, 90])
    rng = make_rng(SEED)
    out_pts = []
    for name in OUTLIER_SYNSETS:
        off = by_name[name]
        if off in parent:
            raise SystemExit(f"{name} is inside the mammal closure")
        theta = 2 * math.pi * rng.random()
        rho = math.tanh((lo + (hi - lo) * rng.random()) / 2.0)
        out_pts.append((rho * math.cos(theta), rho * math.sin(theta)))

    points = np.vstack([tree_pts, np.array(out_pts)])
    labels = (INLIER,) * len(order) + (OUTLIER,) * len(OUTLIER_SYNSETS)
    row_names = tuple(names[o] for o in order) + OUTLIER_SYNSETS
    data = Dataset(points, labels, row_names)
    save_embedding(data, args.out)
    print(f"wrote {len(data)} points ({len(order)} mammals, {len(OUTLIER_SYNSETS)} outliers) "
          f"to {args.out}; max tree radius {radii.max():.3f}")


if __name__ == "__main__":
    main()
