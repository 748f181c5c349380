#!/usr/bin/env python3
"""Convert <name>_adj.npy / <name>_feat.npy / <name>_label.npy triples into
the edge-list, binary-attribute and label files read by secl.

Usage: convert_dgc_dataset.py SRC_DIR NAME [--out data]
Writes data/NAME/{edges.txt,attributes.bin,labels.txt}.
"""

import argparse
import struct
from pathlib import Path

import numpy as np


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("src", type=Path, help="directory holding the .npy files")
    ap.add_argument("name", help="dataset name, e.g. cora")
    ap.add_argument("--out", type=Path, default=Path("data"))
    args = ap.parse_args()

    adj = np.load(args.src / f"{args.name}_adj.npy")
    feat = np.load(args.src / f"{args.name}_feat.npy").astype("<f8")
    label = np.load(args.src / f"{args.name}_label.npy").astype(np.int64).ravel()
    n = feat.shape[0]
    if adj.shape != (n, n) or label.shape[0] != n:
        raise SystemExit(f"shape mismatch: adj {adj.shape}, feat {feat.shape}, label {label.shape}")

    # Symmetrize, drop the diagonal, keep i < j.
    a = (adj != 0) | (adj.T != 0)
    np.fill_diagonal(a, False)
    rows, cols = np.nonzero(np.triu(a, k=1))

    # Relabel classes to 0..C-1 in sorted order.
    _, label = np.unique(label, return_inverse=True)

    out = args.out / args.name
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "edges.txt", "w") as f:
        f.write(f"# {args.name}: {n} nodes, {rows.size} undirected edges\n")
        for i, j in zip(rows, cols):
            f.write(f"{i} {j}\n")
    with open(out / "attributes.bin", "wb") as f:
        f.write(struct.pack("<II", n, feat.shape[1]))
        f.write(np.ascontiguousarray(feat).tobytes())
    np.savetxt(out / "labels.txt", label, fmt="%d")
    print(f"{args.name}: N={n} m={rows.size} d={feat.shape[1]} classes={label.max() + 1} -> {out}")


if __name__ == "__main__":
    main()
