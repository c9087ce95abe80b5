#!/usr/bin/env python3
"""Build the 1000-point, 256-dim, 10-class USPS evaluation sample.

Accepted inputs (whichever copy of USPS you have locally):
  * LIBSVM text format (`usps`, `usps.t`; labels 1..10, features in [-1, 1])
  * the common HDF5 release (`usps.h5` with train/{data,target} and
    test/{data,target})
  * a matlab file with `fea`/`gnd` arrays (the 11-class-indexed
    ClassificationDatasets copy uses this layout)

The sample draws 100 points per class with a fixed seed and rescales pixels
to [0, 1].

    python3 prepare_usps.py usps.h5 data/
"""
import argparse
import pathlib
import random

DIM = 256


def read_libsvm(path):
    rows = []
    for line in path.read_text().splitlines():
        parts = line.split()
        if not parts:
            continue
        label = int(float(parts[0])) - 1
        x = [0.0] * DIM
        for tok in parts[1:]:
            k, v = tok.split(":")
            x[int(k) - 1] = float(v)
        rows.append((label, [(v + 1.0) / 2.0 for v in x]))
    return rows


def read_h5(path):
    import h5py
    rows = []
    with h5py.File(path, "r") as f:
        for split in ("train", "test"):
            if split not in f:
                continue
            data = f[split]["data"][:]
            target = f[split]["target"][:]
            for x, y in zip(data, target):
                rows.append((int(y), [float(v) for v in x.reshape(-1)]))
    return rows


def read_mat(path):
    from scipy.io import loadmat
    m = loadmat(path)
    fea, gnd = m["fea"], m["gnd"].reshape(-1)
    lo, hi = fea.min(), fea.max()
    offset = gnd.min()
    return [(int(y - offset), [float((v - lo) / (hi - lo)) for v in x])
            for x, y in zip(fea, gnd)]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("inputs", type=pathlib.Path, nargs="+")
    ap.add_argument("out_dir", type=pathlib.Path)
    ap.add_argument("--per-class", type=int, default=100)
    ap.add_argument("--seed", type=int, default=2020)
    args = ap.parse_args()

    rows = []
    for path in args.inputs:
        if path.suffix == ".h5":
            rows += read_h5(path)
        elif path.suffix == ".mat":
            rows += read_mat(path)
        else:
            rows += read_libsvm(path)
    by_class = {}
    for label, x in rows:
        assert len(x) == DIM, f"expected {DIM} features, got {len(x)}"
        by_class.setdefault(label, []).append(x)
    assert sorted(by_class) == list(range(10)), sorted(by_class)

    rng = random.Random(args.seed)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    tsv = args.out_dir / "usps1000.tsv"
    with tsv.open("w") as out:
        for label in range(10):
            pool = by_class[label]
            for i, x in enumerate(rng.sample(pool, args.per_class)):
                px = ",".join(f"{v:.6g}" for v in x)
                out.write(f"usps-{label}-{i:03d}\t{label}\t{px}\n")
    (args.out_dir / "usps1000.schema").write_text(
        "classes=10\n"
        "mode.1.name=pixels\n"
        f"mode.1.kind=dense:{DIM}\n"
        "mode.1.metric=euclidean\n")
    print(f"wrote {10 * args.per_class} points to {tsv}")


if __name__ == "__main__":
    main()
