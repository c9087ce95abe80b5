#!/usr/bin/env python3
"""Convert the 10,000-digit MNIST sample shipped in the `mnist` npm package
(src/digits/<d>.json, 28x28 grayscale in [0,1]) into the graphforge dataset
format plus a matching schema file.

    npm pack mnist && tar xzf mnist-*.tgz
    python3 prepare_mnist.py package/src/digits data/
"""
import argparse
import json
import pathlib
import tarfile

PIXELS = 28 * 28


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("digits_dir", type=pathlib.Path)
    ap.add_argument("out_dir", type=pathlib.Path)
    ap.add_argument("--archive", action="store_true",
                    help="also write mnist10k.tar.gz next to the tsv")
    args = ap.parse_args()
    args.out_dir.mkdir(parents=True, exist_ok=True)

    tsv = args.out_dir / "mnist10k.tsv"
    schema = args.out_dir / "mnist10k.schema"
    count = 0
    with tsv.open("w") as out:
        for digit in range(10):
            # Keep the decimals exactly as published instead of re-rounding.
            text = (args.digits_dir / f"{digit}.json").read_text()
            body = text[text.index("[") + 1:text.rindex("]")]
            values = [v.strip() for v in body.split(",")]
            assert len(values) % PIXELS == 0, digit
            for i in range(len(values) // PIXELS):
                px = values[i * PIXELS:(i + 1) * PIXELS]
                out.write(f"mnist-{digit}-{i:04d}\t{digit}\t{','.join(px)}\n")
                count += 1
    schema.write_text(
        "classes=10\n"
        "mode.1.name=pixels\n"
        f"mode.1.kind=dense:{PIXELS}\n"
        "mode.1.metric=euclidean\n")
    print(f"wrote {count} points to {tsv}")

    if args.archive:
        with tarfile.open(args.out_dir / "mnist10k.tar.gz", "w:gz",
                          compresslevel=9) as tar:
            tar.add(tsv, arcname=tsv.name)
            tar.add(schema, arcname=schema.name)


if __name__ == "__main__":
    main()
