#!/usr/bin/env python3
"""Write an MNIST subset as IDX files.

The source is the 5000-sample MNIST excerpt shipped inside the mlxtend wheel
(mlxtend/data/data/mnist_5k.csv.gz, 500 images per digit, one image per row,
784 pixel columns followed by the label). Fetch the wheel with
`pip download --no-deps mlxtend` or pass the csv.gz directly.
"""
import argparse
import gzip
import struct
import zipfile
from pathlib import Path

MEMBER = "mlxtend/data/data/mnist_5k.csv.gz"


def read_rows(source: Path):
    if source.suffix == ".whl":
        raw = zipfile.ZipFile(source).read(MEMBER)
    else:
        raw = source.read_bytes()
    for line in gzip.decompress(raw).decode().splitlines():
        fields = [int(v) for v in line.split(",")]
        yield fields[:784], fields[784]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("source", type=Path, help="mlxtend wheel or mnist_5k.csv.gz")
    ap.add_argument("--out", type=Path, default=Path("data"))
    ap.add_argument("--prefix", default="mnist012")
    ap.add_argument("--digits", default="0,1,2")
    args = ap.parse_args()

    keep = {int(d) for d in args.digits.split(",")}
    rows = [(px, lab) for px, lab in read_rows(args.source) if lab in keep]
    args.out.mkdir(parents=True, exist_ok=True)
    with open(args.out / f"{args.prefix}-images-idx3-ubyte", "wb") as f:
        f.write(struct.pack(">IIII", 0x803, len(rows), 28, 28))
        for px, _ in rows:
            f.write(bytes(px))
    with open(args.out / f"{args.prefix}-labels-idx1-ubyte", "wb") as f:
        f.write(struct.pack(">II", 0x801, len(rows)))
        f.write(bytes(lab for _, lab in rows))
    print(f"wrote {len(rows)} images to {args.out}")


if __name__ == "__main__":
    main()
