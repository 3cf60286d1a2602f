#!/usr/bin/env python3
# Copyright 2026 The HPQS Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Writes a stratified 4000/1000 MNIST subset in IDX format.

The source is the 5000-image MNIST sample bundled with mlxtend
(`pip install mlxtend`), 500 images per digit. Each class is shuffled with a
fixed seed and split 400 train / 100 test; the splits are then interleaved
with a second fixed shuffle so that prefixes stay roughly class balanced.
"""

import argparse
import os
import struct

import numpy as np


def write_idx_images(path, images):
    with open(path, "wb") as f:
        f.write(struct.pack(">IIII", 0x00000803, len(images), 28, 28))
        f.write(images.astype(np.uint8).tobytes())


def write_idx_labels(path, labels):
    with open(path, "wb") as f:
        f.write(struct.pack(">II", 0x00000801, len(labels)))
        f.write(labels.astype(np.uint8).tobytes())


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", default="data/mnist")
    parser.add_argument("--train-per-class", type=int, default=400)
    args = parser.parse_args()

    from mlxtend.data import mnist_data

    x, y = mnist_data()
    x = np.rint(x).astype(np.uint8)
    y = y.astype(np.uint8)

    rng = np.random.RandomState(20240601)
    train_idx, test_idx = [], []
    for digit in range(10):
        idx = np.flatnonzero(y == digit)
        rng.shuffle(idx)
        train_idx.extend(idx[: args.train_per_class])
        test_idx.extend(idx[args.train_per_class :])
    train_idx = np.array(train_idx)
    test_idx = np.array(test_idx)
    rng.shuffle(train_idx)
    rng.shuffle(test_idx)

    os.makedirs(args.out, exist_ok=True)
    write_idx_images(os.path.join(args.out, "train-images-idx3-ubyte"), x[train_idx])
    write_idx_labels(os.path.join(args.out, "train-labels-idx1-ubyte"), y[train_idx])
    write_idx_images(os.path.join(args.out, "t10k-images-idx3-ubyte"), x[test_idx])
    write_idx_labels(os.path.join(args.out, "t10k-labels-idx1-ubyte"), y[test_idx])
    print(f"wrote {len(train_idx)} train / {len(test_idx)} test records to {args.out}")


if __name__ == "__main__":
    main()
