#!/usr/bin/env python3
# Copyright 2026 The bgan Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#    http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Write an MNIST subset in IDX format for offline machines.

The official training files are used when present in the data directory.
Without network access, this script converts the 5,000-image MNIST subset
that ships inside the mlxtend package into

    <data-dir>/mnist-subset-images-idx3-ubyte
    <data-dir>/mnist-subset-labels-idx1-ubyte

Usage: python3 tools/make_mnist_idx.py [--data-dir DIR]
"""

import argparse
import os
import struct
import sys

import numpy as np


def write_idx(path, array, magic):
    with open(path, "wb") as f:
        f.write(struct.pack(">I", magic))
        for d in array.shape:
            f.write(struct.pack(">I", d))
        f.write(array.astype(np.uint8).tobytes())


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument(
        "--data-dir",
        default=os.environ.get("BGAN_DATA_DIR", "data"),
        help="output directory (default: $BGAN_DATA_DIR or ./data)",
    )
    args = parser.parse_args()

    try:
        from mlxtend.data import mnist_data
    except ImportError:
        sys.exit("mlxtend is required: pip install mlxtend")

    images, labels = mnist_data()
    images = np.asarray(images).reshape(-1, 28, 28)
    if images.min() < 0 or images.max() > 255:
        sys.exit("unexpected pixel range in the bundled subset")

    os.makedirs(args.data_dir, exist_ok=True)
    img_path = os.path.join(args.data_dir, "mnist-subset-images-idx3-ubyte")
    lbl_path = os.path.join(args.data_dir, "mnist-subset-labels-idx1-ubyte")
    write_idx(img_path, images, 0x00000803)
    write_idx(lbl_path, np.asarray(labels), 0x00000801)
    print(f"wrote {images.shape[0]} images to {img_path}")


if __name__ == "__main__":
    main()
