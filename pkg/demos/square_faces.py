"""Faces of the square [-1, 1]^2 written as a diagonal pencil.

Edges are one-dimensional faces, corners are extreme points; the null-space
test and the geometric oracle agree, and walking along an edge lands on a
corner.

    python3 demos/square_faces.py
"""
from __future__ import annotations

import numpy as np

from spectracert import (extreme_oracle_geometric, face_direction_space, is_extreme,
                         kernel_dimension, load_example, walk_to_extreme)


def main():
    sq = load_example("square")
    for z in [(1.0, 1.0), (1.0, 0.3), (-0.5, -1.0)]:
        face = face_direction_space(sq, z)
        orc = extreme_oracle_geometric(sq, z)
        print(f"z={z}: kernel dim {kernel_dimension(sq, z)}, face dim {face.dim}, "
              f"extreme={is_extreme(sq, z)}, oracle={orc.is_extreme} ({orc.confidence})")
    start = np.array([1.0, 0.3])
    ends = [walk_to_extreme(sq, start, sign=s) for s in (1.0, -1.0)]
    print("walking from", start.tolist(), "reaches", [np.round(e, 9).tolist() for e in ends])


if __name__ == "__main__":
    main()
