"""Write the 127-qubit heavy-hex target shipped as ``eagle-like.target``.

Seven rows of data qubits (14, 15, 15, 15, 15, 15, 14) joined by four bridge
qubits between consecutive rows; bridge columns alternate between offset 0 and
offset 2.  Durations use the package defaults and errors the synthetic
gradient, so the file is a topology stand-in, not device calibration data.
"""

import argparse
from collections import Counter
from pathlib import Path

from qpassprof.target import from_edges, save_target, shipped_target_path


def heavy_hex_edges():
    row_sizes = [14, 15, 15, 15, 15, 15, 14]
    rows = []
    bridges = []
    q = 0
    for i, size in enumerate(row_sizes):
        rows.append(list(range(q, q + size)))
        q += size
        if i < len(row_sizes) - 1:
            bridges.append(list(range(q, q + 4)))
            q += 4
    edges = []
    for row in rows:
        edges.extend(zip(row, row[1:]))
    for i, br in enumerate(bridges):
        upper, lower = rows[i], rows[i + 1]
        # column positions in a 15-wide frame; the first row lacks column 14,
        # the last row lacks column 0
        cols = [0, 4, 8, 12] if i % 2 == 0 else [2, 6, 10, 14]
        up_off = 0
        low_off = 1 if i + 1 == len(rows) - 1 else 0
        for b, col in zip(br, cols):
            edges.append((upper[col - up_off], b))
            edges.append((b, lower[col - low_off]))
    return q, edges


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=shipped_target_path("eagle-like"))
    args = parser.parse_args()
    n, edges = heavy_hex_edges()
    target = from_edges(n, edges, name="eagle-like")
    deg = Counter()
    for a, b in edges:
        deg[a] += 1
        deg[b] += 1
    assert max(deg.values()) <= 3, "heavy-hex degree bound violated"
    assert len(deg) == n and target.is_connected()
    save_target(target, args.out)
    print(f"wrote {args.out}: {n} qubits, {len(target.coupling)} edges, max degree {max(deg.values())}")


if __name__ == "__main__":
    main()
