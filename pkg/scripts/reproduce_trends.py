"""Profile GHZ and QFT at every optimization level and print the top passes.

Reproduces the directional trends: layout search dominates GHZ compiles at
levels 2-3 on the heavy-hex target, and high-level synthesis is costlier at
level 0 when QFT arrives as one boxed block.

    python scripts/reproduce_trends.py --reps 5 --out trends-out
"""

import argparse
from pathlib import Path

from qpassprof.cli import ExperimentConfig, run_experiment, write_experiment
from qpassprof.profiler import share_of_total

WORKLOADS = [
    ("ghz", 100, "eagle-like", False),
    ("qft", 50, "grid:7x8", True),
    ("qft", 20, "line:20", False),
]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--reps", type=int, default=5)
    ap.add_argument("--top", type=int, default=3)
    ap.add_argument("--out", type=Path, default=Path("trends-out"))
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    for circuit, n, target, boxed in WORKLOADS:
        print(f"\n{circuit}({n}) on {target}{' boxed' if boxed else ''}")
        for level in range(4):
            cfg = ExperimentConfig(circuit, n, level, target, args.reps, args.top, boxed, workers=args.workers)
            summary, reps = run_experiment(cfg)
            write_experiment(cfg, summary, reps, args.out)
            total = summary.total_time.median
            hls = summary.passes.get("HighLevelSynthesis")
            cells = [f"{p.name} {share_of_total(int(p.stats.median), int(total)):.1f}%" for p in summary.top_n(args.top)]
            print(f"  L{level}  total {total / 1e6:9.2f} ms  "
                  f"HLS {hls.stats.median / 1e6 if hls else 0:7.3f} ms  top: {', '.join(cells)}")


if __name__ == "__main__":
    main()
