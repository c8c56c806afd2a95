#!/usr/bin/env python3
"""Multi-run tour benchmark with best/average/error statistics.

Given a TSPLIB-format file it repeats the solver across consecutive
seeds and prints the usual benchmark table row (best, average, and the
percentage gap from a known optimum when one is supplied).  Without a
file it generates a random 30-city instance so the demo works offline.

Examples:
    python3 demos/tsp_benchmark.py
    python3 demos/tsp_benchmark.py path/to/gr24.tsp --optimum 1272 --runs 10
"""

import argparse
import tempfile
from pathlib import Path

import numpy as np

from nbga.cli import ExperimentConfig, render_report, run_experiment


def write_random_instance(path: Path, n: int, seed: int) -> None:
    """Write a random euclidean instance in TSPLIB node-coordinate form."""
    rng = np.random.default_rng(seed)
    coords = rng.uniform(0.0, 100.0, size=(n, 2))
    lines = [
        f"NAME : random{n}",
        "TYPE : TSP",
        f"DIMENSION : {n}",
        "EDGE_WEIGHT_TYPE : EUC_2D",
        "NODE_COORD_SECTION",
    ]
    lines += [f"{i + 1} {x:.4f} {y:.4f}" for i, (x, y) in enumerate(coords)]
    lines.append("EOF")
    path.write_text("\n".join(lines) + "\n", encoding="ascii")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("instance", nargs="?", help="TSPLIB file (omit for a random instance)")
    parser.add_argument("--optimum", type=float, default=None)
    parser.add_argument("--runs", type=int, default=5)
    parser.add_argument("--pop", type=int, default=100)
    parser.add_argument("--generations", type=int, default=1000)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    with tempfile.TemporaryDirectory() as tmp:
        if args.instance is None:
            print("no instance file given; using a random 30-city instance\n")
            instance_path = Path(tmp) / "random30.tsp"
            write_random_instance(instance_path, n=30, seed=2026)
        else:
            instance_path = Path(args.instance)

        config = ExperimentConfig(
            problem="tsp",
            algorithm="nbga",
            runs=args.runs,
            pop=args.pop,
            generations=args.generations,
            seed=args.seed,
            instance=str(instance_path),
            optimum=args.optimum,
        )
        report = run_experiment(config)
    print(render_report(report))


if __name__ == "__main__":
    main()
