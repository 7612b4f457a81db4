#!/usr/bin/env python3
"""Map the instability of both uniform backgrounds over (eps, kappa).

Writes the per-cell maximum growth rate and most unstable mode index for
the symmetric and antisymmetric states on a repulsive-parameter grid. The
symmetric map should come out identically zero.

Usage: python scripts/run_stability_map.py [out_dir]
"""

import json
import sys

from ringbdg.cli import parse_config, run


def main() -> int:
    out_dir = sys.argv[1] if len(sys.argv) > 1 else "results/stability_map"
    worst = {}
    for parity in ("symmetric", "antisymmetric"):
        config = parse_config(
            json.dumps(
                {
                    "command": "stability-map",
                    "eps_min": 0.0, "eps_max": 10.0, "eps_points": 100,
                    "kappa_min": 0.0, "kappa_max": 10.0, "kappa_points": 100,
                    "kappa_sign": -1,
                    "parity": parity,
                    "m_max": 6,
                    "out_dir": f"{out_dir}/{parity}",
                }
            )
        )
        manifest = run(config)
        if manifest.status != "ok":
            print(f"error: {manifest.errors}", file=sys.stderr)
            return 1
        import csv
        import os

        with open(os.path.join(f"{out_dir}/{parity}", "stability_map.csv"), newline="") as f:
            rates = [float(row["max_growth"]) for row in csv.DictReader(f)]
        worst[parity] = max(rates)
        unstable_cells = sum(r > 0 for r in rates)
        print(f"{parity:>14}: {unstable_cells} unstable cells, largest rate {worst[parity]:.4f}")
    if worst["symmetric"] == 0.0:
        print("symmetric (ground) state stable across the whole repulsive grid")
    return 0


if __name__ == "__main__":
    sys.exit(main())
