#!/usr/bin/env python3
"""Run the main convergence sweep and print the CSV table plus fitted rate.

Usage: python scripts/convergence_sweep.py [out.csv]

Defaults: d=2, mu=(0.7,0.3), theta=(0.5, 0.5+0.3i), n in {8,16,32,64}.
Pass extra CLI flags through the `qlan converge` command for other setups.
"""

import sys

from qlan import experiments as ex


def main() -> int:
    config = ex.ExperimentConfig()
    result = ex.run_converge(config)
    text = ex.to_csv(result)
    if len(sys.argv) > 1:
        with open(sys.argv[1], "w", newline="") as f:
            f.write(text)
    sys.stdout.write(text)
    print(f"# fitted log-log rate: {result['fitted_rate']:.4f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
