#!/usr/bin/env python3
"""Dump the full block decomposition of the n-sample state as JSON.

Usage: python scripts/decompose_blocks.py [n] [> blocks.json]

Defaults: n=8, d=2, mu=(0.7,0.3), theta=(0.5, 0.5+0.3i).
"""

import sys

from qlan import experiments as ex


def main() -> int:
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 8
    config = ex.ExperimentConfig(n_list=(n,))
    sys.stdout.write(ex.to_json(ex.run_decompose(config)))
    return 0


if __name__ == "__main__":
    sys.exit(main())
