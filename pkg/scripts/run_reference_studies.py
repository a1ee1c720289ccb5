#!/usr/bin/env python3
"""Run the reference-configuration studies and write reports under ./out.

The reference setup is the built-in default: 1-d unit interval, N=128,
dt=1e-3, T=0.5, c=2, sine noise (s=2, sigma0=0.5, 16 modes), 64
replicates, u0 = 0.5 cos(pi x), levels 0.2/0.1/0.05/0.025.
"""

import sys

from logac import cli


def main() -> int:
    cfg = cli.default_config()
    worst = 0
    for study in ("oracles", "cauchy", "uniform", "strong", "dependence"):
        print(f"== {study} ==", flush=True)
        code = cli.run(study, cfg)
        print(f"   exit {code}; reports in {cfg.output_dir}/{study}.csv", flush=True)
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    sys.exit(main())
