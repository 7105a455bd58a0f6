"""Random-initialization landscape study per adaptive layer.

For each layer: the warm-start minimum, the cold-start minimum, and a set
of uniform random starts in [-pi, pi], each optimized to the same
tolerance. Writes one CSV per layer.
"""

import argparse
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from adaptvqe.cli import RunConfig, cmd_landscape

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures"


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--fixture", default=str(FIXTURES / "h6_1.0.fcidump"))
    ap.add_argument("--pool", choices=["qubit", "qe", "fermionic"], default="qe")
    ap.add_argument("--variant", choices=["adapt", "tetris"], default="adapt")
    ap.add_argument("--samples", type=int, default=300)
    ap.add_argument("--max-layers", type=int, default=8)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--out", default="out/landscape")
    args = ap.parse_args()

    cfg = RunConfig(
        fixtures=[args.fixture],
        pool=args.pool,
        variants=[args.variant],
        samples=args.samples,
        max_layers=args.max_layers,
        seed=args.seed,
        out_dir=args.out,
    )
    raise SystemExit(cmd_landscape(cfg))


if __name__ == "__main__":
    main()
