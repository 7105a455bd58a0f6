"""Reproduce the depth-ratio and measurement-reduction tables.

Runs both selection variants over the committed bond grids and writes
table1.csv / table2.csv per pool kind. The 14-qubit molecule is skipped
unless --include-beh2 is given (hours of runtime).
"""

import argparse
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from adaptvqe.cli import RunConfig, cmd_compare

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures"


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--pool", choices=["qubit", "qe"], default="qe")
    ap.add_argument("--molecules", nargs="+", default=["h4", "lih", "h6"])
    ap.add_argument("--include-beh2", action="store_true")
    ap.add_argument("--max-layers", type=int, default=250)
    ap.add_argument("--out", default="out/tables")
    args = ap.parse_args()

    molecules = list(args.molecules)
    if args.include_beh2 and "beh2" not in molecules:
        molecules.append("beh2")
    fixtures = []
    for mol in molecules:
        fixtures.extend(str(p) for p in sorted(FIXTURES.glob(f"{mol}_*.fcidump")))
    cfg = RunConfig(
        fixtures=fixtures,
        pool=args.pool,
        variants=["adapt", "tetris"],
        max_layers=args.max_layers,
        out_dir=f"{args.out}_{args.pool}",
    )
    raise SystemExit(cmd_compare(cfg))


if __name__ == "__main__":
    main()
