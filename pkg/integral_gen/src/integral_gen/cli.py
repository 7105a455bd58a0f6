"""Command-line front end for fixture generation."""

from __future__ import annotations

import argparse
import sys

from .generate import BOND_GRID, write_fixture
from .scf import ScfError

MOLECULES = ("h4", "lih", "h6", "beh2")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="integral-gen",
        description="Generate STO-3G RHF FCIDUMP fixtures with manifests.",
    )
    parser.add_argument("--molecule", choices=MOLECULES, action="append")
    parser.add_argument("--bond", type=float, action="append",
                        help="bond length in Angstrom (repeatable)")
    parser.add_argument("--all", action="store_true",
                        help="full molecule/bond-length grid")
    parser.add_argument("--out", default="fixtures", help="output directory")
    args = parser.parse_args(argv)

    if args.all:
        jobs = [(m, b) for m in MOLECULES for b in BOND_GRID]
    else:
        if not args.molecule:
            parser.error("need --molecule (or --all)")
        bonds = args.bond or list(BOND_GRID)
        jobs = [(m, b) for m in args.molecule for b in bonds]

    status = 0
    for molecule, bond in jobs:
        try:
            dump, man = write_fixture(molecule, bond, args.out)
            print(f"wrote {dump} + manifest")
        except ScfError as exc:
            print(f"{molecule} @ {bond:.1f} A: SCF failed: {exc}", file=sys.stderr)
            status = 1
    return status


if __name__ == "__main__":
    raise SystemExit(main())
