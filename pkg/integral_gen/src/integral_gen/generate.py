"""Fixture generation: RHF integrals to FCIDUMP plus a provenance manifest."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

import numpy as np

from . import __version__
from .fci import fci_ground_energy
from .scf import ScfResult, run_rhf

# Slater-Condon FCI is kept to registers this size or smaller; larger
# fixtures ship without a manifest FCI energy.
FCI_ORBITAL_CAP = 8

BOND_GRID = (1.0, 1.5, 2.0, 2.5, 3.0)


def geometry(molecule: str, bond_length: float):
    """Linear-chain geometries; bond_length in Angstrom."""
    m = molecule.lower()
    if m == "h4":
        return [("H", (0.0, 0.0, i * bond_length)) for i in range(4)], 4
    if m == "h6":
        return [("H", (0.0, 0.0, i * bond_length)) for i in range(6)], 6
    if m == "lih":
        return [("Li", (0.0, 0.0, 0.0)), ("H", (0.0, 0.0, bond_length))], 4
    if m == "beh2":
        return (
            [
                ("H", (0.0, 0.0, -bond_length)),
                ("Be", (0.0, 0.0, 0.0)),
                ("H", (0.0, 0.0, bond_length)),
            ],
            6,
        )
    raise ValueError(f"unsupported molecule {molecule!r}")


def fcidump_text(res: ScfResult) -> str:
    """Serialize MO integrals in FCIDUMP form (chemists' notation, 1-based)."""
    n = res.h_core_mo.shape[0]
    lines = [
        f"&FCI NORB={n},NELEC={res.electron_count},MS2=0,",
        " ORBSYM=" + "1," * n,
        " ISYM=1,",
        "&END",
    ]
    thresh = 1e-12
    for i in range(n):
        for j in range(i + 1):
            for k in range(i + 1):
                lmax = j if k == i else k
                for l in range(lmax + 1):
                    v = res.eri_mo[i, j, k, l]
                    if abs(v) > thresh:
                        lines.append(f" {v:.16E} {i+1} {j+1} {k+1} {l+1}")
    for i in range(n):
        for j in range(i + 1):
            if abs(res.h_core_mo[i, j]) > thresh:
                lines.append(f" {res.h_core_mo[i, j]:.16E} {i+1} {j+1} 0 0")
    lines.append(f" {res.core_energy:.16E} 0 0 0 0")
    return "\n".join(lines) + "\n"


@dataclass
class Fixture:
    molecule: str
    bond_length: float
    fcidump: str
    manifest: dict


def generate(molecule: str, bond_length: float, basis: str = "sto-3g") -> Fixture:
    if basis.lower() != "sto-3g":
        raise ValueError("only the STO-3G basis is supported")
    geom, nelec = geometry(molecule, bond_length)
    res = run_rhf(geom, nelec)
    text = fcidump_text(res)
    fci_energy = None
    if res.h_core_mo.shape[0] <= FCI_ORBITAL_CAP:
        fci_energy = fci_ground_energy(
            res.h_core_mo, res.eri_mo, nelec, res.core_energy
        )
    manifest = {
        "molecule": molecule.lower(),
        "geometry": [
            {"element": el, "xyz_angstrom": list(xyz)} for el, xyz in geom
        ],
        "basis": "sto-3g",
        "bond_length_angstrom": bond_length,
        "electron_count": nelec,
        "spatial_orbital_count": int(res.h_core_mo.shape[0]),
        "hf_energy": res.energy,
        "fci_energy": fci_energy,
        "generator_version": __version__,
        "fcidump_sha256": hashlib.sha256(text.encode()).hexdigest(),
    }
    return Fixture(molecule.lower(), bond_length, text, manifest)


def write_fixture(molecule: str, bond_length: float, out_dir) -> tuple[str, str]:
    from pathlib import Path

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    fx = generate(molecule, bond_length)
    stem = f"{fx.molecule}_{bond_length:.1f}"
    dump_path = out / f"{stem}.fcidump"
    man_path = out / f"{stem}.manifest.json"
    dump_path.write_text(fx.fcidump)
    man_path.write_text(json.dumps(fx.manifest, indent=1) + "\n")
    return str(dump_path), str(man_path)
