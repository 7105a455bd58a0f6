"""STO-3G basis data and shell construction.

Exponents and contraction coefficients are the standard published STO-3G
parameters.  Primitives are normalized individually and the contracted
function is renormalized to unit self-overlap.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ANGSTROM_TO_BOHR = 1.8897259886

# element -> list of (angular momentum L, exponents, contraction coefficients)
STO3G = {
    "H": [
        (0, [3.425250914, 0.6239137298, 0.1688554040],
            [0.1543289673, 0.5353281423, 0.4446345422]),
    ],
    "Li": [
        (0, [16.11957475, 2.936200663, 0.7946504870],
            [0.1543289673, 0.5353281423, 0.4446345422]),
        (0, [0.6362897469, 0.1478600533, 0.0480886784],
            [-0.09996722919, 0.3995128261, 0.7001154689]),
        (1, [0.6362897469, 0.1478600533, 0.0480886784],
            [0.1559162750, 0.6076837186, 0.3919573931]),
    ],
    "Be": [
        (0, [30.16787069, 5.495115306, 1.487192653],
            [0.1543289673, 0.5353281423, 0.4446345422]),
        (0, [1.314833110, 0.3055389383, 0.0993707456],
            [-0.09996722919, 0.3995128261, 0.7001154689]),
        (1, [1.314833110, 0.3055389383, 0.0993707456],
            [0.1559162750, 0.6076837186, 0.3919573931]),
    ],
}

NUCLEAR_CHARGE = {"H": 1, "Li": 3, "Be": 4}

_CARTESIAN_POWERS = {0: [(0, 0, 0)], 1: [(1, 0, 0), (0, 1, 0), (0, 0, 1)]}


def _double_factorial(n: int) -> int:
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def primitive_norm(alpha: float, lmn) -> float:
    l, m, n = lmn
    L = l + m + n
    pre = (2.0 * alpha / np.pi) ** 0.75 * (4.0 * alpha) ** (L / 2.0)
    denom = np.sqrt(
        _double_factorial(2 * l - 1)
        * _double_factorial(2 * m - 1)
        * _double_factorial(2 * n - 1)
    )
    return pre / denom


@dataclass
class BasisFunction:
    center: np.ndarray  # Bohr
    lmn: tuple
    exps: np.ndarray
    coefs: np.ndarray  # includes primitive norms and contraction renorm

    @property
    def nprim(self) -> int:
        return len(self.exps)


def _self_overlap(exps, coefs, lmn) -> float:
    from .integrals import primitive_overlap

    s = 0.0
    zero = np.zeros(3)
    for a, ca in zip(exps, coefs):
        for b, cb in zip(exps, coefs):
            s += ca * cb * primitive_overlap(a, lmn, zero, b, lmn, zero)
    return s


def build_basis(geometry) -> list[BasisFunction]:
    """geometry: list of (element, xyz in Angstrom) -> basis function list."""
    functions = []
    for element, xyz in geometry:
        if element not in STO3G:
            raise ValueError(f"no STO-3G data for element {element!r}")
        center = np.asarray(xyz, dtype=float) * ANGSTROM_TO_BOHR
        for L, exps, coefs in STO3G[element]:
            exps = np.asarray(exps, dtype=float)
            coefs = np.asarray(coefs, dtype=float)
            for lmn in _CARTESIAN_POWERS[L]:
                c = coefs * np.array([primitive_norm(a, lmn) for a in exps])
                c = c / np.sqrt(_self_overlap(exps, c, lmn))
                functions.append(BasisFunction(center, lmn, exps, c))
    return functions


def nuclear_repulsion(geometry) -> float:
    e = 0.0
    atoms = [
        (NUCLEAR_CHARGE[el], np.asarray(xyz, dtype=float) * ANGSTROM_TO_BOHR)
        for el, xyz in geometry
    ]
    for i in range(len(atoms)):
        for j in range(i + 1, len(atoms)):
            zi, ri = atoms[i]
            zj, rj = atoms[j]
            e += zi * zj / np.linalg.norm(ri - rj)
    return e
