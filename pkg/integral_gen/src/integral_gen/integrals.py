"""Gaussian integrals over contracted Cartesian functions.

McMurchie-Davidson scheme: Hermite expansion coefficients E couple the
Cartesian pair to Hermite Gaussians, and Coulomb-type integrals contract
them against Boys-function tensors R.  Covers any angular momentum; the
STO-3G sets used here only exercise s and p shells.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.special import hyp1f1

from .basis import NUCLEAR_CHARGE, ANGSTROM_TO_BOHR, BasisFunction


def boys(n: int, x: float) -> float:
    return hyp1f1(n + 0.5, n + 1.5, -x) / (2.0 * n + 1.0)


def hermite_e(i: int, j: int, t: int, qx: float, a: float, b: float) -> float:
    """Expansion coefficient of x^i_A x^j_B Gaussian pair over Hermite t."""
    p = a + b
    q = a * b / p
    if t < 0 or t > i + j:
        return 0.0
    if i == j == t == 0:
        return float(np.exp(-q * qx * qx))
    if j == 0:
        return (
            hermite_e(i - 1, j, t - 1, qx, a, b) / (2 * p)
            - (q * qx / a) * hermite_e(i - 1, j, t, qx, a, b)
            + (t + 1) * hermite_e(i - 1, j, t + 1, qx, a, b)
        )
    return (
        hermite_e(i, j - 1, t - 1, qx, a, b) / (2 * p)
        + (q * qx / b) * hermite_e(i, j - 1, t, qx, a, b)
        + (t + 1) * hermite_e(i, j - 1, t + 1, qx, a, b)
    )


def primitive_overlap(a, lmn1, ra, b, lmn2, rb) -> float:
    s = 1.0
    for k in range(3):
        s *= hermite_e(lmn1[k], lmn2[k], 0, ra[k] - rb[k], a, b)
    return s * (np.pi / (a + b)) ** 1.5


def primitive_kinetic(a, lmn1, ra, b, lmn2, rb) -> float:
    l2, m2, n2 = lmn2
    term0 = b * (2 * (l2 + m2 + n2) + 3) * primitive_overlap(a, lmn1, ra, b, lmn2, rb)
    term1 = -2.0 * b * b * (
        primitive_overlap(a, lmn1, ra, b, (l2 + 2, m2, n2), rb)
        + primitive_overlap(a, lmn1, ra, b, (l2, m2 + 2, n2), rb)
        + primitive_overlap(a, lmn1, ra, b, (l2, m2, n2 + 2), rb)
    )
    term2 = -0.5 * (
        l2 * (l2 - 1) * primitive_overlap(a, lmn1, ra, b, (l2 - 2, m2, n2), rb)
        + m2 * (m2 - 1) * primitive_overlap(a, lmn1, ra, b, (l2, m2 - 2, n2), rb)
        + n2 * (n2 - 1) * primitive_overlap(a, lmn1, ra, b, (l2, m2, n2 - 2), rb)
    )
    return term0 + term1 + term2


def _hermite_coulomb(t, u, v, n, p, pc):
    if t == u == v == 0:
        r2 = pc[0] * pc[0] + pc[1] * pc[1] + pc[2] * pc[2]
        return (-2.0 * p) ** n * boys(n, p * r2)
    if t == u == 0:
        val = pc[2] * _hermite_coulomb(t, u, v - 1, n + 1, p, pc)
        if v > 1:
            val += (v - 1) * _hermite_coulomb(t, u, v - 2, n + 1, p, pc)
        return val
    if t == 0:
        val = pc[1] * _hermite_coulomb(t, u - 1, v, n + 1, p, pc)
        if u > 1:
            val += (u - 1) * _hermite_coulomb(t, u - 2, v, n + 1, p, pc)
        return val
    val = pc[0] * _hermite_coulomb(t - 1, u, v, n + 1, p, pc)
    if t > 1:
        val += (t - 1) * _hermite_coulomb(t - 2, u, v, n + 1, p, pc)
    return val


def primitive_nuclear(a, lmn1, ra, b, lmn2, rb, rc) -> float:
    p = a + b
    rp = (a * ra + b * rb) / p
    pc = rp - rc
    val = 0.0
    for t in range(lmn1[0] + lmn2[0] + 1):
        ex = hermite_e(lmn1[0], lmn2[0], t, ra[0] - rb[0], a, b)
        for u in range(lmn1[1] + lmn2[1] + 1):
            ey = hermite_e(lmn1[1], lmn2[1], u, ra[1] - rb[1], a, b)
            for v in range(lmn1[2] + lmn2[2] + 1):
                ez = hermite_e(lmn1[2], lmn2[2], v, ra[2] - rb[2], a, b)
                val += ex * ey * ez * _hermite_coulomb(t, u, v, 0, p, pc)
    return 2.0 * np.pi / p * val


def primitive_eri(a, lmn1, ra, b, lmn2, rb, c, lmn3, rc, d, lmn4, rd) -> float:
    p = a + b
    q = c + d
    alpha = p * q / (p + q)
    rp = (a * ra + b * rb) / p
    rq = (c * rc + d * rd) / q
    pq = rp - rq
    val = 0.0
    for t in range(lmn1[0] + lmn2[0] + 1):
        e1x = hermite_e(lmn1[0], lmn2[0], t, ra[0] - rb[0], a, b)
        for u in range(lmn1[1] + lmn2[1] + 1):
            e1y = hermite_e(lmn1[1], lmn2[1], u, ra[1] - rb[1], a, b)
            for v in range(lmn1[2] + lmn2[2] + 1):
                e1z = hermite_e(lmn1[2], lmn2[2], v, ra[2] - rb[2], a, b)
                e1 = e1x * e1y * e1z
                if e1 == 0.0:
                    continue
                for tt in range(lmn3[0] + lmn4[0] + 1):
                    e2x = hermite_e(lmn3[0], lmn4[0], tt, rc[0] - rd[0], c, d)
                    for uu in range(lmn3[1] + lmn4[1] + 1):
                        e2y = hermite_e(lmn3[1], lmn4[1], uu, rc[1] - rd[1], c, d)
                        for vv in range(lmn3[2] + lmn4[2] + 1):
                            e2z = hermite_e(lmn3[2], lmn4[2], vv, rc[2] - rd[2], c, d)
                            e2 = e2x * e2y * e2z
                            if e2 == 0.0:
                                continue
                            val += (
                                e1
                                * e2
                                * (-1.0) ** (tt + uu + vv)
                                * _hermite_coulomb(t + tt, u + uu, v + vv, 0, alpha, pq)
                            )
    return val * 2.0 * np.pi ** 2.5 / (p * q * np.sqrt(p + q))


def _contract2(f, bf1: BasisFunction, bf2: BasisFunction, *extra) -> float:
    val = 0.0
    for a, ca in zip(bf1.exps, bf1.coefs):
        for b, cb in zip(bf2.exps, bf2.coefs):
            val += ca * cb * f(a, bf1.lmn, bf1.center, b, bf2.lmn, bf2.center, *extra)
    return val


def overlap_matrix(basis) -> np.ndarray:
    n = len(basis)
    s = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1):
            s[i, j] = s[j, i] = _contract2(primitive_overlap, basis[i], basis[j])
    return s


def kinetic_matrix(basis) -> np.ndarray:
    n = len(basis)
    t = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1):
            t[i, j] = t[j, i] = _contract2(primitive_kinetic, basis[i], basis[j])
    return t


def nuclear_matrix(basis, geometry) -> np.ndarray:
    n = len(basis)
    v = np.zeros((n, n))
    centers = [
        (NUCLEAR_CHARGE[el], np.asarray(xyz, dtype=float) * ANGSTROM_TO_BOHR)
        for el, xyz in geometry
    ]
    for i in range(n):
        for j in range(i + 1):
            val = 0.0
            for z, rc in centers:
                val -= z * _contract2(primitive_nuclear, basis[i], basis[j], rc)
            v[i, j] = v[j, i] = val
    return v


def eri_tensor(basis) -> np.ndarray:
    """Chemists' notation (ij|kl) with full 8-fold symmetry filled in."""
    n = len(basis)
    eri = np.zeros((n, n, n, n))

    def contracted(i, j, k, l):
        b1, b2, b3, b4 = basis[i], basis[j], basis[k], basis[l]
        val = 0.0
        for a, ca in zip(b1.exps, b1.coefs):
            for b, cb in zip(b2.exps, b2.coefs):
                for c, cc in zip(b3.exps, b3.coefs):
                    for d, cd in zip(b4.exps, b4.coefs):
                        val += ca * cb * cc * cd * primitive_eri(
                            a, b1.lmn, b1.center,
                            b, b2.lmn, b2.center,
                            c, b3.lmn, b3.center,
                            d, b4.lmn, b4.center,
                        )
        return val

    for i in range(n):
        for j in range(i + 1):
            ij = i * (i + 1) // 2 + j
            for k in range(n):
                for l in range(k + 1):
                    kl = k * (k + 1) // 2 + l
                    if ij < kl:
                        continue
                    val = contracted(i, j, k, l)
                    for a, b in ((i, j), (j, i)):
                        for c, d in ((k, l), (l, k)):
                            eri[a, b, c, d] = val
                            eri[c, d, a, b] = val
    return eri
