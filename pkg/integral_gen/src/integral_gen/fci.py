"""Determinant-basis full CI via Slater-Condon rules.

Independent of any fermion-to-qubit mapping: determinants are spin-orbital
occupation bitmasks (interleaved alpha/beta) restricted to the requested
spin projection, and matrix elements follow the excitation-degree case
rules directly.
"""

from __future__ import annotations

import itertools

import numpy as np


def _spin_orbital_integrals(h_mo, eri_mo):
    n = h_mo.shape[0]
    n_so = 2 * n
    h1 = np.zeros((n_so, n_so))
    for p in range(n_so):
        for q in range(n_so):
            if p % 2 == q % 2:
                h1[p, q] = h_mo[p // 2, q // 2]
    # physicists' <pq|rs> with spin deltas p~r, q~s
    eri = np.zeros((n_so, n_so, n_so, n_so))
    for p in range(n_so):
        for q in range(n_so):
            for r in range(n_so):
                for s in range(n_so):
                    if p % 2 == r % 2 and q % 2 == s % 2:
                        eri[p, q, r, s] = eri_mo[p // 2, r // 2, q // 2, s // 2]
    return h1, eri


def _single_phase(mask: int, m: int, p: int) -> float:
    lo, hi = (m, p) if m < p else (p, m)
    between = mask & (((1 << hi) - 1) ^ ((1 << (lo + 1)) - 1))
    return -1.0 if bin(between).count("1") % 2 else 1.0


def _occupied(mask: int, n_so: int):
    return [p for p in range(n_so) if mask >> p & 1]


def fci_ground_energy(h_mo, eri_mo, electron_count: int, core_energy: float, ms2: int = 0) -> float:
    """Lowest eigenvalue over determinants with the given Sz sector."""
    n = h_mo.shape[0]
    n_so = 2 * n
    n_alpha = (electron_count + ms2) // 2
    n_beta = electron_count - n_alpha
    if n_alpha > n or n_beta > n or n_alpha < 0 or n_beta < 0:
        raise ValueError("impossible electron/spin counts for this orbital space")
    h1, eri = _spin_orbital_integrals(h_mo, eri_mo)

    dets = []
    for alpha in itertools.combinations(range(n), n_alpha):
        amask = sum(1 << (2 * a) for a in alpha)
        for beta in itertools.combinations(range(n), n_beta):
            dets.append(amask + sum(1 << (2 * b + 1) for b in beta))
    dets.sort()
    dim = len(dets)

    occ_lists = [_occupied(d, n_so) for d in dets]
    hmat = np.zeros((dim, dim))

    for ki, (det, occ) in enumerate(zip(dets, occ_lists)):
        # diagonal
        e = sum(h1[p, p] for p in occ)
        e += 0.5 * sum(
            eri[p, q, p, q] - eri[p, q, q, p] for p in occ for q in occ
        )
        hmat[ki, ki] = e
        # singles and doubles against later determinants only (symmetric fill)
        for kj in range(ki + 1, dim):
            other = dets[kj]
            diff = det ^ other
            ndiff = bin(diff).count("1")
            if ndiff == 2:
                (m,) = (p for p in range(n_so) if det >> p & 1 and diff >> p & 1)
                (p,) = (q for q in range(n_so) if other >> q & 1 and diff >> q & 1)
                sign = _single_phase(det, m, p)
                val = h1[m, p] + sum(
                    eri[m, q, p, q] - eri[m, q, q, p]
                    for q in occ
                    if q != m
                )
                hmat[ki, kj] = hmat[kj, ki] = sign * val
            elif ndiff == 4:
                mm = [q for q in range(n_so) if det >> q & 1 and diff >> q & 1]
                pp = [q for q in range(n_so) if other >> q & 1 and diff >> q & 1]
                m, nn = mm
                p, q = pp
                sign = _single_phase(det, m, p)
                sign *= _single_phase(det ^ (1 << m) ^ (1 << p), nn, q)
                hmat[ki, kj] = hmat[kj, ki] = sign * (
                    eri[m, nn, p, q] - eri[m, nn, q, p]
                )
    vals = np.linalg.eigvalsh(hmat)
    return float(vals[0] + core_energy)
