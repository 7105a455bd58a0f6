"""Restricted Hartree-Fock with DIIS acceleration."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import build_basis, nuclear_repulsion
from .integrals import eri_tensor, kinetic_matrix, nuclear_matrix, overlap_matrix


class ScfError(RuntimeError):
    pass


@dataclass
class ScfResult:
    energy: float  # total RHF energy, Hartree
    mo_coeff: np.ndarray  # (nbf, nbf) columns are MOs, ascending orbital energy
    mo_energy: np.ndarray
    h_core_mo: np.ndarray  # one-electron integrals in the MO basis
    eri_mo: np.ndarray  # (pq|rs) in the MO basis, chemists' notation
    core_energy: float  # nuclear repulsion
    electron_count: int


def run_rhf(
    geometry,
    electron_count: int,
    max_cycles: int = 400,
    conv_energy: float = 1e-11,
    conv_density: float = 1e-9,
    diis_depth: int = 8,
) -> ScfResult:
    if electron_count % 2:
        raise ScfError("restricted reference needs an even electron count")
    basis = build_basis(geometry)
    nbf = len(basis)
    nocc = electron_count // 2
    if nocc > nbf:
        raise ScfError("more electron pairs than basis functions")

    s = overlap_matrix(basis)
    hcore = kinetic_matrix(basis) + nuclear_matrix(basis, geometry)
    eri = eri_tensor(basis)
    e_nuc = nuclear_repulsion(geometry)

    # symmetric orthogonalization
    sval, svec = np.linalg.eigh(s)
    if sval.min() < 1e-8:
        raise ScfError("near-singular overlap matrix")
    x = svec @ np.diag(sval ** -0.5) @ svec.T
    s_half = svec @ np.diag(sval ** 0.5) @ svec.T

    def density(c):
        cocc = c[:, :nocc]
        return 2.0 * cocc @ cocc.T

    def fock(d):
        j = np.einsum("pqrs,rs->pq", eri, d)
        k = np.einsum("prqs,rs->pq", eri, d)
        return hcore + j - 0.5 * k

    def electronic_energy(d, f):
        return 0.5 * np.sum(d * (hcore + f))

    def cycle_scf(level_shift, damping_cycles):
        # core-Hamiltonian guess
        _, c_prime = np.linalg.eigh(x.T @ hcore @ x)
        c = x @ c_prime
        d = density(c)
        e_old = electronic_energy(d, fock(d))
        errs, focks = [], []
        for cycle in range(max_cycles):
            f = fock(d)
            err = x.T @ (f @ d @ s - s @ d @ f) @ x
            errs.append(err)
            focks.append(f)
            if len(errs) > diis_depth:
                errs.pop(0)
                focks.pop(0)
            if len(errs) > 1 and cycle >= damping_cycles:
                m = len(errs)
                bmat = -np.ones((m + 1, m + 1))
                bmat[m, m] = 0.0
                for i in range(m):
                    for j in range(m):
                        bmat[i, j] = np.sum(errs[i] * errs[j])
                rhs = np.zeros(m + 1)
                rhs[m] = -1.0
                try:
                    w = np.linalg.solve(bmat, rhs)[:m]
                    f = sum(wi * fi for wi, fi in zip(w, focks))
                except np.linalg.LinAlgError:
                    pass
            fo = x.T @ f @ x
            if level_shift:
                # lift the virtual block; the fixed point is unchanged
                do = s_half @ d @ s_half
                fo = fo + level_shift * (np.eye(nbf) - 0.5 * do)
            _, c_prime = np.linalg.eigh(fo)
            c = x @ c_prime
            d_new = density(c)
            if cycle < damping_cycles:
                d_new = 0.3 * d_new + 0.7 * d
            e_new = electronic_energy(d_new, fock(d_new))
            d_change = np.max(np.abs(d_new - d))
            d = d_new
            if abs(e_new - e_old) < conv_energy and d_change < conv_density:
                return d, e_new
            e_old = e_new
        return None, None

    d = None
    for level_shift, damping_cycles in ((0.0, 0), (0.0, 12), (0.3, 12), (1.0, 24)):
        d, e_old = cycle_scf(level_shift, damping_cycles)
        if d is not None:
            break
    if d is None:
        raise ScfError(f"SCF failed to converge in {max_cycles} cycles")

    # final orbitals from the converged (unshifted) Fock matrix
    f = fock(d)
    mo_energy, c_prime = np.linalg.eigh(x.T @ f @ x)
    c = x @ c_prime

    h_mo = c.T @ hcore @ c
    eri_mo = np.einsum("pqrs,pi,qj,rk,sl->ijkl", eri, c, c, c, c, optimize=True)
    return ScfResult(
        energy=float(e_old + e_nuc),
        mo_coeff=c,
        mo_energy=mo_energy,
        h_core_mo=h_mo,
        eri_mo=eri_mo,
        core_energy=float(e_nuc),
        electron_count=electron_count,
    )
