"""Molecular integral ingestion and fermion-to-qubit mapping.

FCIDUMP files carry spatial-orbital integrals in chemists' notation with
1-based indices.  Spin orbitals are interleaved (even qubit = alpha, odd
qubit = beta of the same spatial orbital) so a closed-shell reference with
n electrons renders as |1..10..0>.  Ladder operators map as

    a_p -> (X_p + i Y_p)/2 (x) prod_{q<p} Z_q
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

import numpy as np

from .paulis import PauliString, PauliSum

SYMMETRY_TOL = 1e-10


class FcidumpError(ValueError):
    """Malformed FCIDUMP content; message carries the line number."""


@dataclass
class MolecularIntegrals:
    spatial_orbital_count: int
    electron_count: int
    core_energy: float
    h1: np.ndarray  # (n, n), Hartree
    h2: np.ndarray  # (n, n, n, n) chemists' (pq|rs), Hartree
    ms2: int = 0

    def __post_init__(self):
        n = self.spatial_orbital_count
        if self.h1.shape != (n, n) or self.h2.shape != (n, n, n, n):
            raise ValueError("integral tensor dimensions inconsistent with NORB")
        if np.max(np.abs(self.h1 - self.h1.T)) > SYMMETRY_TOL:
            raise ValueError("one-electron tensor is not symmetric")
        for perm in ((1, 0, 2, 3), (0, 1, 3, 2), (2, 3, 0, 1)):
            if np.max(np.abs(self.h2 - np.transpose(self.h2, perm))) > SYMMETRY_TOL:
                raise ValueError("two-electron tensor violates 8-fold symmetry")

    @property
    def qubit_count(self) -> int:
        return 2 * self.spatial_orbital_count


def parse_fcidump(text: str) -> MolecularIntegrals:
    """Parse FCIDUMP text into populated, symmetry-complete tensors."""
    lines = text.splitlines()
    header_chunks = []
    body_start = None
    for ln, line in enumerate(lines, start=1):
        header_chunks.append(line)
        if "&END" in line.upper() or line.strip() == "/":
            body_start = ln
            break
    if body_start is None:
        raise FcidumpError("line 1: no &END terminating the FCIDUMP header")
    header = " ".join(header_chunks).upper()

    def header_int(name):
        m = re.search(rf"{name}\s*=\s*(-?\d+)", header)
        if m is None:
            raise FcidumpError(f"line 1: header is missing {name}")
        return int(m.group(1))

    norb = header_int("NORB")
    nelec = header_int("NELEC")
    ms2 = int(re.search(r"MS2\s*=\s*(-?\d+)", header).group(1)) if "MS2" in header else 0
    if norb < 1:
        raise FcidumpError("line 1: NORB must be positive")

    h1 = np.zeros((norb, norb))
    h2 = np.zeros((norb, norb, norb, norb))
    core = 0.0
    seen1: dict[tuple, float] = {}
    seen2: dict[tuple, float] = {}

    for ln in range(body_start, len(lines)):
        line = lines[ln].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 5:
            raise FcidumpError(f"line {ln + 1}: expected 'value p q r s', got {line!r}")
        try:
            val = float(parts[0].replace("D", "E").replace("d", "e"))
            p, q, r, s = (int(t) for t in parts[1:])
        except ValueError:
            raise FcidumpError(f"line {ln + 1}: non-numeric field in {line!r}") from None
        for idx in (p, q, r, s):
            if idx < 0 or idx > norb:
                raise FcidumpError(f"line {ln + 1}: orbital index {idx} out of range 0..{norb}")
        if p == q == r == s == 0:
            core = val
        elif r == 0 and s == 0:
            if p == 0 or q == 0:
                raise FcidumpError(f"line {ln + 1}: one-electron entry with a zero index")
            key = (min(p, q) - 1, max(p, q) - 1)
            if key in seen1 and abs(seen1[key] - val) > SYMMETRY_TOL:
                raise FcidumpError(
                    f"line {ln + 1}: symmetry violation, h[{p},{q}] conflicts with earlier value"
                )
            seen1[key] = val
            h1[p - 1, q - 1] = h1[q - 1, p - 1] = val
        else:
            if p == 0 or q == 0 or r == 0 or s == 0:
                raise FcidumpError(f"line {ln + 1}: two-electron entry with a zero index")
            i, j, k, l = p - 1, q - 1, r - 1, s - 1
            images = {
                (i, j, k, l), (j, i, k, l), (i, j, l, k), (j, i, l, k),
                (k, l, i, j), (l, k, i, j), (k, l, j, i), (l, k, j, i),
            }
            key = min(images)
            if key in seen2 and abs(seen2[key] - val) > SYMMETRY_TOL:
                raise FcidumpError(
                    f"line {ln + 1}: symmetry violation, ({p}{q}|{r}{s}) conflicts with earlier value"
                )
            seen2[key] = val
            for a, b, c, d in images:
                h2[a, b, c, d] = val

    return MolecularIntegrals(norb, nelec, core, h1, h2, ms2)


def write_fcidump(m: MolecularIntegrals) -> str:
    """Emit FCIDUMP text (canonical unique entries, deterministic order)."""
    n = m.spatial_orbital_count
    out = [
        f"&FCI NORB={n},NELEC={m.electron_count},MS2={m.ms2},",
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
                    v = m.h2[i, j, k, l]
                    if abs(v) > thresh:
                        out.append(f" {v:.16E} {i+1} {j+1} {k+1} {l+1}")
    for i in range(n):
        for j in range(i + 1):
            if abs(m.h1[i, j]) > thresh:
                out.append(f" {m.h1[i, j]:.16E} {i+1} {j+1} 0 0")
    out.append(f" {m.core_energy:.16E} 0 0 0 0")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# Jordan-Wigner mapping


def jw_ladder(index: int, qubit_count: int, dagger: bool) -> PauliSum:
    """JW image of a (a^dagger) on one spin orbital, Z chain on lower qubits."""
    chain = 0
    for q in range(index):
        chain |= 1 << q
    xs = PauliString(qubit_count, 1 << index, chain)  # X_p Z_{<p}
    ys = PauliString(qubit_count, 1 << index, chain | (1 << index))  # Y_p Z_{<p}
    sign = -0.5j if dagger else 0.5j
    return PauliSum(
        qubit_count,
        {(xs.x_mask, xs.z_mask): 0.5, (ys.x_mask, ys.z_mask): sign},
    )


def qubit_ladder(index: int, qubit_count: int, dagger: bool) -> PauliSum:
    """Chain-free qubit ladder operator Q (Q^dagger) = (X -+ iY)/2."""
    sign = -0.5j if dagger else 0.5j
    return PauliSum(
        qubit_count,
        {(1 << index, 0): 0.5, (1 << index, 1 << index): sign},
    )


@dataclass
class QubitHamiltonian:
    pauli_sum: PauliSum  # identity-free, hermitian
    qubit_count: int
    constant_offset: float  # core energy plus the identity component
    hf_reference: str

    def __post_init__(self):
        if not self.pauli_sum.is_hermitian:
            raise ValueError("qubit Hamiltonian must be hermitian")
        if len(self.hf_reference) != self.qubit_count:
            raise ValueError("hf_reference length differs from qubit_count")

    def energy(self, state) -> float:
        from .statevec import expectation

        return expectation(state, self.pauli_sum) + self.constant_offset


def _split_identity(s: PauliSum) -> tuple[PauliSum, float]:
    terms = dict(s._terms)
    ident = terms.pop((0, 0), 0.0)
    if abs(complex(ident).imag) > 1e-10:
        raise ValueError("identity component should be real")
    return PauliSum(s.qubit_count, terms), float(complex(ident).real)


def spin_orbital_h1(m: MolecularIntegrals) -> np.ndarray:
    n_so = m.qubit_count
    h = np.zeros((n_so, n_so))
    for s in range(n_so):
        for t in range(n_so):
            if s % 2 == t % 2:
                h[s, t] = m.h1[s // 2, t // 2]
    return h


def spin_orbital_eri_phys(m: MolecularIntegrals) -> np.ndarray:
    """<st|uv> physicists' two-electron integrals over interleaved spin orbitals."""
    n_so = m.qubit_count
    eri = np.zeros((n_so, n_so, n_so, n_so))
    for s in range(n_so):
        for t in range(n_so):
            for u in range(n_so):
                for v in range(n_so):
                    if s % 2 == u % 2 and t % 2 == v % 2:
                        eri[s, t, u, v] = m.h2[s // 2, u // 2, t // 2, v // 2]
    return eri


def hartree_fock_energy(m: MolecularIntegrals) -> float:
    """Closed-shell reference energy implied by the integrals."""
    h = spin_orbital_h1(m)
    eri = spin_orbital_eri_phys(m)
    occ = range(m.electron_count)
    e = m.core_energy + sum(h[i, i] for i in occ)
    e += 0.5 * sum(eri[i, j, i, j] - eri[i, j, j, i] for i in occ for j in occ)
    return float(e)


def jordan_wigner(m: MolecularIntegrals) -> QubitHamiltonian:
    """Map the second-quantized Hamiltonian to an interleaved-spin qubit form."""
    n_so = m.qubit_count
    h1 = spin_orbital_h1(m)
    eri = spin_orbital_eri_phys(m)

    create = [jw_ladder(p, n_so, True) for p in range(n_so)]
    annihilate = [jw_ladder(p, n_so, False) for p in range(n_so)]

    total = PauliSum.zero(n_so)
    for s in range(n_so):
        for t in range(n_so):
            if abs(h1[s, t]) > 1e-12:
                total = total + h1[s, t] * (create[s] @ annihilate[t])
    # 1/2 sum <st|uv> a+_s a+_t a_v a_u, nonzero only for spin-conserving labels
    for s in range(n_so):
        for t in range(n_so):
            if s == t:
                continue
            a_st = create[s] @ create[t]
            for u in range(n_so):
                for v in range(n_so):
                    if u == v:
                        continue
                    g = eri[s, t, u, v]
                    if abs(g) > 1e-12:
                        total = total + (0.5 * g) * (a_st @ (annihilate[v] @ annihilate[u]))

    body, ident = _split_identity(total)
    reference = "1" * m.electron_count + "0" * (n_so - m.electron_count)
    return QubitHamiltonian(body, n_so, m.core_energy + ident, reference)


def _ladders(qubit_count: int, kind: str):
    if kind == "fermionic":
        return (
            lambda p: jw_ladder(p, qubit_count, True),
            lambda p: jw_ladder(p, qubit_count, False),
        )
    if kind == "qubit-excitation":
        return (
            lambda p: qubit_ladder(p, qubit_count, True),
            lambda p: qubit_ladder(p, qubit_count, False),
        )
    raise ValueError(f"unknown excitation kind {kind!r}")


def pair_excitation(
    pair_from: tuple, pair_to: tuple, qubit_count: int, kind: str
) -> PauliSum:
    """Antihermitian double moving a pair from pair_from to pair_to."""
    (i, j), (k, l) = sorted(pair_from), sorted(pair_to)
    if len({i, j, k, l}) != 4 or max(i, j, k, l) >= qubit_count:
        raise ValueError(f"bad double-excitation pairs {pair_from}, {pair_to}")
    up, dn = _ladders(qubit_count, kind)
    a = (up(k) @ up(l)) @ (dn(j) @ dn(i))
    return a - a.adjoint()


def excitation_generator(indices: tuple, qubit_count: int, kind: str) -> PauliSum:
    """Antihermitian single or double excitation generator.

    kind 'fermionic' uses JW ladders (Z chains included); 'qubit-excitation'
    uses chain-free qubit ladders, which drops every Z factor.  The double
    creates on the upper pair and annihilates the lower pair, which lands on
    the conventional printed sign of the 8-string form.
    """
    indices = tuple(indices)
    if sorted(set(indices)) != list(indices):
        raise ValueError(f"indices must be strictly increasing, got {indices}")
    if indices[-1] >= qubit_count:
        raise ValueError("index outside the register")
    if len(indices) == 2:
        i, j = indices
        up, dn = _ladders(qubit_count, kind)
        a = up(i) @ dn(j)
        return a - a.adjoint()
    if len(indices) == 4:
        i, j, k, l = indices
        return pair_excitation((i, j), (k, l), qubit_count, kind)
    raise ValueError("excitations take 2 or 4 indices")


jw_excitation = excitation_generator


# ---------------------------------------------------------------------------
# JSON qubit-Hamiltonian interchange


def hamiltonian_to_json(h: QubitHamiltonian) -> str:
    terms = [
        {"coeff": c.real, "string": PauliString(h.qubit_count, x, z).label()}
        for x, z, c in h.pauli_sum.iter_terms()
    ]
    return json.dumps(
        {
            "qubit_count": h.qubit_count,
            "terms": terms,
            "constant": h.constant_offset,
            "hf_reference": h.hf_reference,
        },
        indent=1,
    )


def hamiltonian_from_json(text: str) -> QubitHamiltonian:
    doc = json.loads(text)
    q = int(doc["qubit_count"])
    s = PauliSum.from_label_terms(
        q, [(t["coeff"], t["string"]) for t in doc["terms"]]
    )
    body, ident = _split_identity(s)
    return QubitHamiltonian(
        body, q, float(doc["constant"]) + ident, doc["hf_reference"]
    )
