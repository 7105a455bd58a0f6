"""Exact statevector kernel.

Amplitude indexing puts qubit 0 in the most significant bit, so the binary
rendering of an index reads left-to-right as qubits 0..Q-1 and matches ket
labels like |11110000>.

Pauli-string action is computed in O(2^Q) with bitmask arithmetic: the
symbol string sigma(x, z) maps basis index b to (-i)^{nY} (-1)^{par(b & z)}
times basis index b ^ x (masks here are in index-bit space).  Rotations
exp(theta * i*r*sigma) are cos/sin pairings of the state with its gathered
image; multi-term generators are applied as exact products of commuting
single-string rotations.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .paulis import COEFF_FLOOR, DimensionError, PauliString, PauliSum

NORM_TOL = 1e-12

# Weight-vector caches for summed Pauli application are skipped above this
# budget and the kernel streams term by term instead.
_APPLIER_BYTE_BUDGET = 1 << 30


class UnsupportedGeneratorError(ValueError):
    """Multi-term generator whose strings do not mutually commute."""


def _index_mask(qubit_mask: int, qubit_count: int) -> int:
    """Map a qubit-indexed bitmask to amplitude-index bit positions."""
    m = 0
    for q in range(qubit_count):
        if qubit_mask >> q & 1:
            m |= 1 << (qubit_count - 1 - q)
    return m


_IDX_CACHE: dict[int, np.ndarray] = {}
_SIGNS_CACHE: dict[tuple[int, int], np.ndarray] = {}
_PERM_CACHE: dict[tuple[int, int], np.ndarray] = {}


def _indices(qubit_count: int) -> np.ndarray:
    arr = _IDX_CACHE.get(qubit_count)
    if arr is None:
        arr = np.arange(1 << qubit_count, dtype=np.uint64)
        _IDX_CACHE[qubit_count] = arr
    return arr


def _signs(qubit_count: int, z_idx_mask: int) -> np.ndarray:
    """(-1)^{parity(idx & mask)} as a float array."""
    key = (qubit_count, z_idx_mask)
    arr = _SIGNS_CACHE.get(key)
    if arr is None:
        par = np.bitwise_count(_indices(qubit_count) & np.uint64(z_idx_mask)) & 1
        arr = 1.0 - 2.0 * par.astype(np.float64)
        _SIGNS_CACHE[key] = arr
    return arr


def _perm(qubit_count: int, x_idx_mask: int) -> np.ndarray:
    key = (qubit_count, x_idx_mask)
    arr = _PERM_CACHE.get(key)
    if arr is None:
        arr = (_indices(qubit_count) ^ np.uint64(x_idx_mask)).astype(np.intp)
        _PERM_CACHE[key] = arr
    return arr


@dataclass
class StateVector:
    qubit_count: int
    amplitudes: np.ndarray

    @classmethod
    def basis(cls, bitstring: str) -> "StateVector":
        q = len(bitstring)
        amps = np.zeros(1 << q, dtype=complex)
        amps[int(bitstring, 2)] = 1.0
        return cls(q, amps)

    @classmethod
    def from_amplitudes(cls, amps) -> "StateVector":
        amps = np.asarray(amps, dtype=complex)
        q = int(amps.size).bit_length() - 1
        if 1 << q != amps.size:
            raise ValueError("amplitude count is not a power of two")
        return cls(q, amps.copy())

    def copy(self) -> "StateVector":
        return StateVector(self.qubit_count, self.amplitudes.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def ket_label(self, index: int) -> str:
        return format(index, f"0{self.qubit_count}b")

    def amplitude(self, bitstring: str) -> complex:
        return complex(self.amplitudes[int(bitstring, 2)])

    def _check_dim(self, other: "StateVector"):
        if self.qubit_count != other.qubit_count:
            raise DimensionError("statevector dimension mismatch")


def fix_global_phase(amps: np.ndarray) -> np.ndarray:
    """Rotate so the largest-magnitude amplitude is real positive."""
    k = int(np.argmax(np.abs(amps)))
    a = amps[k]
    if abs(a) < COEFF_FLOOR:
        return amps.copy()
    return amps * (abs(a) / a)


# ---------------------------------------------------------------------------
# compiled actions of a PauliSum


class _Term:
    __slots__ = ("x_idx", "z_idx", "coeff", "front", "r")

    def __init__(self, qubit_count, x_qmask, z_qmask, coeff):
        self.x_idx = _index_mask(x_qmask, qubit_count)
        self.z_idx = _index_mask(z_qmask, qubit_count)
        ny = bin(x_qmask & z_qmask).count("1")
        # sigma|b> = front * (-1)^{par(b & z)} |b ^ x>, front = coeff*(-i)^nY
        self.front = complex(coeff) * (-1j) ** (ny % 4)
        self.coeff = complex(coeff)
        self.r = coeff.imag  # rotation rate for antihermitian i*r*sigma


class _SumAction:
    """Pre-grouped application plan for one PauliSum.

    Operators confined to a few qubits get a compact route: the restricted
    matrix on the support is built once (with an eigendecomposition for
    exponentials) and applied as a single matmul over reshaped amplitude
    axes, instead of one full-vector pass per term.
    """

    COMPACT_WEIGHT_CAP = 5

    def __init__(self, s: PauliSum):
        self.qubit_count = s.qubit_count
        self.terms = [_Term(s.qubit_count, x, z, c) for x, z, c in s.iter_terms()]
        self.mutually_commuting = self._check_commuting(s)
        self._groups = None
        sup_mask = 0
        for x, z, _ in s.iter_terms():
            sup_mask |= x | z
        self.support_qubits = tuple(
            q for q in range(s.qubit_count) if sup_mask >> q & 1
        )
        self._compact = None
        self._compact_eig = None
        if self.terms and 0 < len(self.support_qubits) <= self.COMPACT_WEIGHT_CAP:
            self._compact = _restricted_matrix(s, self.support_qubits)

    def _axes_apply(self, amps: np.ndarray, mat: np.ndarray) -> np.ndarray:
        """Apply a 2^w x 2^w matrix on the support qubits (qubit q = axis q)."""
        w = len(self.support_qubits)
        rest = self.qubit_count - w
        t = amps.reshape([2] * self.qubit_count)
        t = np.moveaxis(t, self.support_qubits, range(w))
        out = (mat @ t.reshape(1 << w, -1)).reshape([2] * w + [2] * rest)
        out = np.moveaxis(out, range(w), self.support_qubits)
        return np.ascontiguousarray(out).reshape(amps.size)

    def apply_compact(self, amps: np.ndarray) -> np.ndarray:
        return self._axes_apply(amps, self._compact)

    def exp_compact(self, amps: np.ndarray, theta: float) -> np.ndarray:
        if self._compact_eig is None:
            # antihermitian restricted matrix: i * hermitian
            hmat = self._compact / 1j
            self._compact_eig = np.linalg.eigh(hmat)
        vals, vecs = self._compact_eig
        u = (vecs * np.exp(1j * theta * vals)) @ vecs.conj().T
        return self._axes_apply(amps, u)

    @staticmethod
    def _check_commuting(s: PauliSum) -> bool:
        keys = [(x, z) for x, z, _ in s.iter_terms()]
        strs = [PauliString(s.qubit_count, x, z) for x, z in keys]
        return all(
            strs[i].commutes_with(strs[j])
            for i in range(len(strs))
            for j in range(i + 1, len(strs))
        )

    def _build_groups(self):
        dim = 1 << self.qubit_count
        by_x: dict[int, list[_Term]] = {}
        for t in self.terms:
            by_x.setdefault(t.x_idx, []).append(t)
        cached = len(by_x) * dim * 16 <= _APPLIER_BYTE_BUDGET
        groups = []
        for x_idx, ts in sorted(by_x.items()):
            w = None
            if cached:
                w = np.zeros(dim, dtype=complex)
                for t in ts:
                    w += t.front * _signs(self.qubit_count, t.z_idx)
                if np.abs(w.imag).max() < COEFF_FLOOR:
                    w = w.real.copy()
            groups.append((x_idx, w, ts))
        self._groups = groups

    def apply(self, amps: np.ndarray) -> np.ndarray:
        """Return (sum) @ amps."""
        if self._compact is not None:
            return self.apply_compact(amps)
        if self._groups is None:
            self._build_groups()
        out = np.zeros_like(amps)
        for x_idx, w, ts in self._groups:
            gathered = amps if x_idx == 0 else amps[_perm(self.qubit_count, x_idx)]
            if w is None:
                w = np.zeros(len(amps), dtype=complex)
                for t in ts:
                    w += t.front * _signs(self.qubit_count, t.z_idx)
            out += w * gathered
        return out


def _restricted_matrix(s: PauliSum, support_qubits) -> np.ndarray:
    """Dense matrix of the sum on its support qubits only."""
    pos = {q: k for k, q in enumerate(support_qubits)}
    w = len(support_qubits)
    m = np.zeros((1 << w, 1 << w), dtype=complex)
    for x, z, c in s.iter_terms():
        xr = zr = 0
        for q, k in pos.items():
            xr |= ((x >> q) & 1) << k
            zr |= ((z >> q) & 1) << k
        m += c * PauliString(w, xr, zr).to_matrix()
    return m


def _action(s: PauliSum) -> _SumAction:
    act = s._applier
    if act is None:
        act = _SumAction(s)
        s._applier = act
    return act


def _rotate_term(amps: np.ndarray, qubit_count: int, t: _Term, theta: float) -> np.ndarray:
    """exp(theta * i * r * sigma) @ amps for a single string.

    exp(theta i r sigma) = cos(r theta) I + i sin(r theta) sigma, with
    sigma amps = (-i)^{nY} signs * gathered.
    """
    c = np.cos(t.r * theta)
    s = np.sin(t.r * theta)
    if s == 0.0:
        return amps if c == 1.0 else amps * c
    gathered = amps if t.x_idx == 0 else amps[_perm(qubit_count, t.x_idx)]
    phase = t.front / (1j * t.r)  # unit modulus: (-i)^nY
    return c * amps + (1j * s * phase) * (_signs(qubit_count, t.z_idx) * gathered)


# ---------------------------------------------------------------------------
# public operations


def apply_generator_exp(state: StateVector, g: PauliSum, theta: float) -> StateVector:
    """exp(theta * g) @ state for an antihermitian generator g.

    Multi-term generators are supported only when all strings mutually
    commute; then the exponential factors exactly into per-string rotations.
    """
    if state.qubit_count != g.qubit_count:
        raise DimensionError("generator and state dimension mismatch")
    if not g.is_antihermitian:
        raise ValueError("generator must be antihermitian (imaginary coefficients)")
    act = _action(g)
    if len(act.terms) > 1 and not act.mutually_commuting:
        raise UnsupportedGeneratorError(
            "multi-term generator with non-commuting strings"
        )
    if act._compact is not None:
        return StateVector(state.qubit_count, act.exp_compact(state.amplitudes, theta))
    amps = state.amplitudes
    for t in act.terms:
        amps = _rotate_term(amps, state.qubit_count, t, theta)
    return StateVector(state.qubit_count, np.asarray(amps, dtype=complex))


def apply_sum(state: StateVector, s: PauliSum) -> StateVector:
    """(sum) @ state, no exponentiation."""
    if state.qubit_count != s.qubit_count:
        raise DimensionError("operator and state dimension mismatch")
    return StateVector(state.qubit_count, _action(s).apply(state.amplitudes))


def expectation(state: StateVector, h: PauliSum) -> float:
    """<psi|H|psi> for a hermitian sum."""
    if state.qubit_count != h.qubit_count:
        raise DimensionError("operator and state dimension mismatch")
    if not h.is_hermitian:
        raise ValueError("expectation requires a hermitian sum")
    val = np.vdot(state.amplitudes, _action(h).apply(state.amplitudes))
    return float(val.real)


def gradient_at_zero(state: StateVector, h: PauliSum, p: PauliSum) -> float:
    """d/dtheta <psi| e^{-theta p} H e^{theta p} |psi> at theta = 0.

    Equals <[H, p]> = 2 Re <H psi | p psi> by antihermiticity of p.
    """
    if not (state.qubit_count == h.qubit_count == p.qubit_count):
        raise DimensionError("dimension mismatch")
    if not h.is_hermitian:
        raise ValueError("h must be hermitian")
    if not p.is_antihermitian:
        raise ValueError("p must be antihermitian")
    hpsi = _action(h).apply(state.amplitudes)
    return _gradient_against(hpsi, state, p)


def _gradient_against(hpsi: np.ndarray, state: StateVector, p: PauliSum) -> float:
    ppsi = _action(p).apply(state.amplitudes)
    return float(2.0 * np.vdot(hpsi, ppsi).real)


@dataclass
class Ansatz:
    """Ordered product of generator exponentials over a reference ket.

    ``operators`` holds antihermitian PauliSums directly or objects exposing
    a ``generator`` attribute (pool operators).  The first operator in the
    list is applied first.
    """

    reference: str
    operators: tuple
    parameters: tuple

    def __post_init__(self):
        if len(self.operators) != len(self.parameters):
            raise ValueError("operator/parameter length mismatch")

    @property
    def qubit_count(self) -> int:
        return len(self.reference)

    def generators(self):
        return [getattr(op, "generator", op) for op in self.operators]

    def with_parameters(self, parameters) -> "Ansatz":
        return Ansatz(self.reference, self.operators, tuple(float(p) for p in parameters))


def prepare(ansatz: Ansatz) -> StateVector:
    state = StateVector.basis(ansatz.reference)
    for g, th in zip(ansatz.generators(), ansatz.parameters):
        state = apply_generator_exp(state, g, th)
    return state


def analytic_gradient(ansatz: Ansatz, h) -> np.ndarray:
    """dE/dtheta_k for E = <psi|H|psi>, psi = U_N .. U_1 |ref>.

    Two-sweep scheme: the forward pass keeps every intermediate state, the
    backward pass marches the costate H|psi> through the inverse factors,
    so the total cost is O(N) generator applications regardless of the
    parameter count.
    """
    hsum = getattr(h, "pauli_sum", h)
    gens = ansatz.generators()
    n = len(gens)
    grad = np.zeros(n)
    states = [StateVector.basis(ansatz.reference)]
    for g, th in zip(gens, ansatz.parameters):
        states.append(apply_generator_exp(states[-1], g, th))
    lam = apply_sum(states[-1], hsum)  # costate H|psi>
    for k in range(n - 1, -1, -1):
        gpsi = apply_sum(states[k + 1], gens[k])
        grad[k] = 2.0 * np.vdot(lam.amplitudes, gpsi.amplitudes).real
        if k > 0:
            lam = apply_generator_exp(lam, gens[k], -ansatz.parameters[k])
    return grad


def overlap(a: StateVector, b: StateVector) -> complex:
    a._check_dim(b)
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def count_determinants(state: StateVector, floor: float = 1e-3) -> int:
    """Basis amplitudes with magnitude >= floor."""
    return int(np.count_nonzero(np.abs(state.amplitudes) >= floor))
