"""Exact algebra of Pauli strings and real- or complex-weighted Pauli sums.

Strings are encoded symplectically as a pair of bitmasks (X part, Z part)
plus a power of i.  Bit q of a mask refers to qubit q; a qubit with both
bits set carries a Y factor.  The canonical symbol string I/X/Y/Z (the
plain tensor product, no leading phase) corresponds to

    sigma(x, z) = i^{popcount(x & z)} * X^x * Z^z

so that (1, 1) -> iXZ = Y.  Phases of products are accumulated with a
popcount rule derived from this normal form, which makes every operation
O(1) in machine words and exhaustively checkable against the 4x4
single-qubit multiplication table.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

# Coefficients smaller than this are dropped after sum arithmetic, so
# cancellation residue cannot accumulate into spurious terms.
COEFF_FLOOR = 1e-14

# Dense matrix realization is an oracle facility for small registers only.
MATRIX_QUBIT_CAP = 10

_PAULI_1Q = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

_SYMBOL_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_BITS_SYMBOL = {v: k for k, v in _SYMBOL_BITS.items()}

_PHASES = (1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j)


class DimensionError(ValueError):
    """Operands act on different numbers of qubits."""


class MatrixCapError(ValueError):
    """Dense realization requested beyond the qubit cap."""


def _popcount(x: int) -> int:
    return bin(x).count("1")


@dataclass(frozen=True)
class PauliString:
    """A signed tensor product of single-qubit Paulis over a fixed register.

    ``phase_exp`` is the exponent k in the overall unit i^k; the symbol
    part is the plain tensor product of I/X/Y/Z factors.
    """

    qubit_count: int
    x_mask: int
    z_mask: int
    phase_exp: int = 0

    def __post_init__(self):
        if self.qubit_count < 1:
            raise ValueError("qubit_count must be >= 1")
        full = (1 << self.qubit_count) - 1
        if self.x_mask & ~full or self.z_mask & ~full:
            raise ValueError("mask bits outside the register")
        object.__setattr__(self, "phase_exp", self.phase_exp % 4)

    # -- constructors ------------------------------------------------------

    @classmethod
    def identity(cls, qubit_count: int) -> "PauliString":
        return cls(qubit_count, 0, 0, 0)

    @classmethod
    def from_factors(cls, factors: str, phase_exp: int = 0) -> "PauliString":
        """Build from a dense symbol string, one I/X/Y/Z per qubit."""
        x = z = 0
        for q, sym in enumerate(factors):
            try:
                bx, bz = _SYMBOL_BITS[sym]
            except KeyError:
                raise ValueError(f"unknown Pauli symbol {sym!r}") from None
            x |= bx << q
            z |= bz << q
        return cls(len(factors), x, z, phase_exp)

    @classmethod
    def from_label(cls, label: str, qubit_count: int) -> "PauliString":
        """Parse the sparse rendering, e.g. ``"X2 X3 X6 Y7"`` or ``"I"``."""
        x = z = 0
        label = label.strip()
        if label and label != "I":
            for tok in label.split():
                m = re.fullmatch(r"([IXYZ])(\d+)", tok)
                if m is None:
                    raise ValueError(f"bad Pauli token {tok!r}")
                sym, q = m.group(1), int(m.group(2))
                if q >= qubit_count:
                    raise DimensionError(f"qubit {q} outside register of {qubit_count}")
                bx, bz = _SYMBOL_BITS[sym]
                if (x | z) & (1 << q):
                    raise ValueError(f"qubit {q} assigned twice in {label!r}")
                x |= bx << q
                z |= bz << q
        return cls(qubit_count, x, z, 0)

    # -- views -------------------------------------------------------------

    @property
    def factors(self) -> str:
        return "".join(
            _BITS_SYMBOL[(self.x_mask >> q) & 1, (self.z_mask >> q) & 1]
            for q in range(self.qubit_count)
        )

    @property
    def phase(self) -> complex:
        return _PHASES[self.phase_exp]

    @property
    def y_count(self) -> int:
        return _popcount(self.x_mask & self.z_mask)

    def weight(self) -> int:
        return _popcount(self.x_mask | self.z_mask)

    def label(self) -> str:
        """Sparse symbol rendering without the phase, e.g. ``"X2 X3 Y7"``."""
        toks = [
            f"{_BITS_SYMBOL[(self.x_mask >> q) & 1, (self.z_mask >> q) & 1]}{q}"
            for q in range(self.qubit_count)
            if (self.x_mask | self.z_mask) >> q & 1
        ]
        return " ".join(toks) if toks else "I"

    def __str__(self):
        pref = {0: "", 1: "i ", 2: "- ", 3: "-i "}[self.phase_exp]
        return pref + self.label()

    def unsigned(self) -> "PauliString":
        return PauliString(self.qubit_count, self.x_mask, self.z_mask, 0)

    # -- algebra -----------------------------------------------------------

    def commutes_with(self, other: "PauliString") -> bool:
        self._check_dim(other)
        return (
            _popcount(self.x_mask & other.z_mask) - _popcount(self.z_mask & other.x_mask)
        ) % 2 == 0

    def _check_dim(self, other: "PauliString"):
        if self.qubit_count != other.qubit_count:
            raise DimensionError(
         f"qubit_count mismatch: {self.qubit_count} vs {other.qubit_count}"
            )

    def to_matrix(self) -> np.ndarray:
        """Dense realization; qubit 0 is the outermost Kronecker factor."""
        if self.qubit_count > MATRIX_QUBIT_CAP:
            raise MatrixCapError(f"{self.qubit_count} qubits exceeds cap {MATRIX_QUBIT_CAP}")
        m = np.array([[self.phase]], dtype=complex)
        for sym in self.factors:
            m = np.kron(m, _PAULI_1Q[sym])
        return m


def multiply(a: PauliString, b: PauliString) -> PauliString:
    """Group product a*b with the accumulated phase.

    Using the normal form sigma(x,z) = i^{x.z} X^x Z^z, the product picks up
    i^{x1.z1 + x2.z2 - x3.z3} (renormalization) times (-1)^{z1.x2} (moving
    X^x2 past Z^z1).
    """
    a._check_dim(b)
    x3 = a.x_mask ^ b.x_mask
    z3 = a.z_mask ^ b.z_mask
    k = (
        a.phase_exp
        + b.phase_exp
        + _popcount(a.x_mask & a.z_mask)
        + _popcount(b.x_mask & b.z_mask)
        + 2 * _popcount(a.z_mask & b.x_mask)
        - _popcount(x3 & z3)
    )
    return PauliString(a.qubit_count, x3, z3, k % 4)


def support(p) -> frozenset:
    """Qubits acted on non-trivially; PauliSum gives the union over terms."""
    if isinstance(p, PauliString):
        mask = p.x_mask | p.z_mask
        return frozenset(q for q in range(p.qubit_count) if mask >> q & 1)
    out = set()
    for x, z, _ in p.iter_terms():
        mask = x | z
        out.update(q for q in range(p.qubit_count) if mask >> q & 1)
    return frozenset(out)


class PauliSum:
    """Complex-weighted combination of unsigned Pauli strings.

    Terms map (x_mask, z_mask) keys to coefficients; the string phase is
    always folded into the coefficient.  Instances are immutable values:
    arithmetic returns new sums and drops coefficients below COEFF_FLOOR.
    """

    __slots__ = ("qubit_count", "_terms", "_applier")

    def __init__(self, qubit_count: int, terms=None):
        self.qubit_count = qubit_count
        clean = {}
        for key, c in (terms or {}).items():
            if abs(c) >= COEFF_FLOOR:
                clean[key] = complex(c)
        self._terms = clean
        self._applier = None  # lazy statevector kernel cache

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, qubit_count: int) -> "PauliSum":
        return cls(qubit_count, {})

    @classmethod
    def from_string(cls, s: PauliString, coeff: complex = 1.0) -> "PauliSum":
        return cls(s.qubit_count, {(s.x_mask, s.z_mask): coeff * s.phase})

    @classmethod
    def from_label_terms(cls, qubit_count: int, terms) -> "PauliSum":
        """terms: iterable of (coeff, sparse label) pairs."""
        acc = {}
        for coeff, label in terms:
            s = PauliString.from_label(label, qubit_count)
            key = (s.x_mask, s.z_mask)
            acc[key] = acc.get(key, 0.0) + complex(coeff)
        return cls(qubit_count, acc)

    # -- views -------------------------------------------------------------

    def iter_terms(self):
        """Yield (x_mask, z_mask, coeff) in a deterministic order."""
        for (x, z) in sorted(self._terms):
            yield x, z, self._terms[(x, z)]

    def coefficient(self, s: PauliString) -> complex:
        c = self._terms.get((s.x_mask, s.z_mask), 0.0)
        return c * np.conj(s.phase) if c else 0.0

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    @property
    def is_hermitian(self) -> bool:
        return all(abs(c.imag) < COEFF_FLOOR for c in self._terms.values())

    @property
    def is_antihermitian(self) -> bool:
        return all(abs(c.real) < COEFF_FLOOR for c in self._terms.values())

    def __eq__(self, other):
        if not isinstance(other, PauliSum):
            return NotImplemented
        return self.qubit_count == other.qubit_count and self._terms == other._terms

    def __hash__(self):
        return hash((self.qubit_count, tuple(sorted(self._terms.items(), key=lambda kv: kv[0]))))

    def __str__(self):
        if not self._terms:
            return "0"
        return " ".join(
            f"{_fmt_coeff(c)} {PauliString(self.qubit_count, x, z).label()}"
            for x, z, c in self.iter_terms()
        )

    # -- arithmetic --------------------------------------------------------

    def _check_dim(self, other: "PauliSum"):
        if self.qubit_count != other.qubit_count:
            raise DimensionError(
                f"qubit_count mismatch: {self.qubit_count} vs {other.qubit_count}"
            )

    def __add__(self, other: "PauliSum") -> "PauliSum":
        self._check_dim(other)
        acc = dict(self._terms)
        for key, c in other._terms.items():
            acc[key] = acc.get(key, 0.0) + c
        return PauliSum(self.qubit_count, acc)

    def __sub__(self, other: "PauliSum") -> "PauliSum":
        return self + (other * -1.0)

    def __mul__(self, scalar) -> "PauliSum":
        return PauliSum(
            self.qubit_count, {key: c * scalar for key, c in self._terms.items()}
        )

    __rmul__ = __mul__

    def __neg__(self) -> "PauliSum":
        return self * -1.0

    def __matmul__(self, other: "PauliSum") -> "PauliSum":
        """Operator product, expanding term by term."""
        self._check_dim(other)
        acc = {}
        for (x1, z1), c1 in self._terms.items():
            s1 = PauliString(self.qubit_count, x1, z1)
            for (x2, z2), c2 in other._terms.items():
                s3 = multiply(s1, PauliString(self.qubit_count, x2, z2))
                key = (s3.x_mask, s3.z_mask)
                acc[key] = acc.get(key, 0.0) + c1 * c2 * s3.phase
        return PauliSum(self.qubit_count, acc)

    def adjoint(self) -> "PauliSum":
        return PauliSum(self.qubit_count, {k: np.conj(c) for k, c in self._terms.items()})

    def to_matrix(self) -> np.ndarray:
        if self.qubit_count > MATRIX_QUBIT_CAP:
            raise MatrixCapError(f"{self.qubit_count} qubits exceeds cap {MATRIX_QUBIT_CAP}")
        dim = 1 << self.qubit_count
        m = np.zeros((dim, dim), dtype=complex)
        for x, z, c in self.iter_terms():
            m += c * PauliString(self.qubit_count, x, z).to_matrix()
        return m


def commutator(a: PauliSum, b: PauliSum) -> PauliSum:
    """ab - ba.  Only anticommuting string pairs contribute, each as 2*ab."""
    a._check_dim(b)
    acc = {}
    for (x1, z1), c1 in a._terms.items():
        s1 = PauliString(a.qubit_count, x1, z1)
        for (x2, z2), c2 in b._terms.items():
            s2 = PauliString(a.qubit_count, x2, z2)
            if s1.commutes_with(s2):
                continue
            s3 = multiply(s1, s2)
            key = (s3.x_mask, s3.z_mask)
            acc[key] = acc.get(key, 0.0) + 2.0 * c1 * c2 * s3.phase
    return PauliSum(a.qubit_count, acc)


def _fmt_coeff(c: complex) -> str:
    if abs(c.imag) < COEFF_FLOOR:
        return f"{c.real:+.16g}"
    if abs(c.real) < COEFF_FLOOR:
        return f"{c.imag:+.16g}i"
    return f"+({c.real:.16g}{c.imag:+.16g}i)"


_TERM_RE = re.compile(
    r"(?P<coeff>[+-]\(?-?[0-9][^IXYZ\s]*\)?i?)\s+(?P<label>I\b|(?:[IXYZ]\d+\s*)+)"
)


def parse_sum(text: str, qubit_count: int) -> PauliSum:
    """Round-trip parser for the str() rendering of a PauliSum."""
    text = text.strip()
    if text == "0" or not text:
        return PauliSum.zero(qubit_count)
    terms = []
    consumed = 0
    for m in _TERM_RE.finditer(text):
        raw = m.group("coeff")
        label = m.group("label").strip()
        if raw.startswith("+(") or raw.startswith("-("):
            inner = raw[1:].strip("()")
            sign = -1.0 if raw[0] == "-" else 1.0
            c = sign * complex(inner.replace("i", "j"))
        elif raw.endswith("i"):
            c = complex(0.0, float(raw[:-1]))
        else:
            c = complex(float(raw), 0.0)
        terms.append((c, label))
        consumed = m.end()
    if not terms or text[consumed:].strip():
        raise ValueError(f"unparseable Pauli sum {text!r}")
    return PauliSum.from_label_terms(qubit_count, terms)
