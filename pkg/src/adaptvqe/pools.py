"""Operator pools: qubit strings, qubit excitations, fermionic excitations.

Every pool is a deterministic ordered list; rebuilding with the same inputs
reproduces it exactly, which is what makes trace checkpoints restorable.
Generators appearing multiple times up to an overall sign are collapsed to
a single canonical representative.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass

from .chem import excitation_generator, pair_excitation
from .paulis import PauliString, PauliSum, support

QUBIT_SINGLE = "qubit-single"
QUBIT_DOUBLE = "qubit-double"
QE_SINGLE = "qe-single"
QE_DOUBLE = "qe-double"
FERM_SINGLE = "fermionic-single"
FERM_DOUBLE = "fermionic-double"


@dataclass(frozen=True)
class PoolOperator:
    generator: PauliSum
    support: frozenset
    kind: str
    label: str
    circuit_template: tuple  # dispatch key consumed by the circuit compiler

    def __post_init__(self):
        if not self.generator.is_antihermitian:
            raise ValueError(f"pool operator {self.label} is not antihermitian")
        if self.support != support(self.generator):
            raise ValueError(f"pool operator {self.label} has a wrong support set")
        from .statevec import _action

        if not _action(self.generator).mutually_commuting:
            raise ValueError(f"pool operator {self.label} has non-commuting terms")


@dataclass(frozen=True)
class OperatorPool:
    qubit_count: int
    kind: str  # qubit | qe | fermionic
    operators: tuple

    def __len__(self):
        return len(self.operators)

    def __getitem__(self, i) -> PoolOperator:
        return self.operators[i]

    def __iter__(self):
        return iter(self.operators)

    def by_label(self, label: str) -> PoolOperator:
        for op in self.operators:
            if op.label == label:
                return op
        raise KeyError(f"no pool operator labelled {label!r}")

    def to_json(self) -> str:
        return json.dumps(
            [
                {
                    "kind": op.kind,
                    "label": op.label,
                    "support": sorted(op.support),
                    "term_count": len(op.generator),
                }
                for op in self.operators
            ],
            indent=1,
        )


def _sign_free_signature(g: PauliSum):
    """Hashable key identifying a generator up to overall sign."""
    items = tuple((x, z, c) for x, z, c in g.iter_terms())
    lead = items[0][2]
    ref = lead.imag if abs(lead.imag) > abs(lead.real) else lead.real
    flip = -1.0 if ref < 0 else 1.0
    return tuple((x, z, round((flip * c).real, 12), round((flip * c).imag, 12)) for x, z, c in items)


def _assemble(qubit_count: int, pool_kind: str, ops: list) -> OperatorPool:
    seen = {}
    kept = []
    for op in ops:
        key = _sign_free_signature(op.generator)
        if key in seen:
            continue  # sign duplicate; first (canonical order) wins
        seen[key] = op
        kept.append(op)
    return OperatorPool(qubit_count, pool_kind, tuple(kept))


def _check_even(qubit_count: int):
    if qubit_count < 2 or qubit_count % 2:
        raise ValueError(f"pools need an even qubit_count >= 2, got {qubit_count}")


def _qubit_string_op(qubit_count: int, placement: dict, kind: str) -> PoolOperator:
    label = " ".join(f"{sym}{q}" for q, sym in sorted(placement.items()))
    s = PauliString.from_label(label, qubit_count)
    gen = PauliSum.from_string(s, 1j)
    return PoolOperator(gen, support(s), kind, label, ("pauli_product",))


def build_qubit_pool(qubit_count: int) -> OperatorPool:
    """Single Pauli strings i*X_iY_j (weight 2) and the one-Y / three-Y
    weight-4 families, over index sets with an even sum.  Strings are kept
    distinct unless equal up to an overall sign, so both Y placements of a
    pair appear.  Within each support the Y-on-highest-index string comes
    first, which fixes the argmax tie-break deterministically.
    """
    _check_even(qubit_count)
    ops = []
    for a, b in itertools.combinations(range(qubit_count), 2):
        if (a + b) % 2:
            continue
        ops.append(_qubit_string_op(qubit_count, {a: "X", b: "Y"}, QUBIT_SINGLE))
        ops.append(_qubit_string_op(qubit_count, {a: "Y", b: "X"}, QUBIT_SINGLE))
    for subset in itertools.combinations(range(qubit_count), 4):
        if sum(subset) % 2:
            continue
        for spot in reversed(subset):  # Y on the highest index first
            placement = {q: ("Y" if q == spot else "X") for q in subset}
            ops.append(_qubit_string_op(qubit_count, placement, QUBIT_DOUBLE))
        for spot in reversed(subset):
            placement = {q: ("X" if q == spot else "Y") for q in subset}
            ops.append(_qubit_string_op(qubit_count, placement, QUBIT_DOUBLE))
    return _assemble(qubit_count, "qubit", ops)


def _spin(q: int) -> int:
    return q % 2


def _double_pairings(qubit_count: int):
    """Spin-projection-conserving pair partitions of every 4-index subset."""
    for subset in itertools.combinations(range(qubit_count), 4):
        a, b, c, d = subset
        for p, q in (((a, b), (c, d)), ((a, c), (b, d)), ((a, d), (b, c))):
            if sorted(_spin(x) for x in p) == sorted(_spin(x) for x in q):
                yield p, q


def _excitation_pool(qubit_count: int, electron_count, pool_kind: str) -> OperatorPool:
    chem_kind = "fermionic" if pool_kind == "fermionic" else "qubit-excitation"
    s_kind = FERM_SINGLE if pool_kind == "fermionic" else QE_SINGLE
    d_kind = FERM_DOUBLE if pool_kind == "fermionic" else QE_DOUBLE
    ops = []
    for i, j in itertools.combinations(range(qubit_count), 2):
        if _spin(i) != _spin(j):
            continue  # spin flip
        gen = excitation_generator((i, j), qubit_count, chem_kind)
        ops.append(
            PoolOperator(gen, support(gen), s_kind, f"{s_kind} {i},{j}", ("qe_single", i, j))
        )
    for p, q in _double_pairings(qubit_count):
        gen = pair_excitation(p, q, qubit_count, chem_kind)
        label = f"{d_kind} {p[0]},{p[1]}|{q[0]},{q[1]}"
        template = ("qe_double", p[0], p[1], q[0], q[1])
        ops.append(PoolOperator(gen, support(gen), d_kind, label, template))
    if pool_kind == "fermionic":
        # fermionic operators are compiled as products of string rotations
        ops = [
            PoolOperator(op.generator, op.support, op.kind, op.label, ("pauli_product",))
            for op in ops
        ]
    return _assemble(qubit_count, pool_kind, ops)


def build_qe_pool(qubit_count: int, electron_count: int) -> OperatorPool:
    """Qubit-excitation singles and doubles (Z chains omitted), spin
    conserving.  The pool spans all index combinations, not just
    occupied-to-virtual ones, so electron_count does not change its content.
    """
    _check_even(qubit_count)
    return _excitation_pool(qubit_count, electron_count, "qe")


def build_fermionic_pool(qubit_count: int) -> OperatorPool:
    """Fermionic excitation generators with their Jordan-Wigner Z chains."""
    _check_even(qubit_count)
    return _excitation_pool(qubit_count, None, "fermionic")


def build_pool(kind: str, qubit_count: int, electron_count: int = 0) -> OperatorPool:
    if kind == "qubit":
        return build_qubit_pool(qubit_count)
    if kind == "qe":
        return build_qe_pool(qubit_count, electron_count)
    if kind == "fermionic":
        return build_fermionic_pool(qubit_count)
    raise ValueError(f"unknown pool kind {kind!r}")
