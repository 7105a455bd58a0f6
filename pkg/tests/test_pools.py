import itertools

import numpy as np
import pytest

from adaptvqe.chem import jw_ladder, qubit_ladder
from adaptvqe.paulis import PauliString, PauliSum, commutator, support
from adaptvqe.pools import (
    build_fermionic_pool,
    build_qe_pool,
    build_qubit_pool,
)
from adaptvqe.statevec import _action


def sign_free_key(g: PauliSum):
    items = tuple((x, z, c) for x, z, c in g.iter_terms())
    lead = items[0][2]
    ref = lead.imag if abs(lead.imag) > abs(lead.real) else lead.real
    flip = -1.0 if ref < 0 else 1.0
    return tuple(
        (x, z, round((flip * c).real, 10), round((flip * c).imag, 10)) for x, z, c in items
    )


# -- brute-force enumeration oracles ----------------------------------------


def brute_qubit_pool_size(qubit_count):
    keys = set()
    for i, j in itertools.permutations(range(qubit_count), 2):
        if (i + j) % 2:
            continue
        s = PauliString.from_label(f"X{i} Y{j}", qubit_count)
        keys.add(sign_free_key(PauliSum.from_string(s, 1j)))
    for subset in itertools.permutations(range(qubit_count), 4):
        if sum(subset) % 2:
            continue
        i, j, k, l = subset
        for syms in ("XXXY", "YYYX"):
            label = " ".join(
                f"{s}{q}" for s, q in sorted(zip(syms, subset), key=lambda t: t[1])
            )
            s = PauliString.from_label(label, qubit_count)
            keys.add(sign_free_key(PauliSum.from_string(s, 1j)))
    return len(keys)


def brute_excitation_pool_size(qubit_count, kind):
    lad = qubit_ladder if kind == "qe" else jw_ladder
    up = lambda p: lad(p, qubit_count, True)
    dn = lambda p: lad(p, qubit_count, False)
    keys = set()
    for i, j in itertools.permutations(range(qubit_count), 2):
        if i % 2 != j % 2:
            continue
        a = up(i) @ dn(j)
        t = a - a.adjoint()
        if t:
            keys.add(sign_free_key(t))
    for tup in itertools.permutations(range(qubit_count), 4):
        i, j, k, l = tup
        if sorted((i % 2, j % 2)) != sorted((k % 2, l % 2)):
            continue
        a = (up(i) @ up(j)) @ (dn(k) @ dn(l))
        t = a - a.adjoint()
        if t:
            keys.add(sign_free_key(t))
    return len(keys)


def test_qubit_pool_matches_brute_force_and_regression():
    for q, expected in ((4, 12), (8, 328)):
        pool = build_qubit_pool(q)
        assert len(pool) == brute_qubit_pool_size(q) == expected


def test_qe_pool_matches_brute_force_and_regression():
    for q, expected in ((4, 4), (8, 90)):
        pool = build_qe_pool(q, q // 2)
        assert len(pool) == brute_excitation_pool_size(q, "qe") == expected


def test_fermionic_pool_matches_brute_force():
    assert len(build_fermionic_pool(8)) == brute_excitation_pool_size(8, "fermionic") == 90


def test_pools_deterministic():
    a = build_qubit_pool(8)
    b = build_qubit_pool(8)
    assert [op.label for op in a] == [op.label for op in b]
    a = build_qe_pool(8, 4)
    b = build_qe_pool(8, 4)
    assert [op.label for op in a] == [op.label for op in b]


def test_qubit_pool_odd_counts_rejected():
    with pytest.raises(ValueError):
        build_qubit_pool(5)
    with pytest.raises(ValueError):
        build_qe_pool(7, 2)


def test_qubit_pool_empty_for_two_qubits():
    assert len(build_qubit_pool(2)) == 0


def test_qubit_pool_structure():
    pool = build_qubit_pool(8)
    for op in pool:
        assert len(op.generator) == 1
        assert len(op.support) in (2, 4)
        ((x, z, c),) = list(op.generator.iter_terms())
        assert abs(c - 1j) < 1e-12
    labels = {op.label for op in pool}
    assert "X2 X3 X6 Y7" in labels
    assert "X0 X1 X4 Y5" in labels
    # both Y placements of a sign-independent pair are distinct entries
    assert "X0 Y2" in labels and "Y0 X2" in labels


def test_qubit_pool_even_sum_rule():
    pool = build_qubit_pool(8)
    for op in pool:
        assert sum(op.support) % 2 == 0


def test_qe_pool_spin_rules():
    pool = build_qe_pool(8, 4)
    labels = {op.label for op in pool}
    assert "qe-single 0,2" in labels
    assert "qe-single 0,1" not in labels  # spin flip
    for op in pool:
        if op.kind == "qe-single":
            i, j = (int(t) for t in op.label.split()[1].split(","))
            assert i % 2 == j % 2


def number_operator(qubit_count):
    s = PauliSum.zero(qubit_count)
    for q in range(qubit_count):
        s = s + PauliSum.from_label_terms(qubit_count, [(0.5, "I"), (-0.5, f"Z{q}")])
    return s


@pytest.mark.parametrize("kind", ["qe", "fermionic"])
def test_excitation_pools_preserve_particle_number(kind):
    pool = build_qe_pool(6, 2) if kind == "qe" else build_fermionic_pool(6)
    n_op = number_operator(6)
    for op in pool:
        assert len(commutator(op.generator, n_op)) == 0


def test_pool_operator_invariants():
    for pool in (build_qubit_pool(6), build_qe_pool(6, 2), build_fermionic_pool(6)):
        seen = set()
        for op in pool:
            assert op.generator.is_antihermitian
            assert op.support == support(op.generator)
            assert _action(op.generator).mutually_commuting
            key = sign_free_key(op.generator)
            assert key not in seen  # no sign duplicates
            seen.add(key)
            mat = op.generator.to_matrix()
            assert np.abs(mat).max() > 0


def test_fermionic_z_stripped_equals_qe_poolwise():
    fp = build_fermionic_pool(6)
    qe = build_qe_pool(6, 2)
    by_label = {op.label.replace("fermionic", "qe"): op for op in fp}
    for op in qe:
        f = by_label[op.label]
        stripped = {}
        for x, z, c in f.generator.iter_terms():
            key = (x, z & x)
            stripped[key] = stripped.get(key, 0.0) + c
        assert PauliSum(6, stripped) == op.generator


def test_pool_json_export():
    import json

    pool = build_qe_pool(4, 2)
    doc = json.loads(pool.to_json())
    assert len(doc) == len(pool)
    assert doc[0].keys() == {"kind", "label", "support", "term_count"}
