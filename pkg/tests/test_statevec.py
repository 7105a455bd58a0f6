import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from adaptvqe.paulis import DimensionError, PauliString, PauliSum
from adaptvqe.statevec import (
    Ansatz,
    StateVector,
    UnsupportedGeneratorError,
    analytic_gradient,
    apply_generator_exp,
    apply_sum,
    count_determinants,
    expectation,
    fix_global_phase,
    gradient_at_zero,
    overlap,
    prepare,
)

# Eq.-13-style 8-string double-excitation generator on arbitrary indices
_DOUBLE_PATTERN = [
    ("XYXX", 1), ("YXXX", 1), ("YYYX", 1), ("YYXY", 1),
    ("XXYX", -1), ("XXXY", -1), ("YXYY", -1), ("XYYY", -1),
]


def double_generator(i, j, k, l, qubit_count):
    terms = []
    for syms, sgn in _DOUBLE_PATTERN:
        label = " ".join(f"{s}{q}" for s, q in zip(syms, (i, j, k, l)))
        terms.append((sgn * 0.125j, label))
    return PauliSum.from_label_terms(qubit_count, terms)


def single_string_gen(label, qubit_count, rate=1.0):
    return PauliSum.from_label_terms(qubit_count, [(1j * rate, label)])


def rand_state(rng, n):
    amps = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return StateVector.from_amplitudes(amps / np.linalg.norm(amps))


def rand_hermitian_sum(rng, n, nterms):
    terms = {}
    for _ in range(nterms):
        x = int(rng.integers(0, 1 << n))
        z = int(rng.integers(0, 1 << n))
        terms[(x, z)] = complex(rng.normal(), 0.0)
    return PauliSum(n, terms)


def test_basis_state_ordering():
    s = StateVector.basis("10")
    # qubit 0 is the leftmost character and the most significant index bit
    assert s.amplitudes[2] == 1.0
    assert s.ket_label(2) == "10"


def test_apply_exp_theta_zero_identity():
    s = StateVector.basis("01")
    g = single_string_gen("X0 Y1", 2)
    out = apply_generator_exp(s, g, 0.0)
    assert np.allclose(out.amplitudes, s.amplitudes)


def test_apply_exp_ix_half_pi():
    s = StateVector.basis("0")
    out = apply_generator_exp(s, single_string_gen("X0", 1), np.pi / 2)
    assert np.allclose(out.amplitudes, [0.0, 1j])


def test_worked_single_layer_amplitudes():
    # e^{0.5652 i X2X3X6Y7} |11110000> = 0.8445|11110000> - 0.5356|11000011>
    s = StateVector.basis("11110000")
    g = single_string_gen("X2 X3 X6 Y7", 8)
    out = apply_generator_exp(s, g, 0.5652)
    a1 = out.amplitude("11110000")
    a2 = out.amplitude("11000011")
    assert abs(abs(a1) - 0.8445) < 2e-3
    assert abs(abs(a2) - 0.5356) < 2e-3
    assert count_determinants(out) == 2
    # signs after fixing the dominant amplitude positive
    fixed = fix_global_phase(out.amplitudes)
    assert fixed[int("11110000", 2)].real > 0
    assert fixed[int("11000011", 2)].real < 0


@given(st.integers(min_value=0, max_value=3), st.floats(-3, 3))
@settings(max_examples=40, deadline=None)
def test_single_string_exp_matches_dense(seed, theta):
    rng = np.random.default_rng(seed)
    n = 3
    x = int(rng.integers(1, 1 << n))
    z = int(rng.integers(0, 1 << n))
    rate = float(rng.normal())
    if abs(rate) < 1e-3:
        rate = 0.5
    g = PauliSum(n, {(x, z): 1j * rate})
    psi = rand_state(rng, n)
    out = apply_generator_exp(psi, g, theta)
    dense = expm(theta * g.to_matrix())
    assert np.allclose(out.amplitudes, dense @ psi.amplitudes, atol=1e-10)


def test_eight_term_double_exp_matches_dense():
    rng = np.random.default_rng(11)
    g = double_generator(0, 1, 2, 3, 4)
    for theta in rng.normal(size=5):
        psi = rand_state(rng, 4)
        out = apply_generator_exp(psi, g, float(theta))
        dense = expm(float(theta) * g.to_matrix())
        assert np.allclose(out.amplitudes, dense @ psi.amplitudes, atol=1e-10)


def test_non_commuting_multi_term_rejected():
    g = PauliSum.from_label_terms(2, [(1j, "X0"), (1j, "Z0")])
    with pytest.raises(UnsupportedGeneratorError):
        apply_generator_exp(StateVector.basis("00"), g, 0.3)


def test_norm_preservation_sequence():
    rng = np.random.default_rng(5)
    psi = rand_state(rng, 5)
    g1 = double_generator(0, 1, 2, 3, 5)
    g2 = single_string_gen("X0 Y4", 5, rate=0.7)
    for _ in range(50):
        psi = apply_generator_exp(psi, g1, float(rng.normal()))
        psi = apply_generator_exp(psi, g2, float(rng.normal()))
    assert abs(psi.norm() - 1.0) < 1e-12


def test_reversibility():
    rng = np.random.default_rng(9)
    psi = rand_state(rng, 4)
    g = double_generator(0, 1, 2, 3, 4)
    theta = 0.83
    back = apply_generator_exp(apply_generator_exp(psi, g, theta), g, -theta)
    assert np.max(np.abs(back.amplitudes - psi.amplitudes)) < 1e-12


def test_expectation_trivial():
    z = PauliSum.from_label_terms(1, [(1.0, "Z0")])
    assert expectation(StateVector.basis("0"), z) == pytest.approx(1.0)
    plus = StateVector.from_amplitudes([1 / np.sqrt(2), 1 / np.sqrt(2)])
    assert expectation(plus, z) == pytest.approx(0.0, abs=1e-12)


def test_expectation_matches_dense_oracle():
    rng = np.random.default_rng(21)
    for _ in range(10):
        h = rand_hermitian_sum(rng, 6, 12)
        psi = rand_state(rng, 6)
        dense = psi.amplitudes.conj() @ h.to_matrix() @ psi.amplitudes
        assert expectation(psi, h) == pytest.approx(dense.real, abs=1e-10)


def test_expectation_requires_hermitian():
    g = PauliSum.from_label_terms(1, [(1j, "X0")])
    with pytest.raises(ValueError):
        expectation(StateVector.basis("0"), g)


def test_gradient_eigenstate_vanishes():
    z = PauliSum.from_label_terms(2, [(1.0, "Z0"), (0.5, "Z1")])
    psi = StateVector.basis("01")
    for label in ("X0 Y1", "Y0", "X1"):
        p = single_string_gen(label, 2)
        assert gradient_at_zero(psi, z, p) == pytest.approx(0.0, abs=1e-12)


def test_gradient_matches_finite_difference():
    h = PauliSum.from_label_terms(1, [(1.0, "Z0")])
    p = single_string_gen("Y0", 1)
    psi = StateVector.basis("0")
    g = gradient_at_zero(psi, h, p)
    eps = 1e-5
    ep = expectation(apply_generator_exp(psi, p, eps), h)
    em = expectation(apply_generator_exp(psi, p, -eps), h)
    fd = (ep - em) / (2 * eps)
    assert g == pytest.approx(fd, abs=1e-8)


def test_gradient_matches_commutator_expectation():
    from adaptvqe.paulis import commutator

    rng = np.random.default_rng(17)
    h = rand_hermitian_sum(rng, 4, 8)
    p = double_generator(0, 1, 2, 3, 4)
    psi = rand_state(rng, 4)
    comm = commutator(h, p)
    dense = (psi.amplitudes.conj() @ comm.to_matrix() @ psi.amplitudes).real
    assert gradient_at_zero(psi, h, p) == pytest.approx(dense, abs=1e-10)


def test_prepare_empty_and_order():
    a = Ansatz("0110", (), ())
    assert np.allclose(prepare(a).amplitudes, StateVector.basis("0110").amplitudes)
    # leftmost operator applied first
    gx = single_string_gen("X0", 1)
    gz = single_string_gen("Z0", 1)
    a2 = Ansatz("0", (gx, gz), (np.pi / 2, 0.3))
    by_hand = apply_generator_exp(
        apply_generator_exp(StateVector.basis("0"), gx, np.pi / 2), gz, 0.3
    )
    assert np.allclose(prepare(a2).amplitudes, by_hand.amplitudes)


def test_prepare_length_mismatch():
    with pytest.raises(ValueError):
        Ansatz("00", (single_string_gen("X0", 2),), ())


def test_analytic_gradient_matches_gradient_at_zero():
    rng = np.random.default_rng(3)
    h = rand_hermitian_sum(rng, 4, 10)
    g = double_generator(0, 1, 2, 3, 4)
    a = Ansatz("1100", (g,), (0.0,))
    grad = analytic_gradient(a, h)
    direct = gradient_at_zero(StateVector.basis("1100"), h, g)
    assert grad[0] == pytest.approx(direct, abs=1e-12)


def test_analytic_gradient_matches_finite_difference():
    rng = np.random.default_rng(13)
    h = rand_hermitian_sum(rng, 4, 10)
    gens = (
        double_generator(0, 1, 2, 3, 4),
        single_string_gen("X0 Y2", 4, rate=0.5),
        single_string_gen("Y1 X3", 4),
    )
    for _ in range(5):
        theta = rng.normal(size=3)
        a = Ansatz("1100", gens, tuple(theta))
        grad = analytic_gradient(a, h)
        eps = 1e-5
        for k in range(3):
            tp, tm = theta.copy(), theta.copy()
            tp[k] += eps
            tm[k] -= eps
            fd = (
                expectation(prepare(a.with_parameters(tp)), h)
                - expectation(prepare(a.with_parameters(tm)), h)
            ) / (2 * eps)
            assert grad[k] == pytest.approx(fd, abs=1e-7)


def test_overlap():
    rng = np.random.default_rng(2)
    psi = rand_state(rng, 3)
    assert overlap(psi, psi) == pytest.approx(1.0)
    assert overlap(StateVector.basis("000"), StateVector.basis("110")) == 0.0
    with pytest.raises(DimensionError):
        overlap(StateVector.basis("0"), StateVector.basis("00"))


def test_count_determinants():
    assert count_determinants(StateVector.basis("11110000")) == 1
    amps = np.zeros(4, dtype=complex)
    amps[0], amps[1], amps[2] = 0.9, 0.4358, 9e-4
    s = StateVector.from_amplitudes(amps / np.linalg.norm(amps))
    assert count_determinants(s, floor=1e-3) == 2


def test_apply_sum_matches_dense():
    rng = np.random.default_rng(31)
    h = rand_hermitian_sum(rng, 5, 14)
    psi = rand_state(rng, 5)
    out = apply_sum(psi, h)
    assert np.allclose(out.amplitudes, h.to_matrix() @ psi.amplitudes, atol=1e-10)
