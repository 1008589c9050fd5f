import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from corrtherm.linalg import BipartiteLayout, LinalgError
from corrtherm.process import (
    SpectrumMismatchError,
    Transition,
    block_param_count,
    box1_ledger,
    check_entropy_preserving,
    commutes_with,
    eigenbasis_unitary,
    energy_preserving_unitary,
    entropy_matched_state,
    erasure,
    example1,
    example2,
    hermitian_from_params,
    random_transition,
)
from corrtherm.states import DensityMatrix, Hamiltonian, StateError, entangled_pure, gibbs, random_density, total_hamiltonian
from corrtherm.thermo import entropy

from .oracles import ptrace, thermal, vn_entropy

LN2 = math.log(2)
seeds = st.integers(0, 2**31)


def test_example1_states():
    t = example1([0.5, 0.5], 1.0)
    plus = np.full((2, 2), 0.5)
    np.testing.assert_allclose(t.final.matrix, np.kron(plus, np.eye(2) / 2), atol=1e-15)
    assert vn_entropy(t.initial.matrix) == pytest.approx(vn_entropy(t.final.matrix), abs=1e-12)
    assert np.allclose(t.H_first.matrix, 0)


def test_example2_states():
    t = example2([0.5, 0.5], 1.0)
    assert vn_entropy(t.initial.matrix) < 1e-12
    assert vn_entropy(t.final.matrix) < 1e-12
    assert vn_entropy(ptrace(t.final.matrix, 2, 2, 1)) < 1e-12


def test_thermal_example_hamiltonian():
    p = [0.2, 0.8]
    t = example1(p, 1.3, hamiltonian="thermal")
    np.testing.assert_allclose(gibbs(t.H_second, 1.3).matrix, np.diag(p), atol=1e-14)


def test_transition_validation():
    rho = np.eye(4) / 4
    with pytest.raises(LinalgError, match="do not match layout"):
        Transition(rho, rho, BipartiteLayout(2, 3), np.zeros((2, 2)), np.zeros((3, 3)), 1.0)
    with pytest.raises(StateError, match="temperatures"):
        Transition(rho, rho, BipartiteLayout(2, 2), np.zeros((2, 2)), np.zeros((2, 2)), 0.0)


def test_check_entropy_preserving_detects_change():
    rho = np.diag([1.0, 0, 0, 0])
    t = Transition(rho, np.eye(4) / 4, BipartiteLayout(2, 2), np.zeros((2, 2)), np.zeros((2, 2)), 1.0)
    ok, slack = check_entropy_preserving(t)
    assert not ok
    assert slack == pytest.approx(2 * LN2)


@settings(max_examples=20, deadline=None)
@given(seed=seeds, target=st.floats(0.0, 1.0))
def test_entropy_matched_state(seed, target):
    rho = random_density(4, seed=seed)
    s = target * math.log(4)
    out = entropy_matched_state(rho, s)
    assert float(entropy(out)) == pytest.approx(s, abs=1e-9)
    # same eigenvectors, so the two commute
    assert np.abs(out.matrix @ rho.matrix - rho.matrix @ out.matrix).max() < 1e-9


def test_entropy_matched_state_rejects_unreachable():
    with pytest.raises(StateError):
        entropy_matched_state(np.diag([0.5, 0.5, 0.0]), 1.0)


def test_eigenbasis_unitary():
    rho = random_density(3, seed=1, spectrum=[0.5, 0.3, 0.2])
    sigma = random_density(3, seed=2, spectrum=[0.2, 0.5, 0.3])
    u = eigenbasis_unitary(rho, sigma)
    np.testing.assert_allclose(u @ rho.matrix @ u.conj().T, sigma.matrix, atol=1e-10)
    with pytest.raises(SpectrumMismatchError):
        eigenbasis_unitary(rho, random_density(3, seed=3, spectrum=[0.6, 0.3, 0.1]))


def test_erasure_dissipates_kT_ln2():
    for T in (0.5, 1.0, 3.0):
        t = erasure(T)
        rb0, rb1 = ptrace(t.initial.matrix, 2, 4, 1), ptrace(t.final.matrix, 2, 4, 1)
        assert T * (vn_entropy(rb1) - vn_entropy(rb0)) == pytest.approx(T * LN2, abs=1e-10)
        np.testing.assert_allclose(rb0, thermal(3 * T * np.arange(4), T), atol=1e-14)
        assert vn_entropy(ptrace(t.final.matrix, 2, 4, 0)) < 1e-12


def test_hermitian_from_params_layout():
    g = hermitian_from_params([1.0, 2.0, 0.5, -0.25])
    np.testing.assert_allclose(g, [[1.0, 0.5 - 0.25j], [0.5 + 0.25j, 2.0]])
    with pytest.raises(ValueError):
        hermitian_from_params([1.0, 2.0, 3.0])


def test_block_param_count_two_qubits():
    h = Hamiltonian.diagonal([0.0, 1.0])
    # blocks {00}, {01, 10}, {11}
    assert block_param_count(total_hamiltonian(h, h).matrix) == 1 + 4 + 1
    assert block_param_count(total_hamiltonian(h, Hamiltonian.diagonal([0.0, 2.0])).matrix) == 4


@settings(max_examples=25, deadline=None)
@given(seed=seeds)
def test_energy_preserving_unitary_commutes(seed):
    rng = np.random.default_rng(seed)
    h = Hamiltonian.diagonal([0.0, 1.0])
    ht = total_hamiltonian(h, Hamiltonian.diagonal([0.0, 1.0, 2.0])).matrix
    x = rng.uniform(-math.pi, math.pi, block_param_count(ht))
    u = energy_preserving_unitary(ht, x)
    assert np.abs(u.conj().T @ u - np.eye(6)).max() < 1e-12
    assert commutes_with(u, ht)


def test_energy_preserving_unitary_dense_hamiltonian():
    rng = np.random.default_rng(4)
    a = rng.normal(size=(3, 3))
    q, _ = np.linalg.qr(a)
    ht = q @ np.diag([0.0, 1.0, 1.0]) @ q.T
    u = energy_preserving_unitary(ht, rng.normal(size=5))
    assert commutes_with(u, ht)


def test_box1_ledger():
    layout = BipartiteLayout(2, 2)
    bell = box1_ledger(entangled_pure([0.5, 0.5]), 1.0, layout)
    assert bell.ancilla_qubits == 2
    assert bell.work_extracted == pytest.approx(2 * LN2, abs=1e-12)
    assert bell.feasible
    cc = box1_ledger(example1([0.5, 0.5], 1.0).initial, 2.0, layout)
    assert cc.ancilla_qubits == 1
    assert cc.work_extracted == pytest.approx(2 * LN2, abs=1e-12)
    frac = box1_ledger(example1([0.1, 0.9], 1.0).initial, 1.0, layout)
    assert frac.ancilla_qubits == 1
    assert 0 < frac.ancilla_bits < 1
    assert frac.residual_ancilla_entropy > 0


@settings(max_examples=20, deadline=None)
@given(seed=seeds, kind=st.sampled_from(["unitary", "spectrum"]), correlated=st.booleans())
def test_random_transition_preconditions(seed, kind, correlated):
    t = random_transition(2, 3, 0.7, seed, correlated=correlated, kind=kind)
    assert check_entropy_preserving(t).preserved
    np.testing.assert_allclose(ptrace(t.initial.matrix, 2, 3, 1), gibbs(t.H_second, 0.7).matrix, atol=1e-9)
    if not correlated:
        rs, rb = ptrace(t.initial.matrix, 2, 3, 0), ptrace(t.initial.matrix, 2, 3, 1)
        np.testing.assert_allclose(t.initial.matrix, np.kron(rs, rb), atol=1e-12)


def test_random_transition_is_seeded():
    a = random_transition(2, 2, 1.0, 17)
    b = random_transition(2, 2, 1.0, 17)
    np.testing.assert_array_equal(a.final.matrix, b.final.matrix)


def test_density_input_coercion():
    t = example1([0.5, 0.5], 1.0)
    assert isinstance(t.initial, DensityMatrix)
    assert isinstance(t.H_first, Hamiltonian)
