import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import expm

from corrtherm import linalg as la
from corrtherm.states import random_density, random_unitary

from .oracles import ptrace


def herm(rng, d):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (a + a.conj().T) / 2


def test_max_dim_env(monkeypatch):
    monkeypatch.delenv("CORRTHERM_MAX_DIM", raising=False)
    assert la.max_dim() == 64
    monkeypatch.setenv("CORRTHERM_MAX_DIM", "16")
    assert la.max_dim() == 16
    with pytest.raises(la.DimensionError):
        la.check_dim(32)
    monkeypatch.setenv("CORRTHERM_MAX_DIM", "500")
    assert la.max_dim() == 64


def test_kron_cap():
    with pytest.raises(la.DimensionError):
        la.kron(np.eye(8), np.eye(16))
    assert la.kron(np.eye(8), np.eye(8)).shape == (64, 64)


def test_layout_rejects_bad_dims():
    with pytest.raises(la.LinalgError):
        la.BipartiteLayout(0, 2)
    assert la.BipartiteLayout(2, 3).dim == 6


def test_herm_eig_descending_and_reconstructs():
    rng = np.random.default_rng(1)
    m = herm(rng, 5)
    sp = la.herm_eig(m)
    assert np.all(np.diff(sp.eigenvalues) <= 0)
    np.testing.assert_allclose(sp.reconstruct(), m, atol=1e-12)


def test_hermitize_rejects_non_hermitian():
    with pytest.raises(la.LinalgError):
        la.hermitize(np.array([[0, 1], [0, 0]], dtype=float))


def test_expi_matches_scipy():
    rng = np.random.default_rng(2)
    g = herm(rng, 4)
    np.testing.assert_allclose(la.expi(g), expm(1j * g), atol=1e-12)
    assert la.unitarity_error(la.expi(g)) < 1e-12


def test_mat_func_rejects_non_finite():
    with pytest.raises(la.LinalgError):
        la.mat_func(np.diag([1.0, 0.0]), np.log)


def test_clamp_eigenvalues():
    w = la.clamp_eigenvalues(np.array([0.5, -5e-11, 0.5]))
    assert w[1] == 0.0
    with pytest.raises(la.LinalgError):
        la.clamp_eigenvalues(np.array([0.5, -1e-6]))


@settings(max_examples=40, deadline=None)
@given(d1=st.integers(1, 4), d2=st.integers(1, 4), seed=st.integers(0, 2**31))
def test_partial_trace_matches_reshape_oracle(d1, d2, seed):
    rho = random_density(d1 * d2, seed=seed).matrix
    layout = la.BipartiteLayout(d1, d2)
    np.testing.assert_allclose(la.partial_trace(rho, layout, "first"), ptrace(rho, d1, d2, 0), atol=1e-13)
    np.testing.assert_allclose(la.partial_trace(rho, layout, "second"), ptrace(rho, d1, d2, 1), atol=1e-13)


def test_partial_trace_of_product():
    a, b = random_density(2, seed=3).matrix, random_density(3, seed=4).matrix
    layout = la.BipartiteLayout(2, 3)
    np.testing.assert_allclose(la.partial_trace(np.kron(a, b), layout, "first"), a, atol=1e-14)
    np.testing.assert_allclose(la.partial_trace(np.kron(a, b), layout, "second"), b, atol=1e-14)


def test_reduce_state_three_parties():
    mats = [random_density(2, seed=s).matrix for s in (5, 6, 7)]
    rho = la.kron_all(mats)
    np.testing.assert_allclose(la.reduce_state(rho, [2, 2, 2], [1]), mats[1], atol=1e-14)
    np.testing.assert_allclose(la.reduce_state(rho, [2, 2, 2], [0, 2]), np.kron(mats[0], mats[2]), atol=1e-14)


def test_swap_operator_exchanges_factors():
    a, b = random_density(2, seed=8).matrix, random_density(3, seed=9).matrix
    s = la.swap_operator(2, 3)
    np.testing.assert_allclose(s @ np.kron(a, b) @ s.conj().T, np.kron(b, a), atol=1e-14)


def test_trace_distance_and_commutator():
    assert la.trace_distance(np.diag([1.0, 0.0]), np.diag([0.0, 1.0])) == pytest.approx(1.0)
    u = random_unitary(3, seed=1)
    assert la.commutator_norm(u, np.eye(3)) < 1e-14
