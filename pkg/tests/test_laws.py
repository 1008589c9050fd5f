import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from corrtherm import laws
from corrtherm.laws import Law, LawReport, PreconditionError
from corrtherm.linalg import BipartiteLayout
from corrtherm.optimize import block_rotation
from corrtherm.process import Transition, erasure, example1, example2, random_transition, two_bath_transition
from corrtherm.states import Hamiltonian, correlated_thermal_pair, gibbs

from .oracles import max_alpha, ptrace, vn_entropy, x_state

LN2 = math.log(2)
seeds = st.integers(0, 2**31)
QUBIT = Hamiltonian.diagonal([0.0, 1.0])


def test_example1_report_values():
    t = example1([0.5, 0.5], 1.0)
    q = laws.transition_quantities(t)
    assert q["dS_second"] == pytest.approx(0.0, abs=1e-12)
    assert q["dS_cond"] == pytest.approx(0.0, abs=1e-12)
    assert q["dF_first_local"] == pytest.approx(LN2, abs=1e-12)
    r = laws.first_law_report(t)
    assert r.passed
    assert r.flags["work_on_system_without_heat"]
    assert r.flags["classic_first_law_violated"]


def test_example2_report_values():
    t = example2([0.5, 0.5], 1.0)
    q = laws.transition_quantities(t)
    assert q["dS_second"] == pytest.approx(-LN2, abs=1e-12)
    assert q["heat_absorbed_by_system"] == pytest.approx(LN2, abs=1e-12)
    assert q["I_initial"] == pytest.approx(2 * LN2, abs=1e-12)
    land = laws.landauer_report(t)
    assert land.passed
    assert land.flags["classic_landauer_violated"]
    assert land.flags["bath_cooled"]
    assert not laws.classic_landauer_report(t).passed
    second = laws.info_second_law_report(t)
    assert second.passed
    assert second.flags["classic_second_law_violated"]


def test_erasure_landauer_complete():
    t = erasure(1.0)
    r = laws.landauer_report(t)
    assert r.passed
    assert r.flags["complete_erasure"]
    assert r.quantities["heat_dissipated_to_bath"] == pytest.approx(LN2, abs=1e-10)
    assert laws.classic_landauer_report(t).passed


def test_first_law_preconditions():
    rho = np.diag([1.0, 0, 0, 0])
    h = np.diag([0.0, 1.0])
    t = Transition(rho, np.eye(4) / 4, BipartiteLayout(2, 2), h, h, 1.0)
    with pytest.raises(PreconditionError, match="entropy preserving"):
        laws.first_law_report(t)
    t = Transition(rho, rho, BipartiteLayout(2, 2), h, h, 1.0)
    with pytest.raises(PreconditionError, match="not thermal"):
        laws.first_law_report(t)


@settings(max_examples=30, deadline=None)
@given(seed=seeds, kind=st.sampled_from(["unitary", "spectrum"]), d1=st.integers(1, 3), d2=st.integers(2, 3))
def test_first_and_second_law_on_random_transitions(seed, kind, d1, d2):
    t = random_transition(d1, d2, 0.9, seed, kind=kind)
    first = laws.first_law_report(t)
    assert first.quantities["first_law_residual"] <= 1e-9
    assert first.quantities["dF_second"] >= -1e-9
    second = laws.info_second_law_report(t)
    assert abs(second.lhs - second.rhs) <= 1e-7


@settings(max_examples=30, deadline=None)
@given(seed=seeds, kind=st.sampled_from(["unitary", "spectrum"]))
def test_clausius_chain_on_product_inputs(seed, kind):
    t = random_transition(2, 3, 1.4, seed, correlated=False, kind=kind)
    r = laws.clausius_chain_report(t)
    assert r.passed
    assert r.quantities["deficit_energetic"] >= -1e-7
    assert r.quantities["deficit_entropic"] >= -1e-7
    assert r.quantities["deficit_entropic"] == pytest.approx(r.quantities["T_dI"], abs=1e-9)


def test_clausius_chain_rejects_correlated_input():
    with pytest.raises(PreconditionError, match="correlated"):
        laws.clausius_chain_report(example1([0.5, 0.5], 1.0))


def _swap_transition(theta, alpha="max", t_a=1.0, t_b=2.0):
    rho = correlated_thermal_pair(QUBIT, QUBIT, t_a, t_b, alpha)
    return two_bath_transition(rho, QUBIT, QUBIT, t_a, t_b, block_rotation(theta))


def test_clausius_matches_oracle():
    t = _swap_transition(0.4)
    r = laws.clausius_report(t)
    rho = x_state(1.0, 1.0, 2.0, max_alpha(1.0, 1.0, 2.0))
    c, s = math.cos(0.4), math.sin(0.4)
    u = np.eye(4)
    u[1:3, 1:3] = [[c, -s], [s, c]]
    out = u @ rho @ u.T
    dsa = vn_entropy(ptrace(out, 2, 2, 0)) - vn_entropy(ptrace(rho, 2, 2, 0))
    assert r.quantities["dQ_first"] == pytest.approx(-dsa, abs=1e-10)
    assert r.passed


@settings(max_examples=40, deadline=None)
@given(theta=st.floats(0, math.pi), frac=st.floats(-1, 1), t_b=st.floats(1.1, 5.0))
def test_clausius_and_cop_bounds_on_swap_family(theta, frac, t_b):
    alpha = frac * max_alpha(1.0, 1.0, t_b)
    t = _swap_transition(theta, alpha, 1.0, t_b)
    assert laws.clausius_report(t).slack >= -1e-7
    try:
        cop = laws.cop_report(t, min_delta_i=1e-6)
    except laws.CopUndefinedError:
        return
    assert cop.quantities["eta"] <= 1.0 / (t_b - 1.0) + 1e-7


def test_product_input_has_no_anomalous_flow():
    t = _swap_transition(0.7, alpha=0.0)
    r = laws.clausius_report(t)
    assert r.quantities["dQ_first"] <= 1e-12
    with pytest.raises(laws.CopUndefinedError):
        laws.cop_report(t)


def test_carnot_cop():
    assert laws.carnot_cop(1.0, 2.0) == 1.0
    assert laws.carnot_cop(2.0, 1.0) == math.inf


def test_two_bath_needs_energy_conservation():
    rho = correlated_thermal_pair(QUBIT, QUBIT, 1.0, 2.0, 0.0)
    x = np.array([[0, 1], [1, 0]])
    t = two_bath_transition(rho, QUBIT, QUBIT, 1.0, 2.0, np.kron(x, np.eye(2)))
    with pytest.raises(PreconditionError, match="energy increased"):
        laws.clausius_report(t)


def test_report_round_trip():
    r = laws.landauer_report(example2([0.5, 0.5], 1.0))
    d = json.loads(json.dumps(r.to_dict()))
    assert d["quantities"]["dS_second_bits"] == pytest.approx(-1.0)
    back = LawReport.from_dict(d)
    assert back.law is Law.LANDAUER
    assert back.quantities == r.quantities
    assert back.flags == r.flags
    assert back.verdict == r.verdict


def _zeroth_state(alpha, temps=(1.0, 1.0, 1.0)):
    rho_ac = correlated_thermal_pair(QUBIT, QUBIT, temps[0], temps[1], alpha)
    return np.kron(rho_ac.matrix, gibbs(QUBIT, temps[2]).matrix)


def test_zeroth_product_triple_in_equilibrium():
    v = laws.zeroth_law_check(_zeroth_state(0.0), [2, 2, 2], [QUBIT] * 3, 1.0)
    assert v.in_equilibrium
    assert v.witness < 1e-12
    assert laws.zeroth_law_report(_zeroth_state(0.0), [2, 2, 2], [QUBIT] * 3, 1.0).passed


def test_zeroth_correlated_pair_detected():
    rho = _zeroth_state("max")
    v = laws.zeroth_law_check(rho, [2, 2, 2], [QUBIT] * 3, 1.0)
    assert not v.in_equilibrium
    assert v.reasons == ["correlation present"]
    rac = ptrace(rho, 4, 2, 0)
    i_ac = vn_entropy(ptrace(rac, 2, 2, 0)) + vn_entropy(ptrace(rac, 2, 2, 1)) - vn_entropy(rac)
    assert v.pairwise_witnesses["01"] == pytest.approx(i_ac, abs=1e-12)
    gap = laws.correlation_free_energy_gap(rac, QUBIT, QUBIT, 1.0)
    assert v.witness == pytest.approx(gap, abs=1e-9)
    assert laws.zeroth_law_report(rho, [2, 2, 2], [QUBIT] * 3, 1.0).passed


def test_zeroth_temperature_mismatch():
    temps = [1.0, 1.0, 2.0]
    v = laws.zeroth_law_check(_zeroth_state(0.0, temps), [2, 2, 2], [QUBIT] * 3, temps)
    assert not v.in_equilibrium
    assert "temperature mismatch" in v.reasons
    r = laws.zeroth_law_report(_zeroth_state(0.0, temps), [2, 2, 2], [QUBIT] * 3, temps)
    assert r.passed
    assert r.lhs > 0


def test_zeroth_rejects_four_parties():
    with pytest.raises(PreconditionError):
        laws.zeroth_law_check(np.eye(16) / 16, [2, 2, 2, 2], [QUBIT] * 4, 1.0)
