"""Verifiers for the classic and correlation-aware laws.

Each verifier takes a :class:`~corrtherm.process.Transition` and returns a
:class:`LawReport`. The ``verdict`` always refers to the correlation-aware
statement; where the textbook form of a law can fail on correlated inputs the
report carries a boolean entry in ``flags`` instead of failing.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .linalg import check_dim, kron_all, reduce_state, trace_distance
from .process import Transition, check_entropy_preserving
from .states import gibbs, total_hamiltonian
from .thermo import LN2, entropy, free_energy, generalized_free_energy, internal_energy, total_correlation

THERMAL_TOL = 1e-6


class Law(str, enum.Enum):
    FIRST = "First"
    INFO_SECOND = "InfoSecond"
    CLAUSIUS = "ClausiusGeneralized"
    COP = "COP"
    LANDAUER_CLASSIC = "LandauerClassic"
    LANDAUER = "LandauerGeneralized"
    CLAUSIUS_CHAIN = "ClausiusChain"
    ZEROTH = "Zeroth"


class PreconditionError(ValueError):
    """A verifier was handed a transition outside its domain."""


class CopUndefinedError(PreconditionError):
    """The coefficient of performance needs ``dI < 0``."""


# quantities that are entropies (nats) and get a ``_bits`` twin on export
_ENTROPIC = {
    "dS_first", "dS_second", "dS_cond", "dI", "S_joint_initial", "S_joint_final",
    "S_cond_initial", "S_cond_final", "I_initial", "I_final", "dS_joint",
}


@dataclass
class LawReport:
    law: Law
    lhs: float
    rhs: float
    slack: float
    tol: float
    quantities: dict = field(default_factory=dict)
    flags: dict = field(default_factory=dict)
    notes: str = ""

    @property
    def passed(self) -> bool:
        return self.slack >= -self.tol

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    @property
    def narrative(self) -> str:
        parts = [f"{self.law.value}: lhs={self.lhs:.12g} rhs={self.rhs:.12g} slack={self.slack:.3e} -> {self.verdict}"]
        parts += [f"  {k} = {v:.12g}" for k, v in self.quantities.items()]
        parts += [f"  [{k}] {v}" for k, v in self.flags.items()]
        if self.notes:
            parts.append(f"  note: {self.notes}")
        return "\n".join(parts)

    def to_dict(self) -> dict:
        q = {}
        for k, v in self.quantities.items():
            q[k] = v
            if k in _ENTROPIC:
                q[k + "_bits"] = v / LN2
        return {
            "law": self.law.value,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
            "tol": self.tol,
            "verdict": self.verdict,
            "quantities": q,
            "flags": dict(self.flags),
            "notes": self.notes,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LawReport":
        q = {k: v for k, v in d["quantities"].items() if not (k.endswith("_bits") and k[:-5] in _ENTROPIC)}
        return cls(Law(d["law"]), d["lhs"], d["rhs"], d["slack"], d["tol"], q, dict(d["flags"]), d.get("notes", ""))


def transition_quantities(t: Transition) -> dict:
    """Every energy and entropy change of a transition, heat in both conventions."""
    rs0, rs1 = t.marginals("first")
    rb0, rb1 = t.marginals("second")
    s_s0, s_s1 = float(entropy(rs0)), float(entropy(rs1))
    s_b0, s_b1 = float(entropy(rb0)), float(entropy(rb1))
    s_j0, s_j1 = float(entropy(t.initial)), float(entropy(t.final))
    e_s0, e_s1 = internal_energy(rs0, t.H_first), internal_energy(rs1, t.H_first)
    e_b0, e_b1 = internal_energy(rb0, t.H_second), internal_energy(rb1, t.H_second)
    T = t.T_second
    d_e_s, d_e_b = e_s1 - e_s0, e_b1 - e_b0
    d_s_s, d_s_b = s_s1 - s_s0, s_b1 - s_b0
    c0, c1 = s_j0 - s_b0, s_j1 - s_b1
    d_cond = c1 - c0
    i0, i1 = s_s0 + s_b0 - s_j0, s_s1 + s_b1 - s_j1
    absorbed = T * d_cond
    return {
        "dE_first": d_e_s,
        "dE_second": d_e_b,
        "dS_first": d_s_s,
        "dS_second": d_s_b,
        "dS_joint": s_j1 - s_j0,
        "S_joint_initial": s_j0,
        "S_joint_final": s_j1,
        "S_cond_initial": c0,
        "S_cond_final": c1,
        "dS_cond": d_cond,
        "I_initial": i0,
        "I_final": i1,
        "dI": i1 - i0,
        "dF_first_local": d_e_s - T * d_s_s,
        "dF_second": d_e_b - T * d_s_b,
        "dW_first": -(d_e_s - T * d_cond),
        "heat_absorbed_by_system": absorbed,
        "heat_dissipated_to_bath": -absorbed,
        "entropic_heat_from_bath": -T * d_s_b,
        "energetic_heat": -d_e_b,
    }


def _require_entropy_preserving(t: Transition, tol: float = 1e-7):
    ok, slack = check_entropy_preserving(t, tol)
    if not ok:
        raise PreconditionError(f"transition is not entropy preserving (|dS| = {slack:.3e})")


def _thermal_distance(rho, h, temperature: float) -> float:
    return trace_distance(rho, gibbs(h, temperature).matrix)


def _require_thermal(rho, h, temperature: float, what: str):
    dist = _thermal_distance(rho, h, temperature)
    if dist > THERMAL_TOL:
        raise PreconditionError(f"initial {what} is not thermal at T={temperature!r} (trace distance {dist:.3e})")


def first_law_report(t: Transition, tol: float = 1e-9) -> LawReport:
    """``dE_S = -dW_S + dQ`` and ``dF_B >= 0`` on a transition from a thermal bath.

    ``dW_S`` is the drop of the generalized free energy and ``dQ`` the heat
    read off the bath entropy, so the residual is ``T dS_joint``.

    The classic accounting (local work ``dF_S`` and bath-entropy heat) is
    evaluated alongside; its residual is ``T dI`` and is flagged when nonzero.
    """
    _require_entropy_preserving(t)
    _require_thermal(t.marginals("second")[0], t.H_second, t.T_second, "bath")
    q = transition_quantities(t)
    T = t.T_second
    f0 = generalized_free_energy(t.initial, t.H_first, T, t.layout)
    f1 = generalized_free_energy(t.final, t.H_first, T, t.layout)
    # work from the generalized free energy, heat read off the bath: independent routes
    q["dW_first_from_free_energy"] = f0 - f1
    lhs = q["dE_first"]
    rhs = -(f0 - f1) + q["entropic_heat_from_bath"]
    residual = abs(lhs - rhs)
    q["first_law_residual"] = residual
    classic = lhs - (q["dF_first_local"] + q["entropic_heat_from_bath"])
    q["classic_first_law_residual"] = classic
    return LawReport(
        Law.FIRST, lhs, rhs, min(-residual, q["dF_second"]), tol, q,
        flags={
            "classic_first_law_violated": abs(classic) > 1e-7,
            "work_on_system_without_heat": q["dF_first_local"] > 1e-7 and q["entropic_heat_from_bath"] <= 1e-7,
        },
    )


def info_second_law_report(t: Transition, tol: float = 1e-7) -> LawReport:
    """``dS_B = -dS(S|B)``; also evaluates the classic ``dS_B >= -dS_S``."""
    _require_entropy_preserving(t)
    q = transition_quantities(t)
    lhs, rhs = q["dS_second"], -q["dS_cond"]
    classic_slack = q["dS_second"] + q["dS_first"]
    q["classic_slack"] = classic_slack
    return LawReport(
        Law.INFO_SECOND, lhs, rhs, -abs(lhs - rhs), tol, q,
        flags={"classic_second_law_violated": classic_slack < -tol},
    )


def _is_complete_erasure(t: Transition, q: dict) -> bool:
    rs1 = t.marginals("first")[1]
    return float(entropy(rs1)) <= 1e-9 and q["I_final"] <= 1e-9


def landauer_report(t: Transition, tol: float = 1e-7) -> LawReport:
    """Heat read off the bath equals ``T dS(S|B)``.

    On complete erasure (pure, decorrelated final system) the heat must also
    equal ``-T S(S|B)_initial``. The classic bound is checked in its signed
    form ``heat_dissipated_to_bath >= -T dS_S`` and flagged when violated.
    """
    _require_entropy_preserving(t)
    q = transition_quantities(t)
    T = t.T_second
    lhs = q["entropic_heat_from_bath"]
    rhs = q["heat_absorbed_by_system"]
    slack = -abs(lhs - rhs)
    complete = _is_complete_erasure(t, q)
    if complete:
        target = -T * q["S_cond_initial"]
        q["complete_erasure_heat"] = target
        slack = min(slack, -abs(rhs - target))
    classic_rhs = -T * q["dS_first"]
    q["classic_landauer_slack"] = q["heat_dissipated_to_bath"] - classic_rhs
    q["classic_landauer_magnitude_slack"] = abs(q["heat_dissipated_to_bath"]) - T * abs(q["dS_first"])
    return LawReport(
        Law.LANDAUER, lhs, rhs, slack, tol, q,
        flags={
            "complete_erasure": complete,
            "classic_landauer_violated": q["classic_landauer_slack"] < -tol,
            "bath_cooled": q["dS_second"] < -tol,
        },
    )


def classic_landauer_report(t: Transition, tol: float = 1e-7) -> LawReport:
    """Textbook bound ``heat_dissipated_to_bath >= -T dS_S`` as a verdict of its own."""
    _require_entropy_preserving(t)
    q = transition_quantities(t)
    lhs = q["heat_dissipated_to_bath"]
    rhs = -t.T_second * q["dS_first"]
    return LawReport(Law.LANDAUER_CLASSIC, lhs, rhs, lhs - rhs, tol, q)


def _two_bath_quantities(t: Transition, energy_tol: float) -> dict:
    if t.T_first is None:
        raise PreconditionError("two-bath laws need T_first")
    _require_entropy_preserving(t)
    ra0, ra1 = t.marginals("first")
    rb0, rb1 = t.marginals("second")
    _require_thermal(ra0, t.H_first, t.T_first, "first marginal")
    _require_thermal(rb0, t.H_second, t.T_second, "second marginal")
    h = t.H_total.matrix
    d_e = internal_energy(t.final, h) - internal_energy(t.initial, h)
    if d_e > energy_tol:
        raise PreconditionError(f"total energy increased by {d_e:.3e}")
    t_a, t_b = t.T_first, t.T_second
    d_s_a = float(entropy(ra1)) - float(entropy(ra0))
    d_s_b = float(entropy(rb1)) - float(entropy(rb0))
    s0, s1 = float(entropy(t.initial)), float(entropy(t.final))
    i0 = float(entropy(ra0)) + float(entropy(rb0)) - s0
    i1 = float(entropy(ra1)) + float(entropy(rb1)) - s1
    return {
        "T_first": t_a,
        "T_second": t_b,
        "dE_total": d_e,
        "dS_first": d_s_a,
        "dS_second": d_s_b,
        "I_initial": i0,
        "I_final": i1,
        "dI": i1 - i0,
        "dQ_first": -t_a * d_s_a,
        "dF_first": internal_energy(ra1, t.H_first) - internal_energy(ra0, t.H_first) - t_a * d_s_a,
        "dF_second": internal_energy(rb1, t.H_second) - internal_energy(rb0, t.H_second) - t_b * d_s_b,
    }


def clausius_report(t: Transition, tol: float = 1e-7, energy_tol: float = 1e-9) -> LawReport:
    """``-dQ_A (T_B - T_A) >= T_A T_B dI`` with ``dQ_A = -T_A dS_A`` the heat drawn from A."""
    q = _two_bath_quantities(t, energy_tol)
    t_a, t_b = q["T_first"], q["T_second"]
    lhs = -q["dQ_first"] * (t_b - t_a)
    rhs = t_a * t_b * q["dI"]
    q["uncorrelated_form"] = (t_a - t_b) * q["dS_first"]
    anomalous = q["dQ_first"] > tol and t_a < t_b
    return LawReport(
        Law.CLAUSIUS, lhs, rhs, lhs - rhs, tol, q,
        flags={
            "anomalous_flow": anomalous,
            "correlations_consumed": q["dI"] < -tol,
            "energy_preserving": abs(q["dE_total"]) <= energy_tol,
        },
    )


def carnot_cop(t_cold: float, t_hot: float) -> float:
    return t_cold / (t_hot - t_cold) if t_hot > t_cold else math.inf


def cop_report(t: Transition, tol: float = 1e-7, energy_tol: float = 1e-9, min_delta_i: float = 0.0) -> LawReport:
    """``eta = dQ_A / (-T_B dI) <= T_A / (T_B - T_A)``; needs ``dI < -min_delta_i``."""
    q = _two_bath_quantities(t, energy_tol)
    if not q["dI"] < -min_delta_i:
        raise CopUndefinedError(f"COP undefined: dI = {q['dI']:.3e} is not negative")
    t_a, t_b = q["T_first"], q["T_second"]
    eta = q["dQ_first"] / (-t_b * q["dI"])
    bound = carnot_cop(t_a, t_b)
    q["work_from_correlations_hot"] = -t_b * q["dI"]
    q["eta"] = eta
    q["carnot_bound"] = bound
    return LawReport(
        Law.COP, eta, bound, bound - eta, tol, q,
        notes="" if math.isfinite(bound) else "T_B <= T_A: no Carnot bound applies",
    )


def clausius_chain_report(t: Transition, tol: float = 1e-7, product_tol: float = 1e-9) -> LawReport:
    """``-dE_B <= -T dS_B <= T dS_S`` for initially uncorrelated S and thermal B.

    Deficits: ``dF_B`` for the first inequality, ``T dI`` for the second.
    """
    _require_entropy_preserving(t)
    q = transition_quantities(t)
    if q["I_initial"] > product_tol:
        raise PreconditionError(f"initial state is correlated (I = {q['I_initial']:.3e})")
    _require_thermal(t.marginals("second")[0], t.H_second, t.T_second, "bath")
    T = t.T_second
    tilde, heat, bound = q["energetic_heat"], q["entropic_heat_from_bath"], T * q["dS_first"]
    q["deficit_energetic"] = heat - tilde
    q["deficit_entropic"] = bound - heat
    q["T_dI"] = T * q["dI"]
    return LawReport(
        Law.CLAUSIUS_CHAIN, tilde, bound, min(heat - tilde, bound - heat), tol, q,
        flags={"paradox_energetic_heat_without_system_change": abs(q["dS_first"]) < 1e-12 and abs(tilde) > 1e-9},
    )


@dataclass
class EquilibriumVerdict:
    in_equilibrium: bool
    reasons: list
    witness: float
    pairwise_witnesses: dict
    distances: dict

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def zeroth_law_check(rho, dims: Sequence[int], hamiltonians: Sequence, temperature, tol: float = THERMAL_TOL) -> EquilibriumVerdict:
    """Mutual equilibrium of up to three parties.

    ``temperature`` is one value or one per party. Equilibrium holds iff every
    marginal is thermal at a common temperature and the state is the product
    of its marginals. ``witness`` is ``T`` times the total correlation, the
    work extractable from the correlations alone.
    """
    dims = [int(d) for d in dims]
    n = len(dims)
    if not 1 <= n <= 3:
        raise PreconditionError(f"zeroth-law check supports 1 to 3 parties, got {n}")
    check_dim(int(np.prod(dims)))
    if len(hamiltonians) != n:
        raise PreconditionError("one Hamiltonian per party is required")
    temps = [float(temperature)] * n if np.isscalar(temperature) else [float(x) for x in temperature]
    if len(temps) != n or any(not x > 0 for x in temps):
        raise PreconditionError("temperatures must be positive, one per party")
    r = np.asarray(rho)
    marg = [reduce_state(r, dims, [k]) for k in range(n)]
    reasons = []
    distances = {}
    if max(temps) - min(temps) > 1e-12:
        reasons.append("temperature mismatch")
    for k in range(n):
        dist = trace_distance(marg[k], gibbs(hamiltonians[k], temps[k]).matrix)
        distances[f"thermal_{k}"] = dist
        if dist > tol:
            reasons.append(f"marginal {k} non-thermal")
    product = kron_all(marg)
    distances["product"] = trace_distance(r, product)
    if distances["product"] > tol:
        reasons.append("correlation present")
    t_ref = min(temps)
    witness = t_ref * max(float(total_correlation(r, marg)), 0.0)
    pairwise = {}
    for a in range(n):
        for b in range(a + 1, n):
            rab = reduce_state(r, dims, [a, b])
            pairwise[f"{a}{b}"] = t_ref * max(float(total_correlation(rab, [marg[a], marg[b]])), 0.0)
    return EquilibriumVerdict(not reasons, reasons, witness, pairwise, distances)


def correlation_free_energy_gap(rho_ab, h_a, h_b, temperature: float) -> float:
    """``F(rho_AB) - F(rho_A (x) rho_B)`` under the non-interacting Hamiltonian."""
    dims = [np.asarray(h_a).shape[0], np.asarray(h_b).shape[0]]
    ra = reduce_state(rho_ab, dims, [0])
    rb = reduce_state(rho_ab, dims, [1])
    h = total_hamiltonian(h_a, h_b).matrix
    return free_energy(rho_ab, h, temperature) - free_energy(np.kron(ra, rb), h, temperature)


def zeroth_law_report(rho, dims: Sequence[int], hamiltonians: Sequence, temperature, tol: float = THERMAL_TOL,
                      work_tol: float = 1e-9) -> LawReport:
    """Checks the biconditional: equilibrium holds iff no work is extractable.

    The work witness is the local free-energy excess of every marginal over
    its Gibbs state at the reference temperature (the lowest one given) plus
    ``T`` times the total correlation. The report passes when the structural
    verdict and the witness agree.
    """
    v = zeroth_law_check(rho, dims, hamiltonians, temperature, tol)
    dims = [int(d) for d in dims]
    n = len(dims)
    temps = [float(temperature)] * n if np.isscalar(temperature) else [float(x) for x in temperature]
    t_ref = min(temps)
    r = np.asarray(rho)
    local = 0.0
    for k in range(n):
        rk = reduce_state(r, dims, [k])
        local += free_energy(rk, hamiltonians[k], t_ref) - free_energy(gibbs(hamiltonians[k], t_ref), hamiltonians[k], t_ref)
    work = local + v.witness
    q = {"work_witness": work, "local_work": local, "correlation_work": v.witness}
    q.update({f"pair_work_{k}": w for k, w in v.pairwise_witnesses.items()})
    q.update({f"distance_{k}": d for k, d in v.distances.items()})
    slack = (work_tol - work) if v.in_equilibrium else (work - work_tol)
    return LawReport(
        Law.ZEROTH, work, 0.0, slack, 0.0, q,
        flags={"in_equilibrium": v.in_equilibrium},
        notes="; ".join(v.reasons),
    )
