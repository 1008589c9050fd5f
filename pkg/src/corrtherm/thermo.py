"""Entropic and energetic functionals of single and joint states.

Sign convention for heat (used everywhere in the package):

* ``heat_absorbed_by_system = T * dS(S|B)``, which equals ``-T * dS_B`` on
  entropy-preserving transitions;
* ``heat_dissipated_to_bath = -heat_absorbed_by_system = T * dS_B``.

The energetic heat ``-dE_B`` carries the same sign as the absorbed heat.
"""
from __future__ import annotations

import math

import numpy as np

from .linalg import BipartiteLayout, as_square, partial_trace, psd_eigenvalues
from .states import gibbs

LN2 = math.log(2.0)


class EntropyValue(float):
    """An entropy in nats; ``.bits`` gives the base-2 value."""

    @property
    def nats(self) -> float:
        return float(self)

    @property
    def bits(self) -> float:
        return float(self) / LN2

    def __repr__(self):
        return f"EntropyValue(nats={float(self)!r})"


def shannon(p) -> float:
    p = np.asarray(p, dtype=float)
    p = p[p > 0]
    return float(-(p * np.log(p)).sum())


def entropy(rho) -> EntropyValue:
    """von Neumann entropy ``-Tr rho ln rho`` with ``0 ln 0 = 0``."""
    lam = psd_eigenvalues(rho)
    s = shannon(lam)
    return EntropyValue(min(max(s, 0.0), math.log(lam.size)))


def _marginals(rho, layout: BipartiteLayout):
    r = as_square(rho)
    return partial_trace(r, layout, "first"), partial_trace(r, layout, "second")


def conditional_entropy(rho, layout: BipartiteLayout) -> EntropyValue:
    """``S(first|second) = S(joint) - S(second)``; negative for entangled states."""
    _, rb = _marginals(rho, layout)
    return EntropyValue(entropy(rho) - entropy(rb))


def mutual_information(rho, layout: BipartiteLayout) -> EntropyValue:
    ra, rb = _marginals(rho, layout)
    return EntropyValue(entropy(ra) + entropy(rb) - entropy(rho))


def total_correlation(rho, marginals) -> EntropyValue:
    """Multipartite mutual information ``sum_X S(rho_X) - S(rho)``."""
    return EntropyValue(sum(entropy(m) for m in marginals) - entropy(rho))


def internal_energy(rho, h) -> float:
    r = as_square(rho)
    hm = as_square(h)
    if r.shape != hm.shape:
        raise ValueError(f"state dimension {r.shape[0]} does not match Hamiltonian dimension {hm.shape[0]}")
    return float(np.trace(hm @ r).real)


def _check_temperature(t: float):
    if not t > 0:
        raise ValueError(f"temperature must be positive, got {t!r}")


def free_energy(rho, h, temperature: float) -> float:
    """Helmholtz free energy ``E - T S``."""
    _check_temperature(temperature)
    return internal_energy(rho, h) - temperature * entropy(rho)


def generalized_free_energy(rho, h_first, temperature: float, layout: BipartiteLayout) -> float:
    """``E_S - T S(S|B)``: local free energy plus ``T I(S:B)``."""
    _check_temperature(temperature)
    rs, _ = _marginals(rho, layout)
    return internal_energy(rs, h_first) - temperature * conditional_entropy(rho, layout)


def work_from_correlations(rho, temperature: float, layout: BipartiteLayout) -> float:
    """Work extractable from correlations alone, ``T I(S:B)``."""
    _check_temperature(temperature)
    return temperature * max(float(mutual_information(rho, layout)), 0.0)


def local_work(rho_s, h_s, temperature: float) -> float:
    """``F(rho_S) - F(tau_S)``, the work available from the marginal alone."""
    return free_energy(rho_s, h_s, temperature) - free_energy(gibbs(h_s, temperature), h_s, temperature)


def extractable_work_total(rho, h_first, temperature: float, layout: BipartiteLayout) -> float:
    """Local work plus ``T I(S:B)``.

    Raises if the alternative route ``F_gen(rho) - F(tau_S)`` disagrees by more
    than 1e-9.
    """
    rs, _ = _marginals(rho, layout)
    total = local_work(rs, h_first, temperature) + temperature * float(mutual_information(rho, layout))
    tau = gibbs(h_first, temperature)
    other = generalized_free_energy(rho, h_first, temperature, layout) - free_energy(tau, h_first, temperature)
    if abs(total - other) > 1e-9 * max(1.0, abs(total)):
        raise ArithmeticError(f"work identity mismatch: {total!r} vs {other!r}")
    return total


def entropic_heat(bath_before, bath_after, temperature: float) -> float:
    """Heat into the system read off the bath entropy, ``-T dS_B``."""
    _check_temperature(temperature)
    return -temperature * (entropy(bath_after) - entropy(bath_before))


def energetic_heat(bath_before, bath_after, h_bath) -> float:
    """Textbook heat ``-dE_B``."""
    return -(internal_energy(bath_after, h_bath) - internal_energy(bath_before, h_bath))
