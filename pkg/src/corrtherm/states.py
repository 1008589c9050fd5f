"""State and Hamiltonian constructors.

Natural units throughout (k = 1): temperatures are energies and entropies are
in nats unless a ``bits`` field says otherwise.
"""
from __future__ import annotations

import math
from typing import Sequence

import numpy as np
from scipy.stats import unitary_group

from .linalg import (
    HERMITIAN_TOL,
    BipartiteLayout,
    LinalgError,
    check_dim,
    clamp_eigenvalues,
    hermitize,
    kron,
    mat_func,
    partial_trace,
)

TRACE_TOL = 1e-9


class StateError(ValueError):
    """Invalid physical input: probabilities, temperatures, correlation strength."""


class DensityMatrix:
    """Hermitian, positive semidefinite, unit-trace matrix.

    Small negative eigenvalues (down to -1e-10) are tolerated as numerical
    drift; the stored matrix is the symmetrized input, read-only.
    """

    __slots__ = ("_m",)

    def __init__(self, matrix):
        m = hermitize(matrix)
        check_dim(m.shape[0])
        tr = np.trace(m).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise LinalgError(f"density matrix trace is {tr!r}, expected 1")
        clamp_eigenvalues(np.linalg.eigvalsh(m))
        m.setflags(write=False)
        self._m = m

    @property
    def matrix(self) -> np.ndarray:
        return self._m

    @property
    def dim(self) -> int:
        return self._m.shape[0]

    def eigenvalues(self) -> np.ndarray:
        """Clamped spectrum, descending."""
        return clamp_eigenvalues(np.linalg.eigvalsh(self._m))[::-1]

    def __array__(self, dtype=None, copy=None):
        return self._m if dtype is None else self._m.astype(dtype)

    def __repr__(self):
        return f"DensityMatrix(dim={self.dim})"


class Hamiltonian:
    """Hermitian energy operator (energy units, k = 1)."""

    __slots__ = ("_m",)

    def __init__(self, matrix):
        m = hermitize(matrix, HERMITIAN_TOL)
        m.setflags(write=False)
        self._m = m

    @classmethod
    def diagonal(cls, energies: Sequence[float]) -> "Hamiltonian":
        return cls(np.diag(np.asarray(energies, dtype=float)))

    @classmethod
    def zero(cls, dim: int) -> "Hamiltonian":
        return cls(np.zeros((dim, dim)))

    @property
    def matrix(self) -> np.ndarray:
        return self._m

    @property
    def dim(self) -> int:
        return self._m.shape[0]

    def energies(self) -> np.ndarray:
        return np.linalg.eigvalsh(self._m)

    def is_diagonal(self, tol: float = 1e-12) -> bool:
        off = self._m - np.diag(np.diag(self._m))
        return bool(np.abs(off).max(initial=0.0) <= tol)

    def __array__(self, dtype=None, copy=None):
        return self._m if dtype is None else self._m.astype(dtype)

    def __repr__(self):
        return f"Hamiltonian(dim={self.dim})"


def total_hamiltonian(h_first, h_second) -> Hamiltonian:
    """Non-interacting ``H_1 (x) I + I (x) H_2``."""
    a = np.asarray(h_first)
    b = np.asarray(h_second)
    return Hamiltonian(kron(a, np.eye(b.shape[0])) + kron(np.eye(a.shape[0]), b))


def gibbs(h, temperature: float) -> DensityMatrix:
    """Thermal state ``exp(-H/T)/Z``; ``T = inf`` gives the maximally mixed state."""
    h = np.asarray(h)
    if not temperature > 0:
        raise StateError(f"temperature must be positive, got {temperature!r}")
    d = h.shape[0]
    if math.isinf(temperature):
        return DensityMatrix(np.eye(d) / d)
    e0 = np.linalg.eigvalsh(hermitize(h))[0]
    # shift by the ground energy so the largest Boltzmann weight is 1
    w = mat_func(h, lambda lam: np.exp(-(lam - e0) / temperature))
    return DensityMatrix(w / np.trace(w).real)


def log_partition(h, temperature: float) -> float:
    """``ln Z`` computed stably from the spectrum."""
    lam = np.linalg.eigvalsh(hermitize(h))
    e0 = lam[0]
    return float(-e0 / temperature + np.log(np.exp(-(lam - e0) / temperature).sum()))


def validate_probabilities(p, d: int | None = None) -> np.ndarray:
    """Check ``p_i >= 0``, ``sum p = 1`` and the strict ``p_i < 1``; pad with zeros up to ``d``."""
    p = np.asarray(p, dtype=float).ravel()
    if p.size == 0 or not np.all(np.isfinite(p)):
        raise StateError("probability vector must be non-empty and finite")
    if np.any(p < 0):
        raise StateError(f"probabilities must be non-negative, got {p.tolist()}")
    if abs(p.sum() - 1.0) > TRACE_TOL:
        raise StateError(f"probabilities must sum to 1, got {p.sum()!r}")
    if np.any(p >= 1.0):
        raise StateError(f"every probability must be strictly below 1, got {p.tolist()}")
    if d is not None:
        if d < p.size:
            raise StateError(f"dimension {d} smaller than probability vector length {p.size}")
        p = np.concatenate([p, np.zeros(d - p.size)])
    return p / p.sum()


def classically_correlated(p, d: int | None = None) -> DensityMatrix:
    """``sum_i p_i |i><i| (x) |i><i|`` on a ``d x d`` layout."""
    p = validate_probabilities(p, d)
    n = p.size
    check_dim(n * n)
    diag = np.zeros(n * n)
    diag[np.arange(n) * (n + 1)] = p
    return DensityMatrix(np.diag(diag))


def entangled_pure(p, d: int | None = None) -> DensityMatrix:
    """``|Psi><Psi|`` with ``|Psi> = sum_i sqrt(p_i) |i>|i>``."""
    p = validate_probabilities(p, d)
    n = p.size
    check_dim(n * n)
    psi = np.zeros(n * n, dtype=complex)
    psi[np.arange(n) * (n + 1)] = np.sqrt(p)
    return DensityMatrix(np.outer(psi, psi.conj()))


def superposition_state(p) -> DensityMatrix:
    """``|phi><phi|`` with ``|phi> = sum_i sqrt(p_i) |i>``."""
    p = np.asarray(p, dtype=float)
    phi = np.sqrt(p).astype(complex)
    return DensityMatrix(np.outer(phi, phi.conj()))


def _qubit_levels(h, name: str) -> tuple[float, float]:
    h = Hamiltonian(h) if not isinstance(h, Hamiltonian) else h
    if h.dim != 2:
        raise StateError(f"{name} must be a qubit Hamiltonian, got dimension {h.dim}")
    if not h.is_diagonal():
        raise StateError(f"{name} must be diagonal in the computational basis")
    e = np.diag(h.matrix).real
    return float(e[0]), float(e[1])


def thermal_pair_weights(h_a, h_b, t_a: float, t_b: float) -> np.ndarray:
    """Diagonal weights ``q_00, q_01, q_10, q_11`` of ``tau_A (x) tau_B``."""
    pa = np.diag(gibbs(h_a, t_a).matrix).real
    pb = np.diag(gibbs(h_b, t_b).matrix).real
    return np.outer(pa, pb).ravel()


def max_correlation(h_a, h_b, t_a: float, t_b: float) -> float:
    """Largest ``|alpha|`` keeping the correlated thermal pair PSD: ``sqrt(q_01 q_10)``."""
    q = thermal_pair_weights(h_a, h_b, t_a, t_b)
    return float(math.sqrt(q[1] * q[2]))


def correlated_thermal_pair(h_a, h_b, t_a: float, t_b: float, alpha: float | str) -> DensityMatrix:
    """X-state ``tau_A (x) tau_B + alpha (|01><10| + |10><01|)``.

    Both Hamiltonians are diagonal qubits with equal gaps so that ``|01>`` and
    ``|10>`` are degenerate under ``H_A + H_B``. ``alpha="max"`` selects the
    PSD boundary. The marginals are exactly ``tau_A`` and ``tau_B``.
    """
    a0, a1 = _qubit_levels(h_a, "H_A")
    b0, b1 = _qubit_levels(h_b, "H_B")
    if abs((a1 - a0) - (b1 - b0)) > 1e-8:
        raise StateError(f"gaps differ: {a1 - a0!r} vs {b1 - b0!r}")
    bound = max_correlation(h_a, h_b, t_a, t_b)
    if isinstance(alpha, str):
        if alpha != "max":
            raise StateError(f"alpha must be a number or 'max', got {alpha!r}")
        alpha = bound
    alpha = float(alpha)
    if abs(alpha) > bound * (1 + 1e-12):
        raise StateError(f"|alpha| = {abs(alpha)!r} exceeds PSD bound {bound!r}")
    m = np.diag(thermal_pair_weights(h_a, h_b, t_a, t_b)).astype(complex)
    m[1, 2] = m[2, 1] = alpha
    return DensityMatrix(m)


def random_unitary(dim: int, seed=None) -> np.ndarray:
    rng = np.random.default_rng(seed)
    if dim == 1:
        return np.exp(2j * np.pi * rng.random()) * np.ones((1, 1))
    return unitary_group.rvs(dim, random_state=rng)


def random_hamiltonian(dim: int, seed=None, scale: float = 1.0) -> Hamiltonian:
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return Hamiltonian(scale * 0.5 * (g + g.conj().T))


def random_density(dim: int, rank: int | None = None, seed=None, spectrum=None) -> DensityMatrix:
    """Random state: Ginibre ``G G^dag`` of the given rank, or a Haar-rotated fixed spectrum.

    ``spectrum`` (if given) is normalized and padded with zeros; ``rank`` is
    then ignored.
    """
    check_dim(dim)
    rng = np.random.default_rng(seed)
    if spectrum is not None:
        s = np.asarray(spectrum, dtype=float)
        if s.size > dim or np.any(s < 0) or s.sum() <= 0:
            raise StateError("spectrum must be non-negative, non-zero, length <= dim")
        s = np.concatenate([s, np.zeros(dim - s.size)]) / s.sum()
        u = random_unitary(dim, rng)
        return DensityMatrix((u * s) @ u.conj().T)
    rank = dim if rank is None else rank
    if not 1 <= rank <= dim:
        raise StateError(f"rank must lie in [1, {dim}], got {rank}")
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    m = g @ g.conj().T
    return DensityMatrix(m / np.trace(m).real)


def with_second_marginal(rho, layout: BipartiteLayout, target) -> DensityMatrix:
    """Reshape the second marginal of ``rho`` into ``target`` while keeping correlations.

    Uses the local congruence ``(I (x) A) rho (I (x) A^dag)`` with
    ``A = target^{1/2} rho_2^{-1/2}``; needs a full-rank second marginal.
    """
    r = np.asarray(rho)
    rb = partial_trace(r, layout, keep="second")
    lam = np.linalg.eigvalsh(hermitize(rb))
    if lam[0] <= 1e-12:
        raise StateError("second marginal must be full rank")
    inv_sqrt = mat_func(rb, lambda x: 1.0 / np.sqrt(x))
    t_sqrt = mat_func(np.asarray(target), lambda x: np.sqrt(np.clip(x, 0.0, None)))
    a = np.kron(np.eye(layout.d_first), t_sqrt @ inv_sqrt)
    out = a @ r @ a.conj().T
    return DensityMatrix(out / np.trace(out).real)
