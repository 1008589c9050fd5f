"""Transitions between joint states and the scenarios built from them.

A :class:`Transition` is a pair of joint states under fixed, non-interacting
Hamiltonians. Entropy-preserving maps are represented by the state pair
itself and validated by comparing global entropies; when an explicit unitary
is wanted, :func:`eigenbasis_unitary` builds one for equal spectra.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq

from .linalg import (
    BipartiteLayout,
    LinalgError,
    as_square,
    commutator_norm,
    expi,
    hermitize,
    kron,
    partial_trace,
    unitarity_error,
)
from .states import (
    DensityMatrix,
    Hamiltonian,
    StateError,
    classically_correlated,
    entangled_pure,
    gibbs,
    random_density,
    random_hamiltonian,
    random_unitary,
    superposition_state,
    total_hamiltonian,
    validate_probabilities,
    with_second_marginal,
)
from .thermo import LN2, conditional_entropy, entropy, mutual_information

ENTROPY_TOL = 1e-7
DEGENERACY_TOL = 1e-8


class SpectrumMismatchError(LinalgError):
    pass


def _as_hamiltonian(h) -> Hamiltonian:
    return h if isinstance(h, Hamiltonian) else Hamiltonian(h)


def _as_density(rho) -> DensityMatrix:
    return rho if isinstance(rho, DensityMatrix) else DensityMatrix(rho)


@dataclass(frozen=True)
class Transition:
    """``initial -> final`` on ``first (x) second`` with Hamiltonians fixed throughout.

    ``T_first`` is only set for two-bath scenarios, where both factors start
    thermal.
    """

    initial: DensityMatrix
    final: DensityMatrix
    layout: BipartiteLayout
    H_first: Hamiltonian
    H_second: Hamiltonian
    T_second: float
    T_first: float | None = None
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "initial", _as_density(self.initial))
        object.__setattr__(self, "final", _as_density(self.final))
        object.__setattr__(self, "H_first", _as_hamiltonian(self.H_first))
        object.__setattr__(self, "H_second", _as_hamiltonian(self.H_second))
        n = self.layout.dim
        if self.initial.dim != n or self.final.dim != n:
            raise LinalgError(
                f"states of dimension {self.initial.dim}/{self.final.dim} do not match layout "
                f"{self.layout.d_first}x{self.layout.d_second}"
            )
        if self.H_first.dim != self.layout.d_first or self.H_second.dim != self.layout.d_second:
            raise LinalgError("Hamiltonian dimensions do not match the layout")
        if not self.T_second > 0 or (self.T_first is not None and not self.T_first > 0):
            raise StateError("temperatures must be positive")

    @property
    def H_total(self) -> Hamiltonian:
        return total_hamiltonian(self.H_first, self.H_second)

    def marginals(self, which: str) -> tuple[np.ndarray, np.ndarray]:
        """(initial, final) marginal on ``"first"`` or ``"second"``."""
        return (
            partial_trace(self.initial.matrix, self.layout, which),
            partial_trace(self.final.matrix, self.layout, which),
        )


class EntropyCheck(NamedTuple):
    preserved: bool
    slack: float


def check_entropy_preserving(t: Transition, tol: float = ENTROPY_TOL) -> EntropyCheck:
    """``|S(final) - S(initial)| <= tol``; ``slack`` is the absolute entropy change."""
    slack = abs(float(entropy(t.final)) - float(entropy(t.initial)))
    return EntropyCheck(slack <= tol, slack)


def apply_unitary(rho, u) -> DensityMatrix:
    u = as_square(u)
    err = unitarity_error(u)
    if err > 1e-9:
        raise LinalgError(f"operator is not unitary (||U^dag U - I|| = {err:.3e})")
    r = np.asarray(rho)
    return DensityMatrix(u @ r @ u.conj().T)


def eigenbasis_unitary(rho, sigma, tol: float = ENTROPY_TOL) -> np.ndarray:
    """A unitary with ``U rho U^dag = sigma`` for states with equal spectra."""
    wr, vr = np.linalg.eigh(hermitize(rho))
    ws, vs = np.linalg.eigh(hermitize(sigma))
    if wr.shape != ws.shape or np.max(np.abs(wr - ws)) > tol:
        raise SpectrumMismatchError(
            f"spectra differ: {np.round(wr[::-1], 10).tolist()} vs {np.round(ws[::-1], 10).tolist()}"
        )
    return vs @ vr.conj().T


def _example_hamiltonian(p: np.ndarray, temperature: float, hamiltonian) -> Hamiltonian:
    d = p.size
    if hamiltonian is None:
        return Hamiltonian.zero(d)
    if isinstance(hamiltonian, str):
        if hamiltonian != "thermal":
            raise StateError(f"hamiltonian must be None, 'thermal' or a matrix, got {hamiltonian!r}")
        if np.any(p <= 0):
            raise StateError("'thermal' Hamiltonian needs every p_i > 0")
        e = -temperature * np.log(p)
        return Hamiltonian.diagonal(e - e.min())
    h = _as_hamiltonian(hamiltonian)
    if h.dim != d or not h.is_diagonal():
        raise StateError("example Hamiltonians must be diagonal in the {|i>} basis")
    return h


def example1(p, temperature: float, hamiltonian=None) -> Transition:
    """Classically correlated memory erased into a coherent superposition.

    ``sum p_i |ii><ii| -> |phi><phi| (x) sum p_i |i><i|`` with
    ``|phi> = sum sqrt(p_i)|i>``. ``hamiltonian`` is shared by S and B:
    ``None`` (zero), ``"thermal"`` (makes ``diag(p)`` thermal at ``T``) or a
    diagonal matrix.
    """
    p = validate_probabilities(p)
    h = _example_hamiltonian(p, temperature, hamiltonian)
    final = kron(superposition_state(p).matrix, np.diag(p))
    return Transition(
        classically_correlated(p), final, BipartiteLayout(p.size, p.size), h, h, temperature,
        label="example1",
    )


def example2(p, temperature: float, hamiltonian=None) -> Transition:
    """Entangled ``sum sqrt(p_i)|ii>`` mapped to the product ``|phi>|phi>``."""
    p = validate_probabilities(p)
    h = _example_hamiltonian(p, temperature, hamiltonian)
    phi = superposition_state(p).matrix
    return Transition(
        entangled_pure(p), kron(phi, phi), BipartiteLayout(p.size, p.size), h, h, temperature,
        label="example2",
    )


def entropy_matched_state(rho, target: float) -> DensityMatrix:
    """Same eigenvectors as ``rho``, spectrum ``lam**beta`` renormalized to entropy ``target``."""
    w, v = np.linalg.eigh(hermitize(rho))
    w = np.clip(w, 0.0, None)
    support = w > 1e-14
    ws, vs = w[support], v[:, support]
    smax = math.log(ws.size)
    if not 0.0 <= target <= smax + 1e-12:
        raise StateError(f"target entropy {target!r} outside [0, {smax!r}] for the support of rho")

    def spectrum(beta: float) -> np.ndarray:
        logw = beta * np.log(ws)
        q = np.exp(logw - logw.max())
        return q / q.sum()

    def gap(beta: float) -> float:
        q = spectrum(beta)
        q = q[q > 0]
        return float(-(q * np.log(q)).sum()) - target

    if target >= smax - 1e-13:
        q = np.full(ws.size, 1.0 / ws.size)
    elif gap(1.0) == 0.0:
        q = spectrum(1.0)
    else:
        hi = 1.0
        while gap(hi) > 0:
            hi *= 2.0
            if hi > 1e6:
                raise StateError(f"cannot reach entropy {target!r} from this spectrum")
        beta = brentq(gap, 0.0, hi, xtol=1e-15, rtol=1e-15, maxiter=500)
        q = spectrum(beta)
    return DensityMatrix((vs * q) @ vs.conj().T)


def erasure(
    temperature: float,
    rho_s=None,
    h_s=None,
    bath_energies=None,
) -> Transition:
    """Uncorrelated erasure ``rho_S (x) tau_B -> |0><0| (x) rho_B'``.

    ``rho_B'`` keeps the bath eigenbasis and absorbs exactly ``S(rho_S)`` of
    entropy. Defaults: ``rho_S = I/2``, zero system Hamiltonian, a four-level
    ladder bath with spacing ``3T`` (cold enough to absorb one bit).
    """
    if bath_energies is None:
        bath_energies = 3.0 * temperature * np.arange(4)
    rho_s = DensityMatrix(np.eye(2) / 2) if rho_s is None else _as_density(rho_s)
    d_s = rho_s.dim
    h_s = Hamiltonian.zero(d_s) if h_s is None else _as_hamiltonian(h_s)
    h_b = Hamiltonian.diagonal(bath_energies)
    tau_b = gibbs(h_b, temperature)
    target = float(entropy(tau_b)) + float(entropy(rho_s))
    bath_after = entropy_matched_state(tau_b, target)
    ground = np.zeros((d_s, d_s))
    ground[0, 0] = 1.0
    return Transition(
        kron(rho_s.matrix, tau_b.matrix), kron(ground, bath_after.matrix),
        BipartiteLayout(d_s, h_b.dim), h_s, h_b, temperature, label="erasure",
    )


def two_bath_transition(rho_ab, h_a, h_b, t_a: float, t_b: float, u) -> Transition:
    final = apply_unitary(rho_ab, u)
    h_a = _as_hamiltonian(h_a)
    h_b = _as_hamiltonian(h_b)
    return Transition(
        rho_ab, final, BipartiteLayout(h_a.dim, h_b.dim), h_a, h_b, t_b, T_first=t_a, label="two_bath",
    )


@dataclass(frozen=True)
class Box1Ledger:
    """Bookkeeping of work extraction from correlations via an ancilla.

    ``ancilla_bits`` is the exact (generally fractional) ancilla entropy
    ``I(S:B)`` in bits, ``ancilla_qubits`` its ceiling. With whole qubits the
    ancilla ends up carrying ``residual_ancilla_entropy`` nats instead of being
    pure; the extracted work is ``T I(S:B)`` either way.
    """

    ancilla_qubits: int
    ancilla_bits: float
    work_extracted: float
    conditional_entropy_before: float
    conditional_entropy_after: float
    residual_ancilla_entropy: float
    bookkeeping_residual: float
    feasible: bool

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def box1_ledger(rho, temperature: float, layout: BipartiteLayout, tol: float = 1e-9) -> Box1Ledger:
    if not temperature > 0:
        raise StateError(f"temperature must be positive, got {temperature!r}")
    r = np.asarray(rho)
    info = max(float(mutual_information(r, layout)), 0.0)
    bits = info / LN2
    qubits = int(math.ceil(bits - 1e-9)) if bits > 1e-9 else 0
    rs = partial_trace(r, layout, "first")
    # S(AS|B) for tau_A (x) rho_SB, ancilla entropy I: I + S(S|B)
    before = info + float(conditional_entropy(r, layout))
    # after decorrelation: pure ancilla, rho_S (x) rho_B, so S(A'S|B) = S(rho_S)
    after = float(entropy(rs))
    residual = abs(before - after)
    return Box1Ledger(
        ancilla_qubits=qubits,
        ancilla_bits=bits,
        work_extracted=temperature * info,
        conditional_entropy_before=before,
        conditional_entropy_after=after,
        residual_ancilla_entropy=qubits * LN2 - info,
        bookkeeping_residual=residual,
        feasible=residual <= tol,
    )


def energy_blocks(h_total, tol: float = DEGENERACY_TOL) -> tuple[np.ndarray, list[np.ndarray]]:
    """Energy eigenbasis and the column-index groups of its degenerate eigenspaces.

    Diagonal Hamiltonians keep the computational basis (stably sorted by
    energy) so parameters have a fixed meaning.
    """
    h = hermitize(h_total)
    diag_only = np.abs(h - np.diag(np.diag(h))).max(initial=0.0) <= 1e-12
    if diag_only:
        e = np.diag(h).real
        order = np.argsort(e, kind="stable")
        w = e[order]
        v = np.eye(h.shape[0], dtype=complex)[:, order]
    else:
        w, v = np.linalg.eigh(h)
    groups: list[list[int]] = [[0]]
    for k in range(1, w.size):
        if w[k] - w[k - 1] <= tol:
            groups[-1].append(k)
        else:
            groups.append([k])
    return v, [np.array(g) for g in groups]


def block_param_count(h_total, tol: float = DEGENERACY_TOL) -> int:
    _, groups = energy_blocks(h_total, tol)
    return sum(g.size ** 2 for g in groups)


def hermitian_from_params(x) -> np.ndarray:
    """``d^2`` reals -> Hermitian ``d x d``: diagonal first, then (re, im) per upper entry."""
    x = np.asarray(x, dtype=float)
    d = int(round(math.sqrt(x.size)))
    if d * d != x.size:
        raise ValueError(f"parameter count {x.size} is not a perfect square")
    g = np.diag(x[:d]).astype(complex)
    iu = np.triu_indices(d, 1)
    off = x[d::2] + 1j * x[d + 1::2]
    g[iu] = off
    g[(iu[1], iu[0])] = off.conj()
    return g


def energy_preserving_unitary(h_total, params, tol: float = DEGENERACY_TOL) -> np.ndarray:
    """``exp(iG)`` with ``G`` block diagonal over the degenerate eigenspaces of ``H_total``."""
    v, groups = energy_blocks(h_total, tol)
    params = np.asarray(params, dtype=float).ravel()
    need = sum(g.size ** 2 for g in groups)
    if params.size != need:
        raise ValueError(f"expected {need} parameters for block sizes {[g.size for g in groups]}, got {params.size}")
    n = v.shape[0]
    u_eig = np.zeros((n, n), dtype=complex)
    k = 0
    for g in groups:
        m = g.size * g.size
        u_eig[np.ix_(g, g)] = expi(hermitian_from_params(params[k:k + m]))
        k += m
    return v @ u_eig @ v.conj().T


def random_transition(
    d_first: int,
    d_second: int,
    temperature: float,
    seed=None,
    *,
    correlated: bool = True,
    kind: str = "unitary",
) -> Transition:
    """Random entropy-preserving transition with a thermal second factor.

    ``correlated=False`` starts from ``rho_S (x) tau_B``; otherwise a random
    joint state is reshaped so its bath marginal is exactly thermal.
    ``kind="unitary"`` applies a Haar unitary, ``kind="spectrum"`` draws a
    fresh state with its spectrum rescaled to the initial entropy (a
    non-unitary entropy-preserving map).
    """
    rng = np.random.default_rng(seed)
    layout = BipartiteLayout(d_first, d_second)
    h_s = random_hamiltonian(d_first, rng)
    h_b = random_hamiltonian(d_second, rng)
    tau_b = gibbs(h_b, temperature)
    if correlated:
        joint = random_density(layout.dim, seed=rng)
        initial = with_second_marginal(joint, layout, tau_b)
    else:
        rho_s = random_density(d_first, seed=rng)
        initial = DensityMatrix(kron(rho_s.matrix, tau_b.matrix))
    if kind == "unitary":
        final = apply_unitary(initial, random_unitary(layout.dim, rng))
    elif kind == "spectrum":
        template = random_density(layout.dim, seed=rng)
        final = entropy_matched_state(template, float(entropy(initial)))
    else:
        raise ValueError(f"kind must be 'unitary' or 'spectrum', got {kind!r}")
    return Transition(initial, final, layout, h_s, h_b, temperature, label=f"random-{kind}")


def commutes_with(u, h, tol: float = 1e-9) -> bool:
    return commutator_norm(u, h) <= tol
