"""Dense Hermitian linear algebra kernel.

Everything here works on plain ``numpy`` arrays. Tensor ordering is fixed
globally: in ``kron(A, B)`` the first factor is the leftmost index, so a joint
state of S and B lives on ``S (x) B`` and ``partial_trace(..., keep="first")``
returns the S marginal.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

HARD_MAX_DIM = 64
HERMITIAN_TOL = 1e-9
CLAMP_TOL = 1e-10


class LinalgError(ValueError):
    """Raised on malformed matrices (shape, Hermiticity, positivity)."""


class DimensionError(LinalgError):
    """Raised when a joint dimension exceeds the configured cap."""


def max_dim() -> int:
    """Current dimension cap; ``CORRTHERM_MAX_DIM`` may lower it but never raise it above 64."""
    raw = os.environ.get("CORRTHERM_MAX_DIM")
    if raw is None:
        return HARD_MAX_DIM
    try:
        value = int(raw)
    except ValueError as exc:
        raise DimensionError(f"CORRTHERM_MAX_DIM must be an integer, got {raw!r}") from exc
    if value < 1:
        raise DimensionError(f"CORRTHERM_MAX_DIM must be positive, got {value}")
    return min(value, HARD_MAX_DIM)


def check_dim(dim: int) -> int:
    cap = max_dim()
    if dim > cap:
        raise DimensionError(f"dimension {dim} exceeds cap {cap}")
    return dim


@dataclass(frozen=True)
class BipartiteLayout:
    """Tensor-factor structure ``d_first x d_second`` of a joint matrix."""

    d_first: int
    d_second: int

    def __post_init__(self):
        if self.d_first < 1 or self.d_second < 1:
            raise LinalgError(f"layout factors must be positive, got {self.d_first}x{self.d_second}")

    @property
    def dim(self) -> int:
        return self.d_first * self.d_second

    @property
    def dims(self) -> tuple[int, int]:
        return (self.d_first, self.d_second)


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues sorted descending, eigenvectors as the columns of a unitary."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def as_square(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise LinalgError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise LinalgError("matrix has non-finite entries")
    return a


def hermiticity_error(m) -> float:
    """Relative Frobenius distance ``||M - M^dag|| / ||M||`` (0 for the zero matrix)."""
    a = as_square(m)
    norm = np.linalg.norm(a)
    if norm == 0.0:
        return 0.0
    return float(np.linalg.norm(a - a.conj().T) / norm)


def hermitize(m, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Validate Hermiticity to ``tol`` and return the symmetrized matrix."""
    a = as_square(m)
    err = hermiticity_error(a)
    if err > tol:
        raise LinalgError(f"matrix is not Hermitian (relative error {err:.3e} > {tol:.0e})")
    return 0.5 * (a + a.conj().T)


def herm_eig(m) -> Spectrum:
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending."""
    a = hermitize(m)
    w, v = np.linalg.eigh(a)
    return Spectrum(eigenvalues=w[::-1].copy(), eigenvectors=v[:, ::-1].copy())


def mat_func(m, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Apply a real function to a Hermitian matrix through its spectrum.

    ``f`` receives the eigenvalue vector and must return finite reals; callers
    that need ``0 log 0 = 0`` handle the zero case inside ``f``.
    """
    spec = herm_eig(m)
    with np.errstate(all="ignore"):
        fl = np.asarray(f(spec.eigenvalues), dtype=float)
    if fl.shape != spec.eigenvalues.shape or not np.all(np.isfinite(fl)):
        bad = spec.eigenvalues[~np.isfinite(fl)] if fl.shape == spec.eigenvalues.shape else spec.eigenvalues
        raise LinalgError(f"function undefined on eigenvalue(s) {bad}")
    v = spec.eigenvectors
    out = (v * fl) @ v.conj().T
    return 0.5 * (out + out.conj().T)


def expi(g) -> np.ndarray:
    """``exp(i G)`` for Hermitian ``G``; the result is unitary by construction."""
    spec = herm_eig(g)
    v = spec.eigenvectors
    return (v * np.exp(1j * spec.eigenvalues)) @ v.conj().T


def clamp_eigenvalues(w: np.ndarray, tol: float = CLAMP_TOL) -> np.ndarray:
    """Map eigenvalues in ``[-tol, 0)`` to zero; anything more negative is an error."""
    w = np.asarray(w, dtype=float)
    if w.size and w.min() < -tol:
        raise LinalgError(f"matrix is not positive semidefinite (eigenvalue {w.min():.3e})")
    return np.where(w < 0.0, 0.0, w)


def psd_eigenvalues(m) -> np.ndarray:
    """Clamped eigenvalues (ascending) of a Hermitian PSD matrix."""
    return clamp_eigenvalues(np.linalg.eigvalsh(hermitize(m)))


def kron(a, b) -> np.ndarray:
    a = as_square(a)
    b = as_square(b)
    check_dim(a.shape[0] * b.shape[0])
    return np.kron(a, b)


def kron_all(mats: Sequence) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for m in mats:
        out = kron(out, m)
    return out


def reduce_state(m, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Trace out every tensor factor not listed in ``keep``.

    ``dims`` lists the factor dimensions in tensor order; ``keep`` holds factor
    indices and the result keeps them in ascending order.
    """
    a = as_square(m)
    dims = [int(d) for d in dims]
    if int(np.prod(dims)) != a.shape[0]:
        raise LinalgError(f"layout {dims} does not match matrix dimension {a.shape[0]}")
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= len(dims) for k in keep):
        raise LinalgError(f"keep indices {keep} out of range for {len(dims)} factors")
    n = len(dims)
    t = a.reshape(dims + dims)
    # einsum labels: row index i_k, column index j_k; traced factors share a label
    letters = "abcdefghijklmnopqrstuvwxyz"
    rows = list(letters[:n])
    cols = [letters[n + k] if k in keep else rows[k] for k in range(n)]
    out = "".join(rows[k] for k in keep) + "".join(cols[k] for k in keep)
    r = np.einsum("".join(rows) + "".join(cols) + "->" + out, t)
    d_keep = int(np.prod([dims[k] for k in keep])) if keep else 1
    return r.reshape(d_keep, d_keep)


def partial_trace(m, layout: BipartiteLayout, keep: str = "first") -> np.ndarray:
    """Bipartite partial trace; ``keep="first"`` traces out the second factor."""
    if keep not in ("first", "second"):
        raise LinalgError(f"keep must be 'first' or 'second', got {keep!r}")
    a = as_square(m)
    if a.shape[0] != layout.dim:
        raise LinalgError(f"layout {layout.d_first}x{layout.d_second} does not match dimension {a.shape[0]}")
    return reduce_state(a, layout.dims, [0] if keep == "first" else [1])


def trace_distance(a, b) -> float:
    """``0.5 * ||A - B||_1`` for Hermitian arguments."""
    d = hermitize(np.asarray(a, dtype=complex) - np.asarray(b, dtype=complex))
    return float(0.5 * np.abs(np.linalg.eigvalsh(d)).sum())


def unitarity_error(u) -> float:
    a = as_square(u)
    return float(np.linalg.norm(a.conj().T @ a - np.eye(a.shape[0])))


def commutator_norm(a, b) -> float:
    a = as_square(a)
    b = as_square(b)
    return float(np.linalg.norm(a @ b - b @ a))


def swap_operator(d_first: int, d_second: int) -> np.ndarray:
    """Permutation ``|i>|j> -> |j>|i>`` from ``d_first x d_second`` to ``d_second x d_first``."""
    n = d_first * d_second
    check_dim(n)
    p = np.zeros((n, n), dtype=complex)
    for i in range(d_first):
        for j in range(d_second):
            p[j * d_first + i, i * d_second + j] = 1.0
    return p
