"""Search over energy-preserving unitaries for anomalous heat flow.

The feasible set is parameterized exactly: one Hermitian generator per
degenerate eigenspace of ``H_A + H_B`` and ``U = exp(iG)``, so every iterate
commutes with the total Hamiltonian and preserves the joint spectrum. Each
evaluation is certified against the correlation-aware Clausius bound and, when
correlations are consumed, the Carnot bound on the coefficient of performance.
A bound violation aborts the search with the offending parameters.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .laws import CopUndefinedError, LawReport, carnot_cop, clausius_report, cop_report
from .linalg import BipartiteLayout, commutator_norm, partial_trace, trace_distance
from .process import block_param_count, energy_preserving_unitary, two_bath_transition
from .states import DensityMatrix, Hamiltonian, gibbs, total_hamiltonian
from .thermo import entropy, shannon


class BoundViolationError(AssertionError):
    """An evaluated point broke the Clausius or Carnot bound."""


class FeasibilityError(AssertionError):
    """An evaluated unitary left the energy-preserving manifold."""


@dataclass
class SearchConfig:
    restarts: int = 4
    max_iters: int = 200
    step_init: float = 0.5
    step_shrink: float = 0.5
    convergence_tol: float = 1e-10
    seed: int = 0
    gradient_polish: bool = True
    fd_step: float = 1e-5
    bound_tol: float = 1e-7
    # COP iterates need dI below -min_delta_i; tinier dI makes eta pure rounding noise
    min_delta_i: float = 1e-6

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.max_iters < 0:
            raise ValueError("max_iters must be >= 0")
        if not self.step_init > 0 or not self.convergence_tol > 0 or not self.fd_step > 0:
            raise ValueError("step_init, convergence_tol and fd_step must be positive")
        if not 0 < self.step_shrink < 1:
            raise ValueError("step_shrink must lie in (0, 1)")

    @classmethod
    def from_dict(cls, d: dict) -> "SearchConfig":
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown optimizer field(s): {sorted(unknown)}")
        return cls(**d)


@dataclass(frozen=True)
class Evaluation:
    restart: int
    dq_a: float
    delta_i: float
    clausius_slack: float
    eta: float  # nan when dI >= -min_delta_i


@dataclass
class SearchResult:
    best_params: np.ndarray
    best_objective: float
    report: dict
    trace: list
    evaluations: list = field(repr=False, default_factory=list)
    objective_name: str = "dQ_A"

    def to_dict(self) -> dict:
        return {
            "objective": self.objective_name,
            "best_params": [float(x) for x in self.best_params],
            "best_objective": self.best_objective,
            "reports": {k: (v.to_dict() if v is not None else None) for k, v in self.report.items()},
            "trace": [float(x) for x in self.trace],
            "n_evaluations": len(self.evaluations),
            "min_clausius_slack": min((e.clausius_slack for e in self.evaluations), default=math.nan),
        }


class TwoBathProblem:
    """Precomputed data for evaluating ``U rho U^dag`` on two thermal baths."""

    def __init__(self, rho_ab, h_a, h_b, t_a: float, t_b: float, cfg: SearchConfig, thermal_tol: float = 1e-6):
        self.rho = np.asarray(rho_ab if isinstance(rho_ab, DensityMatrix) else DensityMatrix(rho_ab))
        self.h_a = h_a if isinstance(h_a, Hamiltonian) else Hamiltonian(h_a)
        self.h_b = h_b if isinstance(h_b, Hamiltonian) else Hamiltonian(h_b)
        self.t_a, self.t_b = float(t_a), float(t_b)
        self.cfg = cfg
        self.layout = BipartiteLayout(self.h_a.dim, self.h_b.dim)
        self.h_total = total_hamiltonian(self.h_a, self.h_b).matrix
        ra = partial_trace(self.rho, self.layout, "first")
        rb = partial_trace(self.rho, self.layout, "second")
        for name, r, h, t in (("A", ra, self.h_a, self.t_a), ("B", rb, self.h_b, self.t_b)):
            dist = trace_distance(r, gibbs(h, t).matrix)
            if dist > thermal_tol:
                raise ValueError(f"marginal {name} is not thermal at T={t!r} (trace distance {dist:.3e})")
        self.s_a0 = float(entropy(ra))
        self.s_b0 = float(entropy(rb))
        self.s_ab0 = float(entropy(self.rho))
        self.n_params = block_param_count(self.h_total)
        self.carnot = carnot_cop(self.t_a, self.t_b)
        self.evaluations: list[Evaluation] = []
        self.restart = 0

    def unitary(self, params) -> np.ndarray:
        return energy_preserving_unitary(self.h_total, params)

    def evaluate(self, params) -> Evaluation:
        u = self.unitary(params)
        comm = commutator_norm(u, self.h_total)
        if comm > 1e-9:
            raise FeasibilityError(f"unitary does not commute with H_total ({comm:.3e}) at params {list(params)}")
        out = u @ self.rho @ u.conj().T
        s_ab = float(entropy(out))
        if abs(s_ab - self.s_ab0) > 1e-9:
            raise FeasibilityError(f"joint entropy drifted by {s_ab - self.s_ab0:.3e} at params {list(params)}")
        d_s_a = float(entropy(partial_trace(out, self.layout, "first"))) - self.s_a0
        d_s_b = float(entropy(partial_trace(out, self.layout, "second"))) - self.s_b0
        d_i = d_s_a + d_s_b - (s_ab - self.s_ab0)
        dq_a = -self.t_a * d_s_a
        slack = -dq_a * (self.t_b - self.t_a) - self.t_a * self.t_b * d_i
        if slack < -self.cfg.bound_tol:
            raise BoundViolationError(
                f"Clausius bound violated: slack {slack:.3e}, dQ_A={dq_a!r}, dI={d_i!r}, params={list(params)}"
            )
        eta = math.nan
        if d_i < -self.cfg.min_delta_i:
            eta = dq_a / (-self.t_b * d_i)
            if eta > self.carnot + self.cfg.bound_tol:
                raise BoundViolationError(
                    f"Carnot bound violated: eta={eta!r} > {self.carnot!r}, params={list(params)}"
                )
        ev = Evaluation(self.restart, dq_a, d_i, slack, eta)
        self.evaluations.append(ev)
        return ev

    def transition(self, params):
        return two_bath_transition(self.rho, self.h_a, self.h_b, self.t_a, self.t_b, self.unitary(params))


def _coordinate_search(f, x0: np.ndarray, cfg: SearchConfig):
    """Compass search with shrinking step; returns (x, f(x), best-so-far trace)."""
    x = x0.copy()
    fx = f(x)
    trace = [fx]
    step = cfg.step_init
    for _ in range(cfg.max_iters):
        if step < cfg.convergence_tol:
            break
        improved = False
        for i in range(x.size):
            for sign in (1.0, -1.0):
                y = x.copy()
                y[i] += sign * step
                fy = f(y)
                if fy > fx:
                    x, fx, improved = y, fy, True
                    break
        if not improved:
            step *= cfg.step_shrink
        trace.append(fx)
    return x, fx, trace


def _gradient_polish(f, x: np.ndarray, fx: float, cfg: SearchConfig, iters: int = 50):
    """Central-difference ascent with backtracking; never returns a worse point."""
    trace = []
    h = cfg.fd_step
    for _ in range(iters):
        if not math.isfinite(fx):
            break
        g = np.zeros_like(x)
        for i in range(x.size):
            e = np.zeros_like(x)
            e[i] = h
            fp, fm = f(x + e), f(x - e)
            if not (math.isfinite(fp) and math.isfinite(fm)):
                return x, fx, trace
            g[i] = (fp - fm) / (2 * h)
        gn = np.linalg.norm(g)
        if gn < 1e-12:
            break
        t = 1.0
        accepted = False
        while t > 1e-12:
            y = x + t * g
            fy = f(y)
            if fy > fx:
                x, fx, accepted = y, fy, True
                break
            t *= 0.5
        trace.append(fx)
        if not accepted:
            break
    return x, fx, trace


def _search(problem: TwoBathProblem, objective, cfg: SearchConfig, start: np.ndarray | None = None):
    """Restart 0 begins at ``start`` (zeros by default), later ones uniformly in [-pi, pi]."""
    rng = np.random.default_rng(cfg.seed)
    best_x, best_f = None, -math.inf
    trace: list[float] = []

    def f(x):
        ev = problem.evaluate(x)
        return objective(ev)

    for r in range(cfg.restarts):
        problem.restart = r
        if r == 0:
            x0 = np.zeros(problem.n_params) if start is None else np.asarray(start, dtype=float).copy()
        else:
            x0 = rng.uniform(-math.pi, math.pi, problem.n_params)
        x, fx, tr = _coordinate_search(f, x0, cfg)
        if cfg.gradient_polish and cfg.max_iters > 0:
            x, fx, tr2 = _gradient_polish(f, x, fx, cfg)
            tr = tr + tr2
        if fx > best_f:
            best_x, best_f = x, fx
        running = trace[-1] if trace else -math.inf
        for v in tr:
            running = max(running, v)
            trace.append(running)
    return best_x, best_f, trace


def maximize_anomalous_flow(rho_ab, h_a, h_b, t_a: float, t_b: float, cfg: SearchConfig | None = None) -> SearchResult:
    """Maximize the heat ``dQ_A = -T_A dS_A`` drawn from bath A.

    With ``T_A < T_B`` a positive optimum is heat flowing from cold to hot,
    paid for by consumed correlations. A result with objective <= 0 means no
    anomalous flow was found; it is returned, not raised.
    """
    cfg = cfg or SearchConfig()
    problem = TwoBathProblem(rho_ab, h_a, h_b, t_a, t_b, cfg)
    x, fx, trace = _search(problem, lambda ev: ev.dq_a, cfg)
    t = problem.transition(x)
    report = {"clausius": clausius_report(t, tol=cfg.bound_tol)}
    try:
        report["cop"] = cop_report(t, tol=cfg.bound_tol, min_delta_i=cfg.min_delta_i)
    except CopUndefinedError:
        report["cop"] = None
    return SearchResult(x, float(fx), report, trace, list(problem.evaluations), "dQ_A")


def maximize_cop(rho_ab, h_a, h_b, t_a: float, t_b: float, cfg: SearchConfig | None = None) -> SearchResult:
    """Maximize ``eta = dQ_A / (-T_B dI)`` over iterates with ``dI < -min_delta_i``.

    The eta landscape splits into basins separated by points where ``dI >= 0``;
    positive eta needs ``dQ_A > 0``, so the first restart starts from the
    best point of a heat-flow search. Raises
    :class:`~corrtherm.laws.CopUndefinedError` when no evaluated point
    consumes correlations (for instance on product inputs).
    """
    cfg = cfg or SearchConfig()
    problem = TwoBathProblem(rho_ab, h_a, h_b, t_a, t_b, cfg)
    x_heat, _, _ = _search(problem, lambda ev: ev.dq_a, cfg)
    x, fx, trace = _search(problem, lambda ev: ev.eta if not math.isnan(ev.eta) else -math.inf, cfg, start=x_heat)
    if not math.isfinite(fx):
        raise CopUndefinedError("no evaluated unitary reduced the mutual information; COP undefined")
    t = problem.transition(x)
    report = {
        "clausius": clausius_report(t, tol=cfg.bound_tol),
        "cop": cop_report(t, tol=cfg.bound_tol, min_delta_i=cfg.min_delta_i),
    }
    return SearchResult(x, float(fx), report, trace, list(problem.evaluations), "eta")


@dataclass
class AngleGrid:
    theta: np.ndarray
    dq_a: np.ndarray
    delta_i: np.ndarray
    clausius_slack: np.ndarray
    eta: np.ndarray

    def argmax(self) -> int:
        return int(np.argmax(self.dq_a))


def block_rotation(theta: float) -> np.ndarray:
    """Real rotation by ``theta`` inside ``span{|01>, |10>}`` of two qubits."""
    c, s = math.cos(theta), math.sin(theta)
    u = np.eye(4, dtype=complex)
    u[1, 1], u[1, 2], u[2, 1], u[2, 2] = c, -s, s, c
    return u


def angle_grid(rho_ab, h_a, h_b, t_a: float, t_b: float, n: int = 10_000, lo: float = 0.0, hi: float = math.pi,
               min_delta_i: float = 1e-6, endpoint: bool = False) -> AngleGrid:
    """Evaluate the single-angle swap family on a uniform grid (vectorized).

    Only meaningful for two qubits whose ``|01>`` and ``|10>`` levels are
    degenerate; a rotation there commutes with ``H_A + H_B``.
    """
    rho = np.asarray(rho_ab, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError("angle_grid needs a two-qubit state")
    h = total_hamiltonian(h_a, h_b).matrix
    if abs(h[1, 1] - h[2, 2]) > 1e-8 or np.abs(h - np.diag(np.diag(h))).max() > 1e-12:
        raise ValueError("|01> and |10> must be degenerate eigenstates of H_A + H_B")
    theta = np.linspace(lo, hi, n, endpoint=endpoint)
    c, s = np.cos(theta), np.sin(theta)
    u = np.broadcast_to(np.eye(4, dtype=complex), (n, 4, 4)).copy()
    u[:, 1, 1], u[:, 1, 2], u[:, 2, 1], u[:, 2, 2] = c, -s, s, c
    out = u @ rho @ np.conj(np.swapaxes(u, 1, 2))
    t4 = out.reshape(n, 2, 2, 2, 2)
    ra = np.einsum("nijkj->nik", t4)
    rb = np.einsum("njijk->nik", t4)

    def batch_entropy(m):
        lam = np.clip(np.linalg.eigvalsh(m), 0.0, None)
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = np.where(lam > 0, -lam * np.log(np.where(lam > 0, lam, 1.0)), 0.0)
        return terms.sum(axis=-1)

    r0 = rho.reshape(2, 2, 2, 2)
    s_a0 = shannon(np.linalg.eigvalsh(np.einsum("ijkj->ik", r0)))
    s_b0 = shannon(np.linalg.eigvalsh(np.einsum("jijk->ik", r0)))
    d_s_a = batch_entropy(ra) - s_a0
    d_s_b = batch_entropy(rb) - s_b0
    d_i = d_s_a + d_s_b
    dq_a = -t_a * d_s_a
    slack = -dq_a * (t_b - t_a) - t_a * t_b * d_i
    with np.errstate(divide="ignore", invalid="ignore"):
        eta = np.where(d_i < -min_delta_i, dq_a / (-t_b * d_i), np.nan)
    return AngleGrid(theta, dq_a, d_i, slack, eta)


def config_dict(cfg: SearchConfig) -> dict:
    return asdict(cfg)
