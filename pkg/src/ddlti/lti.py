"""State-space system types, simulation and structural oracles.

This is the ground-truth layer: every data-driven verdict in the library is
tested against the oracles defined here (relative degree from Markov
parameters, zero-dynamics stability from the normal form, ZOH discretization
from the matrix exponential).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import _kernels
from .errors import (
    DimensionMismatchError,
    InfeasibleConstraintsError,
    NonSquareError,
    NotMinimalError,
    NotObservableError,
    NotSisoError,
    NoVectorRelativeDegreeError,
    SingularGError,
)
from .linalg import (
    DEFAULT_TOL,
    Stability,
    ToleranceConfig,
    eigenvalues,
    is_schur_stable,
    kernel_basis,
    numerical_rank,
    orth_basis,
)

__all__ = [
    "StateSpace",
    "DiscreteStateSpace",
    "ContinuousStateSpace",
    "BifForm",
    "CtZeroDynamics",
    "simulate",
    "impulse_response",
    "controllability_matrix",
    "observability_matrix",
    "lag",
    "oracle_relative_degree",
    "oracle_vector_relative_degree",
    "byrnes_isidori",
    "build_from_bif",
    "oracle_zero_dynamics_stable",
    "oracle_ct_zero_dynamics",
    "transmission_zeros",
    "zoh_discretize",
    "random_system",
    "system_to_json",
    "system_from_json",
]


def _as2d(M, name):
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} contains non-finite entries")
    return M


@dataclass
class StateSpace:
    """Quadruple (A, B, C, D); n = 0 collapses to the static map y = D u."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray

    def __post_init__(self):
        self.D = _as2d(self.D, "D")
        p, m = self.D.shape
        A = np.asarray(self.A, dtype=float)
        if A.size == 0:
            A = A.reshape(0, 0)
        A = np.atleast_2d(A)
        if A.shape[0] != A.shape[1]:
            raise DimensionMismatchError(f"A must be square, got {A.shape}")
        n = A.shape[0]
        self.A = A
        try:
            self.B = np.asarray(self.B, dtype=float).reshape(n, m)
            self.C = np.asarray(self.C, dtype=float).reshape(p, n)
        except ValueError as exc:
            raise DimensionMismatchError(f"B/C inconsistent with n={n}, m={m}, p={p}") from exc
        for name in ("A", "B", "C"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise ValueError(f"{name} contains non-finite entries")

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.D.shape[1]

    @property
    def p(self) -> int:
        return self.D.shape[0]


class DiscreteStateSpace(StateSpace):
    """x(t+1) = A x(t) + B u(t),  y(t) = C x(t) + D u(t)."""


class ContinuousStateSpace(StateSpace):
    """dx/dt = A x(t) + B u(t),  y(t) = C x(t) + D u(t)."""


@dataclass
class BifForm:
    """Normal form exposing per-output shift chains and the residual dynamics.

    r[i] is the i-th output's relative degree, Q the zero-dynamics matrix of
    size n - sum(r), P the output injection into the residual states, alpha the
    chain-closing rows (in transformed coordinates), G the decoupling matrix
    and T the state transform into the normal-form coordinates.
    """

    r: tuple
    Q: np.ndarray
    P: np.ndarray
    alpha: np.ndarray
    G: np.ndarray
    T: np.ndarray


@dataclass
class CtZeroDynamics:
    """Zero dynamics of a continuous-time square system.

    q is the flow matrix of the output-nulling dynamics in the echelon
    basis (columns of `basis`), input_gain the feedback u = input_gain @ xi
    sustaining the zero output.
    """

    verdict: Stability
    q: np.ndarray
    input_gain: np.ndarray
    basis: np.ndarray
    spectrum: np.ndarray = field(default=None)


# --- simulation ----------------------------------------------------------------


def simulate(sys: DiscreteStateSpace, x0, u):
    """Run the exact state recursion; returns (y, x) with len(x) = len(u) + 1."""
    u = np.atleast_2d(np.asarray(u, dtype=float))
    if u.shape[1] != sys.m:
        if u.shape[0] == sys.m:
            u = u.T
        else:
            raise DimensionMismatchError(f"input has {u.shape[1]} channels, system has {sys.m}")
    x0 = np.asarray(x0, dtype=float).reshape(-1)
    if x0.shape[0] != sys.n:
        raise DimensionMismatchError(f"x0 has length {x0.shape[0]}, state dimension is {sys.n}")
    return _kernels.simulate_arrays(sys.A, sys.B, sys.C, sys.D, x0, u)


def impulse_response(sys: DiscreteStateSpace, N: int) -> np.ndarray:
    """Markov parameters H(0) = D, H(k) = C A^(k-1) B, shape (N, p, m)."""
    if N < 1:
        raise ValueError("N must be at least 1")
    H = np.zeros((N, sys.p, sys.m))
    H[0] = sys.D
    X = sys.B.copy()
    for k in range(1, N):
        H[k] = sys.C @ X
        X = sys.A @ X
    return H


def controllability_matrix(sys: StateSpace) -> np.ndarray:
    blocks = []
    X = sys.B.copy()
    for _ in range(max(sys.n, 1)):
        blocks.append(X)
        X = sys.A @ X
    return np.hstack(blocks) if sys.n > 0 else np.zeros((0, 0))


def observability_matrix(sys: StateSpace, L: int | None = None) -> np.ndarray:
    L = sys.n if L is None else L
    blocks = []
    X = sys.C.copy()
    for _ in range(max(L, 1)):
        blocks.append(X)
        X = X @ sys.A
    return np.vstack(blocks) if sys.n > 0 else np.zeros((0, 0))


def _check_minimal(sys: StateSpace, tol: ToleranceConfig):
    if sys.n == 0:
        return
    if numerical_rank(observability_matrix(sys), tol) < sys.n:
        raise NotObservableError("state-space representation is not observable")
    if numerical_rank(controllability_matrix(sys), tol) < sys.n:
        raise NotMinimalError("state-space representation is not controllable")


def lag(sys: DiscreteStateSpace, tol: ToleranceConfig = DEFAULT_TOL) -> int:
    """Smallest L such that the order-L truncated observability matrix has rank n.

    Requires a minimal representation; the lag of the zero-state system is 0.
    """
    if sys.n == 0:
        return 0
    _check_minimal(sys, tol)
    X = sys.C.copy()
    rows = []
    for L in range(1, sys.n + 1):
        rows.append(X)
        if numerical_rank(np.vstack(rows), tol) == sys.n:
            return L
        X = X @ sys.A
    raise NotObservableError("observability matrix never reaches full rank")


# --- relative degree oracles -----------------------------------------------------


def oracle_relative_degree(sys: DiscreteStateSpace, tol: ToleranceConfig = DEFAULT_TOL):
    """Relative degree of a SISO system from its Markov parameters.

    Returns 0 for direct feedthrough, the index of the first nonzero Markov
    parameter otherwise, and math.inf when the response is identically zero
    (the search stops at k = n, which suffices by Cayley-Hamilton).
    """
    if sys.m != 1 or sys.p != 1:
        raise NotSisoError(f"system has m={sys.m}, p={sys.p}")
    H = impulse_response(sys, sys.n + 1).reshape(-1)
    scale = float(np.max(np.abs(H)))
    if scale == 0.0:
        return math.inf
    nz = np.nonzero(np.abs(H) > tol.rank_rtol * scale)[0]
    return int(nz[0]) if nz.size else math.inf


def oracle_vector_relative_degree(sys: DiscreteStateSpace, tol: ToleranceConfig = DEFAULT_TOL):
    """Per-output relative degrees and the decoupling matrix, or None.

    Returns (r, G) with r[i] the index of the first nonzero row i of the
    Markov sequence and G the matrix of those rows, provided rank(G) = p;
    otherwise None (no vector relative degree).
    """
    H = impulse_response(sys, sys.n + 1)
    scale = float(np.max(np.abs(H)))
    if scale == 0.0:
        return None
    threshold = tol.rank_rtol * scale
    r = []
    G = np.zeros((sys.p, sys.m))
    for i in range(sys.p):
        rows = H[:, i, :]
        nz = np.nonzero(np.max(np.abs(rows), axis=1) > threshold)[0]
        if nz.size == 0:
            return None
        r.append(int(nz[0]))
        G[i] = rows[nz[0]]
    if numerical_rank(G, tol) < sys.p:
        return None
    return tuple(r), G


# --- Byrnes-Isidori form ---------------------------------------------------------


def _chain_rows(sys: StateSpace, r) -> np.ndarray:
    """Rows C_i A^k for k = 0..r_i-1, chains concatenated output by output."""
    rows = []
    for i, ri in enumerate(r):
        row = sys.C[i : i + 1].copy()
        for _ in range(ri):
            rows.append(row)
            row = row @ sys.A
    return np.vstack(rows) if rows else np.zeros((0, sys.n))


def _chain_tops(sys: StateSpace, r) -> np.ndarray:
    """Rows C_i A^{r_i} closing each chain."""
    rows = []
    for i, ri in enumerate(r):
        rows.append(sys.C[i : i + 1] @ np.linalg.matrix_power(sys.A, ri))
    return np.vstack(rows)


def _minimal_input_subspace(sys: StateSpace, tol: ToleranceConfig) -> np.ndarray:
    """Smallest subspace containing im(B) with A(J ∩ ker C) ⊆ J.

    For a system with vector relative degree this is the span of the input
    chains A^k B G^{-1} e_i, k < r_i, and is complementary to ker of the
    chain rows.
    """
    J = orth_basis(sys.B, tol)
    while True:
        inter = J @ kernel_basis(sys.C @ J, tol)
        J_new = orth_basis(np.hstack([sys.B, sys.A @ inter]), tol)
        if J_new.shape[1] == J.shape[1]:
            return J_new
        J = J_new


def byrnes_isidori(sys: DiscreteStateSpace, tol: ToleranceConfig = DEFAULT_TOL) -> BifForm:
    """Transform a minimal square system with vector relative degree into
    chain/residual coordinates.

    The residual block satisfies eta(t+1) = Q eta(t) + P y(t) exactly; Q is the
    zero-dynamics matrix of size n - sum(r).
    """
    if sys.m != sys.p:
        raise NonSquareError(f"system is {sys.p}x{sys.m}, square required")
    _check_minimal(sys, tol)
    vrd = oracle_vector_relative_degree(sys, tol)
    if vrd is None:
        raise NoVectorRelativeDegreeError("system has no vector relative degree")
    r, G = vrd
    if any(ri == 0 for ri in r):
        raise NoVectorRelativeDegreeError("normal form requires all r_i >= 1")
    theta = _chain_rows(sys, r)
    rs = theta.shape[0]
    d = sys.n - rs

    J = _minimal_input_subspace(sys, tol)
    if J.shape[1] != rs:
        raise NoVectorRelativeDegreeError(
            f"input-chain subspace has dimension {J.shape[1]}, expected {rs}"
        )
    W = kernel_basis(J.T, tol).T  # rows annihilating the chain subspace
    if W.shape[0] != d:
        raise NoVectorRelativeDegreeError("chain subspace and its annihilator are inconsistent")

    T = np.vstack([theta, W])
    if numerical_rank(T, tol) < sys.n:
        raise NoVectorRelativeDegreeError("normal-form transform is singular")

    # W A = Q W + P C holds exactly by construction of W; recover Q and P.
    if d > 0:
        stacked = np.vstack([W, sys.C])
        sol, *_ = np.linalg.lstsq(stacked.T, (W @ sys.A).T, rcond=None)
        QP = sol.T
        residual = np.linalg.norm(QP @ stacked - W @ sys.A)
        scale = max(np.linalg.norm(W @ sys.A), 1.0)
        if residual > 1e3 * tol.membership_rtol * scale:
            raise NoVectorRelativeDegreeError("residual dynamics are not output-driven")
        Q, P = QP[:, :d], QP[:, d:]
    else:
        Q = np.zeros((0, 0))
        P = np.zeros((0, sys.m))

    Tinv = np.linalg.inv(T)
    alpha = _chain_tops(sys, r) @ Tinv
    return BifForm(r=tuple(r), Q=Q, P=P, alpha=alpha, G=G, T=T)


def build_from_bif(r, Q, P, alpha, G) -> DiscreteStateSpace:
    """Assemble a state space directly in chain/residual coordinates.

    The result has vector relative degree r with decoupling matrix G, and its
    zero-dynamics matrix is exactly Q.
    """
    r = tuple(int(ri) for ri in r)
    if any(ri < 1 for ri in r):
        raise DimensionMismatchError("chain lengths r_i must be >= 1")
    G = _as2d(G, "G")
    p = len(r)
    m = G.shape[1]
    if G.shape[0] != p:
        raise DimensionMismatchError(f"G has {G.shape[0]} rows, expected {p}")
    if numerical_rank(G) < p:
        raise SingularGError("decoupling matrix must have full row rank")
    Q = np.asarray(Q, dtype=float)
    Q = Q.reshape(0, 0) if Q.size == 0 else np.atleast_2d(Q)
    if Q.shape[0] != Q.shape[1]:
        raise NonSquareError("Q must be square")
    d = Q.shape[0]
    rs = sum(r)
    n = rs + d
    try:
        alpha = np.zeros((p, n)) if alpha is None else np.asarray(alpha, dtype=float).reshape(p, n)
        P = np.zeros((d, p)) if P is None else np.asarray(P, dtype=float).reshape(d, p)
    except ValueError as exc:
        raise DimensionMismatchError(f"alpha must be {p}x{n} and P {d}x{p}") from exc

    A = np.zeros((n, n))
    B = np.zeros((n, m))
    C = np.zeros((p, n))
    starts = np.concatenate([[0], np.cumsum(r)])[:p]
    for i, ri in enumerate(r):
        s = starts[i]
        C[i, s] = 1.0
        for j in range(ri - 1):
            A[s + j, s + j + 1] = 1.0
        A[s + ri - 1] = alpha[i]
        B[s + ri - 1] = G[i]
    if d > 0:
        A[rs:, rs:] = Q
        A[np.ix_(range(rs, n), starts)] = P
    return DiscreteStateSpace(A=A, B=B, C=C, D=np.zeros((p, m)))


def oracle_zero_dynamics_stable(
    sys: DiscreteStateSpace, tol: ToleranceConfig = DEFAULT_TOL
) -> Stability:
    """Schur stability of the zero-dynamics matrix of the normal form.

    For n = 0 the zero dynamics are stable iff ker D = {0}.
    """
    if sys.n == 0:
        return (
            Stability.STABLE if numerical_rank(sys.D, tol) == sys.m else Stability.UNSTABLE
        )
    return is_schur_stable(byrnes_isidori(sys, tol).Q, tol)


def transmission_zeros(sys: StateSpace) -> np.ndarray:
    """Finite generalized eigenvalues of the Rosenbrock pencil.

    Independent cross-check for the zero-dynamics spectrum of square minimal
    systems with vector relative degree.
    """
    n, m, p = sys.n, sys.m, sys.p
    M = np.block([[sys.A, sys.B], [sys.C, sys.D]])
    N = np.zeros((n + p, n + m))
    N[:n, :n] = np.eye(n)
    vals = scipy.linalg.eigvals(M, N)
    return np.sort_complex(vals[np.isfinite(vals)])


# --- continuous-time zero dynamics ------------------------------------------------


def _column_echelon(V: np.ndarray, tol: ToleranceConfig) -> np.ndarray:
    """Reduce columns so each has a leading 1 in a distinct pivot row.

    Used to report zero-dynamics quantities in a basis matching hand
    calculations (first significant coordinate normalized to one).
    """
    V = V.copy()
    n, d = V.shape
    if d == 0:
        return V
    scale = max(float(np.max(np.abs(V))), 1.0)
    pivot_rows = []
    col = 0
    for row in range(n):
        if col >= d:
            break
        pivot = col + int(np.argmax(np.abs(V[row, col:])))
        if abs(V[row, pivot]) <= tol.rank_rtol * scale * max(n, d):
            continue
        V[:, [col, pivot]] = V[:, [pivot, col]]
        V[:, col] /= V[row, col]
        for k in range(d):
            if k != col:
                V[:, k] -= V[row, k] * V[:, col]
        pivot_rows.append(row)
        col += 1
    return V


def oracle_ct_zero_dynamics(
    sys: ContinuousStateSpace, tol: ToleranceConfig = DEFAULT_TOL
) -> CtZeroDynamics:
    """Zero dynamics of a square continuous-time system.

    Restricts the feedback-corrected flow to the output-nulling subspace.  The
    verdict is Stable/Unstable by the sign of the largest real part, Boundary
    inside the stability margin.
    """
    if sys.m != sys.p:
        raise NonSquareError(f"system is {sys.p}x{sys.m}, square required")
    if sys.n == 0:
        verdict = Stability.STABLE if numerical_rank(sys.D, tol) == sys.m else Stability.UNSTABLE
        return CtZeroDynamics(
            verdict=verdict,
            q=np.zeros((0, 0)),
            input_gain=np.zeros((sys.m, 0)),
            basis=np.zeros((0, 0)),
            spectrum=np.zeros(0, dtype=complex),
        )
    vrd = oracle_vector_relative_degree(sys, tol)
    if vrd is None:
        raise NoVectorRelativeDegreeError("system has no vector relative degree")
    r, G = vrd
    if any(ri == 0 for ri in r):
        raise NoVectorRelativeDegreeError("zero-dynamics reduction requires all r_i >= 1")
    theta = _chain_rows(sys, r)
    V = _column_echelon(kernel_basis(theta, tol), tol)
    d = V.shape[1]
    gain = -np.linalg.solve(G, _chain_tops(sys, r)) if d > 0 else np.zeros((sys.m, sys.n))
    input_gain = gain @ V
    closed = sys.A + sys.B @ gain
    q, *_ = np.linalg.lstsq(V, closed @ V, rcond=None) if d > 0 else (np.zeros((0, 0)),)
    spectrum = eigenvalues(q)
    if d == 0:
        verdict = Stability.STABLE
    else:
        growth = float(np.max(spectrum.real))
        if growth < -tol.stability_margin:
            verdict = Stability.STABLE
        elif growth > tol.stability_margin:
            verdict = Stability.UNSTABLE
        else:
            verdict = Stability.BOUNDARY
    return CtZeroDynamics(verdict=verdict, q=q, input_gain=input_gain, basis=V, spectrum=spectrum)


# --- discretization -----------------------------------------------------------------


def zoh_discretize(sys: ContinuousStateSpace, h: float) -> DiscreteStateSpace:
    """Zero-order-hold discretization at step h.

    A_d = exp(A h) and B_d = (integral of exp(A s) ds over [0, h]) B, computed
    jointly via the augmented block exponential so singular A needs no special
    case.
    """
    if h <= 0:
        raise ValueError(f"sampling time must be positive, got {h}")
    n, m = sys.n, sys.m
    if n == 0:
        return DiscreteStateSpace(
            A=np.zeros((0, 0)), B=np.zeros((0, m)), C=sys.C.copy(), D=sys.D.copy()
        )
    if m == 0:
        Ad = scipy.linalg.expm(sys.A * h)
        return DiscreteStateSpace(A=Ad, B=np.zeros((n, 0)), C=sys.C.copy(), D=sys.D.copy())
    M = np.zeros((n + m, n + m))
    M[:n, :n] = sys.A
    M[:n, n:] = sys.B
    E = scipy.linalg.expm(M * h)
    return DiscreteStateSpace(A=E[:n, :n], B=E[:n, n:], C=sys.C.copy(), D=sys.D.copy())


# --- random systems ------------------------------------------------------------------


def _random_orthogonal(rng, k: int) -> np.ndarray:
    if k == 0:
        return np.zeros((0, 0))
    q, _ = np.linalg.qr(rng.standard_normal((k, k)))
    return q


def _matrix_with_spectrum(rng, poles) -> np.ndarray:
    """Real matrix with prescribed (conjugate-closed) spectrum, randomly rotated."""
    poles = list(poles)
    blocks = []
    used = [False] * len(poles)
    for i, lam in enumerate(poles):
        if used[i]:
            continue
        lam = complex(lam)
        if abs(lam.imag) < 1e-14:
            blocks.append(np.array([[lam.real]]))
            used[i] = True
        else:
            match = next(
                j
                for j in range(i + 1, len(poles))
                if not used[j] and abs(complex(poles[j]) - lam.conjugate()) < 1e-12
            )
            blocks.append(np.array([[lam.real, lam.imag], [-lam.imag, lam.real]]))
            used[i] = used[match] = True
    M = scipy.linalg.block_diag(*blocks) if blocks else np.zeros((0, 0))
    S = _random_orthogonal(rng, M.shape[0])
    return S @ M @ S.T


def _sample_zd_poles(rng, d: int, stable: bool | None):
    """Radii kept at least 0.05 away from the unit circle."""
    poles = []
    force_unstable = stable is False
    while len(poles) < d:
        if stable is True:
            radius = rng.uniform(0.05, 0.9)
        elif stable is False:
            radius = rng.uniform(1.05, 1.6) if force_unstable else rng.uniform(0.05, 0.9)
            force_unstable = False
        else:
            radius = rng.uniform(0.05, 0.9) if rng.random() < 0.5 else rng.uniform(1.05, 1.6)
        if d - len(poles) >= 2 and rng.random() < 0.5:
            angle = rng.uniform(0.1, np.pi - 0.1)
            lam = radius * np.exp(1j * angle)
            poles.extend([lam, lam.conjugate()])
        else:
            poles.append(radius * (1.0 if rng.random() < 0.5 else -1.0))
    if stable is False and not any(abs(lam) > 1.0 for lam in poles):
        poles[0] = rng.uniform(1.05, 1.6)
    return poles[:d]


def random_system(
    n: int,
    m: int,
    p: int,
    constraints: dict | None,
    seed: int,
    tol: ToleranceConfig = DEFAULT_TOL,
    max_tries: int = 64,
) -> DiscreteStateSpace:
    """Deterministic random system satisfying the requested constraints.

    Supported constraint keys: 'controllable', 'observable' (bools),
    'reldeg' (int for SISO or tuple per output; 0 means direct feedthrough),
    'zd_stable' (bool) and 'zd_poles' (explicit zero-dynamics spectrum).
    Constraints are verified post-hoc with the oracles; sampling retries up to
    max_tries before raising InfeasibleConstraintsError.
    """
    constraints = dict(constraints or {})
    reldeg = constraints.get("reldeg")
    if isinstance(reldeg, (int, float)) and reldeg is not None:
        reldeg = (int(reldeg),) * p
    rng = np.random.default_rng(seed)

    for _ in range(max_tries):
        try:
            sys = _sample_once(rng, n, m, p, constraints, reldeg)
        except (ValueError, SingularGError, NonSquareError):
            continue
        if _satisfies(sys, constraints, reldeg, tol):
            return sys
    raise InfeasibleConstraintsError(
        f"could not satisfy {constraints} for (n={n}, m={m}, p={p}) in {max_tries} draws"
    )


def _sample_once(rng, n, m, p, constraints, reldeg):
    if reldeg is not None and all(ri >= 1 for ri in reldeg):
        rs = sum(reldeg)
        d = n - rs
        if d < 0:
            raise InfeasibleConstraintsError(f"sum of relative degrees {rs} exceeds n={n}")
        poles = constraints.get("zd_poles")
        if poles is None:
            poles = _sample_zd_poles(rng, d, constraints.get("zd_stable"))
        Q = _matrix_with_spectrum(rng, poles)
        P = rng.standard_normal((d, p))
        alpha = 0.5 * rng.standard_normal((p, n))
        G = rng.standard_normal((p, m))
        return build_from_bif(reldeg, Q, P, alpha, G)
    A = rng.standard_normal((n, n))
    if n > 0:
        radius = float(np.max(np.abs(np.linalg.eigvals(A))))
        A *= rng.uniform(0.3, 1.1) / max(radius, 1e-6)
    B = rng.standard_normal((n, m))
    C = rng.standard_normal((p, n))
    if reldeg is not None and all(ri == 0 for ri in reldeg):
        D = rng.standard_normal((p, m))
    else:
        D = np.zeros((p, m))
    return DiscreteStateSpace(A=A, B=B, C=C, D=D)


def _satisfies(sys, constraints, reldeg, tol):
    rho_max = constraints.get("spectral_radius_max")
    if rho_max is not None and sys.n > 0:
        # growing trajectories swamp the relative rank tolerances, so the
        # Monte-Carlo generator can insist on moderate internal dynamics
        if float(np.max(np.abs(np.linalg.eigvals(sys.A)))) > rho_max:
            return False
    if constraints.get("controllable") and sys.n > 0:
        if numerical_rank(controllability_matrix(sys), tol) < sys.n:
            return False
    if constraints.get("observable") and sys.n > 0:
        if numerical_rank(observability_matrix(sys), tol) < sys.n:
            return False
    if reldeg is not None:
        if sys.m == 1 and sys.p == 1:
            if oracle_relative_degree(sys, tol) != reldeg[0]:
                return False
        else:
            vrd = oracle_vector_relative_degree(sys, tol)
            if vrd is None or tuple(vrd[0]) != tuple(reldeg):
                return False
    want = constraints.get("zd_stable")
    if want is not None:
        try:
            verdict = oracle_zero_dynamics_stable(sys, tol)
        except (NoVectorRelativeDegreeError, NotMinimalError, NotObservableError):
            return False
        if verdict != (Stability.STABLE if want else Stability.UNSTABLE):
            return False
    if constraints.get("minimal") or constraints.get("zd_stable") is not None:
        try:
            _check_minimal(sys, tol)
        except (NotMinimalError, NotObservableError):
            return False
    return True


# --- JSON interchange -----------------------------------------------------------------


def system_to_json(sys: StateSpace) -> dict:
    """System JSON: {"continuous": bool, "A": [[..]], "B": .., "C": .., "D": ..}."""
    return {
        "continuous": isinstance(sys, ContinuousStateSpace),
        "A": sys.A.tolist(),
        "B": sys.B.tolist(),
        "C": sys.C.tolist(),
        "D": sys.D.tolist(),
    }


def system_from_json(data: dict) -> StateSpace:
    D = np.array(data["D"], dtype=float)
    if D.ndim != 2:
        raise DimensionMismatchError("D must be a nested array")
    p, m = D.shape
    A = np.array(data["A"], dtype=float)
    n = A.shape[0] if A.size else 0
    A = A.reshape(n, n)
    B = np.array(data["B"], dtype=float).reshape(n, m)
    C = np.array(data["C"], dtype=float).reshape(p, n)
    cls = ContinuousStateSpace if data.get("continuous") else DiscreteStateSpace
    return cls(A=A, B=B, C=C, D=D)
