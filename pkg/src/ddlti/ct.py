"""Continuous-time reconstruction from three sampled discretizations.

A single sampling rate cannot identify a continuous system: spectra that
differ by multiples of 2*pi*i/h discretize identically.  With three rates
whose reciprocals are rationally independent, each discrete eigenvalue set
constrains the continuous one to a lattice of logarithm branches, and the
lattices intersect in exactly one point.  The real part is common to all
rates through the modulus, which groups the spectra into magnitude shells;
the imaginary part is found by a bounded branch search that must be
consistent with all three rates.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    AmbiguousBranchError,
    DefectiveError,
    DimensionMismatchError,
    DuplicateAliasError,
    InfeasibleError,
    MarkovMismatchError,
    NearSingularIntegralError,
    NoBranchMatchError,
    NotPersistentlyExcitingError,
    NotUniqueError,
    RankDeficientHankelError,
    ShellMismatchError,
    ValidationFailedError,
)
from .hankel import DataSet
from .linalg import DEFAULT_TOL, ToleranceConfig, eigenvalues, numerical_rank
from .lti import (
    ContinuousStateSpace,
    DiscreteStateSpace,
    impulse_response,
    zoh_discretize,
)
from .mpum import unique_continuation

__all__ = [
    "DiscretizationTriple",
    "EigenPairing",
    "pair_eigenvalues",
    "reconstruct_ct",
    "realize_from_data",
    "reconstruct_from_data",
]

DIAGONALIZABILITY_COND_LIMIT = 1e8


@dataclass
class DiscretizationTriple:
    """Three discretizations of one continuous system at distinct rates.

    Rational independence of the reciprocal sampling times is a caller
    assertion; it cannot be checked in floating point.
    """

    systems: tuple
    sampling_times: tuple

    def __post_init__(self):
        if len(self.systems) != 3 or len(self.sampling_times) != 3:
            raise DimensionMismatchError("a triple needs exactly three discretizations")
        dims = {(s.n, s.m, s.p) for s in self.systems}
        if len(dims) != 1:
            raise DimensionMismatchError(f"inconsistent dimensions across the triple: {dims}")
        h = self.sampling_times
        if any(v <= 0 for v in h) or len({float(v) for v in h}) != 3:
            raise DimensionMismatchError("sampling times must be positive and pairwise distinct")


@dataclass
class EigenPairing:
    """De-aliased continuous spectrum, aligned with the first eigenvalue set.

    shells groups indices by matched modulus; k_indices[j][i] is the logarithm
    branch of eigenvalue j at sampling time i.
    """

    lambdas: np.ndarray
    shells: list
    k_indices: np.ndarray


def _cluster(values: np.ndarray, atol: float) -> list:
    """Group sorted positions within atol; returns a list of index arrays."""
    order = np.argsort(values)
    groups = []
    current = [order[0]]
    for idx in order[1:]:
        if values[idx] - values[current[-1]] <= atol:
            current.append(idx)
        else:
            groups.append(np.array(current))
            current = [idx]
    groups.append(np.array(current))
    return groups


def pair_eigenvalues(
    E1,
    E2,
    E3,
    h1: float,
    h2: float,
    h3: float,
    k_max: int = 32,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> EigenPairing:
    """Resolve the continuous spectrum from three discrete spectra.

    Within each magnitude shell, every eigenvalue of the first set starts a
    branch search over arg + 2*pi*k with |k| <= k_max; a candidate survives
    only if both other rates contain a matching branch.  Exactly one survivor
    per eigenvalue is required.
    """
    sets = [np.asarray(E, dtype=complex) for E in (E1, E2, E3)]
    n = sets[0].size
    if any(E.size != n for E in sets):
        raise DimensionMismatchError("eigenvalue sets must have equal cardinality")
    if n == 0:
        return EigenPairing(np.zeros(0, complex), [], np.zeros((0, 3), dtype=int))
    hs = (float(h1), float(h2), float(h3))
    if any(np.abs(E).min() <= 0.0 for E in sets):
        raise ValueError("all discrete eigenvalues must have positive modulus")

    # real parts via log-modulus (log-space keeps fast dynamics finite)
    res = [np.log(np.abs(E)) / h for E, h in zip(sets, hs)]
    shells1 = _cluster(res[0], tol.match_atol)
    shell_levels = [float(np.mean(res[0][g])) for g in shells1]
    shell_members = [[g, None, None] for g in shells1]
    for s in (1, 2):
        taken = np.zeros(n, dtype=bool)
        for r, level in enumerate(shell_levels):
            members = [
                idx
                for idx in range(n)
                if not taken[idx] and abs(res[s][idx] - level) <= 10 * tol.match_atol
            ]
            if len(members) != len(shells1[r]):
                raise ShellMismatchError(
                    f"magnitude shell at Re = {level:.6g} has {len(shells1[r])} eigenvalues "
                    f"at rate 1 but {len(members)} at rate {s + 1}"
                )
            taken[members] = True
            shell_members[r][s] = np.array(members)
        if not taken.all():
            raise ShellMismatchError("eigenvalue magnitudes do not partition consistently")

    lambdas = np.zeros(n, dtype=complex)
    k_indices = np.zeros((n, 3), dtype=int)
    for r, (g1, g2, g3) in enumerate(shell_members):
        level = shell_levels[r]
        args2 = np.angle(sets[1][g2])
        args3 = np.angle(sets[2][g3])
        candidate_cache = {}
        for idx in g1:
            mu = sets[0][idx]
            key = (round(mu.real, 12), round(mu.imag, 12))
            if key in candidate_cache:
                cands = candidate_cache[key]
            else:
                cands = _branch_candidates(
                    np.angle(mu), args2, args3, hs, k_max, tol.match_atol
                )
                candidate_cache[key] = cands
            if not cands:
                raise NoBranchMatchError(
                    f"no branch within |k| <= {k_max} matches eigenvalue {mu:.6g} at all rates"
                )
            if len(cands) > 1:
                duplicates = [
                    j for j in g1 if abs(sets[0][j] - mu) <= tol.match_atol and j != idx
                ]
                if duplicates:
                    raise DuplicateAliasError(
                        f"repeated discrete eigenvalue {mu:.6g} admits distinct logarithms; "
                        "eigenspace split is not supported"
                    )
                raise AmbiguousBranchError(
                    f"eigenvalue {mu:.6g} admits {len(cands)} branches within tolerance; "
                    "sampling times may be too close to rational dependence"
                )
            omega, ks = cands[0]
            lambdas[idx] = complex(level, omega)
            k_indices[idx] = ks

    _enforce_conjugate_closure(sets[0], lambdas, tol)
    for s in range(3):
        predicted = np.exp(hs[s] * lambdas)
        if not _multiset_close(predicted, sets[s], 10 * tol.match_atol * max(1.0, float(np.max(np.abs(sets[s]))))):
            raise AmbiguousBranchError(
                f"branch assignment does not reproduce the spectrum at rate {s + 1}"
            )
    shells = [list(map(int, g1)) for g1, _, _ in shell_members]
    return EigenPairing(lambdas=lambdas, shells=shells, k_indices=k_indices)


def _branch_candidates(arg1, args2, args3, hs, k_max, atol):
    """All de-duplicated imaginary parts consistent with the three rates."""
    h1, h2, h3 = hs
    cands = []
    for k1 in range(-k_max, k_max + 1):
        omega = (arg1 + 2 * math.pi * k1) / h1
        hit2 = _nearest_branch(omega, args2, h2, atol)
        if hit2 is None:
            continue
        hit3 = _nearest_branch(omega, args3, h3, atol)
        if hit3 is None:
            continue
        if all(abs(omega - c[0]) > atol for c in cands):
            cands.append((omega, (k1, hit2, hit3)))
    return cands


def _nearest_branch(omega, args, h, atol):
    """Branch index k with (arg + 2 pi k)/h = omega for some listed arg, or None."""
    for arg in args:
        k = round((omega * h - arg) / (2 * math.pi))
        if abs((arg + 2 * math.pi * k) / h - omega) <= atol:
            return int(k)
    return None


def _enforce_conjugate_closure(mus, lambdas, tol):
    n = mus.size
    used = np.zeros(n, dtype=bool)
    for i in range(n):
        if used[i] or abs(mus[i].imag) <= tol.match_atol:
            continue
        for j in range(i + 1, n):
            if not used[j] and abs(mus[j] - mus[i].conjugate()) <= tol.match_atol:
                lambdas[j] = lambdas[i].conjugate()
                used[i] = used[j] = True
                break


def _multiset_close(a: np.ndarray, b: np.ndarray, atol: float) -> bool:
    b = list(b)
    for value in a:
        match = next((k for k, other in enumerate(b) if abs(other - value) <= atol), None)
        if match is None:
            return False
        b.pop(match)
    return True


def _phi1(z: complex) -> complex:
    """(exp(z) - 1)/z with the removable singularity filled by its series."""
    if abs(z) < 1e-4:
        return 1.0 + z / 2.0 + z * z / 6.0 + z * z * z / 24.0
    return (cmath.exp(z) - 1.0) / z


def _assemble_ct(sys1: DiscreteStateSpace, E2, E3, h1, h2, h3, k_max, tol):
    """Continuous (A, B) in the eigenbasis of the first discretization."""
    w1, V = np.linalg.eig(sys1.A)
    if np.linalg.cond(V) > DIAGONALIZABILITY_COND_LIMIT:
        raise DefectiveError(
            "leading discretization is numerically defective; reconstruction unsupported"
        )
    pairing = pair_eigenvalues(w1, E2, E3, h1, h2, h3, k_max, tol)
    lam = pairing.lambdas
    A_complex = V @ np.diag(lam) @ np.linalg.inv(V)
    A = _realify(A_complex, tol)
    phi = np.array([_phi1(l * h1) for l in lam])
    if np.any(np.abs(phi) < tol.match_atol):
        raise NearSingularIntegralError(
            "hold integral nearly singular: eigenvalue close to a nonzero multiple of 2*pi*i/h"
        )
    integral_inv = V @ np.diag(1.0 / (h1 * phi)) @ np.linalg.inv(V)
    B = _realify(integral_inv @ sys1.B, tol)
    return A, B, pairing


def _realify(M: np.ndarray, tol: ToleranceConfig) -> np.ndarray:
    scale = max(float(np.max(np.abs(M.real))), 1.0)
    if float(np.max(np.abs(M.imag))) > 1e3 * tol.membership_rtol * scale:
        raise ValidationFailedError("reconstructed matrix has a non-real component")
    return np.ascontiguousarray(M.real)


def reconstruct_ct(
    triple: DiscretizationTriple, k_max: int = 32, tol: ToleranceConfig = DEFAULT_TOL
) -> ContinuousStateSpace:
    """Continuous system whose ZOH discretizations reproduce the given triple.

    The spectrum is de-aliased across the three rates, A is rebuilt in the
    eigenbasis of the first discretization (diagonalizable required) and B by
    inverting the hold integral.  Re-discretization at the other two rates is
    verified and any mismatch is a hard error.
    """
    sys1, sys2, sys3 = triple.systems
    h1, h2, h3 = triple.sampling_times
    if sys1.n == 0:
        for other in (sys2, sys3):
            if not np.allclose(other.D, sys1.D, atol=tol.match_atol):
                raise ValidationFailedError("static feedthrough differs across the triple")
        return ContinuousStateSpace(
            A=np.zeros((0, 0)), B=np.zeros((0, sys1.m)), C=sys1.C.copy(), D=sys1.D.copy()
        )
    A, B, _ = _assemble_ct(
        sys1, eigenvalues(sys2.A), eigenvalues(sys3.A), h1, h2, h3, k_max, tol
    )
    ct_sys = ContinuousStateSpace(A=A, B=B, C=sys1.C.copy(), D=sys1.D.copy())
    for other, h in ((sys2, h2), (sys3, h3)):
        Ad = scipy.linalg.expm(A * h)
        err_a = np.linalg.norm(Ad - other.A) / max(np.linalg.norm(other.A), 1e-300)
        if err_a > 10 * tol.membership_rtol:
            raise ValidationFailedError(
                f"exp(A h) mismatch at h = {h:.6g} (relative error {err_a:.2e}); "
                "the triple is not consistent"
            )
        Bd = zoh_discretize(ct_sys, h).B
        err_b = np.linalg.norm(Bd - other.B) / max(np.linalg.norm(other.B), 1.0)
        if err_b > 10 * tol.membership_rtol:
            raise ValidationFailedError(
                f"hold-integral mismatch at h = {h:.6g} (relative error {err_b:.2e})"
            )
    return ct_sys


# --- data route ------------------------------------------------------------------


def realize_from_data(
    ds: DataSet, lag: int, n: int, tol: ToleranceConfig = DEFAULT_TOL
) -> DiscreteStateSpace:
    """Minimal state-space realization of order n from one dataset.

    Markov parameters are read off as the unique zero-initialized responses to
    canonical impulses; the balanced realization factors their block Hankel.
    """
    markov = _extract_markov(ds, lag, n, tol)
    sys = _ho_kalman(markov, n, ds.m, ds.p, tol)
    check = impulse_response(sys, 2 * n + 1)
    scale = max(float(np.max(np.abs(markov))), 1.0)
    if float(np.max(np.abs(check - markov))) > 1e2 * tol.membership_rtol * scale:
        raise MarkovMismatchError(
            f"order-{n} realization cannot reproduce the measured response; "
            "declared McMillan degree is too small"
        )
    return sys


def _extract_markov(ds: DataSet, lag: int, n: int, tol: ToleranceConfig) -> np.ndarray:
    T_f = 2 * n + 1
    markov = np.zeros((T_f, ds.p, ds.m))
    for j in range(ds.m):
        u_f = np.zeros((T_f, ds.m))
        u_f[0, j] = 1.0
        try:
            y_f = unique_continuation(
                ds, lag, T_f, np.zeros((lag, ds.m)), np.zeros((lag, ds.p)), u_f, tol
            )
        except (InfeasibleError, NotUniqueError) as exc:
            raise NotPersistentlyExcitingError(
                f"data cannot pin down the impulse response: {exc}"
            ) from exc
        markov[:, :, j] = y_f
    return markov


def _ho_kalman(markov: np.ndarray, n: int, m: int, p: int, tol: ToleranceConfig):
    if n == 0:
        return DiscreteStateSpace(
            A=np.zeros((0, 0)), B=np.zeros((0, m)), C=np.zeros((p, 0)), D=markov[0]
        )
    H = np.vstack(
        [np.hstack([markov[i + j + 1] for j in range(n)]) for i in range(n)]
    )
    H_up = np.vstack(
        [np.hstack([markov[i + j + 2] for j in range(n)]) for i in range(n)]
    )
    if numerical_rank(H, tol) < n:
        raise RankDeficientHankelError(
            f"Markov Hankel has rank {numerical_rank(H, tol)} < declared order {n}"
        )
    U, s, Vt = np.linalg.svd(H)
    sqrt_s = np.sqrt(s[:n])
    gamma = U[:, :n] * sqrt_s
    omega = (Vt[:n].T * sqrt_s).T
    A = (U[:, :n] / sqrt_s).T @ H_up @ (Vt[:n].T / sqrt_s)
    B = omega[:, :m]
    C = gamma[:p, :]
    return DiscreteStateSpace(A=A, B=B, C=C, D=markov[0])


def reconstruct_from_data(
    ds1: DataSet,
    ds2: DataSet,
    ds3: DataSet,
    lags,
    ns,
    k_max: int = 32,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> ContinuousStateSpace:
    """Continuous system from three datasets sampled at three rates.

    Only the first dataset is realized in full; the other two contribute their
    spectra (all the proof needs) and their impulse responses for validation.
    Validation is basis-free: the reconstruction is re-discretized at the
    other two rates and must reproduce their measured Markov parameters.
    """
    datasets = (ds1, ds2, ds3)
    hs = tuple(ds.sampling_time for ds in datasets)
    if any(h is None for h in hs):
        raise DimensionMismatchError("all three datasets must carry a sampling time")
    if len({float(h) for h in hs}) != 3:
        raise DimensionMismatchError("sampling times must be pairwise distinct")
    lags = tuple(int(v) for v in lags)
    ns = tuple(int(v) for v in ns)
    if len(set(ns)) != 1:
        raise DimensionMismatchError(f"declared orders differ across datasets: {ns}")
    n = ns[0]
    systems = [
        realize_from_data(ds, lag_i, n, tol) for ds, lag_i in zip(datasets, lags)
    ]
    sys1 = systems[0]
    if n == 0:
        for other in systems[1:]:
            if not np.allclose(other.D, sys1.D, atol=tol.match_atol):
                raise MarkovMismatchError("static feedthrough differs across the datasets")
        return ContinuousStateSpace(
            A=np.zeros((0, 0)), B=np.zeros((0, sys1.m)), C=sys1.C.copy(), D=sys1.D.copy()
        )
    A, B, _ = _assemble_ct(
        sys1,
        eigenvalues(systems[1].A),
        eigenvalues(systems[2].A),
        hs[0],
        hs[1],
        hs[2],
        k_max,
        tol,
    )
    ct_sys = ContinuousStateSpace(A=A, B=B, C=sys1.C.copy(), D=sys1.D.copy())
    N = 2 * n + 1
    for sys_i, h in zip(systems[1:], hs[1:]):
        predicted = impulse_response(zoh_discretize(ct_sys, h), N)
        measured = impulse_response(sys_i, N)
        scale = max(float(np.max(np.abs(measured))), 1.0)
        if float(np.max(np.abs(predicted - measured))) > 10 * tol.membership_rtol * scale:
            raise MarkovMismatchError(
                f"impulse response at rate h = {h:.6g} is inconsistent with the "
                "reconstruction; the datasets do not come from one continuous system"
            )
    return ct_sys
