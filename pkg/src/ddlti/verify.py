"""Seeded Monte-Carlo suites checking data-driven verdicts against the oracles.

Shared between the `ddlti verify` command and the acceptance tests: each suite
draws deterministic random systems, simulates deterministic excitation data
and counts exact agreements between the data-driven procedures and the
ground-truth structural oracles.
"""

from __future__ import annotations

import math

import numpy as np

from . import ct as ct_mod
from . import lti, reldeg, zerodyn
from .cli import pe_input
from .errors import DdltiError
from .hankel import DataSet, Trajectory
from .linalg import DEFAULT_TOL, Stability, eigenvalues
from .reldeg import RelDegKind

__all__ = [
    "random_siso_with_reldeg",
    "random_minimum_phase_candidate",
    "random_ct_diagonalizable",
    "pe_dataset",
    "suite_reldeg",
    "suite_zerodyn",
    "suite_ct",
    "run_all_suites",
]


def random_siso_with_reldeg(seed: int, n_max: int = 5):
    """Minimal controllable SISO system with a seed-determined relative degree.

    Cycles through r = 0 (feedthrough) up to r = n so the Monte-Carlo suites
    exercise every delay, not just the generic CB != 0 case.
    """
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, n_max + 1))
    r = int(rng.integers(0, min(n, 3) + 1))
    sys = lti.random_system(
        n,
        1,
        1,
        {
            "reldeg": r,
            "controllable": True,
            "observable": True,
            "spectral_radius_max": 1.15,
        },
        seed=seed + 1,
    )
    return sys, r


def random_minimum_phase_candidate(seed: int, stable: bool, n_max: int = 6, d_max: int = 3):
    """Square system built in normal-form coordinates with prescribed
    zero-dynamics stability; spectra stay at least 0.05 from the unit circle."""
    rng = np.random.default_rng(seed)
    p = int(rng.integers(1, 3))
    d = int(rng.integers(0 if stable else 1, d_max + 1))
    budget = n_max - d
    r = tuple(int(rng.integers(1, max(budget // p, 1) + 1)) for _ in range(p))
    while sum(r) + d > n_max:
        r = tuple(max(1, ri - 1) for ri in r)
    n = sum(r) + d
    sys = lti.random_system(
        n,
        p,
        p,
        {
            "reldeg": r,
            "zd_stable": stable,
            "controllable": True,
            "observable": True,
            "spectral_radius_max": 1.15,
        },
        seed=seed + 1,
    )
    return sys, r


def random_ct_diagonalizable(seed: int, n_max: int = 6, im_max: float = 20.0):
    """Continuous system with well-separated diagonalizable spectrum.

    Real parts stay nonpositive so that sampled records remain numerically
    well-scaled over the window lengths the data pipeline needs.
    """
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, n_max + 1))
    for _ in range(128):
        poles = []
        remaining = n
        while remaining > 0:
            if remaining >= 2 and rng.random() < 0.6:
                lam = complex(rng.uniform(-2.0, 0.0), rng.uniform(0.3, im_max))
                poles.extend([lam, lam.conjugate()])
                remaining -= 2
            else:
                poles.append(complex(rng.uniform(-2.0, 0.0), 0.0))
                remaining -= 1
        gaps = [
            abs(a - b) for i, a in enumerate(poles) for b in poles[i + 1 :]
        ]
        if not gaps or min(gaps) >= 1e-2:
            break
    A = lti._matrix_with_spectrum(rng, poles)
    m = int(rng.integers(1, 3))
    p = int(rng.integers(1, 3))
    B = rng.standard_normal((n, m))
    C = rng.standard_normal((p, n))
    D = np.zeros((p, m))
    return lti.ContinuousStateSpace(A=A, B=B, C=C, D=D)


def pe_dataset(
    sys: lti.DiscreteStateSpace,
    pe_order: int,
    seed: int,
    T: int | None = None,
    x0=None,
    sampling_time: float | None = None,
) -> DataSet:
    """Deterministic dataset with input persistently exciting of pe_order."""
    if T is None:
        T = 2 * pe_order * sys.m + 2 * sys.n + 8
    u = pe_input(T, sys.m, pe_order, seed)
    if x0 is None:
        x0 = np.zeros(sys.n)
    y, _ = lti.simulate(sys, x0, u)
    return DataSet(
        m=sys.m, p=sys.p, sequences=[Trajectory(u, y)], sampling_time=sampling_time
    )


# --- suites -------------------------------------------------------------------------


def suite_reldeg(trials: int, seed: int = 0) -> tuple:
    """PE route, sharp route and informativity route versus the Markov oracle."""
    passed = 0
    for trial in range(trials):
        base = seed + 1000 * trial
        sys, _ = random_siso_with_reldeg(base)
        r_true = lti.oracle_relative_degree(sys)
        lg = lti.lag(sys)
        n = sys.n
        L = lg + n + 1
        rng = np.random.default_rng(base + 7)
        ds = pe_dataset(sys, L + n, base + 3, x0=rng.standard_normal(n))
        try:
            ok = reldeg.reldeg_pe(ds, lg, n, L) == r_true
            ok = ok and reldeg.reldeg_sharp(ds, lg, L) == (
                None if r_true == math.inf else r_true
            )
            verdict = reldeg.reldeg_informativity(ds, lg)
            ok = ok and verdict.kind is RelDegKind.INFORMATIVE and verdict.r == r_true
            if ok:
                H = lti.impulse_response(sys, r_true + 1)[r_true, 0, 0]
                ok = abs(verdict.witness - H) <= 1e-8 * max(abs(H), 1.0)
        except DdltiError:
            ok = False
        passed += bool(ok)
    return "reldeg-oracle-equivalence", passed, trials


def suite_zerodyn(trials: int, seed: int = 0) -> tuple:
    """Shift-matrix spectrum and three-valued verdict versus the normal form."""
    passed = 0
    for trial in range(trials):
        base = seed + 2000 * trial + 17
        stable = trial % 2 == 0
        sys, r = random_minimum_phase_candidate(base, stable)
        bif = lti.byrnes_isidori(sys)
        lg = lti.lag(sys)
        n = sys.n
        L = 2 * lg + 1
        ds = pe_dataset(sys, L + n, base + 3, T=4 * (L + n) + 10)
        try:
            q_tilde, _ = zerodyn.qtilde(ds, lg)
            ok = _spectra_match(eigenvalues(q_tilde), eigenvalues(bif.Q), 1e-6)
            verdict = zerodyn.algorithm2(ds, lg, n, sum(r))
            ok = ok and verdict.s == (1 if stable else -1)
        except DdltiError:
            ok = False
        passed += bool(ok)
    return "zerodyn-oracle-equivalence", passed, trials


def suite_ct(trials: int, seed: int = 0) -> tuple:
    """Three-rate reconstruction round trip on diagonalizable systems."""
    rates = (1.0, 2.0 ** -0.5, 3.0 ** -0.5)
    passed = 0
    for trial in range(trials):
        base = seed + 3000 * trial + 29
        ct_sys = random_ct_diagonalizable(base)
        triple = ct_mod.DiscretizationTriple(
            systems=tuple(lti.zoh_discretize(ct_sys, h) for h in rates),
            sampling_times=rates,
        )
        try:
            rec = ct_mod.reconstruct_ct(triple)
            err_a = np.linalg.norm(rec.A - ct_sys.A) / max(np.linalg.norm(ct_sys.A), 1e-12)
            err_b = np.linalg.norm(rec.B - ct_sys.B) / max(np.linalg.norm(ct_sys.B), 1e-12)
            ok = err_a < 1e-6 and err_b < 1e-6
        except DdltiError:
            ok = False
        passed += bool(ok)
    return "ct-reconstruction-roundtrip", passed, trials


def _spectra_match(a: np.ndarray, b: np.ndarray, atol: float) -> bool:
    if a.size != b.size:
        return False
    remaining = list(b)
    for value in a:
        match = next(
            (k for k, other in enumerate(remaining) if abs(other - value) <= atol), None
        )
        if match is None:
            return False
        remaining.pop(match)
    return True


def run_all_suites(trials: int = 25, seed: int = 0) -> list:
    return [
        suite_reldeg(trials, seed),
        suite_zerodyn(trials, seed),
        suite_ct(trials, seed),
    ]
