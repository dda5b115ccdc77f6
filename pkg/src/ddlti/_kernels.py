"""Hot numeric kernels: state-space recursion and Hankel assembly.

Both kernels are sequential inner loops that the Monte-Carlo suites hit many
thousands of times, so they carry numba ``@njit`` implementations.  A pure
numpy path is kept for environments without a working JIT and is selected by
setting the environment variable ``DDLTI_DISABLE_NUMBA=1`` before import.

The two paths are bit-for-bit interchangeable up to floating point rounding;
``tests/test_kernels.py`` pins them against each other and
``benchmarks/bench_kernels.py`` compares their speed.
"""

from __future__ import annotations

import os

import numpy as np

NUMBA_DISABLED = os.environ.get("DDLTI_DISABLE_NUMBA", "0") not in ("", "0")

if not NUMBA_DISABLED:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover - numba is a declared dependency
        NUMBA_DISABLED = True

USING_NUMBA = not NUMBA_DISABLED


def _simulate_impl(A, B, C, D, x0, u):
    T = u.shape[0]
    n = A.shape[0]
    p = C.shape[0]
    x = np.empty((T + 1, n))
    y = np.empty((T, p))
    x[0] = x0
    for t in range(T):
        y[t] = C @ x[t] + D @ u[t]
        x[t + 1] = A @ x[t] + B @ u[t]
    return y, x


def _hankel_impl(w, L):
    N, d = w.shape
    cols = N - L + 1
    H = np.empty((L * d, cols))
    for a in range(L):
        for j in range(cols):
            for c in range(d):
                H[a * d + c, j] = w[j + a, c]
    return H


if USING_NUMBA:
    simulate_kernel = njit(cache=True)(_simulate_impl)
    hankel_kernel = njit(cache=True)(_hankel_impl)
else:
    simulate_kernel = _simulate_impl

    def hankel_kernel(w, L):
        # stride trick beats the triple loop when no JIT is available
        N, d = w.shape
        cols = N - L + 1
        s0, s1 = w.strides
        windows = np.lib.stride_tricks.as_strided(
            w, shape=(cols, L, d), strides=(s0, s0, s1)
        ).reshape(cols, L * d)
        return np.ascontiguousarray(windows.T)


def simulate_arrays(A, B, C, D, x0, u):
    """Run the state recursion; returns (y, x) with x one step longer than u."""
    A = np.ascontiguousarray(A, dtype=float)
    B = np.ascontiguousarray(B, dtype=float)
    C = np.ascontiguousarray(C, dtype=float)
    D = np.ascontiguousarray(D, dtype=float)
    x0 = np.ascontiguousarray(x0, dtype=float)
    u = np.ascontiguousarray(u, dtype=float)
    return simulate_kernel(A, B, C, D, x0, u)


def hankel_array(w, L):
    """Block Hankel matrix of order L of a (N, d) sample sequence."""
    w = np.ascontiguousarray(w, dtype=float)
    return hankel_kernel(w, L)
