"""The JIT kernels and the pure-numpy fallback must agree to rounding."""

import numpy as np

from ddlti import _kernels


def _numpy_hankel(w, L):
    N, d = w.shape
    cols = N - L + 1
    s0, s1 = w.strides
    windows = np.lib.stride_tricks.as_strided(
        w, shape=(cols, L, d), strides=(s0, s0, s1)
    ).reshape(cols, L * d)
    return np.ascontiguousarray(windows.T)


def test_hankel_paths_agree():
    rng = np.random.default_rng(0)
    for d in (1, 2, 3):
        for L in (1, 2, 4):
            w = rng.standard_normal((9, d))
            np.testing.assert_array_equal(_kernels.hankel_array(w, L), _numpy_hankel(w, L))


def test_simulate_paths_agree():
    rng = np.random.default_rng(1)
    n, m, p, T = 4, 2, 3, 25
    A = 0.5 * rng.standard_normal((n, n))
    B = rng.standard_normal((n, m))
    C = rng.standard_normal((p, n))
    D = rng.standard_normal((p, m))
    x0 = rng.standard_normal(n)
    u = rng.standard_normal((T, m))
    y_fast, x_fast = _kernels.simulate_arrays(A, B, C, D, x0, u)
    y_ref, x_ref = _kernels._simulate_impl(A, B, C, D, x0, u)
    np.testing.assert_allclose(y_fast, y_ref, rtol=0, atol=1e-13)
    np.testing.assert_allclose(x_fast, x_ref, rtol=0, atol=1e-13)


def test_env_flag_is_respected_at_import(monkeypatch):
    import importlib
    import subprocess
    import sys

    code = (
        "import os; os.environ['DDLTI_DISABLE_NUMBA']='1'; "
        "import ddlti._kernels as k; print(k.USING_NUMBA)"
    )
    out = subprocess.run(
        [sys.executable, "-c", code], capture_output=True, text=True, check=True
    )
    assert out.stdout.strip() == "False"
