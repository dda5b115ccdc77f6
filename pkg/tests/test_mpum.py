import numpy as np
import pytest

from ddlti.errors import DataTooShortError, NotUniqueError
from ddlti.hankel import DataSet, Trajectory, mosaic_hankel
from ddlti.linalg import in_span, orth_basis
from ddlti.lti import impulse_response, lag, random_system, simulate
from ddlti.mpum import mpum_extended, mpum_generators, unique_continuation
from ddlti.verify import pe_dataset


def _spaces_equal(A, B, atol=1e-9):
    BA, BB = orth_basis(A), orth_basis(B)
    if BA.shape[1] != BB.shape[1]:
        return False
    return (
        np.linalg.norm(BB - BA @ (BA.T @ BB)) < atol
        and np.linalg.norm(BA - BB @ (BB.T @ BA)) < atol
    )


def _pe_system_and_data(seed=0, n=3, T=60):
    sys = random_system(
        n, 1, 1, {"controllable": True, "observable": True, "spectral_radius_max": 1.1},
        seed=seed,
    )
    lg = lag(sys)
    ds = pe_dataset(sys, 2 * lg + 1 + n, seed=seed + 5, T=T)
    return sys, lg, ds


class TestMpumGenerators:
    def test_single_window_single_column(self):
        ds = DataSet(m=1, p=1, sequences=[Trajectory(np.ones((3, 1)), np.zeros((3, 1)))])
        gen = mpum_generators(ds, lag=2)
        assert gen.generators.shape == (6, 1)

    def test_zero_data_spans_nothing(self):
        ds = DataSet(m=1, p=1, sequences=[Trajectory(np.zeros((6, 1)), np.zeros((6, 1)))])
        assert np.all(mpum_generators(ds, 2).generators == 0)

    def test_too_short(self):
        ds = DataSet(m=1, p=1, sequences=[Trajectory(np.ones((2, 1)), np.zeros((2, 1)))])
        with pytest.raises(DataTooShortError):
            mpum_generators(ds, 2)

    def test_pe_data_spans_restricted_behavior(self):
        sys, lg, ds = _pe_system_and_data()
        gen = mpum_generators(ds, lg)
        # simulate a basis of windows: state basis plus input impulses
        rng = np.random.default_rng(1)
        for _ in range(10):
            x0 = rng.standard_normal(sys.n)
            u = rng.standard_normal((lg + 1, 1))
            y, _ = simulate(sys, x0, u)
            window = np.concatenate([u.ravel(), y.ravel()])
            assert in_span(
                window, gen.generators, scale=float(np.linalg.norm(gen.generators, 2))
            )


class TestMpumExtended:
    def test_k_zero_equals_generators(self):
        _, lg, ds = _pe_system_and_data(seed=3)
        a = mpum_generators(ds, lg).generators
        b = mpum_extended(ds, lg, 0).generators
        assert _spaces_equal(a, b)

    def test_pe_extension_matches_direct_hankel(self):
        _, lg, ds = _pe_system_and_data(seed=4)
        ext = mpum_extended(ds, lg, lg).generators
        direct = mosaic_hankel(ds, 2 * lg + 1, "stacked")
        assert _spaces_equal(ext, direct, atol=1e-8)

    def test_zero_data(self):
        ds = DataSet(m=1, p=1, sequences=[Trajectory(np.zeros((9, 1)), np.zeros((9, 1)))])
        assert np.allclose(mpum_extended(ds, 2, 2).generators, 0.0)

    def test_all_windows_remain_mpum_windows(self):
        _, lg, ds = _pe_system_and_data(seed=5)
        base = mpum_generators(ds, lg)
        scale = float(np.linalg.norm(base.generators, 2))
        ext = mpum_extended(ds, lg, 2)
        L = ext.window_length
        cols = orth_basis(ext.generators)
        for col in cols.T:
            u_part, y_part = col[:L], col[L:]
            for start in range(L - lg):
                window = np.concatenate(
                    [u_part[start : start + lg + 1], y_part[start : start + lg + 1]]
                )
                assert in_span(window, base.generators, scale=scale)


class TestUniqueContinuation:
    def test_zero_in_zero_out(self):
        _, lg, ds = _pe_system_and_data(seed=6)
        y_f = unique_continuation(
            ds, lg, 3, np.zeros((lg, 1)), np.zeros((lg, 1)), np.zeros((3, 1))
        )
        np.testing.assert_allclose(y_f, 0.0, atol=1e-9)

    def test_impulse_reproduces_markov_parameters(self):
        sys, lg, ds = _pe_system_and_data(seed=7)
        T_f = 2 * sys.n + 1
        u_f = np.zeros((T_f, 1))
        u_f[0, 0] = 1.0
        y_f = unique_continuation(ds, lg, T_f, np.zeros((lg, 1)), np.zeros((lg, 1)), u_f)
        H = impulse_response(sys, T_f)[:, 0, 0]
        np.testing.assert_allclose(y_f.ravel(), H, atol=1e-7)

    def test_no_past_not_unique(self):
        sys, lg, ds = _pe_system_and_data(seed=8)
        assert sys.n > 0
        with pytest.raises(NotUniqueError):
            unique_continuation(
                ds, 0, 2, np.zeros((0, 1)), np.zeros((0, 1)), np.ones((2, 1))
            )

    def test_superposition(self):
        _, lg, ds = _pe_system_and_data(seed=9)
        rng = np.random.default_rng(2)
        T_f = 4

        def run(u_p, y_p, u_f):
            return unique_continuation(ds, lg, T_f, u_p, y_p, u_f)

        # two consistent pasts: windows taken from the data itself
        seq = ds.sequences[0]
        up1, yp1 = seq.u[:lg], seq.y[:lg]
        up2, yp2 = seq.u[5 : 5 + lg], seq.y[5 : 5 + lg]
        uf1, uf2 = rng.standard_normal((T_f, 1)), rng.standard_normal((T_f, 1))
        combo = run(up1 + up2, yp1 + yp2, uf1 + uf2)
        np.testing.assert_allclose(
            combo, run(up1, yp1, uf1) + run(up2, yp2, uf2), atol=1e-9
        )

    def test_continuation_matches_simulation(self):
        sys, lg, ds = _pe_system_and_data(seed=10)
        rng = np.random.default_rng(3)
        x0 = rng.standard_normal(sys.n)
        u_all = rng.standard_normal((lg + 4, 1))
        y_all, _ = simulate(sys, x0, u_all)
        y_f = unique_continuation(
            ds, lg, 4, u_all[:lg], y_all[:lg], u_all[lg:]
        )
        np.testing.assert_allclose(y_f, y_all[lg:], atol=1e-7)
