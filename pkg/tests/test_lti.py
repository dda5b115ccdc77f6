import math

import numpy as np
import pytest

from ddlti import lti
from ddlti.errors import (
    DimensionMismatchError,
    InfeasibleConstraintsError,
    NotMinimalError,
    NotObservableError,
    NotSisoError,
    NoVectorRelativeDegreeError,
    SingularGError,
)
from ddlti.linalg import Stability, eigenvalues
from ddlti.lti import (
    ContinuousStateSpace,
    DiscreteStateSpace,
    build_from_bif,
    byrnes_isidori,
    impulse_response,
    lag,
    oracle_ct_zero_dynamics,
    oracle_relative_degree,
    oracle_vector_relative_degree,
    oracle_zero_dynamics_stable,
    random_system,
    simulate,
    system_from_json,
    system_to_json,
    transmission_zeros,
    zoh_discretize,
)


def unit_delay():
    return DiscreteStateSpace(A=[[0.0]], B=[[1.0]], C=[[1.0]], D=[[0.0]])


def paper_mimo_example(a):
    """Three-state square system with decoupling matrix [[1, a], [0, 1]]."""
    A = np.array([[0.0, 1.0, a], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
    B = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    C = np.array([[1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
    return DiscreteStateSpace(A=A, B=B, C=C, D=np.zeros((2, 2)))


def ct_zd_pair(h=0.1):
    """The two continuous systems sharing one discretization at step h."""
    w = 2 * math.pi / h
    C = [[-2.0, 0.25]]
    D = [[0.0]]
    s1 = ContinuousStateSpace(A=[[-1.0, -3.0], [3.0, -1.0]], B=[[0.0], [1.0]], C=C, D=D)
    B2 = np.array([[-1.0, -3.0 - w], [3.0 + w, -1.0]]) @ np.linalg.inv(
        np.array([[-1.0, -3.0], [3.0, -1.0]])
    ) @ np.array([[0.0], [1.0]])
    s2 = ContinuousStateSpace(A=[[-1.0, -3.0 - w], [3.0 + w, -1.0]], B=B2, C=C, D=D)
    return s1, s2


class TestSimulate:
    def test_zero_everything(self):
        y, x = simulate(unit_delay(), [0.0], np.zeros((5, 1)))
        assert np.all(y == 0) and np.all(x == 0)

    def test_unit_delay_impulse(self):
        y, _ = simulate(unit_delay(), [0.0], [[1.0], [0.0], [0.0]])
        np.testing.assert_allclose(y.ravel(), [0.0, 1.0, 0.0])

    def test_hand_recursion(self):
        y, _ = simulate(unit_delay(), [0.0], [[1.0], [2.0], [3.0]])
        np.testing.assert_allclose(y.ravel(), [0.0, 1.0, 2.0])

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            simulate(unit_delay(), [0.0, 0.0], [[1.0]])

    def test_linearity(self):
        rng = np.random.default_rng(0)
        sys = random_system(3, 2, 2, {"spectral_radius_max": 1.0}, seed=1)
        x0 = rng.standard_normal(3)
        u1 = rng.standard_normal((20, 2))
        u2 = rng.standard_normal((20, 2))
        y_sum, _ = simulate(sys, x0, u1 + u2)
        y1, _ = simulate(sys, x0, u1)
        y2, _ = simulate(sys, np.zeros(3), u2)
        np.testing.assert_allclose(y_sum, y1 + y2, atol=1e-10)


class TestImpulseResponse:
    def test_zero_system(self):
        sys = DiscreteStateSpace(A=np.eye(2), B=np.zeros((2, 1)), C=[[1.0, 0.0]], D=[[0.0]])
        assert np.all(impulse_response(sys, 5) == 0)

    def test_unit_delay(self):
        np.testing.assert_allclose(
            impulse_response(unit_delay(), 3).ravel(), [0.0, 1.0, 0.0]
        )

    def test_nilpotent_chain(self):
        sys = DiscreteStateSpace(
            A=[[0.0, 1.0], [0.0, 0.0]], B=[[0.0], [1.0]], C=[[1.0, 0.0]], D=[[0.0]]
        )
        np.testing.assert_allclose(
            impulse_response(sys, 4).ravel(), [0.0, 0.0, 1.0, 0.0]
        )


class TestLag:
    def test_static_system(self):
        sys = DiscreteStateSpace(A=np.zeros((0, 0)), B=np.zeros((0, 1)), C=np.zeros((1, 0)), D=[[1.0]])
        assert lag(sys) == 0

    def test_unit_delay(self):
        assert lag(unit_delay()) == 1

    def test_paper_example_lag_two(self):
        assert lag(paper_mimo_example(0.7)) == 2

    def test_unobservable_raises(self):
        sys = DiscreteStateSpace(
            A=[[0.5, 0.0], [0.0, 0.4]], B=[[1.0], [1.0]], C=[[1.0, 0.0]], D=[[0.0]]
        )
        with pytest.raises(NotObservableError):
            lag(sys)


class TestRelativeDegreeOracle:
    def test_feedthrough(self):
        sys = DiscreteStateSpace(A=[[0.0]], B=[[1.0]], C=[[1.0]], D=[[5.0]])
        assert oracle_relative_degree(sys) == 0

    def test_unit_delay(self):
        assert oracle_relative_degree(unit_delay()) == 1

    def test_zero_response_is_infinite(self):
        sys = DiscreteStateSpace(
            A=[[0.5, 0.0], [0.0, 0.4]], B=[[1.0], [0.0]], C=[[0.0, 1.0]], D=[[0.0]]
        )
        assert oracle_relative_degree(sys) == math.inf

    def test_not_siso(self):
        with pytest.raises(NotSisoError):
            oracle_relative_degree(paper_mimo_example(0.0))


class TestVectorRelativeDegreeOracle:
    def test_decoupled_delays(self):
        sys = build_from_bif((1, 1), np.zeros((0, 0)), None, None, np.eye(2))
        r, G = oracle_vector_relative_degree(sys)
        assert r == (1, 1)
        np.testing.assert_allclose(G, np.eye(2))

    def test_paper_example(self):
        a = 0.37
        r, G = oracle_vector_relative_degree(paper_mimo_example(a))
        assert r == (2, 1)
        np.testing.assert_allclose(G, [[1.0, a], [0.0, 1.0]], atol=1e-12)

    def test_paper_example_a_zero_has_no_vrd(self):
        # G = [[1, 0], [0, 1]] still invertible; r12 becomes infinite but the
        # vector relative degree (2, 1) survives
        r, G = oracle_vector_relative_degree(paper_mimo_example(0.0))
        assert r == (2, 1)
        np.testing.assert_allclose(G, np.eye(2), atol=1e-12)

    def test_rank_bound(self):
        sys = DiscreteStateSpace(
            A=[[0.0]], B=[[1.0]], C=[[1.0], [2.0]], D=np.zeros((2, 1))
        )
        assert oracle_vector_relative_degree(sys) is None


class TestByrnesIsidori:
    def test_round_trip_spectrum(self):
        rng = np.random.default_rng(7)
        Q0 = np.array([[0.3, 0.2], [0.0, -0.6]])
        sys = build_from_bif(
            (1, 2), Q0, rng.standard_normal((2, 2)), rng.standard_normal((2, 5)), np.eye(2)
        )
        bif = byrnes_isidori(sys)
        np.testing.assert_allclose(
            np.sort_complex(eigenvalues(bif.Q)), np.sort_complex(eigenvalues(Q0)), atol=1e-8
        )

    def test_trivial_zero_dynamics(self):
        sys = build_from_bif((1, 1), np.zeros((0, 0)), None, [[0.1, 0.0], [0.0, 0.1]], np.eye(2))
        assert byrnes_isidori(sys).Q.shape == (0, 0)

    def test_zero_dynamics_pole_matches_rosenbrock(self):
        sys = build_from_bif((1,), [[0.5]], [[1.0]], [[0.2, 0.4]], [[1.0]])
        bif = byrnes_isidori(sys)
        np.testing.assert_allclose(eigenvalues(bif.Q), [0.5], atol=1e-10)
        np.testing.assert_allclose(transmission_zeros(sys), [0.5], atol=1e-8)

    def test_display_structure(self):
        rng = np.random.default_rng(3)
        sys = build_from_bif(
            (2, 1),
            [[0.4]],
            rng.standard_normal((1, 2)),
            rng.standard_normal((2, 4)),
            [[1.0, 0.3], [0.0, 1.0]],
        )
        bif = byrnes_isidori(sys)
        T = bif.T
        At = T @ sys.A @ np.linalg.inv(T)
        Bt = T @ sys.B
        # chain shift row, zero B rows off the chain ends, output-driven eta
        np.testing.assert_allclose(At[0], [0.0, 1.0, 0.0, 0.0], atol=1e-9)
        np.testing.assert_allclose(Bt[0], 0.0, atol=1e-9)
        np.testing.assert_allclose(Bt[3], 0.0, atol=1e-9)
        np.testing.assert_allclose(At[3, 1], 0.0, atol=1e-9)  # eta sees y only
        np.testing.assert_allclose(Bt[[1, 2]], bif.G, atol=1e-9)

    def test_no_vector_relative_degree(self):
        sys = DiscreteStateSpace(
            A=[[0.0, 1.0], [0.0, 0.0]],
            B=[[1.0, 0.0], [0.0, 1.0]],
            C=[[1.0, 0.0], [2.0, 0.0]],
            D=np.zeros((2, 2)),
        )
        with pytest.raises(NoVectorRelativeDegreeError):
            byrnes_isidori(sys)


class TestBuildFromBif:
    def test_stable_construction(self):
        sys = build_from_bif((1,), [[0.5]], [[1.0]], [[0.2, 0.4]], [[1.0]])
        assert sys.n == 2
        assert oracle_zero_dynamics_stable(sys) is Stability.STABLE

    def test_unstable_construction(self):
        sys = build_from_bif((1,), [[2.0]], [[1.0]], [[0.2, 0.4]], [[1.0]])
        assert oracle_zero_dynamics_stable(sys) is Stability.UNSTABLE

    def test_mimo_shape(self):
        sys = build_from_bif((2, 1), [[0.5]], [[0.1, 0.2]], None, np.eye(2))
        assert (sys.n, sys.m, sys.p) == (4, 2, 2)

    def test_singular_G_rejected(self):
        with pytest.raises(SingularGError):
            build_from_bif((1, 1), np.zeros((0, 0)), None, None, [[1.0, 0.0], [1.0, 0.0]])

    def test_supplied_structure_recovered(self):
        rng = np.random.default_rng(12)
        for _ in range(10):
            p = int(rng.integers(1, 3))
            r = tuple(int(rng.integers(1, 3)) for _ in range(p))
            d = int(rng.integers(0, 3))
            Q = 0.5 * rng.standard_normal((d, d))
            G = rng.standard_normal((p, p)) + 2 * np.eye(p)
            sys = build_from_bif(
                r, Q, rng.standard_normal((d, p)), 0.3 * rng.standard_normal((p, sum(r) + d)), G
            )
            vrd = oracle_vector_relative_degree(sys)
            assert vrd is not None and vrd[0] == r
            np.testing.assert_allclose(vrd[1], G, atol=1e-9)
            try:
                bif = byrnes_isidori(sys)
            except (NotObservableError, NotMinimalError):
                continue  # random draw happened to be non-minimal
            np.testing.assert_allclose(
                np.sort_complex(eigenvalues(bif.Q)),
                np.sort_complex(eigenvalues(Q)),
                atol=1e-8,
            )


class TestZeroDynamicsOracle:
    def test_static_full_rank(self):
        sys = DiscreteStateSpace(
            A=np.zeros((0, 0)), B=np.zeros((0, 2)), C=np.zeros((2, 0)), D=np.eye(2)
        )
        assert oracle_zero_dynamics_stable(sys) is Stability.STABLE

    def test_static_singular(self):
        sys = DiscreteStateSpace(
            A=np.zeros((0, 0)), B=np.zeros((0, 2)), C=np.zeros((2, 0)), D=[[1.0, 0.0], [2.0, 0.0]]
        )
        assert oracle_zero_dynamics_stable(sys) is Stability.UNSTABLE


class TestCtZeroDynamics:
    def test_paper_stable_representation(self):
        s1, _ = ct_zd_pair()
        zd = oracle_ct_zero_dynamics(s1)
        assert zd.verdict is Stability.STABLE
        np.testing.assert_allclose(zd.q, [[-25.0]], atol=1e-9)
        np.testing.assert_allclose(zd.input_gain, [[-195.0]], atol=1e-9)

    def test_paper_unstable_representation(self):
        _, s2 = ct_zd_pair()
        zd = oracle_ct_zero_dynamics(s2)
        assert zd.verdict is Stability.UNSTABLE
        assert abs(zd.q[0, 0] - 356.3) / 356.3 < 1e-3
        assert abs(zd.input_gain[0, 0] - 140.685) / 140.685 < 1e-3

    def test_marginal_pole_is_boundary(self):
        # xi' = u, eta' = P y: the zero dynamics flow matrix is exactly 0
        sys = ContinuousStateSpace(
            A=[[0.0, 0.0], [1.0, 0.0]], B=[[1.0], [0.0]], C=[[1.0, 0.0]], D=[[0.0]]
        )
        assert oracle_ct_zero_dynamics(sys).verdict is Stability.BOUNDARY


class TestZohDiscretize:
    def test_integrator(self):
        sys = ContinuousStateSpace(
            A=np.zeros((2, 2)), B=[[1.0], [2.0]], C=[[1.0, 0.0]], D=[[0.0]]
        )
        d = zoh_discretize(sys, 0.5)
        np.testing.assert_allclose(d.A, np.eye(2), atol=1e-12)
        np.testing.assert_allclose(d.B, 0.5 * sys.B, atol=1e-12)

    def test_rotation(self):
        h = 0.3
        sys = ContinuousStateSpace(
            A=[[0.0, -1.0], [1.0, 0.0]], B=[[1.0], [0.0]], C=[[1.0, 0.0]], D=[[0.0]]
        )
        d = zoh_discretize(sys, h)
        expected = [[math.cos(h), -math.sin(h)], [math.sin(h), math.cos(h)]]
        np.testing.assert_allclose(d.A, expected, atol=1e-12)

    def test_aliasing_pair_identical(self):
        h = 0.25
        w = 2 * math.pi / h
        B1 = np.array([[0.7], [-0.2]])
        C = [[1.0, 2.0]]
        s1 = ContinuousStateSpace(A=[[0.0, -1.0], [1.0, 0.0]], B=B1, C=C, D=[[0.0]])
        s2 = ContinuousStateSpace(
            A=[[0.0, -1.0 - w], [1.0 + w, 0.0]], B=(1.0 + w) * B1, C=C, D=[[0.0]]
        )
        d1, d2 = zoh_discretize(s1, h), zoh_discretize(s2, h)
        assert np.linalg.norm(d1.A - d2.A) < 1e-10
        assert np.linalg.norm(d1.B - d2.B) < 1e-10

    def test_feedthrough_copied_exactly(self):
        sys = ContinuousStateSpace(A=[[-1.0]], B=[[1.0]], C=[[1.0]], D=[[0.125]])
        assert zoh_discretize(sys, 0.7).D[0, 0] == 0.125

    def test_eigenvalue_map(self):
        rng = np.random.default_rng(10)
        for _ in range(10):
            n = int(rng.integers(1, 7))
            A = rng.standard_normal((n, n))
            sys = ContinuousStateSpace(A=A, B=np.zeros((n, 1)), C=np.zeros((1, n)), D=[[0.0]])
            h = float(rng.uniform(0.1, 0.8))
            lam = np.linalg.eigvals(A)
            mu = np.linalg.eigvals(zoh_discretize(sys, h).A)
            np.testing.assert_allclose(
                np.sort_complex(mu), np.sort_complex(np.exp(h * lam)), atol=1e-8
            )


class TestRandomSystem:
    def test_deterministic(self):
        a = random_system(3, 1, 1, {"controllable": True, "observable": True}, seed=1)
        b = random_system(3, 1, 1, {"controllable": True, "observable": True}, seed=1)
        np.testing.assert_array_equal(a.A, b.A)
        np.testing.assert_array_equal(a.B, b.B)

    def test_prescribed_reldeg_and_pole(self):
        sys = random_system(2, 1, 1, {"reldeg": 1, "zd_poles": [0.5]}, seed=7)
        assert oracle_relative_degree(sys) == 1
        np.testing.assert_allclose(transmission_zeros(sys), [0.5], atol=1e-8)

    def test_minimality_constraints(self):
        sys = random_system(3, 1, 1, {"controllable": True, "observable": True}, seed=1)
        assert lag(sys) <= 3  # lag() itself checks minimality

    def test_infeasible(self):
        with pytest.raises(InfeasibleConstraintsError):
            random_system(1, 1, 1, {"reldeg": 5}, seed=0)


def test_rleql_bound_monte_carlo():
    # finite relative degree never exceeds the lag over many random draws
    checked = 0
    for seed in range(500):
        try:
            sys = random_system(
                int(np.random.default_rng(seed).integers(1, 5)),
                1,
                1,
                {"controllable": True, "observable": True, "spectral_radius_max": 1.3},
                seed=seed,
            )
            r = oracle_relative_degree(sys)
            lg = lag(sys)
        except InfeasibleConstraintsError:
            continue
        checked += 1
        assert r == math.inf or r <= lg
    assert checked >= 450


class TestSystemJson:
    def test_round_trip(self):
        sys = random_system(3, 2, 1, None, seed=4)
        data = system_to_json(sys)
        back = system_from_json(data)
        assert isinstance(back, DiscreteStateSpace)
        np.testing.assert_array_equal(back.A, sys.A)
        np.testing.assert_array_equal(back.B, sys.B)

    def test_continuous_flag(self):
        sys = ContinuousStateSpace(A=[[-1.0]], B=[[1.0]], C=[[1.0]], D=[[0.0]])
        back = system_from_json(system_to_json(sys))
        assert isinstance(back, ContinuousStateSpace)

    def test_static_system_dimensions_survive(self):
        sys = DiscreteStateSpace(
            A=np.zeros((0, 0)), B=np.zeros((0, 3)), C=np.zeros((2, 0)), D=np.zeros((2, 3))
        )
        back = system_from_json(system_to_json(sys))
        assert (back.n, back.m, back.p) == (0, 3, 2)
