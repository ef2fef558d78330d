"""Tests for intervals, robust stage constraints and controllable sets."""

import math

import numpy as np
import pytest
from scipy.optimize import linprog

from robust_topt.dynamics import Link, PointMass
from robust_topt.geometry import build_spline
from robust_topt.reachability import (
    EMPTY,
    REAL_LINE,
    DiscretizationGrid,
    Interval,
    build_stage_constraints,
    compute_controllable_sets,
    cone_interval,
    greatest_control,
    read_plot_data,
    read_sets_csv,
    realized_torque,
    robust_one_step_set,
    robust_u_interval,
    transition,
    transition_window,
    worst_case_perturbation,
    write_plot_data,
    write_sets_csv,
)
from robust_topt.reachability.io import SetPlotData


def brute_force_sets(stage, grid, terminal, x_grid, u_grid, tol):
    """Backward DP over an (x, u) grid; returns (lower, upper) per stage."""
    lower = np.full(grid.stages + 1, np.inf)
    upper = np.full(grid.stages + 1, -np.inf)
    lower[-1], upper[-1] = terminal.lo, terminal.hi
    tau = np.array([stage.coefficients.a[0], stage.coefficients.b[0], stage.coefficients.c[0]])
    X, U = np.meshgrid(x_grid, u_grid, indexing="ij")
    torque = tau[0] * U + tau[1] * X + tau[2]
    admissible = (torque >= stage.tau_min[0] - tol) & (torque <= stage.tau_max[0] + tol)
    for i in range(grid.stages - 1, -1, -1):
        nxt = X + 2.0 * grid.deltas[i] * U
        lands = (nxt >= lower[i + 1] - tol) & (nxt <= upper[i + 1] + tol)
        ok = np.any(admissible & lands, axis=1)
        if not ok.any():
            break
        lower[i], upper[i] = x_grid[ok].min(), x_grid[ok].max()
    return lower, upper


def lp_sets(constraints, grid, terminal, x_max):
    """Nominal controllable sets from a two-variable LP per endpoint."""
    lower = np.full(grid.stages + 1, np.inf)
    upper = np.full(grid.stages + 1, -np.inf)
    lower[-1], upper[-1] = terminal.lo, terminal.hi
    for i in range(grid.stages - 1, -1, -1):
        st = constraints[i]
        a, b, c = st.coefficients.a, st.coefficients.b, st.coefficients.c
        delta = grid.deltas[i]
        # variables (x, u)
        A_ub = [[bj, aj] for aj, bj in zip(a, b, strict=True)]
        A_ub += [[-bj, -aj] for aj, bj in zip(a, b, strict=True)]
        A_ub += [[1.0, 2.0 * delta], [-1.0, -2.0 * delta]]
        b_ub = list(st.tau_max - c) + list(c - st.tau_min) + [upper[i + 1], -lower[i + 1]]
        bounds = [(0.0, x_max), (None, None)]
        lo = linprog([1.0, 0.0], A_ub=A_ub, b_ub=b_ub, bounds=bounds, method="highs")
        hi = linprog([-1.0, 0.0], A_ub=A_ub, b_ub=b_ub, bounds=bounds, method="highs")
        assert lo.status == 0 and hi.status == 0
        lower[i], upper[i] = lo.x[0], hi.x[0]
    return lower, upper


class TestInterval:
    """Test closed intervals."""

    def test_empty(self):
        """lo > hi is empty; EMPTY is absorbing under intersection."""
        assert EMPTY.is_empty
        assert Interval(1.0, 0.0).is_empty
        assert Interval(0.0, 1.0).intersect(EMPTY).is_empty
        assert EMPTY.width == 0.0

    def test_point_is_not_empty(self):
        """A degenerate interval holds its point."""
        point = Interval.point(0.0)
        assert not point.is_empty
        assert point.contains(0.0)
        assert not point.contains(1e-9)
        assert point.contains(1e-9, tol=1e-8)

    def test_intersect_and_subset(self):
        """Intersection and containment of overlapping intervals."""
        a, b = Interval(0.0, 2.0), Interval(1.0, 3.0)
        assert a.intersect(b) == Interval(1.0, 2.0)
        assert Interval(0.5, 1.5).issubset(a)
        assert not b.issubset(a)
        assert EMPTY.issubset(a)

    def test_clamp_and_midpoint(self):
        """Clamping into bounded and half-infinite intervals."""
        assert Interval(-1.0, 1.0).clamp(3.0) == 1.0
        assert Interval(-1.0, math.inf).midpoint == -1.0
        assert REAL_LINE.midpoint == 0.0
        with pytest.raises(ValueError):
            EMPTY.clamp(0.0)
        with pytest.raises(ValueError):
            _ = EMPTY.midpoint


class TestDiscretizationGrid:
    """Test the path grid."""

    def test_uniform(self):
        """N stages of spacing 1/N spanning exactly [0, 1]."""
        grid = DiscretizationGrid.uniform(100)
        assert grid.stages == 100
        assert grid.s_values[0] == 0.0 and grid.s_values[-1] == 1.0
        np.testing.assert_allclose(grid.deltas, 0.01)

    def test_stage_index(self):
        """Stage lookup is floor-like and clipped to [0, N - 1]."""
        grid = DiscretizationGrid.uniform(10)
        assert grid.stage_index(0.0) == 0
        assert grid.stage_index(0.1) == 1
        assert grid.stage_index(0.55) == 5
        assert grid.stage_index(1.0) == 9

    @pytest.mark.parametrize(
        "s_values",
        [[0.0], [0.0, 0.5, 0.5, 1.0], [0.1, 1.0], [0.0, 0.9]],
        ids=["single", "repeated", "not-from-zero", "not-to-one"],
    )
    def test_rejects_bad_grid(self, s_values):
        """Grids must be strictly increasing over [0, 1]."""
        with pytest.raises(ValueError):
            DiscretizationGrid(np.array(s_values))

    def test_needs_two_stages(self):
        """N >= 2."""
        with pytest.raises(ValueError):
            DiscretizationGrid.uniform(1)


class TestTransition:
    """Test the squared-velocity transition."""

    def test_identity(self):
        """u = 0 keeps x."""
        assert transition(0.7, 0.0, 0.01) == 0.7

    def test_direct_evaluation(self):
        """x + 2*delta*u."""
        assert transition(1.0, 2.0, 0.01) == pytest.approx(1.04)

    def test_reversible(self, rng):
        """Applying -u undoes u."""
        for x, u, delta in rng.uniform(0.0, 2.0, size=(20, 3)):
            assert transition(transition(x, u, delta), -u, delta) == pytest.approx(x)

    def test_window(self):
        """Controls landing in the target."""
        window = transition_window(1.0, Interval(0.0, 0.5), 0.25)
        assert window.lo == pytest.approx(-2.0)
        assert window.hi == pytest.approx(-1.0)
        assert transition_window(1.0, EMPTY, 0.25).is_empty


class TestRobustUInterval:
    """Test the analytic reduction of the conic torque constraints."""

    def test_linear_case(self, make_stage):
        """R = 0, a = 1, bounds +-10: [-10, 10] for any x."""
        stage = make_stage(bounds=(-10.0, 10.0))
        for x in (0.0, 1.0, 7.5):
            interval = robust_u_interval(stage, x)
            assert interval.lo == pytest.approx(-10.0)
            assert interval.hi == pytest.approx(10.0)

    def test_unit_radius_upper_bound(self, make_stage):
        """sqrt(u^2 + 1) <= 10 - u gives u <= 4.95."""
        stage = make_stage(1.0, bounds=(-1e9, 10.0))
        interval = robust_u_interval(stage, 0.0)
        assert interval.hi == pytest.approx(4.95, abs=1e-12)

        # the maximizing perturbation lands exactly on the bound at the endpoint
        for u, violated in ((4.95, False), (4.96, True)):
            delta = worst_case_perturbation(u, 0.0, 1.0)
            tau = realized_torque(stage.coefficients, delta, u, 0.0)[0]
            assert bool(tau > 10.0 + 1e-9) == violated
        delta = worst_case_perturbation(4.95, 0.0, 1.0)
        assert realized_torque(stage.coefficients, delta, 4.95, 0.0)[0] == pytest.approx(
            10.0, abs=1e-9
        )

    def test_unit_radius_sampled_ball(self, make_stage, rng):
        """No sampled perturbation breaks the bound at u = 4.95."""
        stage = make_stage(1.0, bounds=(-1e9, 10.0))
        samples = rng.standard_normal((1000, 3))
        samples /= np.linalg.norm(samples, axis=1, keepdims=True)
        samples *= rng.uniform(0.0, 1.0, (1000, 1)) ** (1 / 3)
        for delta in samples:
            assert realized_torque(stage.coefficients, delta, 4.95, 0.0)[0] <= 10.0 + 1e-9

    def test_negative_x_is_empty(self, make_stage):
        """x < 0 is not a state."""
        assert robust_u_interval(make_stage(), -0.1).is_empty

    def test_radius_shrinks_interval(self, make_stage):
        """Larger R gives a subset."""
        for x in (0.0, 0.5, 1.0):
            wide = robust_u_interval(make_stage(0.0), x)
            narrow = robust_u_interval(make_stage(0.3), x)
            assert narrow.issubset(wide)

    @pytest.mark.parametrize(
        "alpha, rho, radius",
        [(0.3, 5.0, 1.0), (1.0, 5.0, 1.0), (2.0, 5.0, 1.0), (-2.0, 5.0, 1.0), (0.0, -1.0, 0.0)],
        ids=["interior-max", "parabolic", "monotone", "monotone-neg", "linear-empty"],
    )
    def test_cone_interval_matches_sampling(self, alpha, rho, radius):
        """Membership agrees with direct evaluation on a dense u grid."""
        k = 2.0
        interval = cone_interval(alpha, rho, radius, k)
        for u in np.linspace(-50.0, 50.0, 2001):
            holds = radius * math.sqrt(u * u + k) <= rho - alpha * u
            if abs(radius * math.sqrt(u * u + k) - (rho - alpha * u)) > 1e-9:
                assert bool(interval.contains(u)) == holds

    def test_two_link_soundness(self, two_link, two_link_path, rng):
        """Accepted (x, u) pairs survive every sampled perturbation; endpoints are tight."""
        grid = DiscretizationGrid.uniform(20)
        radius = 0.5
        stages = build_stage_constraints(two_link, two_link_path, grid, radius).stages
        n = two_link.joint_count
        for stage in stages[::4]:
            for x in (0.0, 0.3, 1.0):
                interval = robust_u_interval(stage, x)
                if interval.is_empty or not np.isfinite(interval.as_tuple()).all():
                    continue
                for u in (interval.lo, interval.midpoint, interval.hi):
                    samples = rng.standard_normal((1000, n, 3))
                    samples *= radius / np.linalg.norm(samples, axis=2, keepdims=True)
                    samples *= rng.uniform(0.0, 1.0, (1000, n, 1))
                    for delta in samples:
                        tau = realized_torque(stage.coefficients, delta, u, x)
                        assert np.all(tau <= stage.tau_max + 1e-9)
                        assert np.all(tau >= stage.tau_min - 1e-9)

                worst = worst_case_perturbation(interval.hi, x, radius)
                upper = realized_torque(stage.coefficients, worst, interval.hi, x)
                lower = realized_torque(stage.coefficients, -worst, interval.hi, x)
                slack = np.maximum(upper - stage.tau_max, stage.tau_min - lower)
                assert np.max(slack) == pytest.approx(0.0, abs=1e-8)

                # just outside the interval some realization violates a bound
                beyond = interval.hi + 1e-6
                worst = worst_case_perturbation(beyond, x, radius)
                upper = realized_torque(stage.coefficients, worst, beyond, x)
                lower = realized_torque(stage.coefficients, -worst, beyond, x)
                assert np.any(upper > stage.tau_max) or np.any(lower < stage.tau_min)


class TestRobustOneStepSet:
    """Test Q_i(target)."""

    def test_rest_target(self, make_stage):
        """target [0, 0], a = 1, bounds +-1, delta = 0.5: Q = [0, 1]."""
        q = robust_one_step_set(make_stage(), Interval(0.0, 0.0), 0.5)
        assert q.lo == 0.0
        assert q.hi == pytest.approx(1.0, abs=1e-7)

    def test_rest_target_brute_force(self, make_stage):
        """Same set from a 1e-3 grid over (x, u)."""
        xs = np.linspace(0.0, 2.0, 2001)
        us = np.linspace(-1.0, 1.0, 2001)
        X, U = np.meshgrid(xs, us, indexing="ij")
        ok = np.any(np.abs(X + U) <= 1e-9, axis=1)
        q = robust_one_step_set(make_stage(), Interval(0.0, 0.0), 0.5)
        assert xs[ok].max() == pytest.approx(q.hi, abs=1e-3)

    def test_empty_target(self, make_stage):
        """Nothing reaches an empty target."""
        assert robust_one_step_set(make_stage(), EMPTY, 0.5).is_empty

    def test_monotone_in_radius(self, make_stage):
        """Q with R = 0.5 lies inside Q with R = 0."""
        target = Interval(0.2, 0.6)
        nominal = robust_one_step_set(make_stage(0.0), target, 0.1)
        robust = robust_one_step_set(make_stage(0.5), target, 0.1)
        assert robust.issubset(nominal, tol=1e-7)
        assert robust.width < nominal.width

    def test_x_max_caps_the_set(self, make_stage):
        """The bisection bracket bounds the upper endpoint."""
        q = robust_one_step_set(make_stage(), Interval(0.0, 10.0), 0.5, x_max=3.0)
        assert q.hi == 3.0


class TestControllableSets:
    """Test the backward recursion."""

    def test_double_integrator_closed_form(self, make_stages, rest_to_rest):
        """K_i = [0, 2(1 - s_i)] for a unit double integrator."""
        grid = DiscretizationGrid.uniform(20)
        sets = compute_controllable_sets(make_stages(grid), grid, rest_to_rest)
        assert sets.feasible
        np.testing.assert_allclose(sets.lower, 0.0, atol=1e-12)
        np.testing.assert_allclose(sets.upper, 2.0 * (1.0 - grid.s_values), atol=1e-6)
        assert sets[grid.stages] == rest_to_rest

    def test_matches_brute_force_dp(self, make_stage, rest_to_rest):
        """Endpoints agree with a DP over a 1e-3 (x, u) grid."""
        grid = DiscretizationGrid.uniform(10)
        stage = make_stage()
        sets = compute_controllable_sets([stage] * grid.stages, grid, rest_to_rest)
        lower, upper = brute_force_sets(
            stage,
            grid,
            rest_to_rest,
            x_grid=np.linspace(0.0, 2.5, 2501),
            u_grid=np.linspace(-1.0, 1.0, 2001),
            tol=1e-9,
        )
        np.testing.assert_allclose(sets.lower, lower, atol=1e-3)
        np.testing.assert_allclose(sets.upper, upper, atol=1e-3)

    def test_matches_linear_program(self, pendulum, swing_path, rest_to_rest):
        """R = 0 sets equal an independent LP recursion on the pendulum."""
        grid = DiscretizationGrid.uniform(50)
        stages = build_stage_constraints(pendulum, swing_path, grid, 0.0).stages
        sets = compute_controllable_sets(stages, grid, rest_to_rest)
        lower, upper = lp_sets(stages, grid, rest_to_rest, x_max=100.0)
        assert sets.feasible
        np.testing.assert_allclose(sets.lower, lower, atol=1e-6)
        np.testing.assert_allclose(sets.upper, upper, atol=1e-6)

    def test_nested_in_radius(self, pendulum, swing_path, rest_to_rest):
        """K_i(0.4) inside K_i(0.2) inside K_i(0)."""
        grid = DiscretizationGrid.uniform(40)
        by_radius = {
            r: compute_controllable_sets(
                build_stage_constraints(pendulum, swing_path, grid, r).stages, grid, rest_to_rest
            )
            for r in (0.0, 0.2, 0.4)
        }
        assert by_radius[0.4].is_nested_in(by_radius[0.2])
        assert by_radius[0.2].is_nested_in(by_radius[0.0])

    def test_every_state_has_a_robust_control(self, pendulum, swing_path, rest_to_rest, rng):
        """For x in K_i some robust control lands in K_{i+1}."""
        grid = DiscretizationGrid.uniform(40)
        stages = build_stage_constraints(pendulum, swing_path, grid, 0.2).stages
        sets = compute_controllable_sets(stages, grid, rest_to_rest)
        for _ in range(1000):
            i = int(rng.integers(0, grid.stages))
            k = sets[i]
            x = float(rng.uniform(k.lo, k.hi))
            assert greatest_control(stages[i], x, sets[i + 1], float(grid.deltas[i])) is not None

    def test_infeasible_propagates(self, rest_to_rest):
        """Gravity beyond the torque bounds with a low velocity ceiling empties the sets."""
        falling = PointMass(
            links=(Link(mass=1.0),),
            tau_min=np.array([-1.0]),
            tau_max=np.array([1.0]),
            gravity=(-9.81, 0.0),
        )
        path = build_spline([(0.0, [0.0]), (1.0, [1.0])])
        grid = DiscretizationGrid.uniform(100)
        stages = build_stage_constraints(falling, path, grid, 0.0).stages
        sets = compute_controllable_sets(stages, grid, rest_to_rest, x_max=1.0)
        assert not sets.feasible
        first = sets.first_empty_stage
        assert first is not None and 0 < first < grid.stages
        assert all(sets[i].is_empty for i in range(first + 1))
        assert not sets[first + 1].is_empty

    def test_empty_terminal(self, make_stages):
        """An empty terminal set is infeasible at stage N."""
        grid = DiscretizationGrid.uniform(5)
        sets = compute_controllable_sets(make_stages(grid), grid, EMPTY)
        assert sets.first_empty_stage == grid.stages

    def test_wrong_stage_count(self, make_stages, rest_to_rest):
        """One constraint per stage interval."""
        grid = DiscretizationGrid.uniform(5)
        with pytest.raises(ValueError):
            compute_controllable_sets(make_stages(grid)[:-1], grid, rest_to_rest)


class TestSetsCsv:
    """Test CSV output of controllable sets."""

    def test_sets_round_trip(self, make_stages, rest_to_rest, tmp_path):
        """write_sets_csv and read_sets_csv preserve every bound."""
        grid = DiscretizationGrid.uniform(8)
        sets = compute_controllable_sets(make_stages(grid), grid, rest_to_rest)
        path = write_sets_csv(sets, tmp_path / "sets.csv")
        assert path.read_text().splitlines()[0] == "stage,s,K_lo,K_hi"
        loaded = read_sets_csv(path)
        np.testing.assert_array_equal(loaded.lower, sets.lower)
        np.testing.assert_array_equal(loaded.upper, sets.upper)
        np.testing.assert_array_equal(loaded.s_values, sets.s_values)
        assert loaded.feasible

    def test_empty_stages_round_trip(self, make_stages, tmp_path):
        """Empty stages are written as inf, -inf and recovered as infeasible."""
        grid = DiscretizationGrid.uniform(4)
        sets = compute_controllable_sets(make_stages(grid), grid, EMPTY)
        loaded = read_sets_csv(write_sets_csv(sets, tmp_path / "sets.csv"))
        assert loaded.first_empty_stage == sets.first_empty_stage
        assert all(loaded[i].is_empty for i in range(len(loaded)))

    def test_plot_data_round_trip(self, tmp_path):
        """Tidy plot tables survive a write/read cycle."""
        data = SetPlotData(
            set_rows=[{"stage": 0, "s": 0.0, "radius": 0.5, "K_lo": 0.0, "K_hi": 1.25}],
            profile_rows=[{"stage": 0, "s": 0.0, "x_nominal": 0.0}],
        )
        write_plot_data(data, tmp_path)
        assert read_plot_data(tmp_path) == data
