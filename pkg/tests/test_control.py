"""Tests for computed-torque tracking and the path control laws."""

import numpy as np
import pytest

from robust_topt.control import (
    ControllerState,
    OnlinePathController,
    OSController,
    TOPTController,
    TrackingGains,
    TTController,
    build_controller,
    computed_torque,
    computed_torque_unclamped,
    os_path_control,
    reference_point,
    topt_path_control,
    tracking_error,
    tt_reference,
)
from robust_topt.dynamics import CoefficientTriple, inverse_dynamics
from robust_topt.models import ControlMode
from robust_topt.reachability import (
    DiscretizationGrid,
    Interval,
    build_stage_constraints,
    compute_controllable_sets,
    solve_nominal_parameterization,
)
from robust_topt.sim import CoupledState

STAGES = 10


def _live(a=1.0, b=0.0, c=0.0) -> CoefficientTriple:
    return CoefficientTriple(a=np.array([a]), b=np.array([b]), c=np.array([c]))


@pytest.fixture
def grid():
    return DiscretizationGrid.uniform(STAGES)


@pytest.fixture
def double_integrator(point_mass, straight_path, grid, rest_to_rest):
    """Stage constraints, sets and nominal profile of p(s) = s with |u| <= 1."""
    stages = build_stage_constraints(point_mass, straight_path, grid, 0.0).stages
    sets = compute_controllable_sets(stages, grid, rest_to_rest)
    profile = solve_nominal_parameterization(stages, grid, rest_to_rest, 0.0, sets=sets)
    return stages, sets, profile


@pytest.fixture
def gains():
    return TrackingGains.from_omega(20.0, 1)


@pytest.fixture
def topt_state(grid, gains, double_integrator):
    _, sets, _ = double_integrator
    return ControllerState(
        mode=ControlMode.TOPT,
        grid=grid,
        gains=gains,
        tau_min=np.array([-1.0]),
        tau_max=np.array([1.0]),
        sets=sets,
    )


@pytest.fixture
def os_state(grid, gains, double_integrator):
    _, _, profile = double_integrator
    return ControllerState(
        mode=ControlMode.OS,
        grid=grid,
        gains=gains,
        tau_min=np.array([-1.0]),
        tau_max=np.array([1.0]),
        profile=profile,
        os_gain=1.0,
    )


class TestTrackingGains:
    """Test PD gain validation."""

    def test_from_omega(self):
        """Critical damping: Kp = w^2 I, Kd = 2w I."""
        gains = TrackingGains.from_omega(20.0, 2)
        np.testing.assert_array_equal(gains.kp, 400.0 * np.eye(2))
        np.testing.assert_array_equal(gains.kd, 40.0 * np.eye(2))
        assert gains.joint_count == 2

    @pytest.mark.parametrize(
        "kp, kd",
        [
            (np.eye(2), np.eye(3)),
            (np.array([[1.0, 0.1], [0.1, 1.0]]), np.eye(2)),
            (np.eye(2), -np.eye(2)),
        ],
        ids=["shape-mismatch", "off-diagonal", "negative"],
    )
    def test_rejects_bad_gains(self, kp, kd):
        """Gains must be positive diagonal and equal-sized."""
        with pytest.raises(ValueError):
            TrackingGains(kp=kp, kd=kd)

    def test_rejects_non_positive_omega(self):
        """w > 0."""
        with pytest.raises(ValueError):
            TrackingGains.from_omega(0.0, 1)


class TestComputedTorque:
    """Test the computed-torque law."""

    def test_zero_error_is_inverse_dynamics(self, two_link, rng):
        """Without error the law feeds forward M qdd + C + h."""
        gains = TrackingGains.from_omega(20.0, 2)
        zero = np.zeros(2)
        for _ in range(50):
            q, qd, qdd = rng.uniform(-1.0, 1.0, size=(3, 2))
            np.testing.assert_allclose(
                computed_torque_unclamped(two_link, q, qd, qdd, zero, zero, gains),
                inverse_dynamics(two_link, q, qd, qdd),
                atol=1e-9,
            )

    def test_feedback_terms(self, point_mass):
        """Unit mass: tau = qdd_d + Kp e + Kd ed."""
        gains = TrackingGains.from_omega(2.0, 1)
        tau = computed_torque_unclamped(point_mass, [0.0], [0.0], [0.1], [0.05], [0.02], gains)
        assert tau[0] == pytest.approx(0.1 + 4.0 * 0.05 + 4.0 * 0.02)

    def test_clamped_to_bounds(self, two_link):
        """Large demands saturate at the torque limits."""
        gains = TrackingGains.from_omega(20.0, 2)
        state = CoupledState(q=[0.0, 0.0], qd=[0.0, 0.0])
        tau = computed_torque(two_link, state, [1e4, -1e5], [0.0, 0.0], [0.0, 0.0], gains)
        np.testing.assert_array_equal(tau, [-300.0, -100.0])

    def test_tracking_error_at_rest(self, straight_path):
        """A displaced start gives e = error and ed = 0."""
        state = CoupledState.at_rest([0.0], error=[0.1])
        e, ed = tracking_error(straight_path, state)
        np.testing.assert_allclose(e, [0.1])
        np.testing.assert_allclose(ed, [0.0])


class TestControllerState:
    """Test per-run controller state."""

    def test_topt_needs_sets(self, grid, gains):
        """TOPT without controllable sets is rejected."""
        with pytest.raises(ValueError):
            ControllerState(ControlMode.TOPT, grid, gains, np.array([-1.0]), np.array([1.0]))

    def test_topt_needs_feasible_sets(self, make_stages, grid, gains, rest_to_rest):
        """Empty sets cannot drive the greedy law."""
        sets = compute_controllable_sets(make_stages(grid, c=9.81), grid, rest_to_rest, x_max=1.0)
        with pytest.raises(ValueError):
            ControllerState(
                ControlMode.TOPT, grid, gains, np.array([-1.0]), np.array([1.0]), sets=sets
            )

    def test_sets_must_match_grid(self, gains, double_integrator):
        """Sets of another grid are rejected."""
        _, sets, _ = double_integrator
        with pytest.raises(ValueError):
            ControllerState(
                ControlMode.TOPT,
                DiscretizationGrid.uniform(STAGES + 1),
                gains,
                np.array([-1.0]),
                np.array([1.0]),
                sets=sets,
            )

    @pytest.mark.parametrize("mode", [ControlMode.OS, ControlMode.TT])
    def test_reference_modes_need_profile(self, grid, gains, mode):
        """OS and TT follow a nominal profile."""
        with pytest.raises(ValueError):
            ControllerState(mode, grid, gains, np.array([-1.0]), np.array([1.0]))

    def test_locate_and_remaining(self, topt_state):
        """The remaining distance runs to the next grid point."""
        assert topt_state.locate(0.95) == STAGES - 1
        assert topt_state.remaining == pytest.approx(0.05)
        assert topt_state.locate(0.25) == 2
        assert topt_state.remaining == pytest.approx(0.05)
        topt_state.locate(1.0)
        assert topt_state.remaining == pytest.approx(1e-7)

    def test_locate_snaps_onto_grid_point(self, topt_state):
        """A position a rounding error below s_i belongs to stage i."""
        assert topt_state.locate(0.3 - 1e-14) == 3
        assert topt_state.next_grid_point == pytest.approx(0.4)
        topt_state.locate(0.95)
        assert topt_state.next_grid_point is None

    def test_reset(self, topt_state):
        """Reset returns to the first stage with cleared counters."""
        topt_state.locate(0.5)
        topt_state.excursions = 3
        topt_state.reset()
        assert topt_state.stage == 0
        assert topt_state.s == 0.0
        assert topt_state.excursions == 0


class TestToptPathControl:
    """Test the greedy online control law."""

    def test_greatest_control_from_rest(self, topt_state):
        """At rest on stage 0 full acceleration lands in K_1."""
        topt_state.locate(0.0)
        decision = topt_path_control(topt_state, 0.0, _live())
        assert decision.u == pytest.approx(1.0)
        assert not decision.infeasible
        assert not decision.excursion

    def test_is_greatest_feasible(self, topt_state, rng):
        """No larger live control lands in the next set."""
        for _ in range(50):
            s = float(rng.uniform(0.0, 0.999))
            stage = topt_state.locate(s)
            k_next = topt_state.sets.stage(stage + 1)
            x = float(rng.uniform(0.0, 0.8 * k_next.hi + 1e-3))
            decision = topt_path_control(topt_state, x, _live())
            if decision.excursion:
                continue
            delta = topt_state.remaining
            assert k_next.contains(x + 2 * delta * decision.u, tol=1e-9)
            bigger = decision.u + 1e-6
            assert bigger > 1.0 or not k_next.contains(x + 2 * delta * bigger)

    def test_final_stage_brakes_to_rest(self, topt_state):
        """On the last stage with X_f = {0} the control is -x / (2 delta)."""
        topt_state.locate(1.0 - 1.0 / STAGES)
        decision = topt_path_control(topt_state, 0.1, _live())
        assert decision.u == pytest.approx(-0.1 / (2.0 / STAGES))

    def test_too_fast_takes_lowest_live_control(self, topt_state):
        """Outside the tube and too fast: brake as hard as allowed."""
        topt_state.locate(1.0 - 1.0 / STAGES)
        decision = topt_path_control(topt_state, 0.5, _live())
        assert decision.excursion
        assert decision.u == pytest.approx(-1.0)

    def test_too_slow_takes_highest_live_control(self, topt_state):
        """A live interval below the window returns its upper end."""
        topt_state.locate(0.0)
        decision = topt_path_control(topt_state, 0.0, _live(c=5.0))
        assert decision.excursion
        assert decision.u == pytest.approx(-4.0)

    def test_drift_inside_planned_stage_follows_window(self, topt_state):
        """Once a stage is planned, a live miss inside the K hull steers to the window edge."""
        topt_state.locate(0.0)
        assert not topt_path_control(topt_state, 0.0, _live()).excursion
        topt_state.locate(0.05)
        decision = topt_path_control(topt_state, 0.1, _live(c=5.0))
        assert not decision.excursion
        assert decision.u == pytest.approx(-1.0)
        landing = 0.1 + 2 * topt_state.remaining * decision.u
        assert topt_state.sets.stage(1).contains(landing, tol=1e-9)

    def test_unplanned_stage_miss_is_excursion(self, topt_state):
        """Without a feasible decision earlier in the stage the same miss is an excursion."""
        topt_state.locate(0.05)
        decision = topt_path_control(topt_state, 0.1, _live(c=5.0))
        assert decision.excursion
        assert decision.u == pytest.approx(-4.0)

    def test_empty_live_interval(self, topt_state):
        """No admissible u: flag and hold the window control nearest zero."""
        topt_state.locate(1.0 - 1.0 / STAGES)
        decision = topt_path_control(topt_state, 0.5, _live(a=0.0, c=5.0))
        assert decision.infeasible
        assert decision.live.is_empty
        assert decision.u == pytest.approx(-2.5)

    def test_invariant_to_constraint_scaling(self, topt_state, grid, gains):
        """Scaling coefficients and bounds together leaves u unchanged."""
        scaled = ControllerState(
            mode=ControlMode.TOPT,
            grid=grid,
            gains=gains,
            tau_min=np.array([-3.0]),
            tau_max=np.array([3.0]),
            sets=topt_state.sets,
        )
        for s, x in ((0.05, 0.1), (0.42, 0.6), (0.93, 0.08)):
            topt_state.locate(s)
            scaled.locate(s)
            expected = topt_path_control(topt_state, x, _live(b=0.1, c=0.2)).u
            got = topt_path_control(scaled, x, _live(a=3.0, b=0.3, c=0.6)).u
            assert got == pytest.approx(expected, abs=1e-12)


class TestOsPathControl:
    """Test online scaling of the nominal profile."""

    def test_reference_point(self, double_integrator):
        """x_ref extrapolates x_i with u_i inside the stage."""
        _, _, profile = double_integrator
        x_ref, u_ref = reference_point(profile, 0.05)
        assert x_ref == pytest.approx(0.1)
        assert u_ref == pytest.approx(1.0)

    def test_on_reference(self, os_state):
        """At x = x_ref the reference control is applied."""
        os_state.locate(0.05)
        decision = os_path_control(os_state, 0.1, _live(), os_state.profile)
        assert decision.u == pytest.approx(1.0)
        assert not decision.infeasible

    def test_pulls_towards_reference(self, os_state):
        """Faster than the reference: the correction lands on the next profile point."""
        os_state.locate(0.05)
        decision = os_path_control(os_state, 0.12, _live(), os_state.profile)
        assert decision.u == pytest.approx(0.8)
        x_next = 0.12 + 2.0 * os_state.remaining * decision.u
        assert x_next == pytest.approx(os_state.profile.xs[1])

    def test_clamped_to_live_interval(self, os_state):
        """The correction never leaves the live interval."""
        os_state.locate(0.05)
        decision = os_path_control(os_state, 0.1, _live(c=0.5), os_state.profile)
        assert decision.u == pytest.approx(0.5)

    def test_empty_live_uses_reference(self, os_state):
        """No admissible u: flag and apply u_ref."""
        os_state.locate(0.05)
        decision = os_path_control(os_state, 0.1, _live(a=0.0, c=5.0), os_state.profile)
        assert decision.infeasible
        assert decision.u == pytest.approx(1.0)

    def test_stalled_reference(self, make_stages, grid, gains, rest_to_rest):
        """An all-zero profile commands u = 0 at rest."""
        stages = make_stages(grid, c=9.81, bounds=(-20.0, 9.81))
        profile = solve_nominal_parameterization(stages, grid, rest_to_rest, 0.0)
        state = ControllerState(
            ControlMode.OS, grid, gains, np.array([-1.0]), np.array([1.0]), profile=profile
        )
        state.locate(0.3)
        assert os_path_control(state, 0.0, _live(), profile).u == 0.0


class TestTimedReference:
    """Test the fixed time-indexed reference."""

    @pytest.fixture
    def reference(self, double_integrator, straight_path):
        _, _, profile = double_integrator
        return tt_reference(profile, straight_path)

    def test_duration(self, reference, double_integrator):
        """The reference lasts exactly the profile duration."""
        assert reference.duration == double_integrator[2].duration

    def test_start(self, reference, double_integrator):
        """t = 0 gives (p(0), 0, p'(0) u_0)."""
        _, _, profile = double_integrator
        desired = reference(0.0)
        np.testing.assert_allclose(desired.q, [0.0], atol=1e-12)
        np.testing.assert_allclose(desired.qd, [0.0])
        np.testing.assert_allclose(desired.qdd, [profile.us[0]])

    def test_rests_after_duration(self, reference):
        """After T the reference holds p(1)."""
        sample = reference.sample(reference.duration + 1.0)
        assert sample.s == 1.0
        assert sample.u == 0.0
        np.testing.assert_allclose(sample.desired.q, [1.0])

    @pytest.mark.parametrize("fraction", [0.13, 0.4, 0.77])
    def test_velocity_matches_position(self, reference, fraction):
        """qd_d is the time derivative of q_d."""
        t = fraction * reference.duration
        h = 1e-6
        fd = (reference(t + h).q - reference(t - h).q) / (2 * h)
        np.testing.assert_allclose(reference(t).qd, fd, atol=1e-5)

    def test_monotone_path_position(self, reference):
        """s(t) never moves backwards."""
        s = [reference.sample(t).s for t in np.linspace(0.0, reference.duration, 200)]
        assert np.all(np.diff(s) >= -1e-12)


class TestControllers:
    """Test controller construction and commands."""

    @pytest.mark.parametrize(
        "mode, cls",
        [
            (ControlMode.TOPT, TOPTController),
            (ControlMode.OS, OSController),
            (ControlMode.TT, TTController),
        ],
    )
    def test_build_controller(
        self, point_mass, straight_path, grid, gains, double_integrator, mode, cls
    ):
        """Each mode builds its controller class."""
        _, sets, profile = double_integrator
        controller = build_controller(
            mode, point_mass, straight_path, grid, gains, sets=sets, profile=profile
        )
        assert isinstance(controller, cls)
        assert controller.mode is mode
        if mode is ControlMode.TT:
            assert controller.reference_duration == profile.duration
        else:
            assert controller.reference_duration is None

    def test_joint_count_mismatch(
        self, point_mass, two_link_path, grid, gains, double_integrator
    ):
        """Model and path must agree on the joint count."""
        _, sets, _ = double_integrator
        with pytest.raises(ValueError):
            build_controller(ControlMode.TOPT, point_mass, two_link_path, grid, gains, sets=sets)

    def test_topt_command_at_rest(
        self, point_mass, straight_path, grid, gains, double_integrator
    ):
        """Zero error at rest: full acceleration and the matching torque."""
        _, sets, _ = double_integrator
        controller = build_controller(
            ControlMode.TOPT, point_mass, straight_path, grid, gains, sets=sets
        )
        cmd = controller.command(0.0, CoupledState.at_rest([0.0]))
        assert cmd.u == pytest.approx(1.0)
        np.testing.assert_allclose(cmd.tau, [1.0])
        assert not cmd.saturated
        assert cmd.resync is None

    def test_online_command_holds_until_next_grid_point(
        self, point_mass, straight_path, grid, gains, double_integrator
    ):
        """Online commands are recomputed at s_{i+1}; the last stage runs to the end."""
        _, sets, profile = double_integrator
        for mode in (ControlMode.TOPT, ControlMode.OS):
            controller = build_controller(
                mode, point_mass, straight_path, grid, gains, sets=sets, profile=profile
            )
            assert controller.command(0.0, CoupledState.at_rest([0.0])).hold_until == (
                pytest.approx(1.0 / STAGES)
            )
            last = CoupledState(q=[0.95], qd=[0.3], s=0.95, sd=0.3)
            assert controller.command(0.0, last).hold_until is None

    def test_online_controller_is_abstract(self, point_mass, straight_path):
        """Subclasses must supply the path control law."""
        with pytest.raises(TypeError):
            OnlinePathController(point_mass, straight_path, None)  # type: ignore[abstract]

    def test_excursions_counted_per_episode(
        self, point_mass, straight_path, grid, gains, double_integrator
    ):
        """Consecutive excursion samples count once."""
        _, sets, _ = double_integrator
        controller = build_controller(
            ControlMode.TOPT, point_mass, straight_path, grid, gains, sets=sets
        )
        fast = CoupledState(q=[0.95], qd=[0.7], s=0.95, sd=0.7)
        resting = CoupledState(q=[0.95], qd=[0.0], s=0.95, sd=0.0)
        for y in (fast, fast, resting, fast):
            controller.command(0.0, y)
        assert controller.state.excursions == 2
        controller.reset()
        assert controller.state.excursions == 0

    def test_tt_command_resyncs(self, point_mass, straight_path, grid, gains, double_integrator):
        """TT imposes the reference path state and finishes at T."""
        _, _, profile = double_integrator
        controller = build_controller(
            ControlMode.TT, point_mass, straight_path, grid, gains, profile=profile
        )
        y0 = CoupledState.at_rest([0.0])
        cmd = controller.command(0.0, y0)
        assert cmd.resync == (0.0, 0.0)
        assert cmd.u == pytest.approx(profile.us[0])
        assert not cmd.finished
        assert controller.command(profile.duration + 0.01, y0).finished

    def test_live_interval_recorded(
        self, point_mass, straight_path, grid, gains, double_integrator
    ):
        """Online decisions expose the live interval they clamped against."""
        _, sets, _ = double_integrator
        state = ControllerState(
            ControlMode.TOPT, grid, gains, point_mass.tau_min, point_mass.tau_max, sets=sets
        )
        state.locate(0.0)
        decision = topt_path_control(state, 0.0, _live())
        assert decision.live == Interval(-1.0, 1.0)
