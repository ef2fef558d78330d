"""Sampled-data simulation of the coupled robot and path dynamics.

Between control samples the torques τ and the path acceleration u are held
constant while

    q̈ = M(q)⁻¹(τ − q̇ᵀC(q)q̇ − h(q)),    s̈ = u

is integrated with an adaptive Runge-Kutta 5(4) scheme. Integration of a
window stops early when s reaches 1 or ṡ drops to 0. A controller that sets
``hold_until`` on its command is re-queried as soon as s crosses that point;
the rest of the sample period then runs on the new command.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import replace

import numpy as np
from numpy.typing import NDArray
from scipy.integrate import solve_ivp

from robust_topt.control.path_controllers import ControlCommand, PathController
from robust_topt.dynamics.equations import forward_dynamics
from robust_topt.dynamics.models import DynamicsModel
from robust_topt.exceptions import DivergenceError, IntegratorError
from robust_topt.geometry.path import PathSpline
from robust_topt.sim.results import SimResult, TerminalStatus
from robust_topt.sim.state import CoupledState

logger = logging.getLogger(__name__)


class _Recorder:
    def __init__(self) -> None:
        self.t: list[float] = []
        self.s: list[float] = []
        self.sd: list[float] = []
        self.u: list[float] = []
        self.tau: list[NDArray[np.float64]] = []
        self.err: list[float] = []
        self.infeasible: list[bool] = []
        self.q: list[NDArray[np.float64]] = []
        self.qd: list[NDArray[np.float64]] = []
        self.saturated = 0

    def add(self, t: float, y: CoupledState, cmd: ControlCommand, err: float) -> None:
        self.t.append(t)
        self.s.append(y.s)
        self.sd.append(y.sd)
        self.u.append(cmd.u)
        self.tau.append(np.asarray(cmd.tau, dtype=float).copy())
        self.err.append(err)
        self.infeasible.append(cmd.infeasible)
        self.q.append(y.q.copy())
        self.qd.append(y.qd.copy())
        self.saturated += int(cmd.saturated)

    def result(
        self, controller: PathController, status: TerminalStatus, message: str
    ) -> SimResult:
        n = controller.model.joint_count
        return SimResult(
            mode=controller.mode.value,
            status=status,
            t=np.array(self.t),
            s=np.array(self.s),
            sd=np.array(self.sd),
            u=np.array(self.u),
            tau=np.array(self.tau).reshape(len(self.tau), n),
            err_norm=np.array(self.err),
            infeasible=np.array(self.infeasible, dtype=bool),
            q=np.array(self.q).reshape(len(self.q), n),
            qd=np.array(self.qd).reshape(len(self.qd), n),
            excursions=controller.state.excursions,
            saturated_samples=self.saturated,
            message=message,
        )


def _grid_crossing(s_next: float, n: int) -> Callable[..., float]:
    def crossing(_t: float, v: NDArray[np.float64], *_: object) -> float:
        return float(v[2 * n] - s_next)

    crossing.terminal = True  # type: ignore[attr-defined]
    crossing.direction = 1.0  # type: ignore[attr-defined]
    return crossing


def _terminal_status(
    sd: float, terminal_velocity: tuple[float, float], tol: float
) -> TerminalStatus:
    lo, hi = terminal_velocity
    if lo - tol <= sd <= hi + tol:
        return TerminalStatus.REACHED
    return TerminalStatus.TERMINAL_MISS


def simulate(
    model: DynamicsModel,
    path: PathSpline,
    controller: PathController,
    y0: CoupledState,
    *,
    dt_control: float = 1e-3,
    rtol: float = 1e-8,
    atol: float = 1e-10,
    plant: DynamicsModel | None = None,
    terminal_velocity: tuple[float, float] = (0.0, 0.0),
    terminal_tol: float = 1e-3,
    divergence_threshold: float = 10.0,
    max_time: float = 10.0,
    raise_on_divergence: bool = False,
) -> SimResult:
    """Run ``controller`` on the plant from ``y0`` until the path ends.

    Args:
        model: Controller model; also the plant unless ``plant`` is given
        path: Geometric path the controller follows
        controller: Path controller paired with computed-torque tracking
        y0: Initial coupled state with s = 0
        dt_control: Zero-order-hold sample time (s)
        rtol: Integrator relative tolerance
        atol: Integrator absolute tolerance
        plant: Simulated robot when it differs from the controller model
        terminal_velocity: Admissible final path velocities I_end on ṡ
        terminal_tol: Tolerance on ṡ at the end and on 1 − s when stopping early
        divergence_threshold: Abort when ‖(e, ė)‖ exceeds this
        max_time: Simulated time limit; exceeding it means the path stalled

    Returns:
        Telemetry with status ``reached``, ``diverged``, ``timeout`` or ``terminal_miss``

    Raises:
        IntegratorError: The ODE solver failed inside a control period
        DivergenceError: ``raise_on_divergence`` is set and the guard tripped
    """
    if y0.s != 0.0:
        raise ValueError(f"simulation must start at s=0, got {y0.s}")
    if dt_control <= 0.0:
        raise ValueError(f"dt_control must be positive, got {dt_control}")
    if y0.joint_count != model.joint_count:
        raise ValueError(f"initial state has {y0.joint_count} joints, model {model.joint_count}")

    plant_model = plant or model
    n = model.joint_count
    controller.reset()
    recorder = _Recorder()

    def rhs(
        _t: float, v: NDArray[np.float64], tau: NDArray[np.float64], u: float
    ) -> NDArray[np.float64]:
        q, qd = v[:n], v[n : 2 * n]
        qdd = forward_dynamics(plant_model, q, qd, tau)
        return np.concatenate([qd, qdd, [v[2 * n + 1], u]])

    def end_of_path(_t: float, v: NDArray[np.float64], *_: object) -> float:
        return float(v[2 * n] - 1.0)

    def stalled(_t: float, v: NDArray[np.float64], *_: object) -> float:
        return float(v[2 * n + 1])

    end_of_path.terminal = True  # type: ignore[attr-defined]
    end_of_path.direction = 1.0  # type: ignore[attr-defined]
    stalled.terminal = True  # type: ignore[attr-defined]
    stalled.direction = -1.0  # type: ignore[attr-defined]

    t = 0.0
    next_sample = 0.0
    y = y0
    status = TerminalStatus.TIMEOUT
    message = ""
    cmd: ControlCommand | None = None

    while True:
        if t >= max_time:
            message = f"path stalled: s={y.s:.4f} after {max_time:g} s"
            logger.warning("%s run timed out at s=%.4f", controller.mode.value, y.s)
            break

        cmd = controller.command(t, y)
        if cmd.resync is not None:
            y = replace(y, s=min(max(cmd.resync[0], 0.0), 1.0), sd=max(cmd.resync[1], 0.0))
        e = cmd.desired.q - y.q
        ed = cmd.desired.qd - y.qd
        err = float(np.linalg.norm(e))
        recorder.add(t, y, cmd, err)

        full_err = float(np.hypot(np.linalg.norm(e), np.linalg.norm(ed)))
        if not math.isfinite(full_err) or full_err > divergence_threshold:
            status = TerminalStatus.DIVERGED
            message = f"tracking error {full_err:.3g} exceeded {divergence_threshold:g}"
            logger.warning("%s run diverged at t=%.3f s, s=%.4f", controller.mode.value, t, y.s)
            if raise_on_divergence:
                raise DivergenceError(message, details={"t": t, "s": y.s})
            break

        if cmd.finished:
            status = _terminal_status(y.sd, terminal_velocity, terminal_tol)
            break

        u = cmd.u
        if y.sd <= 0.0 and u < 0.0:
            u = 0.0
        tau = np.asarray(cmd.tau, dtype=float)

        if t >= next_sample - 1e-12:
            next_sample = t + dt_control
        events = [end_of_path]
        if y.sd > 0.0:
            events.append(stalled)
        hold = cmd.hold_until
        if hold is not None and y.s < hold < 1.0:
            events.append(_grid_crossing(hold, n))

        sol = solve_ivp(
            rhs,
            (t, next_sample),
            y.to_vector(),
            method="RK45",
            rtol=rtol,
            atol=atol,
            events=events,
            args=(tau, u),
        )
        if not sol.success:
            raise IntegratorError(
                f"integrator failed at t={t:.6f}: {sol.message}", details={"t": t, "s": y.s}
            )
        t = float(sol.t[-1])
        y = CoupledState.from_vector(sol.y[:, -1], n)

        if sol.status == 1:
            fired = {event: hits.size > 0 for event, hits in zip(events, sol.t_events)}
            if fired[end_of_path]:
                y = replace(y, s=1.0)
                status = _terminal_status(y.sd, terminal_velocity, terminal_tol)
                break
            if fired.get(stalled, False):
                y = replace(y, sd=0.0)
                if 1.0 - y.s <= terminal_tol:
                    y = replace(y, s=1.0)
                    status = _terminal_status(0.0, terminal_velocity, terminal_tol)
                    break
            elif hold is not None:
                y = replace(y, s=hold)

    if cmd is not None and (not recorder.t or recorder.t[-1] != t):
        p_end = path.evaluate(y.s)
        final = replace(cmd, infeasible=False, saturated=False)
        recorder.add(t, y, final, float(np.linalg.norm(p_end - y.q)))

    result = recorder.result(controller, status, message)
    logger.info(
        "%s run %s: duration %.4f s, max error %.4f, %d infeasible samples",
        result.mode,
        status.value,
        result.duration,
        result.max_error,
        result.infeasible_events,
    )
    return result
