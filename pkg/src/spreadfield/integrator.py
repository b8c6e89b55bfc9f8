"""Time integration of the ball dynamics with event detection.

Three methods: adaptive Dormand-Prince 5(4) with PI step control (the
default, matching the ODE45 solver class), classical fixed-step RK4 (the
brute-force reference used to certify adaptive results), and Euler-Maruyama
(cross-validation semantics where the Brownian increment is applied to the
mean field directly).

When a cubed radius crosses ``eps_vanish`` from above, the adaptive method
localizes the vanishing time by bisection to within 1e-10 * t_end, freezes
the ball at zero, and continues; fixed-step methods clamp at the end of the
offending step.  One integration is single-threaded and deterministic; any
number of integrations may run concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .dynamics import DynamicsOrder
from .lob import MarketParams
from .noise import DEFAULT_SIGMA_LAMBDA, BrownianPath, SigmaProfile

_METHODS = {
    "rk45_adaptive": kernels.METHOD_RK45,
    "rk4_fixed": kernels.METHOD_RK4,
    "euler_maruyama": kernels.METHOD_EULER_MARUYAMA,
}

_SIGMA_MODES = ("paper", "shell")


class IntegrationError(RuntimeError):
    """Numerical failure (step underflow or non-finite state)."""

    def __init__(self, message, t=None, v_inf=None, radii=None):
        super().__init__(message)
        self.t = t
        self.v_inf = v_inf
        self.radii = radii


@dataclass(frozen=True)
class IntegratorConfig:
    method: str = "rk45_adaptive"
    rel_tol: float = 1e-8
    abs_tol: float = 1e-10
    dt_fixed: float = 1e-4
    eps_vanish: float = 1e-12   # threshold on z = R**3
    eps_den: float = 1e-8       # singular guard for the rational correction
    t_end: float = 15.0
    output_stride: float = 0.1

    def __post_init__(self):
        if self.method not in _METHODS:
            raise ValueError(f"unknown method {self.method!r}; "
                             f"choose from {sorted(_METHODS)}")
        if self.rel_tol <= 0.0 or self.abs_tol <= 0.0:
            raise ValueError("tolerances must be positive")
        if self.eps_vanish <= 0.0:
            raise ValueError("eps_vanish must be positive")
        if self.t_end <= 0.0:
            raise ValueError("t_end must be positive")
        if self.output_stride <= 0.0:
            raise ValueError("output_stride must be positive")


@dataclass
class Trajectory:
    """Sampled states of one integration plus its event log."""

    times: np.ndarray            # strictly increasing
    v_inf: np.ndarray
    radii: np.ndarray            # (n_out, n_balls), vanished balls read 0
    z: np.ndarray                # cubed radii, same shape
    vanish_events: list[tuple[int, float]]
    guard_events: list[tuple[float, int, float]]  # (t, ball, clamped term)
    guard_total: int = 0
    n_steps: int = 0
    n_rejected: int = 0
    method: str = "rk45_adaptive"

    @property
    def terminal_radii(self) -> np.ndarray:
        return self.radii[-1]

    @property
    def terminal_v_inf(self) -> float:
        return float(self.v_inf[-1])

    def vanish_time(self, ball: int) -> float | None:
        for i, t in self.vanish_events:
            if i == ball:
                return t
        return None


def _sigma_kernel_args(order: DynamicsOrder, sigma: SigmaProfile | None,
                       sigma_mode: str):
    if order == DynamicsOrder.DETERMINISTIC or sigma is None \
            or sigma.kind == "zero" or sigma.c0 == 0.0:
        return kernels.SMASS_CONST, 0.0, 0.0, 0.0
    if sigma_mode == "paper":
        return kernels.SMASS_CONST, sigma.c0, 0.0, 0.0
    if sigma_mode == "shell":
        qa, qb = sigma.shell_coeffs()
        return kernels.SMASS_SHELL, sigma.c0, qa, qb
    raise ValueError(f"unknown sigma_mode {sigma_mode!r}; choose from "
                     f"{_SIGMA_MODES}")


def integrate(params: MarketParams, order: DynamicsOrder,
              cfg: IntegratorConfig, path: BrownianPath | None = None,
              sigma: SigmaProfile | None = None,
              sigma_mode: str = "shell") -> Trajectory:
    """Integrate from the calibrated initial state to cfg.t_end.

    Stochastic orders with a nonzero volatility profile require a Brownian
    path covering [0, t_end]; the deterministic order ignores both.  The
    default profile for stochastic runs is exponential with decay rate 1.5
    and total mass params.c0.  ``sigma_mode`` selects the noise mass entering
    the mean-field equation: "shell" integrates the profile over the shells
    around the balls (closed form), "paper" collapses it to the constant c0.
    """
    order = DynamicsOrder(order)
    if order != DynamicsOrder.DETERMINISTIC and sigma is None:
        sigma = SigmaProfile.exponential(lam=DEFAULT_SIGMA_LAMBDA,
                                         c0=params.c0)
    smode, c0, qa, qb = _sigma_kernel_args(order, sigma, sigma_mode)
    noisy = order != DynamicsOrder.DETERMINISTIC and c0 > 0.0
    if noisy and path is None:
        raise ValueError("stochastic order with nonzero sigma requires a "
                         "Brownian path")
    if noisy:
        covered = path.n * path.dt
        if covered < cfg.t_end * (1.0 - 1e-12):
            raise ValueError(f"path covers [0, {covered:g}] but t_end is "
                             f"{cfg.t_end:g}")
        increments = np.ascontiguousarray(path.increments, dtype=float)
        noise_dt = path.dt
    else:
        increments = np.empty(0)
        noise_dt = cfg.t_end

    z0 = np.ascontiguousarray(params.radii0, dtype=float) ** 3
    active0 = np.ones(params.n_balls, dtype=np.uint8)
    dt_fixed = cfg.dt_fixed
    if cfg.method == "euler_maruyama" and noisy:
        dt_fixed = noise_dt

    res = kernels.run_path(
        _METHODS[cfg.method], int(order), 0.0, cfg.t_end,
        params.v_inf0, z0, active0, params.alpha, params.cs ** 3,
        cfg.rel_tol, cfg.abs_tol, dt_fixed, cfg.eps_vanish, cfg.eps_den,
        smode, c0, qa, qb, increments, noise_dt, cfg.output_stride)

    (status, err_t, times, v_out, z_out, vanish_ball, vanish_time,
     guard_time, guard_ball, guard_value, guard_total, n_steps,
     n_rejected) = res

    if status == kernels.STATUS_STEP_UNDERFLOW:
        raise IntegrationError(
            f"step size underflow at t={err_t:.12g}", t=err_t,
            v_inf=float(v_out[-1]), radii=np.cbrt(z_out[-1]))
    if status == kernels.STATUS_NOT_FINITE:
        raise IntegrationError(
            f"non-finite state detected at t={err_t:.12g}", t=err_t,
            v_inf=float(v_out[-1]), radii=np.cbrt(z_out[-1]))

    radii = np.where(z_out > 0.0, np.maximum(z_out, 0.0), 0.0) ** (1.0 / 3.0)
    return Trajectory(
        times=times, v_inf=v_out, radii=radii, z=z_out,
        vanish_events=[(int(b), float(t))
                       for b, t in zip(vanish_ball, vanish_time)],
        guard_events=[(float(t), int(b), float(val)) for t, b, val
                      in zip(guard_time, guard_ball, guard_value)],
        guard_total=int(guard_total), n_steps=int(n_steps),
        n_rejected=int(n_rejected), method=cfg.method)


def reference_integrate(params: MarketParams, order: DynamicsOrder,
                        dt_fixed: float, path: BrownianPath | None = None,
                        t_end: float = 15.0, output_stride: float = 0.1,
                        sigma: SigmaProfile | None = None,
                        sigma_mode: str = "shell",
                        eps_vanish: float = 1e-12) -> Trajectory:
    """Fixed-step RK4 oracle used to certify adaptive results."""
    if dt_fixed <= 0.0:
        raise ValueError("dt_fixed must be positive")
    cfg = IntegratorConfig(method="rk4_fixed", dt_fixed=dt_fixed,
                           t_end=t_end, output_stride=output_stride,
                           eps_vanish=eps_vanish)
    return integrate(params, order, cfg, path=path, sigma=sigma,
                     sigma_mode=sigma_mode)


def write_trajectory_csv(traj: Trajectory, path) -> None:
    """Trajectory CSV: `t,v_inf,R_1,...,R_I`; events appended as comments."""
    nb = traj.radii.shape[1]
    header = "t,v_inf," + ",".join(f"R_{i + 1}" for i in range(nb))
    lines = [header]
    for k in range(len(traj.times)):
        row = [f"{traj.times[k]:.17g}", f"{traj.v_inf[k]:.17g}"]
        row += [f"{traj.radii[k, i]:.17g}" for i in range(nb)]
        lines.append(",".join(row))
    for ball, t in traj.vanish_events:
        lines.append(f"# vanish,{ball + 1},{t:.17g}")
    for t, _ball, value in traj.guard_events:
        lines.append(f"# guard,{t:.17g},{value:.17g}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def read_trajectory_csv(path) -> Trajectory:
    """Read back a trajectory CSV written by `write_trajectory_csv`."""
    times = []
    v_inf = []
    radii = []
    vanish = []
    guards = []
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if not header.startswith("t,v_inf"):
            raise ValueError(f"{path}: not a trajectory CSV")
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                parts = line[1:].strip().split(",")
                if parts[0] == "vanish":
                    vanish.append((int(parts[1]) - 1, float(parts[2])))
                elif parts[0] == "guard":
                    guards.append((float(parts[1]), -1, float(parts[2])))
                continue
            cells = [float(c) for c in line.split(",")]
            times.append(cells[0])
            v_inf.append(cells[1])
            radii.append(cells[2:])
    radii = np.array(radii)
    return Trajectory(times=np.array(times), v_inf=np.array(v_inf),
                      radii=radii, z=radii ** 3, vanish_events=vanish,
                      guard_events=guards)
