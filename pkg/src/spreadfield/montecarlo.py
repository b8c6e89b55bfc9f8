"""Seeded Monte Carlo ensembles of stochastic trajectories.

Each path gets its own seed derived from the master seed through
`noise.path_seed`, so an ensemble is a pure function of
(master_seed, n_paths, params, config): results are bitwise identical
across runs, execution orders, and worker counts.  Failed paths are
flagged and excluded from the statistics; an ensemble is rejected only
when more than 1% of its paths fail.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .dynamics import DynamicsOrder
from .integrator import IntegrationError, IntegratorConfig, Trajectory, integrate
from .lob import MarketParams
from .noise import (DEFAULT_SIGMA_LAMBDA, DESK_NOISE_DT, SigmaProfile,
                    path_seed, sample_path)

MAX_FAILED_FRACTION = 0.01

# Domain scale of the bundled financial scenario: 5e4 times the cube root
# of the volume of a ball whose radius is the largest log ask price, ln(35).
SCENARIO_CS = 5e4 * (4.0 / 3.0 * math.pi) ** (1.0 / 3.0) * math.log(35.0)

# Checkpoint minutes reported by the financial scenario.
SCENARIO_CHECKPOINTS = (0.0, 2.0, 7.079646017699115, 8.0)

# Reference calibration of the bundled three-asset demo order book.
DEMO_ALPHA = 13338.83103
DEMO_ALPHA_IN = 798.4385286
DEMO_RADIUS0 = 0.016557805
DEMO_CENTER = (3.416906675, 2.714694744, 3.022860941)


class EnsembleError(RuntimeError):
    """Raised when too many paths of an ensemble fail."""


@dataclass
class MCSummary:
    """Terminal statistics of one ensemble."""

    n_paths: int
    master_seed: int
    order: int
    method: str
    sigma_mode: str
    sigma: SigmaProfile
    noise_dt: float
    terminal_time: float
    terminal_radii: np.ndarray      # (n_ok, n_balls)
    vanished: np.ndarray            # (n_ok, n_balls) bool
    path_ids: np.ndarray            # (n_ok,) original path indices
    mean: np.ndarray                # per ball
    std: np.ndarray
    min: np.ndarray
    max: np.ndarray
    vanish_fraction: np.ndarray
    failed_paths: list[int] = field(default_factory=list)

    @property
    def n_failed(self) -> int:
        return len(self.failed_paths)


def _run_one(k, params, order, cfg, sigma, sigma_mode, master_seed,
             noise_dt):
    seed = path_seed(master_seed, k)
    path = sample_path(seed, noise_dt, cfg.t_end)
    return integrate(params, order, cfg, path=path, sigma=sigma,
                     sigma_mode=sigma_mode)


def run_ensemble(params: MarketParams, order: DynamicsOrder,
                 cfg: IntegratorConfig, n_paths: int, master_seed: int,
                 sigma: SigmaProfile | None = None,
                 sigma_mode: str = "shell",
                 noise_dt: float = DESK_NOISE_DT,
                 workers: int = 1,
                 collect_trajectories: bool = False
                 ) -> tuple[MCSummary, list[Trajectory] | None]:
    """Run a seeded ensemble and summarize the terminal states.

    ``noise_dt`` defaults to the desk increment scale 1e-4 (the reference
    scale 1e-6 is configurable but slow for 100-path ensembles).
    """
    if n_paths < 1:
        raise ValueError("n_paths must be >= 1")
    order = DynamicsOrder(order)
    if order == DynamicsOrder.DETERMINISTIC:
        raise ValueError("ensembles are for the stochastic orders; run "
                         "integrate() once for the deterministic system")
    if sigma is None:
        sigma = SigmaProfile.exponential(lam=DEFAULT_SIGMA_LAMBDA,
                                         c0=params.c0)

    results: list[Trajectory | None] = [None] * n_paths

    def work(k):
        try:
            return k, _run_one(k, params, order, cfg, sigma, sigma_mode,
                               master_seed, noise_dt)
        except IntegrationError:
            return k, None

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for k, traj in pool.map(work, range(n_paths)):
                results[k] = traj
    else:
        for k in range(n_paths):
            results[k] = work(k)[1]

    failures = [k for k in range(n_paths) if results[k] is None]

    if len(failures) > MAX_FAILED_FRACTION * n_paths:
        raise EnsembleError(
            f"{len(failures)} of {n_paths} paths failed "
            f"(> {MAX_FAILED_FRACTION:.0%})")

    ok = [k for k in range(n_paths) if results[k] is not None]
    nb = params.n_balls
    terminal = np.zeros((len(ok), nb))
    vanished = np.zeros((len(ok), nb), dtype=bool)
    for row, k in enumerate(ok):
        traj = results[k]
        terminal[row] = traj.terminal_radii
        for ball, _t in traj.vanish_events:
            vanished[row, ball] = True

    ddof = 1 if len(ok) > 1 else 0
    summary = MCSummary(
        n_paths=n_paths, master_seed=master_seed, order=int(order),
        method=cfg.method, sigma_mode=sigma_mode, sigma=sigma,
        noise_dt=noise_dt, terminal_time=cfg.t_end,
        terminal_radii=terminal, vanished=vanished,
        path_ids=np.array(ok, dtype=np.int64),
        mean=terminal.mean(axis=0), std=terminal.std(axis=0, ddof=ddof),
        min=terminal.min(axis=0), max=terminal.max(axis=0),
        vanish_fraction=vanished.mean(axis=0), failed_paths=failures)
    trajectories = [results[k] for k in ok] if collect_trajectories else None
    return summary, trajectories


def paired_variance_gap(a: np.ndarray, b: np.ndarray) -> tuple[float, float]:
    """Estimate Var(a) - Var(b) with a paired standard error.

    Suited to common-random-number comparisons: returns (gap, se) where
    ``gap`` is the mean of the paired squared-deviation differences and
    ``se`` its standard error; ``gap >= -2 * se`` accepts "Var(b) <= Var(a)"
    at the two-sigma level.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("need two equal-length 1-d samples")
    d = (a - a.mean()) ** 2 - (b - b.mean()) ** 2
    return float(d.mean()), float(d.std(ddof=1) / math.sqrt(len(d)))


def demo_market_params(two_balls: bool = False, c0: float = 1.0
                       ) -> MarketParams:
    """Calibrated parameters of the bundled three-asset demo order book.

    With ``two_balls`` a second market is added whose spread ball is 25%
    larger and whose center is offset by one unit in log-price space.
    """
    center = np.array([DEMO_CENTER])
    radii = np.array([DEMO_RADIUS0])
    if two_balls:
        second = np.array(DEMO_CENTER) + np.array([1.0, 0.0, 0.0])
        center = np.vstack([center, second])
        radii = np.array([DEMO_RADIUS0, 1.25 * DEMO_RADIUS0])
    n_balls = len(radii)
    return MarketParams(n=3, n_balls=n_balls, alpha=DEMO_ALPHA,
                        alpha_in=DEMO_ALPHA_IN, centers=center,
                        radii0=radii, v_inf0=n_balls / float(radii.sum()),
                        c0=c0, cs=SCENARIO_CS)


@dataclass
class ScenarioReport:
    """Financial scenario output: checkpoint radii and ensemble stats."""

    checkpoints: tuple[float, ...]
    representative_radii: np.ndarray   # (n_checkpoints, n_balls), path 0
    mean_radii: np.ndarray             # ensemble mean at the checkpoints
    summary: MCSummary
    minutes_per_unit: float = 1.0


def financial_scenario(params: MarketParams | None = None,
                       t_end: float = 8.0, n_paths: int = 300,
                       master_seed: int = 42,
                       order: DynamicsOrder = DynamicsOrder.STOCHASTIC2,
                       noise_dt: float = DESK_NOISE_DT,
                       sigma_mode: str = "shell",
                       two_balls: bool = False,
                       workers: int = 1) -> ScenarioReport:
    """Simulate the demo calibration over a trading window of ``t_end``
    minutes (one model time unit per minute) and report the radius at the
    scenario checkpoints for a representative path and on ensemble average.
    """
    if params is None:
        params = demo_market_params(two_balls=two_balls)
    cfg = IntegratorConfig(t_end=t_end, output_stride=min(0.05, t_end / 40))
    checkpoints = tuple(c for c in SCENARIO_CHECKPOINTS if c <= t_end)
    summary, trajectories = run_ensemble(
        params, order, cfg, n_paths, master_seed, sigma_mode=sigma_mode,
        noise_dt=noise_dt, workers=workers, collect_trajectories=True)
    nb = params.n_balls
    rep = np.zeros((len(checkpoints), nb))
    mean = np.zeros((len(checkpoints), nb))
    for j, tc in enumerate(checkpoints):
        for i in range(nb):
            rep[j, i] = np.interp(tc, trajectories[0].times,
                                  trajectories[0].radii[:, i])
            vals = [np.interp(tc, tr.times, tr.radii[:, i])
                    for tr in trajectories]
            mean[j, i] = float(np.mean(vals))
    return ScenarioReport(checkpoints=checkpoints, representative_radii=rep,
                          mean_radii=mean, summary=summary)


def write_summary(summary: MCSummary, path) -> None:
    """Write the ensemble summary as line-oriented key=value text."""
    lines = [
        f"n_paths={summary.n_paths}",
        f"master_seed={summary.master_seed}",
        f"order={summary.order}",
        f"method={summary.method}",
        f"sigma_mode={summary.sigma_mode}",
        f"sigma_kind={summary.sigma.kind}",
        f"sigma_c0={summary.sigma.c0:.17g}",
        f"noise_dt={summary.noise_dt:.17g}",
        f"terminal_time={summary.terminal_time:.17g}",
        f"n_failed={summary.n_failed}",
    ]
    nb = len(summary.mean)
    for i in range(nb):
        lines.append(f"mean.{i + 1}={summary.mean[i]:.17g}")
        lines.append(f"std.{i + 1}={summary.std[i]:.17g}")
        lines.append(f"min.{i + 1}={summary.min[i]:.17g}")
        lines.append(f"max.{i + 1}={summary.max[i]:.17g}")
        lines.append(
            f"vanish_fraction.{i + 1}={summary.vanish_fraction[i]:.17g}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def write_scatter(summary: MCSummary, path) -> None:
    """Write per-path terminal radii and vanish flags as CSV."""
    nb = summary.terminal_radii.shape[1]
    header = ("path,"
              + ",".join(f"R_{i + 1}_terminal" for i in range(nb)) + ","
              + ",".join(f"vanished_{i + 1}" for i in range(nb)))
    lines = [header]
    for row, k in enumerate(summary.path_ids):
        cells = [str(int(k))]
        cells += [f"{summary.terminal_radii[row, i]:.17g}"
                  for i in range(nb)]
        cells += [str(int(summary.vanished[row, i])) for i in range(nb)]
        lines.append(",".join(cells))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
