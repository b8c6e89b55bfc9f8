"""Reproducible Brownian forcing and radial volatility profiles.

Paths are generated from an explicit seed with a local numpy generator, so
there is no global RNG state anywhere: (seed, dt, t_end) fully determines
every increment.  Ensemble seeds are derived from a master seed through a
published mixing function (`path_seed`), which makes Monte Carlo runs
order-independent and safely parallelizable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

# Increment scale of the reference runs; desk-scale ensembles typically use
# 1e-4 instead (coarser path resolution, same noise law).
DEFAULT_NOISE_DT = 1e-6
DESK_NOISE_DT = 1e-4

# Decay rate of the default exponential volatility profile.
DEFAULT_SIGMA_LAMBDA = 1.5

_FOUR_PI = 4.0 * math.pi


class SigmaError(ValueError):
    """Invalid volatility-profile parameters or usage."""


@dataclass(frozen=True)
class SigmaProfile:
    """Radial volatility profile sigma(r) with known integral c0.

    ``r`` is the distance from the zero-trading boundary.  Supported kinds:

    - ``zero``:        sigma = 0
    - ``exponential``: sigma(r) = c0 * lam * exp(-lam r)
    - ``power_tail``:  sigma(r) = c0 * a * r0^a / (r0 + r)^(1+a)
    - ``compact``:     sigma(r) = c0 / h on [0, h], 0 beyond

    All kinds integrate to exactly ``c0`` over [0, inf).
    """

    kind: str
    c0: float
    lam: float = 0.0
    a: float = 0.0
    r0: float = 0.0
    h: float = 0.0

    def __post_init__(self):
        if self.kind not in ("zero", "exponential", "power_tail", "compact"):
            raise SigmaError(f"unknown sigma kind {self.kind!r}")
        if self.c0 < 0.0:
            raise SigmaError("c0 must be nonnegative")
        if self.kind == "exponential" and self.lam <= 0.0:
            raise SigmaError("exponential profile needs lam > 0")
        if self.kind == "power_tail" and (self.a <= 0.0 or self.r0 <= 0.0):
            raise SigmaError("power_tail profile needs a > 0 and r0 > 0")
        if self.kind == "compact" and self.h <= 0.0:
            raise SigmaError("compact profile needs h > 0")

    @classmethod
    def zero(cls) -> "SigmaProfile":
        return cls(kind="zero", c0=0.0)

    @classmethod
    def exponential(cls, lam: float, c0: float = 1.0) -> "SigmaProfile":
        return cls(kind="exponential", c0=c0, lam=lam)

    @classmethod
    def power_tail(cls, a: float, r0: float, c0: float = 1.0) -> "SigmaProfile":
        return cls(kind="power_tail", c0=c0, a=a, r0=r0)

    @classmethod
    def compact(cls, h: float, c0: float = 1.0) -> "SigmaProfile":
        return cls(kind="compact", c0=c0, h=h)

    def value(self, r):
        """Evaluate sigma at distance r (scalar or array), vectorized."""
        r = np.asarray(r, dtype=float)
        if self.kind == "zero":
            return np.zeros_like(r)
        if self.kind == "exponential":
            return self.c0 * self.lam * np.exp(-self.lam * r)
        if self.kind == "power_tail":
            return self.c0 * self.a * self.r0 ** self.a / (self.r0 + r) ** (1.0 + self.a)
        # compact
        return np.where(r <= self.h, self.c0 / self.h, 0.0)

    def tail_cutoff(self, tol: float = 1e-10) -> float:
        """Radius beyond which the remaining integral of sigma is < tol*c0."""
        if self.kind == "zero":
            return 1.0
        if self.kind == "compact":
            return self.h
        if self.kind == "exponential":
            return -math.log(tol) / self.lam
        # power_tail: tail integral c0*(r0/(r0+r))^a
        return self.r0 * (tol ** (-1.0 / self.a) - 1.0)

    def shell_coeffs(self) -> tuple[float, float]:
        """Coefficients (qa, qb) of the closed-form shell noise mass.

        For each ball of radius R, the volume integral of sigma over the
        surrounding shell is 4*pi*c0*(R**2 + qb*R + qa) when integrating the
        radial tail to infinity.  Requires sigma(r)*r**2 integrable, which
        for the power tail means a > 2.
        """
        if self.kind == "zero":
            return 0.0, 0.0
        if self.kind == "exponential":
            return 2.0 / self.lam ** 2, 2.0 / self.lam
        if self.kind == "compact":
            return self.h ** 2 / 3.0, self.h
        if self.a <= 2.0:
            raise SigmaError(
                "power_tail shell mass diverges for a <= 2 (sigma*r^2 not integrable)")
        qa = 2.0 * self.r0 ** 2 / ((self.a - 1.0) * (self.a - 2.0))
        qb = 2.0 * self.r0 / (self.a - 1.0)
        return qa, qb

    def shell_mass(self, radii) -> float:
        """Closed-form noise mass summed over balls of the given radii."""
        if self.kind == "zero":
            return 0.0
        qa, qb = self.shell_coeffs()
        radii = np.asarray(radii, dtype=float)
        return float(_FOUR_PI * self.c0 * np.sum(radii ** 2 + qb * radii + qa))


@dataclass(frozen=True)
class BrownianPath:
    """A discretized Brownian path: independent N(0, dt) increments.

    W(t_j) = sum of the first j increments, W(0) = 0.
    """

    seed: int
    dt: float
    t_end: float
    increments: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return len(self.increments)

    def cumulative(self) -> np.ndarray:
        """W at the bin ends t_j = j*dt, j = 0..n (length n + 1)."""
        w = np.empty(self.n + 1)
        w[0] = 0.0
        np.cumsum(self.increments, out=w[1:])
        return w

    def w_end(self) -> float:
        return float(self.increments.sum())


def sample_path(seed: int, dt: float, t_end: float) -> BrownianPath:
    """Generate the Brownian path for (seed, dt, t_end).

    Produces ceil(t_end/dt) Gaussian increments of variance dt from a
    freshly seeded generator; identical arguments give bitwise-identical
    increments on every run.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    if t_end < 0.0:
        raise ValueError("t_end must be nonnegative")
    n = max(0, math.ceil(t_end / dt - 1e-9))
    rng = np.random.default_rng(seed)
    increments = rng.standard_normal(n) * math.sqrt(dt)
    return BrownianPath(seed=seed, dt=dt, t_end=t_end, increments=increments)


def forcing(path: BrownianPath, t: float) -> float:
    """Piecewise-constant forcing dW/dt for the increment bin containing t."""
    if t < 0.0 or t > path.t_end * (1.0 + 1e-12) + 1e-300:
        raise ValueError(f"t={t} outside the path horizon [0, {path.t_end}]")
    if path.n == 0:
        return 0.0
    j = min(int(t / path.dt), path.n - 1)
    return float(path.increments[j]) / path.dt


def path_seed(master_seed: int, path_index: int) -> int:
    """Derive the seed of ensemble path ``path_index`` from a master seed.

    Mixing function: numpy ``SeedSequence(master_seed, spawn_key=(path_index,))``,
    a documented, stable hash.  Paths can therefore be generated in any order
    or on any number of workers with identical results.
    """
    ss = np.random.SeedSequence(entropy=master_seed, spawn_key=(path_index,))
    return int(ss.generate_state(1, np.uint64)[0])
