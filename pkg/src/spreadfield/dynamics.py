"""State and right-hand sides of the mean-field ball dynamics.

The solid phase is a union of balls with fixed centers in log-price space;
each ball carries its cubed radius z = R**3 (the numerically stable variable
near vanishing: dz stays bounded as R -> 0 while dR diverges).  The single
scalar mean field v_inf couples all balls.  Three systems share the same
radius equations and differ in the mean-field equation:

- deterministic:        dv = 4*pi*alpha**(-1/3) * sum(1 - R*v)
- first-order noise:    deterministic drift + alpha**(-4/3) * W' * S
- second-order noise:   4*pi*(alpha/cs**3) * sum(1 - R*v) plus four
  correction terms in (v - 1/R), and noise (1/cs**3) * W' * S

where W' is the Brownian forcing and S the volatility mass of the liquid
phase (`sigma_mass`).  Noise never enters the radius equations directly.

These are the reference implementations; the integrator uses the flat-array
kernels, which are tested against the functions here.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import integrate as _sciint

from .noise import SigmaProfile

FOUR_PI = 4.0 * math.pi
TWO_PI = 2.0 * math.pi
THIRD = 1.0 / 3.0

DEFAULT_EPS_DEN = 1e-8


class DynamicsOrder(enum.IntEnum):
    DETERMINISTIC = 0
    STOCHASTIC1 = 1
    STOCHASTIC2 = 2


@dataclass(frozen=True)
class BallState:
    """One ball: fixed center, cubed radius z >= 0, optional vanish time."""

    index: int
    center: tuple[float, ...]
    z: float
    vanished_at: float | None = None

    def __post_init__(self):
        if self.z < 0.0:
            raise ValueError("cubed radius must be nonnegative")
        if self.vanished_at is not None and self.z != 0.0:
            raise ValueError("a vanished ball must have z = 0")

    @property
    def radius(self) -> float:
        return self.z ** THIRD

    @property
    def active(self) -> bool:
        return self.vanished_at is None


@dataclass(frozen=True)
class SystemState:
    """Dynamical state at time t: mean field plus per-ball cubed radii."""

    t: float
    v_inf: float
    balls: tuple[BallState, ...]

    @classmethod
    def initial(cls, params) -> "SystemState":
        balls = tuple(
            BallState(index=i, center=tuple(params.centers[i]),
                      z=float(params.radii0[i]) ** 3)
            for i in range(params.n_balls))
        return cls(t=0.0, v_inf=params.v_inf0, balls=balls)

    @property
    def active_balls(self) -> tuple[BallState, ...]:
        return tuple(b for b in self.balls if b.active)

    def radii(self) -> np.ndarray:
        return np.array([b.radius for b in self.balls])


def rhs_deterministic(state: SystemState, alpha: float):
    """Time derivatives (dv_inf, dz per ball) of the deterministic system."""
    v = state.v_inf
    s = 0.0
    dz = []
    for b in state.balls:
        if b.active:
            r = b.z ** THIRD
            s += 1.0 - r * v
            dz.append(3.0 * v * r - 3.0)
        else:
            dz.append(0.0)
    dv = FOUR_PI * alpha ** (-THIRD) * s
    return dv, tuple(dz)


def rhs_stochastic(state: SystemState, alpha: float, order: DynamicsOrder,
                   sigma: SigmaProfile, noise_value: float, cs: float,
                   sigma_mode: str = "paper_approx",
                   include_corrections: bool = True,
                   eps_den: float = DEFAULT_EPS_DEN,
                   guard_sink: list | None = None):
    """Time derivatives of the first- or second-order stochastic system.

    ``noise_value`` is the current forcing sample W'(t).  The radius
    derivatives are identical to the deterministic ones; noise acts on the
    mean field only.  For the second-order system, a rational correction
    term with denominator (v - 1/R + R**2) is clamped to a sign-preserving
    magnitude when the denominator falls below ``eps_den``; each clamp is
    reported through ``guard_sink`` as (ball_index, denominator, term).
    """
    if order == DynamicsOrder.DETERMINISTIC:
        raise ValueError("use rhs_deterministic for the deterministic system")
    v = state.v_inf
    mass = sigma_mass(state, sigma, mode=sigma_mode)
    s = 0.0
    dz = []
    corr = 0.0
    cs3 = cs ** 3
    for b in state.balls:
        if not b.active:
            dz.append(0.0)
            continue
        r = b.z ** THIRD
        s += 1.0 - r * v
        dz.append(3.0 * v * r - 3.0)
        if order == DynamicsOrder.STOCHASTIC2 and include_corrections:
            u = v - 1.0 / r
            corr -= FOUR_PI / cs3 * u
            corr -= FOUR_PI / cs3 * u * u
            corr -= TWO_PI / cs3 * u ** 3 / r
            den = u + r * r
            if abs(den) < eps_den:
                term = math.copysign(u * u / eps_den, den) if den != 0.0 \
                    else u * u / eps_den
                if guard_sink is not None:
                    guard_sink.append((b.index, den, term))
            else:
                term = u * u / den
            corr += FOUR_PI / cs3 * term
    if order == DynamicsOrder.STOCHASTIC1:
        dv = FOUR_PI * alpha ** (-THIRD) * s + alpha ** (-4.0 / 3.0) * noise_value * mass
    else:
        dv = FOUR_PI * (alpha / cs3) * s + corr + noise_value * mass / cs3
    return dv, tuple(dz)


def sigma_mass(state: SystemState, sigma: SigmaProfile,
               mode: str = "paper_approx") -> float:
    """Volatility mass S of the liquid phase.

    ``paper_approx`` collapses the volume integral to the radial one and
    returns c0.  ``shell_quadrature`` integrates sigma over a spherical
    shell around each active ball by adaptive quadrature (valid for well
    separated balls):  sum_i 4*pi * int_0^rcut sigma(r) (R_i + r)**2 dr.
    """
    if mode == "paper_approx":
        return sigma.c0
    if mode != "shell_quadrature":
        raise ValueError(f"unknown sigma_mass mode {mode!r}")
    if sigma.kind == "zero":
        return 0.0
    # raises SigmaError for non-integrable sigma * r**2 (power tail a <= 2)
    sigma.shell_coeffs()
    r_cut = sigma.tail_cutoff(1e-10)
    total = 0.0
    for b in state.balls:
        if not b.active:
            continue
        radius = b.radius

        def shell(r, radius=radius):
            return float(sigma.value(r)) * (radius + r) ** 2

        val, _ = _sciint.quad(shell, 0.0, r_cut, epsabs=1e-13, epsrel=1e-11,
                              limit=200)
        total += FOUR_PI * val
    return total


def density(state: SystemState, x) -> float:
    """Trading density at point x: 0 inside the solid phase, else the
    quasi-static superposition v_inf + sum (1 - R_i v_inf)/|x - center_i|."""
    x = np.asarray(x, dtype=float)
    dim = len(state.balls[0].center) if state.balls else 3
    if x.shape != (dim,):
        raise ValueError(f"x must be a point in R^{dim}")
    v = state.v_inf
    total = v
    for b in state.balls:
        if not b.active:
            continue
        d = float(np.linalg.norm(x - np.asarray(b.center)))
        if d < b.radius:
            return 0.0
        if d == 0.0:
            raise ValueError(
                f"x coincides with the center of ball {b.index} "
                "outside the solid phase")
        total += (1.0 - b.radius * v) / d
    return total


def total_cubed_volume(state: SystemState) -> float:
    """Sum of cubed radii; times 4*pi/3 this is the solid-phase volume."""
    return float(sum(b.z for b in state.balls))
