"""Gaussian packet in a Newtonian potential, expanded to quadratic order about x0.

The curvature term is an inverted oscillator with rate kappa = sqrt(2 G M / x0^3);
the packet stays Gaussian and only its width enters the coherence measures.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channels import gaussian_kernel
from .core import GaussianParams, Units, gaussian_wavefunction, make_grid, pure_state_density
from .errors import DomainError
from .measures import c2_g, c2_gaussian_closed_form

SERIES_SWITCH = 1e-3
MIN_CENTER_RATIO = 10.0


@dataclass(frozen=True)
class NewtonianScenario:
    m: float
    M: float
    x0: float
    sigma0: float
    ell_g: float
    t_max: float
    n_steps: int = 200
    units: Units = field(default_factory=Units.si)

    def __post_init__(self):
        for name in ("m", "x0", "sigma0", "ell_g"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")
        if self.M < 0 or self.t_max < 0:
            raise DomainError("M and t_max must be nonnegative")
        if int(self.n_steps) != self.n_steps or self.n_steps < 1:
            raise DomainError("n_steps must be a positive integer")
        if self.x0 / self.sigma0 < MIN_CENTER_RATIO:
            raise DomainError(f"quadratic expansion needs x0/sigma0 >= {MIN_CENTER_RATIO:g}")

    @classmethod
    def point_source_default(cls, n_steps: int = 200):
        return cls(m=1e-14, M=1e-14, x0=200e-6, sigma0=10e-6, ell_g=20e-6, t_max=1.0, n_steps=n_steps)

    @property
    def spread_velocity(self) -> float:
        """hbar / (2 m sigma0): free-spreading rate of the width."""
        return self.units.hbar / (2 * self.m * self.sigma0)

    def times(self) -> np.ndarray:
        if self.t_max == 0:
            return np.zeros(1)
        return np.linspace(0.0, self.t_max, self.n_steps + 1)

    def validity(self) -> dict:
        return {"kappa_t_max": kappa(self) * self.t_max, "x0_over_sigma0": self.x0 / self.sigma0}


def kappa(scenario: NewtonianScenario) -> float:
    return float(np.sqrt(2 * scenario.units.gravitational_constant * scenario.M / scenario.x0**3))


def _sinhc(u):
    """sinh(u)/u, Taylor series near zero."""
    u = np.asarray(u, dtype=float)
    small = np.abs(u) < SERIES_SWITCH
    out = np.empty_like(u)
    us = u[small] ** 2
    out[small] = 1 + us / 6 + us**2 / 120 + us**3 / 5040
    ub = u[~small]
    out[~small] = np.sinh(ub) / ub
    return out


def width_growth(scenario: NewtonianScenario, t) -> np.ndarray:
    """sigma_t^2 - sigma0^2 written without subtraction: (sigma0^2 kappa^2 + v^2) t^2 sinhc^2(kappa t)."""
    t = np.asarray(t, dtype=float)
    k = kappa(scenario)
    s = _sinhc(k * t)
    v = scenario.spread_velocity
    return (scenario.sigma0**2 * k**2 + v**2) * t**2 * s**2


def sigma_t(scenario: NewtonianScenario, t):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0) or np.any(t > scenario.t_max * (1 + 1e-12)):
        raise DomainError("t must lie in [0, t_max]")
    out = np.sqrt(scenario.sigma0**2 + width_growth(scenario, t))
    return float(out) if out.ndim == 0 else out


def sigma_t_direct(scenario: NewtonianScenario, t):
    """cosh/sinh form; undefined at kappa = 0."""
    k = kappa(scenario)
    if k == 0:
        raise DomainError("direct branch needs kappa > 0")
    t = np.asarray(t, dtype=float)
    b = scenario.units.hbar / (2 * scenario.m * scenario.sigma0 * k)
    return np.sqrt(scenario.sigma0**2 * np.cosh(k * t) ** 2 + b**2 * np.sinh(k * t) ** 2)


def classical_center(scenario: NewtonianScenario, t):
    a0 = -scenario.units.gravitational_constant * scenario.M / scenario.x0**2
    return scenario.x0 + 0.5 * a0 * np.asarray(t, dtype=float) ** 2


def delta_crel_bound(scenario: NewtonianScenario, t):
    """Jensen bound at t minus its value at 0, as 0.5 * log1p(2 dsigma^2 / (ell^2 + 2 sigma0^2))."""
    growth = width_growth(scenario, t)
    return 0.5 * np.log1p(2 * growth / (scenario.ell_g**2 + 2 * scenario.sigma0**2))


def delta_crel_taylor_coefficient(scenario: NewtonianScenario) -> float:
    """Leading t^2 coefficient of :func:`delta_crel_bound`."""
    k = kappa(scenario)
    rate = scenario.sigma0**2 * k**2 + scenario.spread_velocity**2
    return float(rate / (scenario.ell_g**2 + 2 * scenario.sigma0**2))


COLUMNS = ("t", "sigma_t", "c2", "crel_bound", "delta_crel_bound")


def coherence_time_series(scenario: NewtonianScenario) -> dict:
    t = scenario.times()
    sig = np.sqrt(scenario.sigma0**2 + width_growth(scenario, t))
    r = 4 * (sig / scenario.ell_g) ** 2
    c2 = r / (np.sqrt(1 + r) * (1 + np.sqrt(1 + r)))
    bound = 0.5 * np.log1p(2 * (sig / scenario.ell_g) ** 2)
    return {
        "t": t,
        "sigma_t": sig,
        "c2": c2,
        "crel_bound": bound,
        "delta_crel_bound": delta_crel_bound(scenario, t),
    }


@dataclass(frozen=True)
class GridConsistency:
    rel_error: float
    center_shift_change: float
    c2_numeric: float
    c2_closed: float


def grid_consistency_check(scenario: NewtonianScenario, t_sample: float, n_points: int = 1024) -> GridConsistency:
    """Lattice C2 of the width-sigma_t packet at x_c(t) and at x0, against the closed form."""
    sig = sigma_t(scenario, t_sample)
    xc = float(classical_center(scenario, t_sample))
    lo = min(xc, scenario.x0) - 6 * sig
    hi = max(xc, scenario.x0) + 6 * sig
    grid = make_grid(lo, hi, n_points)
    kernel = gaussian_kernel(grid, scenario.ell_g)
    at_center = c2_g(pure_state_density(gaussian_wavefunction(grid, GaussianParams(xc, sig))), kernel).value
    at_x0 = c2_g(pure_state_density(gaussian_wavefunction(grid, GaussianParams(scenario.x0, sig))), kernel).value
    closed = c2_gaussian_closed_form(sig, scenario.ell_g)
    rel = abs(at_center - closed) / closed if closed > 0 else abs(at_center)
    return GridConsistency(rel, abs(at_center - at_x0), at_center, closed)

