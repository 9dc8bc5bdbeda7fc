"""Two-packet sector algebra, threshold witnesses and the double-slit visibility link."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import tolerances
from .channels import gaussian_kernel
from .core import DensityMatrix, GaussianParams, gaussian_values, make_grid
from .errors import DegenerateKernelError, DomainError, InvalidStateError
from .measures import c2_g


@dataclass(frozen=True)
class TwoPacketState:
    """rho = [[p, c], [c*, 1 - p]] in the {L, R} basis."""

    p: float
    c: complex
    d: float = 1.0
    packet_width: float = 0.0

    def __post_init__(self):
        if not 0 <= self.p <= 1:
            raise InvalidStateError(f"population p must lie in [0, 1], got {self.p}")
        if abs(self.c) ** 2 > self.p * (1 - self.p) + tolerances.get("psd_sector"):
            raise InvalidStateError("sector matrix is not positive semidefinite")

    def width_ratio(self, ell_g: float) -> float:
        """packet_width / ell_g; the sector formulas assume this is small."""
        return self.packet_width / ell_g

    def matrix(self) -> np.ndarray:
        return np.array([[self.p, self.c], [np.conj(self.c), 1 - self.p]], dtype=complex)

    @classmethod
    def balanced(cls, theta: float = 0.0, d: float = 1.0):
        return cls(0.5, 0.5 * np.exp(1j * theta), d)


@dataclass(frozen=True)
class SlitGeometry:
    k: float
    d: float
    L: float

    def __post_init__(self):
        if not (self.k > 0 and self.d > 0 and self.L > 0):
            raise DomainError("wavevector, slit separation and screen distance must be positive")

    @property
    def far_field_parameter(self) -> float:
        return self.k * self.d**2 / self.L

    @property
    def far_field(self) -> bool:
        return self.far_field_parameter < 0.1

    def phase(self, x):
        return self.k * self.d * np.asarray(x) / self.L

    @property
    def fringe_period(self) -> float:
        return 2 * np.pi * self.L / (self.k * self.d)


def _check_g(g_at_d):
    if abs(g_at_d) > 1 + tolerances.get("kernel_bound"):
        raise DomainError(f"|g(d)| must not exceed 1, got {abs(g_at_d)}")


def c2_two_packet(state: TwoPacketState, g_at_d: complex) -> float:
    _check_g(g_at_d)
    return float(2 * (1 - abs(g_at_d) ** 2) * abs(state.c) ** 2)


def x_theta_expectation(state: TwoPacketState, theta) -> float:
    return np.real(2 * np.exp(-1j * np.asarray(theta)) * state.c)


def witness_bound(c0: float, g_at_d: complex) -> float:
    """Threshold on |Tr(X_theta rho)| above which C2 > c0 is certified."""
    if not c0 > 0:
        raise DomainError(f"threshold c0 must be positive, got {c0}")
    _check_g(g_at_d)
    loss = 1 - abs(g_at_d) ** 2
    if loss <= 0:
        raise DegenerateKernelError("|g(d)| = 1: no coherence is suppressed at this separation")
    return float(np.sqrt(2 * c0 / loss))


@dataclass(frozen=True)
class Certificate:
    witness_value: float
    certified: bool


def certify(state: TwoPacketState, theta: float, c0: float, g_at_d: complex) -> Certificate:
    value = witness_bound(c0, g_at_d) - float(x_theta_expectation(state, theta))
    return Certificate(value, value < 0)


def fringe_intensity(x, geometry: SlitGeometry, c: complex):
    return 0.5 + np.real(np.exp(-1j * geometry.phase(x)) * c)


def visibility_to_c2(V: float, g_at_d: complex) -> float:
    if not 0 <= V <= 1:
        raise DomainError(f"visibility must lie in [0, 1], got {V}")
    _check_g(g_at_d)
    return float((1 - abs(g_at_d) ** 2) / 2 * V**2)


@dataclass(frozen=True)
class CrossCheck:
    c2_grid: float
    c2_sector: float
    rel_error: float
    overlap: float
    width_ratio: float
    separation_ratio: float


def two_packet_density(grid, separation, packet_width, p, c) -> tuple[DensityMatrix, float]:
    x = grid.points
    sq = np.sqrt(grid.dx)
    left = gaussian_values(x, GaussianParams(-separation / 2, packet_width)) * sq
    right = gaussian_values(x, GaussianParams(separation / 2, packet_width)) * sq
    left /= np.linalg.norm(left)
    right /= np.linalg.norm(right)
    overlap = float(abs(left @ right))
    m = (
        p * np.outer(left, left)
        + c * np.outer(left, right)
        + np.conj(c) * np.outer(right, left)
        + (1 - p) * np.outer(right, right)
    )
    m = 0.5 * (m + m.conj().T)
    m = m / np.real(np.trace(m))
    if not np.any(m.imag):
        m = m.real
    return DensityMatrix(grid, m), overlap


def full_grid_crosscheck(
    separation: float, packet_width: float, c: complex, ell_g: float, p: float = 0.5, n_points: int = 2048
) -> CrossCheck:
    """C2 of two Gaussian packets at +-d/2 on a lattice versus the two-packet sector formula."""
    margin = 6 * packet_width
    half = separation / 2 + margin
    grid = make_grid(-half, half, n_points)
    rho, overlap = two_packet_density(grid, separation, packet_width, p, c)
    if overlap > tolerances.get("overlap"):
        warnings.warn(f"packets overlap: <L|R> = {overlap:.3e}", stacklevel=2)
    kernel = gaussian_kernel(grid, ell_g)
    c2_grid = c2_g(rho, kernel).value
    g_d = float(np.exp(-(separation**2) / (2 * ell_g**2)))
    c2_sector = c2_two_packet(TwoPacketState(p, c, separation, packet_width), g_d)
    rel = abs(c2_grid - c2_sector) / c2_sector if c2_sector > 0 else float("inf")
    return CrossCheck(c2_grid, c2_sector, rel, overlap, packet_width / ell_g, packet_width / separation)
