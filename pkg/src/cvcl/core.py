"""Position-lattice discretization of wavefunctions and density operators.

Density matrices use the convention ``M[i, j] = rho(x_i, x_j) * dx`` so that
traces, purities and eigenvalues need no further quadrature weights.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg

from . import tolerances
from .errors import (
    GridMismatchError,
    InvalidRangeError,
    InvalidStateError,
    PacketClippedError,
    SizeCapError,
    WeightSumError,
)

HBAR_SI = 1.054571817e-34
G_SI = 6.67430e-11
PACKET_MARGIN = 6.0
TENSOR_CAP = 4096


@dataclass(frozen=True)
class Grid:
    """Uniform, endpoint-inclusive position lattice."""

    x_min: float
    x_max: float
    n_points: int

    def __post_init__(self):
        if not (np.isfinite(self.x_min) and np.isfinite(self.x_max)):
            raise InvalidRangeError("grid bounds must be finite")
        if not self.x_min < self.x_max:
            raise InvalidRangeError(f"need x_min < x_max, got {self.x_min} >= {self.x_max}")
        if int(self.n_points) != self.n_points or self.n_points < 2:
            raise InvalidRangeError(f"need integer n_points >= 2, got {self.n_points}")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.n_points - 1)

    @property
    def points(self) -> np.ndarray:
        return self.x_min + np.arange(self.n_points) * self.dx

    @property
    def span(self) -> float:
        return self.x_max - self.x_min

    @property
    def offsets(self) -> np.ndarray:
        """Relative offsets k*dx for k = -(n-1)..(n-1)."""
        n = self.n_points
        return np.arange(-(n - 1), n) * self.dx


@dataclass(frozen=True)
class ProductGrid:
    """Product lattice of two or more grids; site index is row-major over factors."""

    factors: tuple

    @property
    def n_points(self) -> int:
        return int(np.prod([g.n_points for g in self.factors]))

    @property
    def dx(self) -> float:
        return float(np.prod([g.dx for g in self.factors]))


@dataclass(frozen=True)
class Units:
    hbar: float
    gravitational_constant: float
    mode: str

    def __post_init__(self):
        if self.mode not in ("SI", "natural"):
            raise ValueError(f"unknown unit mode {self.mode!r}")

    @classmethod
    def si(cls):
        return cls(HBAR_SI, G_SI, "SI")

    @classmethod
    def natural(cls):
        return cls(1.0, 1.0, "natural")

    @classmethod
    def from_mode(cls, mode):
        return cls.si() if mode == "SI" else cls.natural()


@dataclass(frozen=True)
class GaussianParams:
    x0: float
    sigma: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise InvalidRangeError(f"sigma must be positive, got {self.sigma}")

    def check_fits(self, grid: Grid, margin: float = PACKET_MARGIN):
        need = margin * self.sigma * (1 - 1e-12)
        if self.x0 - grid.x_min < need or grid.x_max - self.x0 < need:
            raise PacketClippedError(
                f"packet at {self.x0} with sigma {self.sigma} needs a {margin:g}-sigma margin "
                f"inside [{grid.x_min}, {grid.x_max}]"
            )


def _freeze(a):
    a = np.array(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class WaveFunction:
    grid: Grid
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (self.grid.n_points,):
            raise ValueError(f"amplitudes must have shape ({self.grid.n_points},)")
        object.__setattr__(self, "amplitudes", _freeze(amps))
        if abs(self.norm - 1.0) > tolerances.get("normalization"):
            raise InvalidStateError(f"wavefunction not normalized: norm {self.norm!r}")

    @property
    def norm(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2) * self.grid.dx)

    @property
    def vector(self) -> np.ndarray:
        """Unit vector in the dx-weighted lattice inner product."""
        return self.amplitudes * np.sqrt(self.grid.dx)

    @classmethod
    def from_unnormalized(cls, grid: Grid, values) -> "WaveFunction":
        values = np.asarray(values, dtype=complex)
        norm = np.sum(np.abs(values) ** 2) * grid.dx
        if not norm > 0:
            raise InvalidStateError("cannot normalize a zero wavefunction")
        return cls(grid, values / np.sqrt(norm))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Discretized density operator; entries are ``rho(x_i, x_j) * dx``.

    Construction checks shape, Hermiticity and unit trace.  Positivity costs an
    eigendecomposition, so it is checked on demand via :meth:`check_positive`.
    """

    grid: Grid | ProductGrid
    entries: np.ndarray
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        m = np.asarray(self.entries)
        if not np.iscomplexobj(m):
            m = m.astype(float)
        n = self.grid.n_points
        if m.shape != (n, n):
            raise ValueError(f"entries must have shape ({n}, {n}), got {m.shape}")
        object.__setattr__(self, "entries", _freeze(m))
        herm = np.max(np.abs(m - m.conj().T)) if n else 0.0
        if herm > tolerances.get("hermitian"):
            raise InvalidStateError(f"matrix not Hermitian (defect {herm:.3e})")
        if abs(self.trace - 1.0) > tolerances.get("trace"):
            raise InvalidStateError(f"trace {self.trace!r} differs from 1")

    @property
    def n(self) -> int:
        return self.grid.n_points

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.entries)))

    @property
    def purity(self) -> float:
        return float(np.sum(np.abs(self.entries) ** 2))

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.entries) or not np.any(self.entries.imag)

    def hermitian_array(self) -> np.ndarray:
        """Entries as a real array when the imaginary part vanishes (faster eigensolves)."""
        return np.ascontiguousarray(self.entries.real) if self.is_real else self.entries

    def eigvalsh(self) -> np.ndarray:
        if "eigvals" not in self._cache:
            self._cache["eigvals"] = scipy.linalg.eigvalsh(self.hermitian_array())
        return self._cache["eigvals"]

    def eigh(self):
        if "eigh" not in self._cache:
            w, v = scipy.linalg.eigh(self.hermitian_array(), driver="evd")
            self._cache["eigh"] = (w, v)
            self._cache["eigvals"] = w
        return self._cache["eigh"]

    def min_eigenvalue(self) -> float:
        return float(self.eigvalsh()[0])

    def check_positive(self):
        lam = self.min_eigenvalue()
        if lam < -tolerances.get("positivity"):
            raise InvalidStateError(f"matrix not positive semidefinite (min eigenvalue {lam:.3e})")
        return self


def make_grid(x_min: float, x_max: float, n_points: int) -> Grid:
    return Grid(float(x_min), float(x_max), int(n_points))


def centered_grid(center: float, half_width: float, n_points: int) -> Grid:
    return make_grid(center - half_width, center + half_width, n_points)


def gaussian_values(x: np.ndarray, params: GaussianParams) -> np.ndarray:
    s = params.sigma
    return (2 * np.pi * s**2) ** -0.25 * np.exp(-((x - params.x0) ** 2) / (4 * s**2))


def gaussian_lattice_norm(grid: Grid, params: GaussianParams) -> float:
    """Lattice norm of the analytic Gaussian before renormalization."""
    return float(np.sum(gaussian_values(grid.points, params) ** 2) * grid.dx)


def gaussian_wavefunction(grid: Grid, params: GaussianParams) -> WaveFunction:
    params.check_fits(grid)
    return WaveFunction.from_unnormalized(grid, gaussian_values(grid.points, params))


def pure_state_density(psi: WaveFunction) -> DensityMatrix:
    v = psi.vector
    m = np.outer(v, v.conj())
    if not np.any(v.imag):
        m = m.real
    # Re-symmetrize so rounding in the outer product cannot break exact Hermiticity.
    m = 0.5 * (m + m.conj().T)
    return DensityMatrix(psi.grid, m / np.real(np.trace(m)))


def mix(states: Sequence[DensityMatrix], weights) -> DensityMatrix:
    states = list(states)
    w = np.asarray(weights, dtype=float)
    if len(states) == 0 or w.shape != (len(states),):
        raise WeightSumError("need one weight per state")
    if np.any(w < 0) or abs(w.sum() - 1.0) > tolerances.get("weights"):
        raise WeightSumError(f"weights must be a probability vector, got {w.tolist()}")
    grid = states[0].grid
    for s in states[1:]:
        if s.grid != grid:
            raise GridMismatchError("all mixed states must share one grid")
    out = w[0] * states[0].entries
    for wk, s in zip(w[1:], states[1:]):
        out = out + wk * s.entries
    return DensityMatrix(grid, out)


def tensor_product(rho_a: DensityMatrix, rho_b: DensityMatrix, cap: int = TENSOR_CAP) -> DensityMatrix:
    size = rho_a.n * rho_b.n
    if size > cap:
        raise SizeCapError(f"product dimension {size} exceeds cap {cap}")
    ga = rho_a.grid.factors if isinstance(rho_a.grid, ProductGrid) else (rho_a.grid,)
    gb = rho_b.grid.factors if isinstance(rho_b.grid, ProductGrid) else (rho_b.grid,)
    return DensityMatrix(ProductGrid(ga + gb), np.kron(rho_a.entries, rho_b.entries))


def diagonal_state(grid: Grid, probabilities) -> DensityMatrix:
    p = np.asarray(probabilities, dtype=float)
    return DensityMatrix(grid, np.diag(p / p.sum()))
