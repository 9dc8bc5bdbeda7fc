"""Position-dephasing maps acting on lattice density matrices.

A kernel is stored on the difference lattice (2n-1 samples of g at k*dx) and
applied as a Hadamard product ``M'[i, j] = g(x_i - x_j) * M[i, j]``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import tolerances
from .core import DensityMatrix, Grid, ProductGrid, Units
from .errors import (
    DomainError,
    GridMismatchError,
    InvalidStateError,
    ResolutionError,
    SingularKernelError,
    WeightSumError,
)

MC_BATCH = 10_000
_MC_CHUNK = 1_000


@dataclass(frozen=True, eq=False)
class DephasingKernel:
    grid: Grid
    values: np.ndarray
    kind: str = "custom"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        n = self.grid.n_points
        vals = np.array(self.values)
        if not np.iscomplexobj(vals):
            vals = vals.astype(float)
        if vals.shape != (2 * n - 1,):
            raise ValueError(f"kernel needs {2 * n - 1} samples, got {vals.shape}")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        if vals[n - 1] != 1:
            raise DomainError(f"kernel must satisfy g(0) = 1 exactly, got {vals[n - 1]!r}")
        tol = tolerances.get("kernel_bound")
        if np.max(np.abs(vals)) > 1 + tol:
            raise DomainError("kernel exceeds |g| <= 1")
        if np.max(np.abs(vals[::-1] - vals.conj())) > tol:
            raise DomainError("kernel violates g(-xi) = conj(g(xi))")

    @property
    def n(self) -> int:
        return self.grid.n_points

    @property
    def offsets(self) -> np.ndarray:
        return self.grid.offsets

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.values) or not np.any(self.values.imag)

    def at(self, k: int):
        """g at offset k*dx."""
        return self.values[k + self.n - 1]

    def matrix(self) -> np.ndarray:
        """Dense mask ``[g(x_i - x_j)]``."""
        n = self.n
        vals = self.values.real if self.is_real else self.values
        # first column holds i - j = 0..n-1, first row holds i - j = 0..-(n-1)
        return scipy.linalg.toeplitz(vals[n - 1:], vals[n - 1::-1])

    def squared(self) -> "DephasingKernel":
        return DephasingKernel(self.grid, self.values**2, kind="custom", params={"squared_of": self.kind})


def _from_nonnegative_half(grid: Grid, half, kind, params) -> DephasingKernel:
    half = np.asarray(half)
    if np.iscomplexobj(half) and not np.any(half.imag):
        half = half.real
    half = half.copy()
    half[0] = 1.0
    full = np.concatenate([np.conj(half[:0:-1]), half])
    return DephasingKernel(grid, full, kind=kind, params=dict(params))


def gaussian_kernel(grid: Grid, ell_g: float) -> DephasingKernel:
    if not ell_g > 0:
        raise DomainError(f"ell_g must be positive, got {ell_g}")
    xi = np.arange(grid.n_points) * grid.dx
    return _from_nonnegative_half(grid, np.exp(-(xi**2) / (2 * ell_g**2)), "gaussian", {"ell_g": ell_g})


def identity_kernel(grid: Grid) -> DephasingKernel:
    return _from_nonnegative_half(grid, np.ones(grid.n_points), "custom", {"identity": True})


def _step_half(grid: Grid, epsilon: float) -> np.ndarray:
    k = np.arange(grid.n_points)
    return (k <= epsilon / grid.dx + 1e-9).astype(float)


def step_kernel(grid: Grid, epsilon: float) -> DephasingKernel:
    if epsilon < 0:
        raise DomainError("epsilon must be nonnegative")
    return _from_nonnegative_half(grid, _step_half(grid, epsilon), "step", {"epsilon": epsilon})


@dataclass(frozen=True, eq=False)
class KickDistribution:
    """Momentum-kick law: analytic Gaussian of spread ``eta`` or a weighted sample set."""

    kind: str
    eta: float | None = None
    momenta: np.ndarray | None = None
    weights: np.ndarray | None = None

    def __post_init__(self):
        if self.kind == "gaussian":
            if self.eta is None or not self.eta > 0:
                raise DomainError("gaussian kicks need eta > 0")
        elif self.kind == "sampled":
            p = np.asarray(self.momenta, dtype=float)
            w = np.asarray(self.weights, dtype=float)
            if p.ndim != 1 or p.shape != w.shape or p.size == 0:
                raise WeightSumError("momenta and weights must be equal-length 1-D arrays")
            if np.any(w < 0) or abs(w.sum() - 1) > tolerances.get("weights"):
                raise WeightSumError("kick weights must be a probability vector")
            object.__setattr__(self, "momenta", p)
            object.__setattr__(self, "weights", w)
        else:
            raise ValueError(f"unknown kick kind {self.kind!r}")

    @classmethod
    def gaussian(cls, eta):
        return cls("gaussian", eta=float(eta))

    @classmethod
    def sampled(cls, momenta, weights, unbiased=True):
        kicks = cls("sampled", momenta=momenta, weights=weights)
        if unbiased:
            scale = max(float(np.max(np.abs(kicks.momenta))), np.finfo(float).tiny)
            mean = float(kicks.weights @ kicks.momenta)
            if abs(mean) > 1e-10 * scale:
                raise DomainError(f"kick distribution is biased (mean momentum {mean:.3e})")
        return kicks

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self.kind == "gaussian":
            return rng.normal(0.0, self.eta, size)
        return self.momenta[rng.choice(self.momenta.size, size=size, p=self.weights)]


def kernel_from_kicks(grid: Grid, kicks: KickDistribution, units: Units) -> DephasingKernel:
    xi = np.arange(grid.n_points) * grid.dx
    if kicks.kind == "gaussian":
        half = np.exp(-(kicks.eta**2) * xi**2 / (2 * units.hbar**2))
        params = {"eta": kicks.eta, "ell_g": units.hbar / kicks.eta}
    else:
        half = np.exp(1j * np.outer(xi, kicks.momenta) / units.hbar) @ kicks.weights
        params = {"n_kicks": int(kicks.momenta.size)}
    return _from_nonnegative_half(grid, half, "from_kicks", params)


@dataclass(frozen=True, eq=False)
class PointerState:
    """Meter wavepacket m(z) on its own lattice, with coupling scale s = lambda * t."""

    grid: Grid
    amplitudes: np.ndarray
    scale: float

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (self.grid.n_points,):
            raise ValueError("pointer amplitudes do not match the meter grid")
        norm = np.sum(np.abs(amps) ** 2) * self.grid.dx
        if abs(norm - 1) > tolerances.get("normalization"):
            raise InvalidStateError(f"pointer state not normalized (norm {norm!r})")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def gaussian(cls, grid: Grid, width: float, scale: float = 1.0, center: float = 0.0):
        z = grid.points
        m = np.exp(-((z - center) ** 2) / (4 * width**2))
        m = m / np.sqrt(np.sum(m**2) * grid.dx)
        return cls(grid, m, scale)

    def autocorrelation(self) -> np.ndarray:
        """G(k*dz) = sum_u m(u) m*(u + k*dz) dz for k = 0..n-1."""
        m = self.amplitudes
        n = m.size
        full = np.correlate(m, m, mode="full")  # full[n-1+k] = sum_u m[u+k] conj(m[u])
        return np.conj(full[n - 1:]) * self.grid.dx


def kernel_from_pointer(pointer: PointerState, grid: Grid) -> DephasingKernel:
    G = pointer.autocorrelation()
    dz = pointer.grid.dx
    z_needed = abs(pointer.scale) * np.arange(grid.n_points) * grid.dx
    z_avail = (G.size - 1) * dz
    if z_needed[-1] > z_avail * (1 + 1e-12):
        raise ResolutionError(
            f"s*xi reaches {z_needed[-1]:.3e} but the meter lattice only resolves {z_avail:.3e}"
        )
    lags = np.arange(G.size) * dz
    half = np.interp(z_needed, lags, G.real) + 1j * np.interp(z_needed, lags, G.imag)
    if pointer.scale < 0:
        half = np.conj(half)
    return _from_nonnegative_half(grid, half, "from_pointer", {"scale": pointer.scale, "dz": dz})


def _check_grid(rho_grid, kernel: DephasingKernel):
    if rho_grid != kernel.grid:
        raise GridMismatchError("state and kernel live on different grids")


def dephase_matrix(m: np.ndarray, kernel: DephasingKernel) -> np.ndarray:
    """Hadamard product with the kernel mask; accepts any n x n array."""
    mask = kernel.matrix()
    return mask * m


def apply_dephasing(rho: DensityMatrix, kernel: DephasingKernel) -> DensityMatrix:
    _check_grid(rho.grid, kernel)
    return DensityMatrix(rho.grid, dephase_matrix(rho.entries, kernel))


def apply_dephasing_twice(rho: DensityMatrix, kernel: DephasingKernel) -> DensityMatrix:
    return apply_dephasing(apply_dephasing(rho, kernel), kernel)


def product_mask(kernels) -> np.ndarray:
    mask = np.ones((1, 1))
    for k in kernels:
        mask = np.kron(mask, k.matrix())
    return mask


def apply_product_dephasing(rho: DensityMatrix, kernels) -> DensityMatrix:
    """Local dephasing on each factor of a product lattice."""
    if not isinstance(rho.grid, ProductGrid):
        raise GridMismatchError("product dephasing needs a state on a product grid")
    if tuple(k.grid for k in kernels) != rho.grid.factors:
        raise GridMismatchError("one kernel per factor grid is required")
    return DensityMatrix(rho.grid, product_mask(kernels) * rho.entries)


def _mc_generator(seed: int, batch: int) -> np.random.Generator:
    # counter-based stream: batch b starts at an independent Philox counter block
    return np.random.Generator(np.random.Philox(key=int(seed), counter=[0, 0, 0, int(batch)]))


def sample_kicks(kicks: KickDistribution, n_samples: int, seed: int, batch_size: int = MC_BATCH) -> np.ndarray:
    """Kick momenta drawn in fixed-size seeded batches, concatenated in batch order."""
    out = []
    remaining = n_samples
    b = 0
    while remaining > 0:
        size = min(batch_size, remaining)
        out.append(kicks.draw(_mc_generator(seed, b), size))
        remaining -= size
        b += 1
    return np.concatenate(out)


def empirical_kernel(grid: Grid, momenta: np.ndarray, units: Units) -> DephasingKernel:
    """Sample mean of exp(i p xi / hbar): the exact kernel of an equal-weight unitary mixture."""
    xi = np.arange(grid.n_points) * grid.dx
    acc = np.zeros(grid.n_points, dtype=complex)
    for start in range(0, momenta.size, _MC_CHUNK):
        p = momenta[start:start + _MC_CHUNK]
        acc += np.exp(1j * np.outer(p, xi) / units.hbar).sum(axis=0)
    return _from_nonnegative_half(grid, acc / momenta.size, "custom", {"n_samples": int(momenta.size)})


def apply_kick_unitaries(rho: DensityMatrix, momenta, units: Units) -> np.ndarray:
    """Direct average of U_p rho U_p^dagger with U_p = diag(exp(i p x / hbar))."""
    x = rho.grid.points
    out = np.zeros(rho.entries.shape, dtype=complex)
    for p in np.atleast_1d(momenta):
        u = np.exp(1j * p * x / units.hbar)
        out += (u[:, None] * rho.entries) * u.conj()[None, :]
    return out / len(np.atleast_1d(momenta))


def apply_random_kicks_mc(
    rho: DensityMatrix, kicks: KickDistribution, n_samples: int, seed: int, units: Units
) -> DensityMatrix:
    """Monte Carlo random-kick channel (1/N) sum_s U_{p_s} rho U_{p_s}^dagger.

    Diagonal unitaries act entrywise, so the average collapses to a Hadamard
    product with the empirical characteristic function of the drawn kicks.
    """
    if n_samples < 1:
        raise DomainError("n_samples must be >= 1")
    momenta = sample_kicks(kicks, n_samples, seed)
    kernel = empirical_kernel(rho.grid, momenta, units)
    return DensityMatrix(rho.grid, dephase_matrix(rho.entries, kernel))


@dataclass(frozen=True, eq=False)
class StepResult:
    matrix: np.ndarray
    min_eigenvalue: float
    is_state: bool


def step_mask(grid: Grid, epsilon: float) -> np.ndarray:
    return step_kernel(grid, epsilon).matrix()


def apply_step_projector(rho: DensityMatrix, epsilon: float) -> StepResult:
    if epsilon < 0:
        raise DomainError("epsilon must be nonnegative")
    out = step_mask(rho.grid, epsilon) * rho.entries
    lam = float(scipy.linalg.eigvalsh(out.real if not np.iscomplexobj(out) else out)[0])
    return StepResult(out, lam, lam >= -tolerances.get("positivity"))


@dataclass(frozen=True, eq=False)
class InverseResult:
    matrix: np.ndarray
    is_state: bool
    min_eigenvalue: float
    trace_hs: float


def inverse_dephasing(rho: DensityMatrix, kernel: DephasingKernel, floor: float = 1e-12) -> InverseResult:
    """Partial inverse rho(x, y) / g(x - y); refuses when |g| drops below ``floor``."""
    _check_grid(rho.grid, kernel)
    gmin = float(np.min(np.abs(kernel.values)))
    if gmin < floor:
        raise SingularKernelError(f"|g| reaches {gmin:.3e}, below floor {floor:.1e}")
    out = rho.entries / kernel.matrix()
    herm = float(np.max(np.abs(out - out.conj().T)))
    tr = float(np.real(np.trace(out)))
    arr = out.real if not np.iscomplexobj(out) or not np.any(out.imag) else 0.5 * (out + out.conj().T)
    lam = float(scipy.linalg.eigvalsh(arr)[0])
    ok = (
        herm <= tolerances.get("hermitian")
        and abs(tr - 1) <= tolerances.get("trace")
        and lam >= -tolerances.get("inverse_state")
    )
    return InverseResult(out, bool(ok), lam, float(np.sum(np.abs(out) ** 2)))


def offdiagonal_weight(m: np.ndarray) -> float:
    """Hilbert-Schmidt weight off the main diagonal."""
    return float(np.sum(np.abs(m) ** 2) - np.sum(np.abs(np.diag(m)) ** 2))
