"""Dephasing-covariant operations: instruments, covariance checks, monotonicity tests."""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import tolerances
from .channels import DephasingKernel, dephase_matrix
from .core import DensityMatrix, Grid, WaveFunction, mix, pure_state_density
from .errors import (
    DomainError,
    EmptyIntervalError,
    GridMismatchError,
    OffLatticeError,
    OverlapError,
    PacketClippedError,
    ShiftTooLargeError,
)
from .measures import c2_g, c_rel_g


def translation_operator(grid: Grid, shift_steps: int) -> np.ndarray:
    """Lattice translation sending site i to i + shift_steps; sites pushed off the grid are dropped."""
    n = grid.n_points
    s = int(shift_steps)
    if abs(s) >= n:
        raise ShiftTooLargeError(f"|shift| must be < {n}, got {s}")
    return np.eye(n, k=-s)


def translation_truncation(psi: np.ndarray, shift_steps: int) -> float:
    """Squared norm of lattice vector ``psi`` lost off the grid edge under the shift."""
    s = int(shift_steps)
    if s == 0:
        return 0.0
    lost = psi[-s:] if s > 0 else psi[:-s]
    return float(np.sum(np.abs(lost) ** 2))


def _interval_sites(grid: Grid, lo: float, hi: float) -> np.ndarray:
    x = grid.points
    slack = 1e-9 * grid.dx
    return (x >= lo - slack) & (x <= hi + slack)


def projection_operator(grid: Grid, interval) -> np.ndarray:
    lo, hi = sorted(float(v) for v in interval)
    sites = _interval_sites(grid, lo, hi)
    if not sites.any():
        raise EmptyIntervalError(f"interval [{lo}, {hi}] contains no lattice site")
    return np.diag(sites.astype(float))


@dataclass(frozen=True, eq=False)
class KrausInstrument:
    grid: Grid
    branches: tuple
    labels: tuple = ()

    def __post_init__(self):
        branches = tuple(np.asarray(k) for k in self.branches)
        n = self.grid.n_points
        if not branches or any(k.shape != (n, n) for k in branches):
            raise ValueError("every branch must be an n x n operator on the grid")
        labels = tuple(self.labels) or tuple(f"K{i}" for i in range(len(branches)))
        object.__setattr__(self, "branches", branches)
        object.__setattr__(self, "labels", labels)
        resid = self.completeness_residual()
        if resid > tolerances.get("completeness"):
            raise DomainError(f"instrument is not complete (residual {resid:.3e})")

    def completeness_residual(self) -> float:
        total = sum(k.conj().T @ k for k in self.branches)
        return float(np.max(np.abs(total - np.eye(self.grid.n_points))))

    def branch_maps(self):
        return [lambda m, k=k: k @ m @ k.conj().T for k in self.branches]

    def __call__(self, m: np.ndarray) -> np.ndarray:
        return sum(f(m) for f in self.branch_maps())


def unitary_instrument(grid: Grid, u: np.ndarray, label: str = "U") -> KrausInstrument:
    return KrausInstrument(grid, (u,), (label,))


def identity_instrument(grid: Grid) -> KrausInstrument:
    return unitary_instrument(grid, np.eye(grid.n_points), "id")


def quadratic_position_phase(grid: Grid, alpha: float) -> np.ndarray:
    """diag(exp(i alpha x^2)); diagonal in position, hence commutes with every kernel mask."""
    return np.diag(np.exp(1j * alpha * grid.points**2))


def quadratic_momentum_phase(grid: Grid, alpha: float) -> np.ndarray:
    """exp(-i alpha p^2) on the periodic lattice (free propagation), built with the DFT."""
    n = grid.n_points
    k = 2 * np.pi * np.fft.fftfreq(n, d=grid.dx)
    return np.fft.ifft(np.exp(-1j * alpha * k**2)[:, None] * np.fft.fft(np.eye(n), axis=0), axis=0)


@dataclass(frozen=True, eq=False)
class PacketSpec:
    """Compactly supported packet: a smooth bump of half-width ``width`` or a Gaussian cut at 6 sigma."""

    kind: str
    center: float
    width: float

    def __post_init__(self):
        if self.kind not in ("bump", "gaussian"):
            raise ValueError(f"unknown packet kind {self.kind!r}")
        if not self.width > 0:
            raise DomainError("packet width must be positive")

    @property
    def support_half_width(self) -> float:
        return self.width if self.kind == "bump" else 6.0 * self.width

    def wavefunction(self, grid: Grid) -> WaveFunction:
        x = grid.points
        u = (x - self.center) / self.width
        if self.kind == "bump":
            vals = np.zeros_like(x)
            inside = np.abs(u) < 1
            vals[inside] = np.exp(-1.0 / (1.0 - u[inside] ** 2))
        else:
            vals = np.exp(-(u**2) / 4)
            vals[np.abs(u) > 6.0 + 1e-9] = 0.0
        h = self.support_half_width
        if self.center - h < grid.x_min - 1e-9 * grid.dx or self.center + h > grid.x_max + 1e-9 * grid.dx:
            raise PacketClippedError("packet support leaves the grid")
        return WaveFunction.from_unnormalized(grid, vals)


def lattice_steps(grid: Grid, length: float) -> int:
    steps = length / grid.dx
    r = int(round(steps))
    if abs(steps - r) > 1e-6:
        raise OffLatticeError(f"shift {length} is not an integer multiple of dx = {grid.dx}")
    return r


def _support_sites(grid: Grid, center: float, half_width: float) -> np.ndarray:
    return np.flatnonzero(_interval_sites(grid, center - half_width, center + half_width))


def build_counterexample_instrument(
    grid: Grid, support_width: float, a: float, b: float, center: float | None = None
) -> KrausInstrument:
    """Instrument {V_-a P_A, V_-b P_B, P_rest} with A = C + a, B = C + b.

    ``support_width`` is the full width of C, centred on ``center``
    (default: the lattice site nearest the grid midpoint).
    """
    if center is None:
        center = grid.points[grid.n_points // 2]
    n = grid.n_points
    sa, sb = lattice_steps(grid, a), lattice_steps(grid, b)
    c_sites = _support_sites(grid, center, support_width / 2)
    if c_sites.size == 0:
        raise EmptyIntervalError("support C contains no lattice site")
    a_sites, b_sites = c_sites + sa, c_sites + sb
    for sites in (a_sites, b_sites):
        if sites.min() < 0 or sites.max() >= n:
            raise PacketClippedError("translated support leaves the grid")
    if np.intersect1d(a_sites, b_sites).size:
        raise OverlapError("translated supports A and B overlap")
    p_a = np.zeros(n)
    p_a[a_sites] = 1.0
    p_b = np.zeros(n)
    p_b[b_sites] = 1.0
    k_a = translation_operator(grid, -sa) @ np.diag(p_a)
    k_b = translation_operator(grid, -sb) @ np.diag(p_b)
    k_0 = np.diag(1.0 - p_a - p_b)
    return KrausInstrument(grid, (k_a, k_b, k_0), ("A", "B", "0"))


@dataclass(frozen=True, eq=False)
class InstrumentOutcome:
    probabilities: np.ndarray
    post_states: list
    unconditional: DensityMatrix
    labels: tuple = field(default=())


def apply_instrument(rho: DensityMatrix, instrument: KrausInstrument) -> InstrumentOutcome:
    if rho.grid != instrument.grid:
        raise GridMismatchError("state and instrument live on different grids")
    outs = [f(rho.entries) for f in instrument.branch_maps()]
    probs = np.array([float(np.real(np.trace(o))) for o in outs])
    posts = []
    for p, o in zip(probs, outs):
        if p > 1e-12:
            o = 0.5 * (o + o.conj().T) / p
            if np.iscomplexobj(o) and not np.any(o.imag):
                o = o.real
            posts.append(DensityMatrix(rho.grid, o))
        else:
            posts.append(None)
    total = sum(outs)
    total = 0.5 * (total + total.conj().T)
    return InstrumentOutcome(probs, posts, DensityMatrix(rho.grid, total), instrument.labels)


def _branch_maps(channel) -> list:
    if isinstance(channel, KrausInstrument):
        return channel.branch_maps()
    if callable(channel):
        return [channel]
    raise TypeError("channel must be a KrausInstrument or a callable on matrices")


def _unconditional(channel) -> Callable:
    maps = _branch_maps(channel)
    return lambda m: sum(f(m) for f in maps)


def check_dephasing_covariance(
    channel, kernel: DephasingKernel, test_states: Sequence[DensityMatrix], mode: str = "unconditional"
) -> float:
    """Largest Frobenius norm of Lambda(Delta rho) - Delta(Lambda rho) over the test states."""
    if mode == "unconditional":
        maps = [_unconditional(channel)]
    elif mode == "branchwise":
        maps = _branch_maps(channel)
    else:
        raise ValueError(f"unknown covariance mode {mode!r}")
    worst = 0.0
    for rho in test_states:
        if rho.grid != kernel.grid:
            raise GridMismatchError("test state and kernel live on different grids")
        m = rho.entries
        dm = dephase_matrix(m, kernel)
        for f in maps:
            worst = max(worst, float(np.linalg.norm(f(dm) - dephase_matrix(f(m), kernel))))
    return worst


@dataclass(frozen=True)
class MonotonicityReport:
    before: float
    after: float
    holds: bool
    covariance_defect: float
    in_dio: bool


def _output_state(channel, rho: DensityMatrix) -> DensityMatrix:
    out = _unconditional(channel)(rho.entries)
    out = 0.5 * (out + out.conj().T)
    if np.iscomplexobj(out) and not np.any(out.imag):
        out = out.real
    return DensityMatrix(rho.grid, out)


def verify_crel_monotonicity(rho: DensityMatrix, channel, kernel: DephasingKernel) -> MonotonicityReport:
    defect = check_dephasing_covariance(channel, kernel, [rho])
    in_dio = defect <= tolerances.get("covariance")
    if not in_dio:
        warnings.warn(f"channel is outside DIO_g (covariance defect {defect:.3e})", stacklevel=2)
    before = c_rel_g(rho, kernel).value
    after = c_rel_g(_output_state(channel, rho), kernel).value
    return MonotonicityReport(before, after, after <= before + tolerances.get("monotonicity"), defect, in_dio)


@dataclass(frozen=True)
class ViolationReport:
    c2_in: float
    c2_out: float
    ratio: float
    c2_phi: float
    overlap: float
    crel_in: float | None = None
    crel_out: float | None = None


def counterexample_input(phi: PacketSpec, a: float, b: float, grid: Grid) -> DensityMatrix:
    """Equal mixture of the packet translated by a and by b."""
    pa = PacketSpec(phi.kind, phi.center + a, phi.width).wavefunction(grid)
    pb = PacketSpec(phi.kind, phi.center + b, phi.width).wavefunction(grid)
    overlap = abs(np.vdot(pa.vector, pb.vector))
    if overlap >= tolerances.get("overlap"):
        raise OverlapError(f"translated packets overlap (|<phi_a|phi_b>| = {overlap:.3e})")
    return mix([pure_state_density(pa), pure_state_density(pb)], [0.5, 0.5])


def verify_c2_monotonicity_violation(
    phi: PacketSpec, a: float, b: float, kernel: DephasingKernel, with_crel: bool = False
) -> ViolationReport:
    grid = kernel.grid
    rho = counterexample_input(phi, a, b, grid)
    inst = build_counterexample_instrument(grid, 2 * phi.support_half_width, a, b, center=phi.center)
    out = apply_instrument(rho, inst).unconditional
    phi_state = pure_state_density(phi.wavefunction(grid))
    c2_in = c2_g(rho, kernel).value
    c2_out = c2_g(out, kernel).value
    ratio = c2_out / c2_in if c2_in > 0 else 0.0
    pa = PacketSpec(phi.kind, phi.center + a, phi.width).wavefunction(grid)
    pb = PacketSpec(phi.kind, phi.center + b, phi.width).wavefunction(grid)
    report = dict(
        c2_in=c2_in,
        c2_out=c2_out,
        ratio=ratio,
        c2_phi=c2_g(phi_state, kernel).value,
        overlap=float(abs(np.vdot(pa.vector, pb.vector))),
    )
    if with_crel:
        report["crel_in"] = c_rel_g(rho, kernel).value
        report["crel_out"] = c_rel_g(out, kernel).value
    return ViolationReport(**report)


@dataclass(frozen=True)
class StrongMonotonicityReport:
    lhs: float
    rhs: float
    holds: bool
    probabilities: tuple


def verify_strong_monotonicity(
    rho: DensityMatrix, instrument: KrausInstrument, kernel: DephasingKernel, measure: str = "crel"
) -> StrongMonotonicityReport:
    """Compare sum_k p_k C(rho_k) (lhs) with C(rho) (rhs)."""
    if measure == "crel":
        quantity = lambda s: c_rel_g(s, kernel).value  # noqa: E731
    elif measure == "c2":
        quantity = lambda s: c2_g(s, kernel).value  # noqa: E731
    else:
        raise ValueError(f"unknown measure {measure!r}")
    outcome = apply_instrument(rho, instrument)
    lhs = 0.0
    for p, post in zip(outcome.probabilities, outcome.post_states):
        if post is not None:
            lhs += p * quantity(post)
    rhs = quantity(rho)
    return StrongMonotonicityReport(lhs, rhs, lhs <= rhs + tolerances.get("monotonicity"), tuple(outcome.probabilities))
