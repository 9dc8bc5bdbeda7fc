"""Coherence quantifiers built from the action of a dephasing kernel."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.special import erf

from . import tolerances
from .channels import (
    DephasingKernel,
    apply_dephasing,
    apply_product_dephasing,
    step_mask,
)
from .core import DensityMatrix, WaveFunction, pure_state_density, tensor_product
from .errors import DomainError, GridMismatchError, NumericalError


@dataclass(frozen=True)
class MeasureReport:
    value: float
    finite: bool
    method: str
    support_defect: float = 0.0
    cross_check: float | None = None


def _log_floor(floor):
    return tolerances.get("eig_floor") if floor is None else floor


def von_neumann_entropy(rho: DensityMatrix, floor: float | None = None) -> float:
    """Entropy in nats; eigenvalues at or below ``floor`` contribute 0 ln 0 = 0."""
    lam = rho.eigvalsh()
    lam = lam[lam > _log_floor(floor)]
    return float(-np.sum(lam * np.log(lam)))


def _spectral_weights(rho_entries: np.ndarray, vecs: np.ndarray) -> np.ndarray:
    """<v_k| rho |v_k> for each eigenvector column v_k."""
    return np.real(np.einsum("ik,ik->k", vecs.conj(), rho_entries @ vecs))


def relative_entropy(rho: DensityMatrix, sigma: DensityMatrix, floor: float | None = None) -> MeasureReport:
    """S(rho || sigma) = Tr rho ln rho - Tr rho ln sigma, in nats.

    Eigenvalues of ``sigma`` at or below the floor are dropped from ln sigma;
    the weight rho places on that subspace is reported as ``support_defect``
    and the result is declared infinite when it exceeds the support tolerance.
    """
    if rho.grid != sigma.grid:
        raise GridMismatchError("relative entropy needs states on one grid")
    floor = _log_floor(floor)
    lam = rho.eigvalsh()
    lam = lam[lam > floor]
    tr_rho_ln_rho = float(np.sum(lam * np.log(lam)))
    mu, vecs = sigma.eigh()
    w = _spectral_weights(rho.hermitian_array(), vecs)
    keep = mu > floor
    defect = float(np.clip(w[~keep], 0, None).sum())
    if defect > tolerances.get("support_defect"):
        return MeasureReport(float("inf"), False, "eigendecomposition", defect)
    value = tr_rho_ln_rho - float(np.sum(w[keep] * np.log(mu[keep])))
    return MeasureReport(value, True, "eigendecomposition", defect)


def c_rel_g(rho: DensityMatrix, kernel: DephasingKernel) -> MeasureReport:
    return relative_entropy(rho, apply_dephasing(rho, kernel))


def c_rel_pure(psi: WaveFunction, kernel: DephasingKernel, floor: float | None = None) -> float:
    """-<psi| ln Delta_g(|psi><psi|) |psi>, without touching the spectrum of the pure state."""
    dephased = apply_dephasing(pure_state_density(psi), kernel)
    mu, vecs = dephased.eigh()
    v = psi.vector
    overlaps = np.abs(vecs.conj().T @ v) ** 2
    keep = mu > _log_floor(floor)
    return float(-np.sum(overlaps[keep] * np.log(mu[keep])))


def _c2_forms(entries: np.ndarray, mask: np.ndarray):
    trace_form = float(np.sum(np.abs(entries) ** 2) - np.sum(np.abs(mask * entries) ** 2))
    integral_form = float(np.sum((1 - np.abs(mask) ** 2) * np.abs(entries) ** 2))
    return trace_form, integral_form


def c2_g(rho: DensityMatrix, kernel: DephasingKernel) -> MeasureReport:
    """Hilbert-Schmidt dephasing loss Tr(rho^2) - Tr(Delta_g(rho)^2).

    Evaluated in trace form and cross-checked against the weighted integral
    form sum (1 - |g|^2) |rho|^2; a disagreement above 1e-10 raises.
    """
    if rho.grid != kernel.grid:
        raise GridMismatchError("state and kernel live on different grids")
    trace_form, integral_form = _c2_forms(rho.entries, kernel.matrix())
    if abs(trace_form - integral_form) > 1e-10 * tolerances.scale():
        raise NumericalError(f"C2 forms disagree: {trace_form!r} vs {integral_form!r}")
    return MeasureReport(trace_form, True, "integral_form", 0.0, integral_form)


def c2_pure_identity(rho: DensityMatrix, kernel: DephasingKernel) -> float:
    """1 - Tr(Delta_g(rho)^2), equal to C2 for pure input."""
    return 1.0 - apply_dephasing(rho, kernel).purity


def offset_weights(m: np.ndarray) -> np.ndarray:
    """Hilbert-Schmidt weight at each separation |i - j| = k, both signs combined, k = 0..n-1."""
    a = np.abs(m) ** 2
    n = a.shape[0]
    w = np.empty(n)
    w[0] = np.trace(a)
    for k in range(1, n):
        w[k] = np.trace(a, offset=k) + np.trace(a, offset=-k)
    return w


def c2_epsilon(rho: DensityMatrix, epsilon: float) -> float:
    """Hilbert-Schmidt weight outside the strip |x - y| <= epsilon.

    Each lattice separation k*dx stands for the cell [(k - 1/2) dx, (k + 1/2) dx]
    and contributes the fraction of its cell lying beyond epsilon.  When
    epsilon/dx is a half-integer this is exactly the lattice sum over
    |x_i - x_j| > epsilon; otherwise it removes that sum's O(dx) boundary error.
    """
    if epsilon < 0:
        raise DomainError("epsilon must be nonnegative")
    w = offset_weights(rho.entries)
    e = epsilon / rho.grid.dx
    k = np.arange(w.size)
    frac = np.clip(k + 0.5 - e, 0.0, 1.0)
    frac[0] = np.clip(1.0 - 2.0 * e, 0.0, 1.0)
    # no lattice pair is farther apart than (n - 1) dx
    frac[-1] = min(frac[-1], float(np.clip(k[-1] - e, 0.0, 1.0)))
    return float(w @ frac)


def c2_epsilon_lattice(rho: DensityMatrix, epsilon: float) -> float:
    """Literal lattice sum of |M_ij|^2 over |x_i - x_j| > epsilon (complement of the step mask)."""
    if epsilon < 0:
        raise DomainError("epsilon must be nonnegative")
    outside = step_mask(rho.grid, epsilon) == 0
    return float(np.sum(np.abs(rho.entries[outside]) ** 2))


def _check_positive(sigma, ell_g):
    if not (sigma > 0 and ell_g > 0):
        raise DomainError(f"sigma and ell_g must be positive, got {sigma}, {ell_g}")


def c2_gaussian_closed_form(sigma: float, ell_g: float) -> float:
    _check_positive(sigma, ell_g)
    r = 4 * (sigma / ell_g) ** 2
    # 1 - 1/sqrt(1 + r) without cancellation at small r
    return float(r / (np.sqrt(1 + r) * (1 + np.sqrt(1 + r))))


def crel_jensen_bound(sigma: float, ell_g: float) -> float:
    _check_positive(sigma, ell_g)
    return float(0.5 * np.log1p(2 * (sigma / ell_g) ** 2))


def c2_epsilon_gaussian_closed_form(sigma: float, epsilon: float) -> float:
    if not sigma > 0 or epsilon < 0:
        raise DomainError("need sigma > 0 and epsilon >= 0")
    return float(1 - erf(epsilon / (2 * sigma)))


@dataclass(frozen=True)
class AdditivityReport:
    crel_sum_defect: float
    c2_product_defect: float
    crel_product: float
    crel_a: float
    crel_b: float
    c2_product: float
    c2_formula: float


def additivity_check(
    rho_a: DensityMatrix, kernel_a: DephasingKernel, rho_b: DensityMatrix, kernel_b: DephasingKernel
) -> AdditivityReport:
    """Compare product-state values of both measures against their factor-wise predictions."""
    rho_ab = tensor_product(rho_a, rho_b)
    dephased_ab = apply_product_dephasing(rho_ab, [kernel_a, kernel_b])
    crel_ab = relative_entropy(rho_ab, dephased_ab).value
    crel_a = c_rel_g(rho_a, kernel_a).value
    crel_b = c_rel_g(rho_b, kernel_b).value
    c2_ab = rho_ab.purity - dephased_ab.purity
    da = apply_dephasing(rho_a, kernel_a).purity
    db = apply_dephasing(rho_b, kernel_b).purity
    formula = rho_a.purity * rho_b.purity - da * db
    return AdditivityReport(
        crel_sum_defect=abs(crel_ab - crel_a - crel_b),
        c2_product_defect=abs(c2_ab - formula),
        crel_product=crel_ab,
        crel_a=crel_a,
        crel_b=crel_b,
        c2_product=c2_ab,
        c2_formula=formula,
    )


def min_eigenvalue(m: np.ndarray) -> float:
    arr = m.real if not np.iscomplexobj(m) or not np.any(m.imag) else m
    return float(scipy.linalg.eigvalsh(arr)[0])
