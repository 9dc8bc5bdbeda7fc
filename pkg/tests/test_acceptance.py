"""Acceptance criteria, one test each.  Every test prints a PASS/FAIL line with its measured numbers."""
import json
import time

import numpy as np
import pytest
from scipy.special import erf

from cvcl.channels import (
    KickDistribution,
    apply_dephasing,
    apply_random_kicks_mc,
    apply_step_projector,
    gaussian_kernel,
    kernel_from_kicks,
    step_mask,
)
from cvcl.cli import run
from cvcl.core import GaussianParams, Units, centered_grid, gaussian_wavefunction, make_grid, mix, pure_state_density
from cvcl.dynamics import NewtonianScenario, delta_crel_bound, delta_crel_taylor_coefficient
from cvcl.freeops import (
    PacketSpec,
    build_counterexample_instrument,
    check_dephasing_covariance,
    counterexample_input,
    quadratic_momentum_phase,
    translation_operator,
    unitary_instrument,
    verify_c2_monotonicity_violation,
    verify_crel_monotonicity,
    verify_strong_monotonicity,
)
from cvcl.measures import (
    additivity_check,
    c2_epsilon,
    c2_g,
    c2_gaussian_closed_form,
    c2_pure_identity,
    c_rel_g,
    c_rel_pure,
    crel_jensen_bound,
)
from cvcl.witness import TwoPacketState, c2_two_packet, certify, full_grid_crosscheck, two_packet_density

from helpers import boosted_packet, random_mixture, random_sector

RATIOS = (0.1, 0.25, 0.5, 1.0, 2.0, 3.0)
ELL = 1.0
N_GRID = 2048


@pytest.fixture
def report(capsys):
    def _report(number, title, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title} | {detail}")
        assert ok, f"criterion {number} failed: {detail}"

    return _report


@pytest.fixture(scope="module")
def gaussian_sweep():
    """(sigma, state, kernel) on 2048-point grids with 6-sigma margins."""
    out = []
    for r in RATIOS:
        sigma = r * ELL
        grid = centered_grid(0.0, 6 * sigma, N_GRID)
        psi = gaussian_wavefunction(grid, GaussianParams(0.0, sigma))
        out.append((sigma, psi, pure_state_density(psi), gaussian_kernel(grid, ELL)))
    return out


def test_01_c2_closed_form_oracle(report, gaussian_sweep):
    start = time.perf_counter()
    errors = [abs(c2_g(rho, k).value - c2_gaussian_closed_form(s, ELL)) for s, _, rho, k in gaussian_sweep]
    elapsed = time.perf_counter() - start
    worst = max(errors)
    report(1, "C2 Gaussian oracle", worst <= 1e-6 and elapsed < 30, f"max |err| = {worst:.2e} (tol 1e-6), {elapsed:.2f} s")


def test_02_jensen_bound(report, gaussian_sweep):
    gaps = [c_rel_g(rho, k).value - crel_jensen_bound(s, ELL) for s, _, rho, k in gaussian_sweep]
    worst = min(gaps)
    report(2, "Jensen lower bound", worst >= -1e-8, f"min (C_rel - bound) = {worst:.3e} (tol -1e-8)")


def test_03_erf_oracle(report):
    grid = centered_grid(0.0, 6.0, N_GRID)
    rho = pure_state_density(gaussian_wavefunction(grid, GaussianParams(0.0, 1.0)))
    errors = {r: abs(c2_epsilon(rho, r) - (1 - erf(r / 2))) for r in (0.5, 1.0, 2.0, 4.0)}
    worst = max(errors.values())
    report(3, "C2_eps erf oracle", worst <= 1e-6, f"max |err| = {worst:.2e} (tol 1e-6)")


def test_04_step_projector(report):
    grid = make_grid(-10.0, 10.0, 401)
    rho, _ = two_packet_density(grid, 8.0, 1.0, 0.5, 0.5)
    idempotent = True
    for eps in (0.0, 0.7, 2.0, 5.0):
        once = apply_step_projector(rho, eps).matrix
        twice = step_mask(grid, eps) * once
        idempotent &= once.tobytes() == twice.tobytes()
    lam = min(apply_step_projector(rho, eps).min_eigenvalue for eps in np.linspace(1.0, 8.0, 15))
    report(4, "step projector idempotent, not CP", idempotent and lam < -1e-6, f"bitwise idempotent = {idempotent}, min eig = {lam:.3e}")


def test_05_monotonicity_counterexample(report):
    grid = make_grid(-10.0, 10.0, 401)
    kernel = gaussian_kernel(grid, 0.5)
    phi = PacketSpec("bump", 0.0, 1.0)
    a, b = -5.0, 5.0
    viol = verify_c2_monotonicity_violation(phi, a, b, kernel, with_crel=True)
    inst = build_counterexample_instrument(grid, 2 * phi.support_half_width, a, b, center=phi.center)
    rho = counterexample_input(phi, a, b, grid)
    strong_c2 = verify_strong_monotonicity(rho, inst, kernel, "c2")
    strong_crel = verify_strong_monotonicity(rho, inst, kernel, "crel")
    mono_crel = verify_crel_monotonicity(rho, inst, kernel)
    strong_ratio = strong_c2.lhs / strong_c2.rhs
    ok = (
        1.99 <= viol.ratio <= 2.01
        and abs(strong_ratio - 2) <= 0.02
        and mono_crel.after <= mono_crel.before + 1e-8
        and strong_crel.lhs <= strong_crel.rhs + 1e-8
    )
    detail = (
        f"C2 ratio = {viol.ratio:.6f}, strong sum / C2 = {strong_ratio:.6f}, "
        f"C_rel change {mono_crel.after - mono_crel.before:.1e}, strong C_rel lhs - rhs {strong_crel.lhs - strong_crel.rhs:.1e}"
    )
    report(5, "C2 monotonicity counterexample", ok, detail)


def test_06_covariance(report):
    grid = make_grid(-10.0, 10.0, 201)
    kernel = gaussian_kernel(grid, 0.7)
    rng = np.random.default_rng(6)
    states = [random_mixture(grid, rng) for _ in range(4)]
    t = translation_operator(grid, 25)
    trans = check_dephasing_covariance(lambda m: t @ m @ t.T, kernel, states)
    inst = build_counterexample_instrument(grid, 2.0, -5.0, 5.0)
    branch = check_dephasing_covariance(inst, kernel, states, mode="branchwise")
    nonex = check_dephasing_covariance(unitary_instrument(grid, quadratic_momentum_phase(grid, 0.5)), kernel, states)
    ok = trans <= 1e-10 and branch <= 1e-10 and nonex >= 1e-2
    report(6, "dephasing covariance", ok, f"translation {trans:.1e}, branches {branch:.1e}, quadratic phase {nonex:.3f}")


def test_07_convexity(report):
    grid = make_grid(-10.0, 10.0, 41)
    kernel = gaussian_kernel(grid, 1.5)
    rng = np.random.default_rng(7)
    worst = {"crel": -np.inf, "c2": -np.inf}
    measures = {"crel": lambda r: c_rel_g(r, kernel).value, "c2": lambda r: c2_g(r, kernel).value}
    for _ in range(200):
        a, b = random_mixture(grid, rng), random_mixture(grid, rng)
        t = float(rng.choice(np.arange(1, 10) / 10))
        m = mix([a, b], [t, 1 - t])
        for name, f in measures.items():
            worst[name] = max(worst[name], f(m) - t * f(a) - (1 - t) * f(b))
    ok = max(worst.values()) <= 1e-9
    report(7, "convexity (200 triples)", ok, f"max excess C_rel {worst['crel']:.2e}, C2 {worst['c2']:.2e} (tol 1e-9)")


def test_08_additivity(report):
    results = []
    for n, (sa, sb, la, lb) in ((32, (1.0, 0.8, 1.3, 0.6)), (40, (0.7, 1.1, 0.9, 2.0))):
        ga, gb = centered_grid(0.0, 6 * sa, n), centered_grid(0.0, 6 * sb, n)
        ra = pure_state_density(gaussian_wavefunction(ga, GaussianParams(0.0, sa)))
        rb = mix(
            [
                pure_state_density(gaussian_wavefunction(gb, GaussianParams(-0.5 * sb, 0.5 * sb))),
                pure_state_density(gaussian_wavefunction(gb, GaussianParams(0.5 * sb, 0.5 * sb))),
            ],
            [0.4, 0.6],
        )
        results.append(additivity_check(ra, gaussian_kernel(ga, la), rb, gaussian_kernel(gb, lb)))
    crel = max(r.crel_sum_defect for r in results)
    c2 = max(r.c2_product_defect for r in results)
    report(8, "additivity on product grids", crel <= 1e-6 and c2 <= 1e-10, f"C_rel defect {crel:.2e} (tol 1e-6), C2 defect {c2:.2e} (tol 1e-10)")


def test_09_witness(report):
    rng = np.random.default_rng(9)
    worst = np.inf
    for _ in range(1000):
        p, c = random_sector(rng)
        s = TwoPacketState(p, c)
        g = rng.uniform(0.0, 0.99)
        c2 = c2_two_packet(s, g)
        if rng.uniform() < 0.5 and c2 > 0:
            # on the boundary of the sublevel set, probed along the optimal quadrature
            c0, theta = c2, np.angle(c)
        else:
            c0, theta = c2 + rng.uniform(1e-12, 0.1), rng.uniform(0, 2 * np.pi)
        worst = min(worst, certify(s, theta, c0, g).witness_value)
    g = 0.4
    balanced = all(
        certify(TwoPacketState.balanced(0.3), 0.3, f * (1 - g**2) / 2, g).certified for f in (1e-6, 0.1, 0.5, 0.9, 0.999999)
    )
    cross = full_grid_crosscheck(3 * ELL, ELL / 20, 0.5, ELL, n_points=1024)
    ok = worst >= -1e-12 and balanced and cross.rel_error < 0.02
    report(9, "threshold witness", ok, f"min witness value {worst:.3e}, balanced certified = {balanced}, grid rel err {cross.rel_error:.2e}")


def test_10_monte_carlo(report):
    units = Units.natural()
    grid = centered_grid(0.0, 8.0, 256)
    rho = pure_state_density(gaussian_wavefunction(grid, GaussianParams(0.0, ELL)))
    kicks = KickDistribution.gaussian(units.hbar / ELL)
    exact = apply_dephasing(rho, kernel_from_kicks(grid, kicks, units)).entries
    err = {n: np.linalg.norm(apply_random_kicks_mc(rho, kicks, n, 42, units).entries - exact) for n in (10_000, 100_000)}
    ratio = err[10_000] / err[100_000]
    ok = err[100_000] < 5e-3 and 2.5 <= ratio <= 4.0
    report(10, "Monte Carlo kick channel", ok, f"err(1e5) = {err[100_000]:.2e}, err(1e4) = {err[10_000]:.2e}, ratio = {ratio:.3f}")


def test_11_coherence_growth(report, tmp_path):
    outs = [tmp_path / "run1", tmp_path / "run2"]
    start = time.perf_counter()
    codes = [run(["dynamics", "--out", str(o), "--plot"]) for o in outs[:1]]
    elapsed = time.perf_counter() - start
    codes += [run(["dynamics", "--out", str(o)]) for o in outs[1:]]
    same = (outs[0] / "dynamics.csv").read_bytes() == (outs[1] / "dynamics.csv").read_bytes()
    data = np.genfromtxt(outs[0] / "dynamics.csv", delimiter=",", names=True)
    delta = data["delta_crel_bound"]
    scenario = NewtonianScenario.point_source_default()
    coeff = delta_crel_taylor_coefficient(scenario)
    t_small = data["t"][1:6]
    series_rel = np.max(np.abs(delta_crel_bound(scenario, t_small) / t_small**2 / coeff - 1))
    verdict = json.loads((outs[0] / "dynamics.json").read_text())["verdict"]
    ok = (
        codes == [0, 0]
        and np.all(delta >= 0)
        and np.all(np.diff(delta) >= 0)
        and series_rel < 5e-7
        and elapsed < 5
        and same
        and verdict["validity"]["kappa_t_max"] < 1e-3
    )
    detail = f"monotone nonneg, Taylor rel dev {series_rel:.1e}, {elapsed:.2f} s, byte-identical = {same}"
    report(11, "coherence growth time series", ok, detail)


def test_12_pure_state_identities(report):
    grid = make_grid(-10.0, 10.0, 401)
    rng = np.random.default_rng(12)
    crel_gap = c2_gap = 0.0
    for _ in range(5):
        psi = boosted_packet(grid, rng.uniform(-2, 2), rng.uniform(0.5, 1.2), rng.normal())
        rho = pure_state_density(psi)
        kernel = gaussian_kernel(grid, rng.uniform(0.5, 3.0))
        crel_gap = max(crel_gap, abs(c_rel_pure(psi, kernel) - c_rel_g(rho, kernel).value))
        c2_gap = max(c2_gap, abs(c2_g(rho, kernel).value - c2_pure_identity(rho, kernel)))
    ok = crel_gap <= 1e-8 and c2_gap <= 1e-10
    report(12, "pure-state identities", ok, f"C_rel gap {crel_gap:.2e} (tol 1e-8), C2 gap {c2_gap:.2e} (tol 1e-10)")
