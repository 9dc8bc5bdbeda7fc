import numpy as np
import pytest
from hypothesis import given, settings

from cvcl.core import (
    DensityMatrix,
    GaussianParams,
    Units,
    WaveFunction,
    centered_grid,
    gaussian_lattice_norm,
    gaussian_wavefunction,
    make_grid,
    mix,
    pure_state_density,
    tensor_product,
)
from cvcl.errors import (
    GridMismatchError,
    InvalidRangeError,
    InvalidStateError,
    PacketClippedError,
    SizeCapError,
    WeightSumError,
)

from helpers import boosted_packet, gaussian_state, random_state, seeds


def test_grid_three_points():
    g = make_grid(-1, 1, 3)
    assert g.dx == 1.0
    np.testing.assert_array_equal(g.points, [-1.0, 0.0, 1.0])


def test_grid_unit_spacing():
    g = make_grid(0, 10, 11)
    assert g.dx == 1.0
    assert g.points[5] == 5.0


def test_grid_spacing_micrometre_scale():
    g = make_grid(-6e-4, 6e-4, 2048)
    assert g.dx == pytest.approx(1.2e-3 / 2047, rel=1e-15)
    assert g.dx == pytest.approx(5.8622e-7, rel=1e-4)


def test_grid_points_bit_reproducible():
    a = make_grid(-3.3, 7.1, 1001).points
    b = make_grid(-3.3, 7.1, 1001).points
    assert a.tobytes() == b.tobytes()
    assert np.all(np.diff(a) > 0)


@pytest.mark.parametrize("args", [(1, 1, 5), (2, 1, 5), (0, 1, 1), (0, 1, 0)])
def test_grid_rejects_bad_range(args):
    with pytest.raises(InvalidRangeError):
        make_grid(*args)


def test_units():
    si = Units.si()
    assert si.hbar == 1.054571817e-34
    assert si.gravitational_constant == 6.67430e-11
    nat = Units.natural()
    assert nat.hbar == 1.0 and nat.gravitational_constant == 1.0


def test_gaussian_normalized():
    psi = gaussian_wavefunction(centered_grid(0, 10, 401), GaussianParams(0.0, 1.0))
    assert abs(np.sum(np.abs(psi.amplitudes) ** 2) * psi.grid.dx - 1) < 1e-12


def test_gaussian_amplitude_ratio():
    # lattice points at 0 and 2 exactly
    grid = make_grid(-8, 8, 161)
    psi = gaussian_wavefunction(grid, GaussianParams(0.0, 1.0))
    x = grid.points
    i0, i2 = np.argmin(abs(x)), np.argmin(abs(x - 2))
    assert psi.amplitudes[i0].real / psi.amplitudes[i2].real == pytest.approx(np.e, rel=1e-12)


def test_gaussian_margin_rule():
    grid = make_grid(0, 400e-6, 801)
    gaussian_wavefunction(grid, GaussianParams(200e-6, 10e-6))
    with pytest.raises(PacketClippedError):
        gaussian_wavefunction(grid, GaussianParams(595e-6, 10e-6))


def test_unnormalized_wavefunction_rejected():
    grid = make_grid(0, 1, 11)
    with pytest.raises(InvalidStateError):
        WaveFunction(grid, np.ones(11))


def test_pure_state_trace_purity_hermitian():
    grid = centered_grid(0, 8, 121)
    rho = pure_state_density(boosted_packet(grid, 0.5, 1.0, 1.3))
    assert rho.trace == pytest.approx(1.0, abs=1e-12)
    assert rho.purity == pytest.approx(1.0, abs=1e-10)
    m = rho.entries
    np.testing.assert_allclose(np.abs(m), np.abs(m.T), atol=0)


def test_mix_identities(unit_gaussian):
    rho = unit_gaussian
    assert np.array_equal(mix([rho], [1.0]).entries, rho.entries)
    np.testing.assert_allclose(mix([rho, rho], [0.5, 0.5]).entries, rho.entries, atol=1e-16)


def test_mix_disjoint_packets_purity():
    grid = make_grid(-12, 12, 121)
    a = gaussian_state(grid, -5.0, 0.5)
    b = gaussian_state(grid, 5.0, 0.5)
    m = mix([a, b], [0.5, 0.5]).entries
    brute = sum(abs(m[i, j]) ** 2 for i in range(m.shape[0]) for j in range(m.shape[1]))
    assert brute == pytest.approx(0.5, abs=1e-12)


def test_mix_errors(unit_gaussian, small_grid):
    with pytest.raises(WeightSumError):
        mix([unit_gaussian, unit_gaussian], [0.6, 0.6])
    with pytest.raises(WeightSumError):
        mix([unit_gaussian, unit_gaussian], [1.5, -0.5])
    with pytest.raises(GridMismatchError):
        mix([unit_gaussian, gaussian_state(small_grid)], [0.5, 0.5])


def test_tensor_product_trace_and_purity():
    ga, gb = centered_grid(0, 6, 31), centered_grid(0, 7, 29)
    a = mix([gaussian_state(ga, -1, 0.5), gaussian_state(ga, 1, 0.5)], [0.3, 0.7])
    b = gaussian_state(gb, 0, 1.1)
    ab = tensor_product(a, b)
    assert ab.trace == pytest.approx(1.0, abs=1e-12)
    assert ab.purity == pytest.approx(a.purity * b.purity, rel=1e-12)
    assert tensor_product(gaussian_state(ga), gaussian_state(gb)).purity == pytest.approx(1.0, abs=1e-10)


def test_tensor_product_cap():
    g = centered_grid(0, 6, 80)
    rho = gaussian_state(g)
    with pytest.raises(SizeCapError):
        tensor_product(rho, rho, cap=4096)


def test_lattice_norm_defect_shrinks_under_refinement():
    # Gaussian lattice sums converge spectrally, so the defect collapses to
    # rounding level quickly; assert non-increase with a rounding allowance.
    params = GaussianParams(0.0, 1.0)
    defects = [abs(gaussian_lattice_norm(centered_grid(0, 10, n), params) - 1) for n in (9, 17, 33, 65)]
    assert defects[0] > 1e-2
    for coarse, fine in zip(defects, defects[1:]):
        assert fine <= coarse + 1e-15


def test_density_matrix_rejects_bad_input(small_grid):
    n = small_grid.n_points
    with pytest.raises(InvalidStateError):
        DensityMatrix(small_grid, 2 * np.eye(n) / n)
    m = np.eye(n) / n
    m[0, 1] = 1e-6
    with pytest.raises(InvalidStateError):
        DensityMatrix(small_grid, m)


def test_entries_are_read_only(unit_gaussian):
    with pytest.raises(ValueError):
        unit_gaussian.entries[0, 0] = 0.0


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_random_mixtures_are_states(seed):
    rho = random_state(make_grid(-10, 10, 61), seed)
    m = rho.entries
    assert np.max(np.abs(m - m.conj().T)) <= 1e-12
    assert abs(rho.trace - 1) <= 1e-10
    assert rho.min_eigenvalue() >= -1e-10


@settings(max_examples=25, deadline=None)
@given(seeds, seeds)
def test_mix_is_entrywise_convex_combination(s1, s2):
    grid = make_grid(-10, 10, 41)
    a, b = random_state(grid, s1), random_state(grid, s2)
    t = 0.3
    assert np.array_equal(mix([a, b], [t, 1 - t]).entries, t * a.entries + (1 - t) * b.entries)
