"""State factories shared by the test modules."""
import numpy as np
from hypothesis import strategies as st

from cvcl.core import (
    GaussianParams,
    WaveFunction,
    gaussian_wavefunction,
    mix,
    pure_state_density,
)


def gaussian_state(grid, x0=0.0, sigma=1.0):
    return pure_state_density(gaussian_wavefunction(grid, GaussianParams(x0, sigma)))


def boosted_packet(grid, x0, sigma, k):
    """Gaussian packet with mean wavenumber k (complex amplitudes)."""
    x = grid.points
    vals = np.exp(-((x - x0) ** 2) / (4 * sigma**2) + 1j * k * x)
    return WaveFunction.from_unnormalized(grid, vals)


def random_mixture(grid, rng, n_components=3):
    """Random convex combination of boosted Gaussian packets lying inside the grid."""
    lo, hi = grid.x_min, grid.x_max
    states = []
    for _ in range(n_components):
        sigma = rng.uniform(0.4, 1.2) * (hi - lo) / 20
        x0 = rng.uniform(lo + 6 * sigma, hi - 6 * sigma)
        k = rng.normal(0.0, 1.0) / sigma
        states.append(pure_state_density(boosted_packet(grid, x0, sigma, k)))
    w = rng.dirichlet(np.ones(n_components))
    w = w / w.sum()
    return mix(states, w)


seeds = st.integers(min_value=0, max_value=2**32 - 1)


def random_state(grid, seed, n_components=3):
    return random_mixture(grid, np.random.default_rng(seed), n_components)


def random_sector(rng):
    """Random PSD 2x2 sector parameters (p, c)."""
    p = rng.uniform(0, 1)
    r = np.sqrt(p * (1 - p)) * np.sqrt(rng.uniform(0, 1))
    return p, r * np.exp(1j * rng.uniform(0, 2 * np.pi))


__all__ = ["gaussian_state", "boosted_packet", "random_mixture", "random_state", "random_sector"]
