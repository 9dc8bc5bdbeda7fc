"""Position-basis coherence under finite-resolution dephasing, on a uniform lattice."""
from .channels import (
    DephasingKernel,
    KickDistribution,
    PointerState,
    apply_dephasing,
    apply_dephasing_twice,
    apply_random_kicks_mc,
    apply_step_projector,
    gaussian_kernel,
    inverse_dephasing,
    kernel_from_kicks,
    kernel_from_pointer,
)
from .core import (
    DensityMatrix,
    GaussianParams,
    Grid,
    Units,
    WaveFunction,
    gaussian_wavefunction,
    make_grid,
    mix,
    pure_state_density,
    tensor_product,
)
from .measures import (
    additivity_check,
    c2_epsilon,
    c2_g,
    c2_gaussian_closed_form,
    c_rel_g,
    c_rel_pure,
    crel_jensen_bound,
    relative_entropy,
    von_neumann_entropy,
)

__version__ = "0.1.0"
