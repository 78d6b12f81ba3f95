"""Molecular integrals over solid harmonic Gaussian orbitals.

The main engine evaluates overlap, nuclear attraction and electron repulsion
integrals directly in the solid harmonic basis; ``mmd`` and ``quadrature``
provide independent reference values.
"""

from .angular import AngularKey, binomial, double_factorial, eps_coeff, product_coupling, wigner3j
from .boys import Jet, boys, boys_batch, boys_jet
from .engine import (
    IntegralTensor,
    PrimitiveShell,
    ShellPair,
    compute_eri_tensor,
    compute_matrix,
    eri,
    gaussian_product,
    make_shell,
    nuclear_attraction,
    overlap,
    primitive_norm,
    single_center_pair_integral,
)
from .harmonics import (
    apply_harmonic_gradient,
    cartesian_expansion,
    real_solid_harmonics,
    real_solid_transform,
    solid_harmonic,
    translate_solid_harmonic,
)

__version__ = "0.1.0"
