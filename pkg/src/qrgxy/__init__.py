"""Block-spin renormalization of the spin-1/2 XY chain and its 2D/3D
square/cubic-lattice analogues.

The package follows one pipeline: build the Hamiltonian of a single block of
2d + 1 spins, project onto its degenerate ground doublet to obtain the
renormalized couplings (gamma', j'), iterate that map, and measure Wootters
concurrence between corner spins of the doublet state along the flow. The
divergence of dC/dgamma at the isotropic point gamma = 0 is then fit against
the effective system size to extract the entanglement-scaling exponent.

Everything is real arithmetic: the Hamiltonians here have an even number of
sigma^y factors per term, so all matrices are real symmetric.
"""

from .blocks import (
    AxisCoefficients,
    BlockGeometry,
    CouplingParams,
    axis_coefficients,
    block_geometry,
    block_hamiltonian,
    interblock_bonds,
)
from .concurrence import (
    BlockConcurrence,
    ConcurrenceCurve,
    ReducedDensityMatrix,
    block_concurrence,
    concurrence_curve,
    concurrence_j_sweep,
    density_matrix,
    flowed_concurrence,
    partial_trace_pair,
    wootters_concurrence,
)
from .errors import (
    ConfigError,
    ContractError,
    DegeneracyError,
    QRGError,
    RealArithmeticError,
    ScalingUnderflowError,
    StructureError,
)
from .numerics import EigenDecomposition, eigh_symmetric, kron, sqrt_psd
from .pauli import (
    Axis,
    basis_label,
    embed_pauli,
    embed_y_real,
    parity_operator,
    two_site_term,
)
from .rgflow import (
    FixedPoint,
    GroundDoublet,
    RGTrajectory,
    RenormalizedOperators,
    fixed_points,
    gamma_prime,
    ground_doublet,
    renormalized_operators,
    rg_map,
    rg_trajectory,
)
from .scaling import (
    DerivativeCurve,
    ExponentEstimate,
    ScalingFit,
    derivative_curve,
    derivative_scaling,
    entanglement_exponent,
    fit_loglog,
    locate_max,
    peak_points,
    system_size,
)

__version__ = "0.1.0"

__all__ = [
    "Axis",
    "AxisCoefficients",
    "BlockConcurrence",
    "BlockGeometry",
    "ConcurrenceCurve",
    "ConfigError",
    "ContractError",
    "CouplingParams",
    "DegeneracyError",
    "DerivativeCurve",
    "EigenDecomposition",
    "ExponentEstimate",
    "FixedPoint",
    "GroundDoublet",
    "QRGError",
    "RGTrajectory",
    "RealArithmeticError",
    "ReducedDensityMatrix",
    "RenormalizedOperators",
    "ScalingFit",
    "ScalingUnderflowError",
    "StructureError",
    "axis_coefficients",
    "basis_label",
    "block_concurrence",
    "block_geometry",
    "block_hamiltonian",
    "concurrence_curve",
    "concurrence_j_sweep",
    "density_matrix",
    "derivative_curve",
    "derivative_scaling",
    "eigh_symmetric",
    "embed_pauli",
    "embed_y_real",
    "entanglement_exponent",
    "fit_loglog",
    "fixed_points",
    "flowed_concurrence",
    "gamma_prime",
    "ground_doublet",
    "interblock_bonds",
    "kron",
    "locate_max",
    "parity_operator",
    "partial_trace_pair",
    "peak_points",
    "renormalized_operators",
    "rg_map",
    "rg_trajectory",
    "sqrt_psd",
    "system_size",
    "two_site_term",
    "wootters_concurrence",
]
