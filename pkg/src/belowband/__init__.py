"""Below-band spectrum of lattice Schrodinger operators with point impurities.

The Hamiltonian is H = -Laplacian - V on the n-dimensional integer lattice,
with a delta potential of strength mu at the origin and lambda/2 on the 2n
nearest neighbors.  The package evaluates the torus Green's-function
integrals, reduces the eigenvalue problem to finite Birman-Schwinger
matrices, classifies the coupling plane into regions with fixed eigenvalue
counts and band-edge state types, and verifies everything against a
finite-lattice diagonalization oracle.
"""

__version__ = "0.1.0"

from .classify import (
    ConsistencyError,
    EigenvalueRecord,
    EvenRegion,
    OddRegion,
    RootScanError,
    SpectralConstants,
    SpectralSummary,
    ThresholdEntry,
    ThresholdReport,
    cell_label,
    classify_even,
    classify_odd,
    eigenstates,
    negative_eigenvalues,
    snap_params,
    spectral_constants,
    summarize,
    threshold_report,
)
from .green import (
    DEFAULT_CONFIG,
    DivergentIntegralError,
    GreenValues,
    QuadratureConfig,
    closed_form_a1,
    closed_form_a2,
    closed_form_a3,
    closed_form_green1,
    dispersion,
    green_threshold,
    green_values,
)
from .lattice import (
    OracleComparison,
    OracleSpectrum,
    TruncatedHamiltonian,
    build_hamiltonian,
    compare,
    lowest_eigenvalues,
)
from .quadrature import QuadratureError
from .reduction import (
    BSMatrix,
    CriticalCouplings,
    DeterminantValues,
    HyperbolaPoint,
    ModelParams,
    build_bs_matrix,
    critical_couplings,
    delta_c,
    delta_r,
    delta_s,
    determinants,
    hyperbola,
)
from .states import (
    EigenState,
    IntegrabilityClass,
    integrability_class,
    integrability_probe,
    probe_verdict,
    residual,
)

__all__ = [
    "__version__",
    # green
    "DEFAULT_CONFIG", "DivergentIntegralError", "GreenValues",
    "QuadratureConfig", "QuadratureError", "closed_form_a1", "closed_form_a2",
    "closed_form_a3", "closed_form_green1", "dispersion", "green_threshold",
    "green_values",
    # reduction
    "BSMatrix", "CriticalCouplings", "DeterminantValues", "HyperbolaPoint",
    "ModelParams", "build_bs_matrix", "critical_couplings", "delta_c",
    "delta_r", "delta_s", "determinants", "hyperbola",
    # states
    "EigenState", "IntegrabilityClass", "integrability_class",
    "integrability_probe", "probe_verdict", "residual",
    # classify
    "ConsistencyError", "EigenvalueRecord", "EvenRegion", "OddRegion",
    "RootScanError", "SpectralConstants", "SpectralSummary", "ThresholdEntry",
    "ThresholdReport", "cell_label", "classify_even", "classify_odd",
    "eigenstates", "negative_eigenvalues", "snap_params", "spectral_constants",
    "summarize", "threshold_report",
    # lattice
    "OracleComparison", "OracleSpectrum", "TruncatedHamiltonian",
    "build_hamiltonian", "compare", "lowest_eigenvalues",
]
