"""Riccati-hierarchy perturbation series for x**(2K) ground states, with Pade summation."""

__version__ = "0.1.0"

from .analysis import (  # noqa: E402
    PadeTable,
    TruncationReport,
    convergence_profile,
    global_riccati_residual,
    optimal_truncation,
    pade_diagonal,
    pade_table,
    partial_sums,
    wavefunction_profile,
)
from .bbcore import (  # noqa: E402
    AnsatzSpec,
    BBSeries,
    OrderTerm,
    PotentialSpec,
    riccati_order_residual,
    run_series,
    solve_order_j,
    solve_zeroth_order,
)
from .errors import BBError, OracleNotConverged, PadeError, SolverError  # noqa: E402
from .oracle import OracleConfig, reference_eigenvalue, scaled_eigenvalue  # noqa: E402

__all__ = [
    "AnsatzSpec",
    "BBError",
    "BBSeries",
    "OracleConfig",
    "OracleNotConverged",
    "OrderTerm",
    "PadeError",
    "PadeTable",
    "PotentialSpec",
    "SolverError",
    "TruncationReport",
    "convergence_profile",
    "global_riccati_residual",
    "optimal_truncation",
    "pade_diagonal",
    "pade_table",
    "partial_sums",
    "reference_eigenvalue",
    "riccati_order_residual",
    "run_series",
    "scaled_eigenvalue",
    "solve_order_j",
    "solve_zeroth_order",
    "wavefunction_profile",
]
