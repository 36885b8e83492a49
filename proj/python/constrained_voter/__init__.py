"""Python access to the constrained voter model simulator and its exact analytics."""

from ._cvm import (
    __version__,
    asymptotic_slope_roots,
    centrist_set,
    count_changeovers,
    estimate_consensus,
    expected_phi_uniform,
    fixation_margin,
    is_absorbing,
    phase_diagram,
    polynomial_p,
    project_edges,
    rho_c,
    root_p,
    simulate,
)

__all__ = [
    "__version__",
    "asymptotic_slope_roots",
    "centrist_set",
    "count_changeovers",
    "estimate_consensus",
    "expected_phi_uniform",
    "fixation_margin",
    "is_absorbing",
    "phase_diagram",
    "polynomial_p",
    "project_edges",
    "rho_c",
    "root_p",
    "simulate",
]
