"""Randomized Frolov lattice cubature on the unit cube.

Library layout:

* matrices    - generator matrix construction and lattice-property checks
* lattice     - node enumeration and the equal-weight rule
* randomized  - random dilation/shift draws, estimates, replication
* transform   - periodizing change of variables and the transformed rule
* integrands  - separable test corpus with trusted reference integrals
* study       - convergence studies, slope fits, CSV/JSON reports
* plotting    - log-log figures rendered from study CSV files
* cli         - the `frolov` command-line front end
"""

from .integrands import Integrand, corpus, corpus_by_name, reference_integral_1d
from .lattice import (
    NodeSet,
    SupportBox,
    apply_rule,
    enumerate_nodes,
    fourier_error_bound,
    lattice_points_in_box,
)
from .matrices import (
    FrolovMatrix,
    LatticePropertyReport,
    build_chebyshev_matrix,
    build_general_poly_matrix,
    verify_property_b,
    verify_property_c,
)
from .randomized import EstimateBatch, RandomDraw, deterministic_draw, draw, m_estimate, replicate
from .study import ConvergenceReport, fit_slope, mc_baseline, run_convergence
from .transform import (
    PsiTransform,
    big_psi,
    choose_a_for_budget,
    psi,
    psi_prime,
    transformed_estimate,
)

__version__ = "0.1.0"

__all__ = [
    "Integrand",
    "corpus",
    "corpus_by_name",
    "reference_integral_1d",
    "NodeSet",
    "SupportBox",
    "apply_rule",
    "enumerate_nodes",
    "fourier_error_bound",
    "lattice_points_in_box",
    "FrolovMatrix",
    "LatticePropertyReport",
    "build_chebyshev_matrix",
    "build_general_poly_matrix",
    "verify_property_b",
    "verify_property_c",
    "EstimateBatch",
    "RandomDraw",
    "deterministic_draw",
    "draw",
    "m_estimate",
    "replicate",
    "ConvergenceReport",
    "fit_slope",
    "mc_baseline",
    "run_convergence",
    "PsiTransform",
    "big_psi",
    "choose_a_for_budget",
    "psi",
    "psi_prime",
    "transformed_estimate",
    "__version__",
]
