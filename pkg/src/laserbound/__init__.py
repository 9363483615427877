"""Certified upper bounds on the matrix multiplication exponent from
lower bounds on the values of tensor powers."""

__version__ = "0.1.0"

from .constructions import asym_construction, cw_construction, get_construction  # noqa: E402
from .distributions import Distribution, entropy, marginal, psi  # noqa: E402
from .power import ValueTable, analyze_power  # noqa: E402
from .solvers import SolverConfig, algorithm_A, algorithm_B, certify  # noqa: E402
from .support import kernel_basis, make_support  # noqa: E402

__all__ = [
    "Distribution",
    "SolverConfig",
    "ValueTable",
    "algorithm_A",
    "algorithm_B",
    "analyze_power",
    "asym_construction",
    "certify",
    "cw_construction",
    "entropy",
    "get_construction",
    "kernel_basis",
    "make_support",
    "marginal",
    "psi",
]
