"""Fixed points of restricted growth sequences: exact laws, generating functions and sampling."""

__version__ = "0.1.0"

from .combinat import bell, stirling2, theta  # noqa: E402
from .fixdist import distribution, expectation_genfun, expectation_theta, prob_fixed  # noqa: E402
from .rgs import Rgs, enumerate_rgs, enumerate_with_max, fixed_points, validate  # noqa: E402

__all__ = [
    "__version__",
    "bell",
    "stirling2",
    "theta",
    "distribution",
    "prob_fixed",
    "expectation_theta",
    "expectation_genfun",
    "Rgs",
    "validate",
    "fixed_points",
    "enumerate_rgs",
    "enumerate_with_max",
]
