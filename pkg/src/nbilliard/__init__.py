"""Principal angles between collision subspaces of point-mass billiards, and collision bounds built on them."""
from importlib.metadata import PackageNotFoundError, version

from .collisions import (
    BilliardSystem,
    PairIndex,
    appendix_decomposition,
    build_delta,
    closed_form_angle,
    mass_metric_angle,
    theorem_angles,
    verify_angle_theorem,
)
from .linalg import (
    AngleVector,
    MassVector,
    Metric,
    Subspace,
    check_angle_duality,
    orthogonal_complement,
    orthonormalize,
    principal_angles,
    principal_angles_oracle,
    subspace_intersection,
)
from .policy import NumericPolicy, get_policy, numeric_policy

try:
    __version__ = version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.0.0"

__all__ = [
    "AngleVector",
    "BilliardSystem",
    "MassVector",
    "Metric",
    "NumericPolicy",
    "PairIndex",
    "Subspace",
    "appendix_decomposition",
    "build_delta",
    "check_angle_duality",
    "closed_form_angle",
    "get_policy",
    "mass_metric_angle",
    "numeric_policy",
    "orthogonal_complement",
    "orthonormalize",
    "principal_angles",
    "principal_angles_oracle",
    "subspace_intersection",
    "theorem_angles",
    "verify_angle_theorem",
]
