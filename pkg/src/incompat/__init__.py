"""Compatibility of qubit observable pairs under restricted state sets.

Decides joint measurability of binary qubit observables on the full
state space and on plane/line sections of the Bloch ball, extracts the
analytic compatibility boundary for in-plane unbiased pairs, searches
the incompatibility pre-order for witnesses, and synthesizes
classical-communication strategies for distributed sampling.
"""

from ._kernels import BACKEND
from .bloch import (
    ObservablePair,
    QubitObservable,
    Vec3,
    conjugate_swap_xy,
    make_mub_pair,
    make_unbiased,
)
from .jointness import (
    BuschDiagnostics,
    JointObservable4,
    busch_f,
    depolarizing_compat,
    is_compatible,
    synthesize_joint_unbiased,
    unbiased_compat,
)
from .statesets import (
    AngleParam,
    StateSetLine,
    StateSetPlane,
    StateSetR,
    affine_count,
    parse_state_set,
    format_state_set,
    plane_from_angles,
    project_onto_R,
)
from .restriction import (
    RestrictionParams,
    S0Verdict,
    s0_compatible,
    s0_compatible_line,
    s0_compatible_plane,
    s0R_compatible_unbiased,
    tilde_observable,
    tilde_observable_line,
)
from .boundary import (
    BoundaryCoefficients,
    BoundaryCurve,
    InPlanePair,
    SumDiffFrame,
    boundary_root,
    coefficients,
    compatibility_curve,
    quartic_form,
    radical_form,
)
from .optimizer import MinResult, OptimizerConfig, bisect_threshold, minimize
from .ordering import (
    DimensionReport,
    EquivalenceVerdict,
    OrderVerdict,
    RegionClass,
    SearchConfig,
    classify_region,
    convex_region_blue,
    convex_region_oracle,
    dimensions,
    equivalence_probe,
    mub_tilted_pair,
    order_check,
    post_processing_check,
    sR_witness_search,
    tmax_for_theta,
)
from .sampling import (
    Behavior,
    CCStrategy,
    Certificate,
    behavior_of,
    certify_non_cc,
    synthesize_cc,
    verify_strategy,
)

__version__ = "0.1.0"
