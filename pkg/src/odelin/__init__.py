"""Linearizability of y'' = u0 + u1 y' + u2 y'^2 + u3 y'^3 under point transformations.

Typical use::

    from odelin import rhs_to_section, linearizable
    linearizable(rhs_to_section("y^2")).verdict   # NotLinearizable, F1 = 6
"""

from .fieldlift import (
    GeneratingValue,
    PolynomialField,
    VectorFieldJet,
    bracket,
    flow_oracle,
    lift_field,
    psi,
)
from .isotropy import (
    SpencerReport,
    SubspaceBasis,
    isotropy_algebra,
    isotropy_space,
    prolong,
    spencer_complex,
    symbol_complex,
    symbol_g,
)
from .jetspace import (
    JetPoint,
    MultiIndex,
    NotInClassError,
    Section,
    fiber_dimension,
    jet_dimension,
    jet_eval,
    project,
    representative_section,
    rhs_to_section,
)
from .obstruction import (
    HorizontalFrame,
    Linearizability,
    LinearizabilityVerdict,
    ObstructionValue,
    horizontal_frame_1,
    horizontal_frame_2,
    invariance_check,
    linearizable,
    obstruction_at,
    obstruction_form,
)
from .pointmap import (
    PointTransform,
    inverse_jet,
    lift_jet,
    pushforward_at,
    pushforward_equation,
    solution_curve_oracle,
)
from .symexpr import ZeroTestConfig, parse

__version__ = "0.1.0"
