from .layout import (
    CapacityError,
    Layout,
    TrivialLayout,
    VF2Layout,
    interaction_graph,
    trivial_layout,
    vf2_layout,
    vf2_mapping,
)
from .optimization import (
    InverseCancellation,
    MinimumPointController,
    MinimumPointState,
    Optimize1QGates,
    inverse_cancellation,
    minimum_point_controller,
    optimize_1q_gates,
)
from .routing import RoutingError, SwapRoute, swap_route
from .scheduling import ASAPSchedule, SchedulingError, asap_schedule
from .synthesis import (
    BasisTranslate,
    HighLevelSynthesis,
    PreExpandBoxes,
    TranslationError,
    UnsupportedOperationError,
    basis_translate,
    high_level_synthesis,
)

PASS_NAMES = (
    "TrivialLayout",
    "VF2Layout",
    "SwapRoute",
    "HighLevelSynthesis",
    "BasisTranslate",
    "InverseCancellation",
    "Optimize1QGates",
    "MinimumPoint",
    "ASAPSchedule",
)
