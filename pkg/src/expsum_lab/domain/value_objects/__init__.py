"""Value objects package."""

from expsum_lab.domain.value_objects.exp_sum import ExpSum, ExpSystem, TrigPoly, TrigTerm
from expsum_lab.domain.value_objects.frequency import (
    Commensurability,
    Frequency,
    FrequencyEntry,
    FrequencyLattice,
)
from expsum_lab.domain.value_objects.polytope import (
    CoordinatedCollection,
    DevelopedCheck,
    MinkowskiDecomposition,
    Polytope,
)
from expsum_lab.domain.value_objects.results import (
    Comparison,
    MeanValueReport,
    Prediction,
    StripBox,
    ZeroRecord,
    ZeroSearch,
)
from expsum_lab.domain.value_objects.run_config import RunConfig
from expsum_lab.domain.value_objects.torus import (
    OrbitLift,
    SemiTrigClause,
    SemiTrigSet,
    TransversalVolume,
)
from expsum_lab.domain.value_objects.window import WindowSpec

__all__ = [
    "ExpSum",
    "ExpSystem",
    "TrigPoly",
    "TrigTerm",
    "Commensurability",
    "Frequency",
    "FrequencyEntry",
    "FrequencyLattice",
    "CoordinatedCollection",
    "DevelopedCheck",
    "MinkowskiDecomposition",
    "Polytope",
    "Comparison",
    "MeanValueReport",
    "Prediction",
    "StripBox",
    "ZeroRecord",
    "ZeroSearch",
    "RunConfig",
    "OrbitLift",
    "SemiTrigClause",
    "SemiTrigSet",
    "TransversalVolume",
    "WindowSpec",
]
