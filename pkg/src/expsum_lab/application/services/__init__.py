"""Services package."""

from expsum_lab.application.services.algebra import AlgebraService
from expsum_lab.application.services.formula import FormulaService
from expsum_lab.application.services.geometry import GeometryService
from expsum_lab.application.services.lattice import LatticeService
from expsum_lab.application.services.mean_value import MeanValueService
from expsum_lab.application.services.pipeline import PipelineService
from expsum_lab.application.services.torus import TorusService
from expsum_lab.application.services.zeros import ZeroFinderService

__all__ = [
    "AlgebraService",
    "FormulaService",
    "GeometryService",
    "LatticeService",
    "MeanValueService",
    "PipelineService",
    "TorusService",
    "ZeroFinderService",
]
