"""Infrastructure knowledge package."""

from expsum_lab.infrastructure.knowledge.catalog import ExperimentCatalog

__all__ = ["ExperimentCatalog"]
