"""Domain entities package."""

from expsum_lab.domain.entities.run import RunArtifact, RunStatus

__all__ = ["RunArtifact", "RunStatus"]
