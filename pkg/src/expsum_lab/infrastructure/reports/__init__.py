"""Run artifact writers."""

from expsum_lab.infrastructure.reports.writer import SCHEMA_VERSION, ReportWriter

__all__ = ["SCHEMA_VERSION", "ReportWriter"]
