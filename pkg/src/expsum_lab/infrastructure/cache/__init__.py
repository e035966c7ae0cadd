"""Cache layer."""

from expsum_lab.infrastructure.cache.disk_cache import CacheService

__all__ = ["CacheService"]
