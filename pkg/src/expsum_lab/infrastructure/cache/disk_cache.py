"""Disk-based cache for zero lists."""

import hashlib
import json
import logging
from pathlib import Path
from typing import Any, Optional

from diskcache import Cache

from expsum_lab.config import settings

logger = logging.getLogger(__name__)


def cache_key(namespace: str, payload: Any) -> str:
    """SHA-256 of a canonical JSON dump, prefixed by a namespace."""
    text = json.dumps(payload, sort_keys=True, separators=(",", ":"), default=repr)
    return f"{namespace}:{hashlib.sha256(text.encode('utf-8')).hexdigest()}"


class CacheService:
    """Zero-list cache backed by diskcache.

    Values are stored as JSON text so a cached and an uncached run serialize
    the same numbers.
    """

    def __init__(self, cache_dir: Optional[str] = None, ttl: Optional[int] = None):
        self.cache_dir = Path(cache_dir or settings.cache_dir)
        self.cache_dir.mkdir(parents=True, exist_ok=True)
        self._cache = Cache(str(self.cache_dir))
        self.default_ttl = ttl or settings.cache_ttl_seconds

    def get(self, key: str) -> Any | None:
        """Cached value or None."""
        value = self._cache.get(key)
        if value is None:
            return None
        logger.info("Cache hit %s", key[:24])
        try:
            return json.loads(value)
        except (TypeError, json.JSONDecodeError):
            return value

    def set(self, key: str, value: Any, ttl: Optional[int] = None) -> bool:
        return bool(self._cache.set(key, json.dumps(value), expire=ttl or self.default_ttl))

    def close(self) -> None:
        self._cache.close()
