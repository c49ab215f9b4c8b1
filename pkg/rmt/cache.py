"""
On-disk cache for distribution tables.

Each table is stored as one portable ``.npz`` file holding the grid,
pdf and cdf arrays, a JSON metadata string and a format version tag.
Files are written with numpy and read back without pickling.

The cache is intentionally dumb: it stores and returns tables by key
and knows nothing about how they are built.
"""

import json
import logging
import re
from pathlib import Path
from typing import Callable, List

import numpy as np

from core.errors import TableCacheError
from .tables import DistributionTable, TableMeta

logger = logging.getLogger(__name__)

CACHE_FORMAT_VERSION = "eigensense-table/1"

_KEY_PATTERN = re.compile(r"^[A-Za-z0-9_.=-]+$")


class TableCache:
    """Directory of cached tables, one file per key."""

    def __init__(self, directory: Path):
        self.directory = Path(directory)

    def _table_path(self, key: str) -> Path:
        if not _KEY_PATTERN.match(key):
            raise TableCacheError(f"Invalid table key: {key!r}")
        path = (self.directory / f"{key}.npz").resolve()
        if not path.is_relative_to(self.directory.resolve()):
            raise TableCacheError(
                f"Invalid table key (path traversal detected): {key!r}"
            )
        return path

    def exists(self, key: str) -> bool:
        return self._table_path(key).exists()

    def save(self, key: str, table: DistributionTable) -> Path:
        self.directory.mkdir(parents=True, exist_ok=True)
        path = self._table_path(key)
        with open(path, "wb") as f:
            np.savez(
                f,
                format_version=np.array(CACHE_FORMAT_VERSION),
                meta=np.array(json.dumps(table.meta.to_dict(), sort_keys=True)),
                grid=table.grid,
                pdf=table.pdf,
                cdf=table.cdf,
            )
        logger.debug(f"Cached table {key} -> {path}")
        return path

    def load(self, key: str) -> DistributionTable:
        path = self._table_path(key)
        if not path.exists():
            raise TableCacheError(f"No cached table for key {key!r}", path=str(path))
        try:
            with np.load(path, allow_pickle=False) as data:
                version = str(data["format_version"])
                if version != CACHE_FORMAT_VERSION:
                    raise TableCacheError(
                        f"Cache format mismatch: expected '{CACHE_FORMAT_VERSION}', "
                        f"found '{version}'",
                        path=str(path),
                    )
                meta = TableMeta.from_dict(json.loads(str(data["meta"])))
                return DistributionTable(
                    grid=data["grid"], pdf=data["pdf"], cdf=data["cdf"], meta=meta
                )
        except (KeyError, ValueError, OSError) as e:
            raise TableCacheError(f"Unreadable cached table: {e}", path=str(path))

    def get_or_build(self, key: str,
                     builder: Callable[[], DistributionTable]) -> DistributionTable:
        if self.exists(key):
            logger.debug(f"Table cache hit: {key}")
            return self.load(key)
        logger.debug(f"Table cache miss: {key}")
        table = builder()
        self.save(key, table)
        return table

    def keys(self) -> List[str]:
        if not self.directory.exists():
            return []
        return sorted(p.stem for p in self.directory.glob("*.npz"))

    def delete(self, key: str):
        path = self._table_path(key)
        if path.exists():
            path.unlink()
