# levy_sysid/storage/providers/memory.py
"""
In-memory report storage, used by default and in tests.
"""
import asyncio
import copy
from typing import Any, Dict, List, Optional, Sequence, Tuple

from levy_sysid.storage.base import ReportStoreInterface


class InMemoryReportStore(ReportStoreInterface):
    """
    Keeps JSON documents and CSV tables in dictionaries.

    Documents are deep-copied on the way in and out, so callers cannot
    mutate stored reports.
    """

    def __init__(self) -> None:
        self._json: Dict[str, Dict[str, Any]] = {}
        self._csv: Dict[str, Tuple[List[str], List[List[str]]]] = {}
        self._lock = asyncio.Lock()

    async def save_json(self, name: str, data: Dict[str, Any]) -> None:
        async with self._lock:
            self._json[name] = copy.deepcopy(data)

    async def save_csv(self, name: str, header: Sequence[str], rows: Sequence[Sequence[str]]) -> None:
        async with self._lock:
            self._csv[name] = (list(header), [list(row) for row in rows])

    async def load_json(self, name: str) -> Optional[Dict[str, Any]]:
        data = self._json.get(name)
        return copy.deepcopy(data) if data is not None else None

    async def load_csv(self, name: str) -> Optional[Tuple[List[str], List[List[str]]]]:
        """Header and rows stored under ``name``, or None."""
        table = self._csv.get(name)
        if table is None:
            return None
        header, rows = table
        return list(header), [list(row) for row in rows]

    async def list_reports(self) -> List[str]:
        return sorted(set(self._json) | set(self._csv))

    async def clear(self) -> None:
        async with self._lock:
            self._json.clear()
            self._csv.clear()
