# levy_sysid/storage/base.py
"""
Base interfaces and providers for async report storage.
"""
from abc import ABC, abstractmethod
from typing import Any, Dict, List, Optional, Sequence


class ReportStoreInterface(ABC):
    """Interface for pluggable async stores of report documents."""

    @abstractmethod
    async def save_json(self, name: str, data: Dict[str, Any]) -> None:
        """Store a JSON document under ``name``."""
        ...

    @abstractmethod
    async def save_csv(self, name: str, header: Sequence[str], rows: Sequence[Sequence[str]]) -> None:
        """Store a table of pre-formatted cells under ``name``."""
        ...

    @abstractmethod
    async def load_json(self, name: str) -> Optional[Dict[str, Any]]:
        """Return the JSON document stored under ``name``, or None."""
        ...

    @abstractmethod
    async def list_reports(self) -> List[str]:
        """Names of all stored documents, sorted."""
        ...


class ReportStoreProvider:
    """Provider for the process-wide report store."""
    _store: Optional[ReportStoreInterface] = None

    @classmethod
    def get_store(cls) -> ReportStoreInterface:
        if cls._store is None:
            # Deferred; the providers import this module.
            from levy_sysid.storage.providers.memory import InMemoryReportStore
            cls._store = InMemoryReportStore()
        return cls._store

    @classmethod
    def set_store(cls, store: Optional[ReportStoreInterface]) -> None:
        """Install ``store``; None restores the in-memory default on next use."""
        cls._store = store
