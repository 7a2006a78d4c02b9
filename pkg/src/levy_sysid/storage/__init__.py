# levy_sysid/storage/__init__.py
"""
Storage module for levy-sysid reports.
"""
# Base first; the providers import it.
try:
    from levy_sysid.storage.base import ReportStoreInterface, ReportStoreProvider
except ImportError:
    pass

try:
    from levy_sysid.storage.providers.memory import InMemoryReportStore
except ImportError:
    pass

try:
    from levy_sysid.storage.providers.file import FileReportStore
except ImportError:
    pass

__all__ = []

for name in ['ReportStoreInterface', 'ReportStoreProvider', 'InMemoryReportStore', 'FileReportStore']:
    if name in globals():
        __all__.append(name)
