# levy_sysid/storage/providers/file.py
"""
File-based report storage.

Each document is written to ``<directory>/<name>`` through a temporary
file that replaces the target atomically.
"""
import asyncio
import csv
import io
import json
import logging
import os
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

try:
    import aiofiles
    AIOFILES_AVAILABLE = True
except ImportError:
    AIOFILES_AVAILABLE = False
    logging.warning("aiofiles package not installed; falling back to synchronous I/O in thread pool.")

from levy_sysid.exceptions import ReportWriteError
from levy_sysid.storage.base import ReportStoreInterface

logger = logging.getLogger(__name__)


def _write_text(path: Path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(text)


def _read_text(path: Path) -> str:
    with open(path, "r", encoding="utf-8") as f:
        return f.read()


class FileReportStore(ReportStoreInterface):
    """Writes reports as files below ``directory``, creating it on first write."""

    def __init__(self, directory: Union[str, Path]):
        self.directory = Path(directory)
        self._locks: Dict[str, asyncio.Lock] = {}

    def _get_path(self, name: str) -> Path:
        if not name or Path(name).name != name:
            raise ReportWriteError(name, "report names must be plain file names")
        return self.directory / name

    def _get_lock(self, name: str) -> asyncio.Lock:
        if name not in self._locks:
            self._locks[name] = asyncio.Lock()
        return self._locks[name]

    async def _write(self, name: str, text: str) -> None:
        path = self._get_path(name)
        temp_path = path.with_name(path.name + ".tmp")
        async with self._get_lock(name):
            try:
                self.directory.mkdir(parents=True, exist_ok=True)
                if AIOFILES_AVAILABLE:
                    async with aiofiles.open(temp_path, "w", encoding="utf-8", newline="") as f:
                        await f.write(text)
                else:
                    loop = asyncio.get_running_loop()
                    await loop.run_in_executor(None, _write_text, temp_path, text)
                os.replace(temp_path, path)
            except OSError as e:
                logger.error(f"Failed to write report {path}: {e}")
                if temp_path.exists():
                    temp_path.unlink()
                raise ReportWriteError(str(path), str(e)) from e
        logger.info(f"Wrote {path}")

    async def save_json(self, name: str, data: Dict[str, Any]) -> None:
        try:
            text = json.dumps(data, indent=2, sort_keys=True, allow_nan=False) + "\n"
        except (TypeError, ValueError) as e:
            raise ReportWriteError(name, f"not serialisable as JSON: {e}") from e
        await self._write(name, text)

    async def save_csv(self, name: str, header: Sequence[str], rows: Sequence[Sequence[str]]) -> None:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        await self._write(name, buffer.getvalue())

    async def load_json(self, name: str) -> Optional[Dict[str, Any]]:
        path = self._get_path(name)
        if not path.exists():
            return None
        async with self._get_lock(name):
            try:
                if AIOFILES_AVAILABLE:
                    async with aiofiles.open(path, "r", encoding="utf-8") as f:
                        text = await f.read()
                else:
                    loop = asyncio.get_running_loop()
                    text = await loop.run_in_executor(None, _read_text, path)
                return json.loads(text)
            except (OSError, json.JSONDecodeError) as e:
                logger.error(f"Failed to load report {path}: {e}")
                return None

    async def list_reports(self) -> List[str]:
        if not self.directory.exists():
            return []
        loop = asyncio.get_running_loop()
        files = await loop.run_in_executor(None, lambda: list(self.directory.iterdir()))
        return sorted(f.name for f in files if f.is_file() and not f.name.endswith(".tmp"))
