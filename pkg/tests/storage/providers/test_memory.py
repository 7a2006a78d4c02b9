# tests/storage/providers/test_memory.py
"""
Tests for the in-memory report store.
"""
import pytest

from levy_sysid.storage.providers.memory import InMemoryReportStore


class TestInMemoryReportStore:
    """Tests for the InMemoryReportStore class."""

    @pytest.fixture
    def store(self):
        """Create a new in-memory store for each test."""
        return InMemoryReportStore()

    @pytest.mark.asyncio
    async def test_save_and_load_json(self, store):
        """Documents come back equal but not identical."""
        document = {"kappa": 1.5, "labels": ["a1", "c1"]}
        await store.save_json("report.json", document)

        loaded = await store.load_json("report.json")
        assert loaded == document

        # Mutating either copy leaves the stored one alone
        loaded["labels"].append("x")
        document["kappa"] = 0.0
        assert await store.load_json("report.json") == {"kappa": 1.5, "labels": ["a1", "c1"]}

    @pytest.mark.asyncio
    async def test_load_missing(self, store):
        assert await store.load_json("missing.json") is None
        assert await store.load_csv("missing.csv") is None

    @pytest.mark.asyncio
    async def test_save_and_load_csv(self, store):
        await store.save_csv("estimates.csv", ["seed", "x"], [["1", "0.5"], ["2", "0.25"]])
        header, rows = await store.load_csv("estimates.csv")
        assert header == ["seed", "x"]
        assert rows == [["1", "0.5"], ["2", "0.25"]]

    @pytest.mark.asyncio
    async def test_overwrite(self, store):
        await store.save_json("report.json", {"v": 1})
        await store.save_json("report.json", {"v": 2})
        assert await store.load_json("report.json") == {"v": 2}

    @pytest.mark.asyncio
    async def test_list_and_clear(self, store):
        """Listing is sorted over both kinds of documents."""
        await store.save_json("timing.json", {})
        await store.save_csv("estimates.csv", ["seed"], [])
        await store.save_json("report.json", {})
        assert await store.list_reports() == ["estimates.csv", "report.json", "timing.json"]

        await store.clear()
        assert await store.list_reports() == []
