"""Report store provider tests."""
