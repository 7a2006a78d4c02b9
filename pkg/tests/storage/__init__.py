"""Report storage tests."""
