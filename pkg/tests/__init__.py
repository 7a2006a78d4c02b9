"""levy-sysid test suite."""
