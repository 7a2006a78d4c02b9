# levy_sysid/storage/providers/__init__.py
"""
Report store implementations.
"""
