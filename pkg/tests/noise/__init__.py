"""Noise family tests."""
