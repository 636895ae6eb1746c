"""Overhead analysis: operation counts, serialized sizes, timing sweeps and table output."""
