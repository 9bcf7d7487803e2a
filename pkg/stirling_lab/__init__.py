"""Exact-arithmetic workbench for Euler-Stirling statistics on permutations and Stirling permutations."""

__version__ = "0.1.0"
