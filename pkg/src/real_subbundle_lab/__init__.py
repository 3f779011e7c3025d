"""Computational laboratory for real line subbundles of rank-2 bundles
on real genus-2 hyperelliptic curves."""

__version__ = "0.1.0"
