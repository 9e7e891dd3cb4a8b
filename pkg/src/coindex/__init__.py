"""Coincidence invariants of holomorphic map pairs along a hypersurface."""

__version__ = "0.1.0"
