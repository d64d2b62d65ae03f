"""Finite ample groupoid workbench: homology, certification, AF analysis."""

__version__ = "0.1.0"
