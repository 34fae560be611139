"""Harmonic analysis toolkit for first-order operators on T1 / SU(2) products."""

__version__ = "0.1.0"
