"""Relativistic probability amplitudes for massive particles of any spin."""

__version__ = "0.1.0"
