"""Finite-key analysis toolkit for CHSH-based device-independent QKD."""

__version__ = "0.1.0"
