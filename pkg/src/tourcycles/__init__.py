"""Directed cycle counts, spectra and extremal verification for tournaments."""

from . import limits, signsearch, spectral, tournaments

__all__ = ["tournaments", "spectral", "signsearch", "limits"]
__version__ = "0.1.0"
