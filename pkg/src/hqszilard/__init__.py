"""Harmonic quantum Szilard engine: spectra, thermodynamics and a pointer-based demon."""

__version__ = "0.1.0"
