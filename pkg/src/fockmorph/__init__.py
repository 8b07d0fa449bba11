"""Finite-truncation Fock-space algebra and spectral checks."""
