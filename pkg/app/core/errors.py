"""
Error Types
Exception hierarchy shared by the state, optimizer, and factoring modules.
"""


class GroverianError(Exception):
    """Root of every error raised by this package."""


class StateError(GroverianError, ValueError):
    """Invalid amplitudes, dimension mismatch, bad qubit index or non-unitary gate."""


class SpecError(GroverianError, ValueError):
    """Invalid state-family parameters (periodic / ES specs, sizes below minimum)."""


class FactoringError(GroverianError, ValueError):
    """Inputs Shor's preprocessing cannot work with (prime N, N <= 3, y not coprime)."""
