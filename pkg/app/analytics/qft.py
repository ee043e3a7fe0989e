"""
Quantum Fourier Transform
Forward/inverse QFT on state vectors and the closed-form amplitudes of a
transformed periodic state.

Kernel: y_j = Q^{-1/2} sum_k e^{-2 pi i jk/Q} x_k (numpy's forward FFT sign).
The inverse uses the conjugate kernel.
"""

import logging
import math

import numpy as np

from app.analytics.states import PeriodicSpec
from app.core.statevec import StateVector

logger = logging.getLogger(__name__)


def qft(psi: StateVector) -> StateVector:
    """O(Q log Q) transform of the amplitude vector."""
    y = np.fft.fft(psi.amplitudes) / math.sqrt(psi.dim)
    return StateVector.from_amplitudes(y)


def inverse_qft(psi: StateVector) -> StateVector:
    y = np.fft.ifft(psi.amplitudes) * math.sqrt(psi.dim)
    return StateVector.from_amplitudes(y)


def qft_matrix(q: int) -> np.ndarray:
    """Dense Q x Q unitary with entries e^{-2 pi i jk/Q}/sqrt(Q)."""
    Q = 2 ** q
    jk = np.outer(np.arange(Q), np.arange(Q)) % Q
    return np.exp(-2j * np.pi * jk / Q) / math.sqrt(Q)


def naive_dft(psi: StateVector) -> StateVector:
    """O(Q^2) reference transform, kept as an oracle for `qft`."""
    return StateVector.from_amplitudes(qft_matrix(psi.q) @ psi.amplitudes)


def periodic_qft_amplitudes(spec: PeriodicSpec) -> np.ndarray:
    """
    Closed-form QFT of a periodic state.

    y_j = (QA)^{-1/2} sin(pi j r A/Q)/sin(pi j r/Q) e^{-(j/Q) 2 pi i [l + r(A-1)/2]}

    All angles are reduced in integer arithmetic first (multiples of pi/Q
    taken mod 2Q). Where j*r is a multiple of Q the sine ratio is replaced by
    its limit A(-1)^{n(A-1)}, n = jr/Q, decided exactly on integers.
    """
    Q, r, l, A = spec.Q, spec.r, spec.l, spec.A
    two_q = 2 * Q
    j = np.arange(Q, dtype=np.int64)

    jr = (j * r) % two_q
    jra = (j * ((r * A) % two_q)) % two_q
    den = np.sin(np.pi * jr / Q)
    num = np.sin(np.pi * jra / Q)

    singular = (j * r) % Q == 0
    ratio = np.empty(Q, dtype=np.float64)
    ratio[~singular] = num[~singular] / den[~singular]
    n = (j[singular] * r) // Q
    ratio[singular] = A * np.where((n * (A - 1)) % 2 == 0, 1.0, -1.0)

    # phase exponent -(pi i / Q) * j * (2l + r(A-1)), reduced mod 2Q
    phase_steps = (j * ((2 * l + r * (A - 1)) % two_q)) % two_q
    phase = np.exp(-1j * np.pi * phase_steps / Q)

    return ratio * phase / math.sqrt(Q * A)
