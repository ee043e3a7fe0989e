"""
State Vectors
Dense pure states of q qubits and product states in (x, theta) form.

Bit convention: basis index k is the binary string j_1 ... j_q with j_1 the
MOST significant bit, so qubit m (1-based) is axis m-1 of the (2,)*q tensor
view. Phase exponents of the phased ES gates and of the QFT oracle depend on it.
"""

import json
import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np

from app.core.config import settings
from app.core.errors import StateError

logger = logging.getLogger(__name__)

NORM_TOLERANCE = 1e-10
UNITARY_TOLERANCE = 1e-10


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, copy=True)
    array.flags.writeable = False
    return array


def wrap_phase(theta) -> np.ndarray:
    """Map angles into [-pi, pi)."""
    return (np.asarray(theta, dtype=np.float64) + np.pi) % (2 * np.pi) - np.pi


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized amplitude vector over the 2^q computational basis."""

    q: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if self.q < 1:
            raise StateError(f"Qubit count must be >= 1, got {self.q}")
        if self.q > settings.max_qubits:
            raise StateError(f"Qubit count {self.q} exceeds the configured maximum {settings.max_qubits}")
        if amps.shape != (2 ** self.q,):
            raise StateError(f"Expected {2 ** self.q} amplitudes for q={self.q}, got shape {amps.shape}")
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > NORM_TOLERANCE:
            raise StateError(f"State is not normalized (norm={norm:.12g})")
        object.__setattr__(self, "amplitudes", _frozen(amps))

    @classmethod
    def from_amplitudes(cls, amplitudes: Sequence[complex]) -> "StateVector":
        """
        Build a state from raw amplitudes, renormalizing them.

        Raises:
            StateError: length is not a power of two, or the vector is all zero
        """
        amps = np.asarray(amplitudes, dtype=np.complex128).ravel()
        size = amps.size
        if size < 2 or size & (size - 1):
            raise StateError(f"Amplitude count must be a power of two >= 2, got {size}")
        norm = float(np.linalg.norm(amps))
        if norm == 0.0:
            raise StateError("Cannot normalize the all-zero vector")
        return cls(q=size.bit_length() - 1, amplitudes=amps / norm)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def as_tensor(self) -> np.ndarray:
        """(2,)*q view; axis m-1 is qubit m."""
        return self.amplitudes.reshape((2,) * self.q)

    def support(self, atol: float = 1e-12) -> np.ndarray:
        """Basis indices with non-negligible amplitude."""
        return np.flatnonzero(np.abs(self.amplitudes) > atol)

    def allclose(self, other: "StateVector", atol: float = 1e-10) -> bool:
        return self.q == other.q and bool(np.allclose(self.amplitudes, other.amplitudes, atol=atol, rtol=0.0))

    def equal_up_to_phase(self, other: "StateVector", atol: float = 1e-10) -> bool:
        """True if the states differ only by a global phase."""
        if self.q != other.q:
            return False
        inner = np.vdot(other.amplitudes, self.amplitudes)
        if abs(inner) < 1e-15:
            return False
        aligned = other.amplitudes * (inner / abs(inner))
        return bool(np.allclose(self.amplitudes, aligned, atol=atol, rtol=0.0))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "q": self.q,
            "amplitudes": [[float(a.real), float(a.imag)] for a in self.amplitudes],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, payload: Dict[str, Any]) -> "StateVector":
        try:
            q = int(payload["q"])
            pairs = np.asarray(payload["amplitudes"], dtype=np.float64)
        except (KeyError, TypeError, ValueError) as e:
            raise StateError(f"Malformed state payload: {e}") from e
        if pairs.ndim != 2 or pairs.shape[1] != 2:
            raise StateError("Amplitudes must be a list of [re, im] pairs")
        state = cls.from_amplitudes(pairs[:, 0] + 1j * pairs[:, 1])
        if state.q != q:
            raise StateError(f"Declared q={q} does not match {pairs.shape[0]} amplitudes")
        return state

    @classmethod
    def from_json(cls, text: str) -> "StateVector":
        try:
            payload = json.loads(text)
        except json.JSONDecodeError as e:
            raise StateError(f"Invalid state JSON: {e}") from e
        return cls.from_dict(payload)


@dataclass(frozen=True, eq=False)
class ProductState:
    """
    Separable state: qubit m is sqrt(1-x_m)|0> + sqrt(x_m) e^{i theta_m}|1>.

    x_m in [0, 1] is the balance, theta_m in [-pi, pi) the relative phase.
    """

    x: np.ndarray
    theta: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=np.float64).ravel()
        theta = wrap_phase(np.asarray(self.theta, dtype=np.float64).ravel())
        if x.size < 1:
            raise StateError("Product state needs at least one qubit")
        if x.shape != theta.shape:
            raise StateError(f"x and theta lengths differ ({x.size} vs {theta.size})")
        if np.any(x < 0.0) or np.any(x > 1.0) or not np.all(np.isfinite(x)):
            raise StateError("Every x_m must lie in [0, 1]")
        object.__setattr__(self, "x", _frozen(x))
        object.__setattr__(self, "theta", _frozen(theta))

    @property
    def q(self) -> int:
        return self.x.size

    @classmethod
    def uniform(cls, q: int) -> "ProductState":
        """The complete ES point |+>^q (x = 1/2, theta = 0)."""
        return cls(x=np.full(q, 0.5), theta=np.zeros(q))

    @classmethod
    def basis(cls, q: int, k: int) -> "ProductState":
        """The basis state |k> (each x_m is the bit j_m)."""
        if not 0 <= k < 2 ** q:
            raise StateError(f"Basis index {k} out of range for q={q}")
        bits = [(k >> (q - 1 - i)) & 1 for i in range(q)]
        return cls(x=np.array(bits, dtype=np.float64), theta=np.zeros(q))

    @classmethod
    def random(cls, q: int, rng: np.random.Generator) -> "ProductState":
        """Uniform point in the 2q-dimensional parameter box."""
        return cls(x=rng.uniform(0.0, 1.0, size=q), theta=rng.uniform(-np.pi, np.pi, size=q))

    def qubit_vectors(self) -> np.ndarray:
        """(q, 2) array; row m-1 is the single-qubit state of qubit m."""
        vecs = np.empty((self.q, 2), dtype=np.complex128)
        vecs[:, 0] = np.sqrt(1.0 - self.x)
        vecs[:, 1] = np.sqrt(self.x) * np.exp(1j * self.theta)
        return vecs

    def with_qubit(self, m: int, x_m: float, theta_m: float) -> "ProductState":
        """Copy with qubit m (1-based) replaced."""
        x = np.array(self.x)
        theta = np.array(self.theta)
        x[m - 1] = min(1.0, max(0.0, x_m))
        theta[m - 1] = theta_m
        return ProductState(x=x, theta=theta)

    def to_dict(self) -> Dict[str, Any]:
        return {"x": [float(v) for v in self.x], "theta": [float(v) for v in self.theta]}


def params_from_qubit_vector(vec: np.ndarray) -> Tuple[float, float]:
    """(x, theta) of a single-qubit vector, ignoring its global phase."""
    vec = np.asarray(vec, dtype=np.complex128)
    weight = float(np.vdot(vec, vec).real)
    x = float(abs(vec[1]) ** 2 / weight)
    if abs(vec[0]) > 0.0 and abs(vec[1]) > 0.0:
        theta = float(np.angle(vec[1]) - np.angle(vec[0]))
    else:
        theta = 0.0
    return min(1.0, max(0.0, x)), float(wrap_phase(theta))


def _check_qubit(q: int, m: int) -> None:
    if not 1 <= m <= q:
        raise StateError(f"Qubit index {m} out of range [1, {q}]")


def expand(phi: ProductState) -> StateVector:
    """Materialize a product state as a dense vector."""
    vecs = phi.qubit_vectors()
    amps = vecs[0]
    for v in vecs[1:]:
        amps = np.kron(amps, v)
    return StateVector(q=phi.q, amplitudes=amps)


def partial_overlaps(phi: ProductState, psi: StateVector, keep: Sequence[int] = ()) -> np.ndarray:
    """
    Contract psi with conj(phi) on every qubit except those in `keep`.

    Args:
        phi: Product state (its factors on `keep` are ignored)
        psi: State of the same size
        keep: 1-based qubit indices left open

    Returns:
        Array of shape (2,)*len(keep), open axes in ascending qubit order.
        With keep=() this is the scalar <phi|psi>. Cost is O(Q).
    """
    if phi.q != psi.q:
        raise StateError(f"Dimension mismatch: product state has {phi.q} qubits, state has {psi.q}")
    for m in keep:
        _check_qubit(psi.q, m)
    open_axes = {m - 1 for m in keep}
    conj_vecs = np.conj(phi.qubit_vectors())

    # contract from the last axis so lower axis numbers stay valid
    t = psi.as_tensor()
    for axis in reversed(range(psi.q)):
        if axis in open_axes:
            continue
        t = np.tensordot(t, conj_vecs[axis], axes=([axis], [0]))
    return np.asarray(t)


def overlap(phi: ProductState, psi: StateVector) -> complex:
    """<phi|psi> without materializing phi."""
    return complex(partial_overlaps(phi, psi))


def tensor(psi_a: StateVector, psi_b: StateVector) -> StateVector:
    """psi_a (x) psi_b with psi_a's qubits most significant."""
    return StateVector(q=psi_a.q + psi_b.q, amplitudes=np.kron(psi_a.amplitudes, psi_b.amplitudes))


def apply_local_unitary(psi: StateVector, m: int, unitary: np.ndarray) -> StateVector:
    """
    Apply a 2x2 unitary on qubit m (1-based, qubit 1 most significant).

    Raises:
        StateError: the matrix is not 2x2 unitary, or m is out of range
    """
    _check_qubit(psi.q, m)
    u = np.asarray(unitary, dtype=np.complex128)
    if u.shape != (2, 2):
        raise StateError(f"Expected a 2x2 matrix, got shape {u.shape}")
    if not np.allclose(u.conj().T @ u, np.eye(2), atol=UNITARY_TOLERANCE, rtol=0.0):
        raise StateError("Matrix is not unitary")

    t = np.tensordot(u, psi.as_tensor(), axes=([1], [m - 1]))
    t = np.moveaxis(t, 0, m - 1)
    return StateVector(q=psi.q, amplitudes=t.reshape(-1))


def hamming(k1: int, k2: int) -> int:
    """Number of bits on which two basis indices differ."""
    return (int(k1) ^ int(k2)).bit_count()


def basis_bits(k: int, q: int) -> np.ndarray:
    """Bits j_1..j_q of k (j_1 most significant)."""
    return np.array([(k >> (q - 1 - i)) & 1 for i in range(q)], dtype=np.int8)


def max_amplitude_index(psi: StateVector, among: Optional[Sequence[int]] = None) -> int:
    """Index of the largest |amplitude| (first one on ties)."""
    mags = np.abs(psi.amplitudes)
    if among is not None and len(among) > 0:
        among = np.asarray(among)
        return int(among[int(np.argmax(mags[among]))])
    return int(np.argmax(mags))
