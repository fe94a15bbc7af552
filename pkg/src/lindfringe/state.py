"""Density matrices, Bloch vectors and exit-port projectors for the two-beam atom.

The two split beams of the interferometer span a two-dimensional space.  A
state is stored canonically as the real 3-vector ``(r1, r2, r3)`` with

    rho_3 = r1 - i r2,        rho_1 - rho_2 = 2 r3,

so pure states sit on the sphere of radius 1/2.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

# slack on the Bloch-norm check; evolution can graze the sphere
POSITIVITY_TOL = 1e-12


class StateError(ValueError):
    """A density matrix or Bloch vector violates trace/positivity."""


class Port(enum.Enum):
    """Exit beam of the interferometer."""

    PLUS = "+"
    MINUS = "-"

    @property
    def sign(self) -> int:
        return 1 if self is Port.PLUS else -1

    @classmethod
    def parse(cls, value) -> "Port":
        if isinstance(value, Port):
            return value
        key = str(value).strip().lower()
        if key in ("+", "plus", "p", "+1", "1"):
            return cls.PLUS
        if key in ("-", "minus", "m", "-1"):
            return cls.MINUS
        raise ValueError(f"unknown port {value!r}")


class Orientation(enum.Enum):
    """Orientation of the incident beam with respect to the first grating."""

    ONE = 1
    TWO = 2


@dataclass(frozen=True)
class DensityMatrix:
    """2x2 density matrix ``[[rho1, rho3], [conj(rho3), rho2]]``.

    The coherence ``rho3`` is kept as an explicit ``(rho3_re, rho3_im)`` pair.
    """

    rho1: float
    rho2: float
    rho3_re: float = 0.0
    rho3_im: float = 0.0

    def __post_init__(self):
        if abs(self.rho1 + self.rho2 - 1.0) > POSITIVITY_TOL:
            raise StateError(f"trace {self.rho1 + self.rho2!r} != 1")
        if self.rho1 < -POSITIVITY_TOL or self.rho2 < -POSITIVITY_TOL:
            raise StateError("negative population")
        coh2 = self.rho3_re ** 2 + self.rho3_im ** 2
        if self.rho1 * self.rho2 < coh2 - POSITIVITY_TOL:
            raise StateError("density matrix is not positive")

    @property
    def rho3(self) -> complex:
        return complex(self.rho3_re, self.rho3_im)

    def matrix(self) -> np.ndarray:
        return np.array(
            [[self.rho1, self.rho3], [self.rho3.conjugate(), self.rho2]],
            dtype=complex,
        )

    @classmethod
    def from_matrix(cls, m) -> "DensityMatrix":
        m = np.asarray(m, dtype=complex)
        if m.shape != (2, 2):
            raise StateError(f"expected a 2x2 matrix, got shape {m.shape}")
        if abs(m[1, 0] - m[0, 1].conjugate()) > POSITIVITY_TOL:
            raise StateError("matrix is not hermitian")
        if abs(m[0, 0].imag) > POSITIVITY_TOL or abs(m[1, 1].imag) > POSITIVITY_TOL:
            raise StateError("matrix is not hermitian")
        return cls(m[0, 0].real, m[1, 1].real, m[0, 1].real, m[0, 1].imag)


@dataclass(frozen=True)
class BlochState:
    """Real 3-vector ``(r1, r2, r3)`` encoding a beam density matrix."""

    r1: float
    r2: float
    r3: float

    def __post_init__(self):
        if self.norm > 0.5 + POSITIVITY_TOL:
            raise StateError(f"Bloch norm {self.norm!r} exceeds 1/2")

    @property
    def norm(self) -> float:
        return math.sqrt(self.r1 ** 2 + self.r2 ** 2 + self.r3 ** 2)

    def as_array(self) -> np.ndarray:
        return np.array([self.r1, self.r2, self.r3], dtype=float)

    @classmethod
    def from_array(cls, v) -> "BlochState":
        r1, r2, r3 = (float(x) for x in np.asarray(v, dtype=float).reshape(3))
        return cls(r1, r2, r3)


@dataclass(frozen=True)
class ExitProjector:
    """Projector onto one of the two exit beams at grating phase ``theta``."""

    theta: float
    port: Port = Port.PLUS

    def matrix(self) -> np.ndarray:
        # the minus port is the plus port with theta shifted by pi
        phase = self.theta if self.port is Port.PLUS else self.theta + math.pi
        off = complex(math.cos(phase), -math.sin(phase))
        return 0.5 * np.array([[1.0, off], [off.conjugate(), 1.0]], dtype=complex)


def to_bloch(dm: DensityMatrix) -> BlochState:
    """Map a density matrix to its Bloch vector."""
    return BlochState(dm.rho3_re, -dm.rho3_im, (dm.rho1 - dm.rho2) / 2)


def from_bloch(b: BlochState) -> DensityMatrix:
    """Inverse of :func:`to_bloch`; the trace is 1 by construction."""
    if b.norm > 0.5 + POSITIVITY_TOL:
        raise StateError(f"Bloch norm {b.norm!r} exceeds 1/2")
    return DensityMatrix(0.5 + b.r3, 0.5 - b.r3, b.r1, -b.r2)


def initial_state(orientation=Orientation.ONE) -> BlochState:
    """Pure incident state for either beam orientation.

    ``Orientation.ONE`` is ``rho = [[1, 1], [1, 1]] / 2`` -> ``(1/2, 0, 0)``;
    ``Orientation.TWO`` flips the coherence -> ``(-1/2, 0, 0)``.
    """
    orientation = Orientation(orientation)
    if orientation is Orientation.ONE:
        return BlochState(0.5, 0.0, 0.0)
    return BlochState(-0.5, 0.0, 0.0)


def intensity_from_vector(r1, r2, theta, port=Port.PLUS):
    """Exit-port intensity ``1/2 +- (cos(theta) r1 + sin(theta) r2)``.

    Array-friendly core of :func:`intensity`; all arguments broadcast.
    """
    port = Port.parse(port)
    return 0.5 + port.sign * (np.cos(theta) * r1 + np.sin(theta) * r2)


def intensity(state: BlochState, proj: ExitProjector) -> float:
    """Probability of finding the atom in the exit beam selected by ``proj``."""
    return float(intensity_from_vector(state.r1, state.r2, proj.theta, proj.port))
