"""Instrument-facing fringe model.

The scan variable is the transverse displacement ``x`` of the last grating;
the grating phase is ``theta0 + kappa x`` and the expected counts at the two
exits are

    N(x) = n0 {1 +- [P cos(theta0 + kappa x) + Q sin(theta0 + kappa x)]},
    P = C exp(-2 alpha t0) cos(2 omega t0),  Q = C exp(-2 alpha t0) sin(2 omega t0).

Geometry config schema (flat ``key = value`` text)::

    kappa_per_m = 1.5708e7
    t0_s = 1e-3
    bragg_angle_rad = 1e-4
    velocity_m_s = 1000
    theta0_rad = 0
    # optional: x1_m, x2_m, x3_m (default 0)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .state import Port


@dataclass(frozen=True)
class InstrumentGeometry:
    """Three-grating interferometer geometry (SI units)."""

    kappa: float
    t0: float
    bragg_angle: float = 1e-4
    velocity: float = 1000.0
    theta0: float = 0.0
    x1: float = 0.0
    x2: float = 0.0
    x3: float = 0.0

    def __post_init__(self):
        if not self.kappa > 0:
            raise ValueError("kappa must be positive")
        if not self.t0 > 0:
            raise ValueError("t0 must be positive")
        if not self.velocity > 0:
            raise ValueError("velocity must be positive")

    @property
    def period(self) -> float:
        """Fringe period in x (m)."""
        return 2 * math.pi / self.kappa

    def phase(self, x):
        """Grating phase ``theta0 + kappa x`` at scan position ``x``."""
        return self.theta0 + self.kappa * np.asarray(x, dtype=float)


def grating_phase(g: InstrumentGeometry) -> float:
    """Idealized phase ``kappa (x1 - 2 x2 + x3)`` set by the grating positions."""
    return g.kappa * (g.x1 - 2 * g.x2 + g.x3)


def flight_time(g: InstrumentGeometry, x):
    """Time of flight ``t0 + bragg_angle * x / velocity`` at displacement ``x``."""
    return g.t0 + g.bragg_angle * np.asarray(x, dtype=float) / g.velocity


def flight_time_ratio(g: InstrumentGeometry, x):
    """Relative size ``(bragg_angle x / v) / t0`` of the flight-time correction."""
    return np.abs(g.bragg_angle * np.asarray(x, dtype=float) / g.velocity) / g.t0


def pq_from_physics(contrast, alpha, omega, t0):
    """Fringe quadratures ``(P, Q)`` for contrast ``C`` and dissipative ``alpha, omega``."""
    if not 0 <= contrast <= 1:
        raise ValueError("contrast must lie in [0, 1]")
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    amp = contrast * math.exp(-2 * alpha * t0)
    return amp * math.cos(2 * omega * t0), amp * math.sin(2 * omega * t0)


@dataclass(frozen=True)
class FringeParams:
    """Normalisations, contrasts and quadratures of both exit ports.

    Particle conservation ``n0_plus C_plus = n0_minus C_minus`` is enforced to
    relative tolerance ``conservation_tol`` (pass ``None`` to relax).
    """

    n0_plus: float
    n0_minus: float
    contrast_plus: float
    contrast_minus: float
    p_plus: float
    p_minus: float
    q_plus: float
    q_minus: float
    conservation_tol: float | None = 1e-9

    def __post_init__(self):
        if self.n0_plus < 0 or self.n0_minus < 0:
            raise ValueError("normalisations must be non-negative")
        if self.conservation_tol is not None and not conservation_check(self, self.conservation_tol):
            raise ValueError(
                "particle conservation violated: n0+ C+ = "
                f"{self.n0_plus * self.contrast_plus!r}, n0- C- = {self.n0_minus * self.contrast_minus!r}"
            )

    @classmethod
    def from_physics(cls, alpha, omega, t0, n0_plus, contrast_plus, n0_minus=None):
        """Both ports from one set of physical parameters.

        ``n0_minus`` defaults to ``n0_plus``; ``C_minus`` follows from conservation.
        """
        if n0_minus is None:
            n0_minus = n0_plus
        contrast_minus = n0_plus * contrast_plus / n0_minus if n0_minus else 0.0
        pp, qp = pq_from_physics(contrast_plus, alpha, omega, t0)
        pm, qm = pq_from_physics(contrast_minus, alpha, omega, t0)
        return cls(n0_plus, n0_minus, contrast_plus, contrast_minus, pp, pm, qp, qm)

    def port(self, port) -> tuple:
        """``(n0, contrast, P, Q)`` of one exit."""
        if Port.parse(port) is Port.PLUS:
            return self.n0_plus, self.contrast_plus, self.p_plus, self.q_plus
        return self.n0_minus, self.contrast_minus, self.p_minus, self.q_minus

    def is_physical(self) -> bool:
        """``P^2 + Q^2 <= C^2`` on both ports (exp(-2 alpha t0) <= 1)."""
        return all(
            math.hypot(p, q) <= c * (1 + 1e-12)
            for _, c, p, q in (self.port(Port.PLUS), self.port(Port.MINUS))
        )


def fringe_model(n0, p, q, phase, port):
    """``n0 {1 +- [P cos(phase) + Q sin(phase)]}``."""
    sign = Port.parse(port).sign
    return n0 * (1 + sign * (p * np.cos(phase) + q * np.sin(phase)))


def fringe_counts(fp: FringeParams, g: InstrumentGeometry, x, port):
    """Expected (real-valued) counts at displacement ``x``, with ``t = t0``."""
    n0, _, p, q = fp.port(port)
    return fringe_model(n0, p, q, g.phase(x), port)


def fringe_counts_exact(n0, contrast, alpha, omega, g: InstrumentGeometry, x, port):
    """Expected counts with the exact, x-dependent flight time.

    ``n0 {1 +- C exp(-2 alpha t) cos(theta - 2 omega t)}`` with
    ``t = flight_time(g, x)`` and ``theta = theta0 + kappa x``.
    """
    sign = Port.parse(port).sign
    t = flight_time(g, x)
    return n0 * (1 + sign * contrast * np.exp(-2 * alpha * t) * np.cos(g.phase(x) - 2 * omega * t))


def conservation_check(fp: FringeParams, tol: float = 1e-9) -> bool:
    """``|n0+ C+ - n0- C-| <= tol * (n0+ C+ + n0- C-) / 2``."""
    lhs = fp.n0_plus * fp.contrast_plus
    rhs = fp.n0_minus * fp.contrast_minus
    return abs(lhs - rhs) <= tol * (lhs + rhs) / 2
