"""Lindblad generator for the Bloch 3-vector and its complete-positivity checks.

Parameter file schema (flat ``key = value`` text, ``#`` comments)::

    units = per_second          # or GeV; mandatory, never inferred
    a = 0.0
    b = 0.0
    c = 0.0
    alpha = 0.0
    beta = 0.0
    gamma = 0.0
    omega = 0.0
    energy = 0.0                # optional, never enters the dynamics

Readers and writers live in :mod:`lindfringe.io`.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .constants import PLANCK_MASS_GEV, gev_to_per_second

PARAM_NAMES = ("a", "b", "c", "alpha", "beta", "gamma", "omega")


@dataclass(frozen=True)
class LindbladParams:
    """Generator parameters in s^-1.

    ``a, alpha, gamma`` are expected to be non-negative; this is reported by
    :func:`check_complete_positivity` rather than enforced here, so that
    unphysical sets can still be inspected.  ``omega`` is half the energy
    splitting of the two beams; ``energy`` is the common beam energy, which
    cancels out of the 3-vector dynamics.
    """

    a: float = 0.0
    b: float = 0.0
    c: float = 0.0
    alpha: float = 0.0
    beta: float = 0.0
    gamma: float = 0.0
    omega: float = 0.0
    energy: float = 0.0

    @classmethod
    def from_gev(cls, **values) -> "LindbladParams":
        return cls(**{k: gev_to_per_second(float(v)) for k, v in values.items()})

    @classmethod
    def weak_coupling(cls, alpha: float, omega: float) -> "LindbladParams":
        """gamma = 0 forces b = c = beta = 0 and a = alpha."""
        return cls(a=alpha, alpha=alpha, omega=omega)

    def as_dict(self) -> dict:
        return asdict(self)

    def replace(self, **changes) -> "LindbladParams":
        return replace(self, **changes)

    def scaled(self, factor: float, include_omega: bool = False) -> "LindbladParams":
        """Scale the six dissipative parameters (and optionally omega)."""
        changes = {k: getattr(self, k) * factor for k in PARAM_NAMES[:6]}
        if include_omega:
            changes["omega"] = self.omega * factor
        return replace(self, **changes)

    @property
    def is_zero(self) -> bool:
        return all(getattr(self, k) == 0.0 for k in PARAM_NAMES)

    @property
    def is_weak_coupling(self) -> bool:
        return (self.gamma == 0.0 and self.b == 0.0 and self.c == 0.0
                and self.beta == 0.0 and self.a == self.alpha)


CONSTRAINTS = (
    "a>=0",
    "alpha>=0",
    "gamma>=0",
    "R>=0",
    "S>=0",
    "T>=0",
    "RS>=b^2",
    "RT>=c^2",
    "ST>=beta^2",
    "RST>=2bc*beta+R*beta^2+S*c^2+T*b^2",
)


@dataclass(frozen=True)
class CPCertificate:
    """Outcome of the complete-positivity check.

    ``margins`` maps each constraint name to ``lhs - rhs``; a constraint is
    violated when its margin is below ``-tol``.
    """

    R: float
    S: float
    T: float
    margins: dict = field(default_factory=dict)
    tol: float = 0.0

    @property
    def violated(self) -> tuple:
        return tuple(k for k in CONSTRAINTS if self.margins[k] < -self.tol)

    @property
    def satisfied(self) -> bool:
        return not self.violated

    def report(self) -> str:
        lines = [f"R = {self.R:.12g}", f"S = {self.S:.12g}", f"T = {self.T:.12g}"]
        for k in CONSTRAINTS:
            status = "FAIL" if k in self.violated else "ok"
            lines.append(f"{k:<40s} margin = {self.margins[k]: .12e}  {status}")
        lines.append("PASS" if self.satisfied else "FAIL: " + ", ".join(self.violated))
        return "\n".join(lines)


def build_dissipator(p: LindbladParams) -> np.ndarray:
    """Symmetric dissipator ``-2 [[a, b, c], [b, alpha, beta], [c, beta, gamma]]``."""
    return -2.0 * np.array(
        [[p.a, p.b, p.c], [p.b, p.alpha, p.beta], [p.c, p.beta, p.gamma]],
        dtype=float,
    )


def build_generator(p: LindbladParams) -> np.ndarray:
    """Matrix ``H`` of ``d|rho>/dt = -2 H |rho>``.

    Its symmetric part is ``-D/2``; omega sits antisymmetrically in the
    (1, 2) / (2, 1) slots.  The beam energy does not appear.
    """
    return np.array(
        [
            [p.a, p.b + p.omega, p.c],
            [p.b - p.omega, p.alpha, p.beta],
            [p.c, p.beta, p.gamma],
        ],
        dtype=float,
    )


def check_complete_positivity(p: LindbladParams, tol: float = 0.0) -> CPCertificate:
    """Evaluate every complete-positivity inequality and report its margin.

    A failing certificate is a normal return value.  ``tol`` is an absolute
    slack applied to each margin (the margins carry different powers of s^-1;
    choose it accordingly).
    """
    if tol < 0:
        raise ValueError("tol must be non-negative")
    a, b, c, al, be, ga = p.a, p.b, p.c, p.alpha, p.beta, p.gamma
    R = (al + ga - a) / 2
    S = (a + ga - al) / 2
    T = (a + al - ga) / 2
    margins = {
        "a>=0": a,
        "alpha>=0": al,
        "gamma>=0": ga,
        "R>=0": R,
        "S>=0": S,
        "T>=0": T,
        "RS>=b^2": R * S - b * b,
        "RT>=c^2": R * T - c * c,
        "ST>=beta^2": S * T - be * be,
        "RST>=2bc*beta+R*beta^2+S*c^2+T*b^2":
            R * S * T - (2 * b * c * be + R * be * be + S * c * c + T * b * b),
    }
    return CPCertificate(R, S, T, margins, tol)


def params_from_rst(R, S, T, b=0.0, c=0.0, beta=0.0, omega=0.0) -> LindbladParams:
    """Build parameters from the (R, S, T) combinations: a = S+T, alpha = R+T, gamma = R+S."""
    return LindbladParams(a=float(S + T), b=float(b), c=float(c), alpha=float(R + T),
                          beta=float(beta), gamma=float(R + S), omega=float(omega))


def sample_cp_params(rng, scale=1.0, omega_scale=None, *, block=False, max_tries=10_000):
    """Draw a random completely positive parameter set.

    ``(R, S, T)`` are drawn uniformly in ``[0, scale]``; the off-diagonal
    couplings are then drawn inside their two-by-two bounds and kept when
    the cubic inequality also holds.  ``block=True`` pins ``c = beta = 0``.
    ``omega`` is uniform in ``[-omega_scale, omega_scale]`` (default ``scale``).
    """
    rng = np.random.default_rng(rng)
    if omega_scale is None:
        omega_scale = scale
    R, S, T = rng.uniform(0.0, scale, size=3)
    omega = rng.uniform(-omega_scale, omega_scale)
    for _ in range(max_tries):
        b = rng.uniform(-1, 1) * math.sqrt(R * S)
        if block:
            c = beta = 0.0
        else:
            c = rng.uniform(-1, 1) * math.sqrt(R * T)
            beta = rng.uniform(-1, 1) * math.sqrt(S * T)
        p = params_from_rst(R, S, T, b, c, beta, omega)
        if check_complete_positivity(p).satisfied:
            return p
    return params_from_rst(R, S, T, 0.0, 0.0, 0.0, omega)


def dissipative_scale(atom_mass: float, planck_mass: float = PLANCK_MASS_GEV) -> float:
    """Rough upper bound ``M_A^2 / M_P`` (GeV) on the dissipative parameters."""
    if atom_mass <= 0 or planck_mass <= 0:
        raise ValueError("masses must be positive")
    return atom_mass ** 2 / planck_mass


def gev_to_angular_frequency(x):
    """GeV -> s^-1 (divide by hbar)."""
    return gev_to_per_second(x)
