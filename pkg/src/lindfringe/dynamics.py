"""Time evolution of the Bloch vector and the interferometric intensities.

The state obeys ``d|rho>/dt = -2 H |rho>`` so ``M(t) = expm(-2 H t)``.  Two
production routes compute ``M``:

* :func:`propagator_eigen` -- Lagrange-Sylvester interpolation over the three
  eigenvalues of ``H`` (roots of its characteristic cubic, found with
  Cardano's method).  Needs well separated eigenvalues.
* :func:`propagator_series` -- scaling-and-squaring Taylor exponential; works
  for any ``H``.

Intensities are available in closed form for the general generator, for the
weak-coupling case (gamma = 0) and to second order in the small parameters.

Sign convention: with ``H`` as built by :func:`~lindfringe.generator.build_generator`
and ``I = 1/2 +- (cos(theta) r1 + sin(theta) r2)``, the weak-coupling pattern is
``1/2 {1 +- exp(-2 alpha t) cos(theta - 2 omega t)}``.  The ``sin(theta)``
coefficients of the general and perturbative formulas below are written in
that same convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .generator import LindbladParams, build_generator
from .state import BlochState, Orientation, Port, initial_state, intensity_from_vector

# Spectrum.degenerate: min root gap below this times max(1, |lambda|max)
DEGENERACY_TOL = 1e-7
# the eigen routes defer when the relative root gap falls below this; the
# Lagrange form loses about |lambda|max / gap ulps (measured), ~1e-12 at 1e-4
EIGEN_GAP_TOL = 1e-4
IMAG_RESIDUE_TOL = 1e-10


class DegenerateSpectrumError(ArithmeticError):
    """Eigenvalues of H are (nearly) repeated; use the series propagator."""


class InternalConsistencyError(RuntimeError):
    """A quantity that must be real came out with a large imaginary part."""


class DomainError(ValueError):
    """Parameters lie outside the validity domain of a closed-form expression."""


@dataclass(frozen=True)
class CubicCoefficients:
    """``lambda^3 + r lambda^2 + s lambda + w = 0``."""

    r: float
    s: float
    w: float

    def __iter__(self):
        return iter((self.r, self.s, self.w))

    def __call__(self, lam):
        return ((lam + self.r) * lam + self.s) * lam + self.w

    def derivative(self, lam):
        return (3 * lam + 2 * self.r) * lam + self.s


@dataclass(frozen=True)
class Spectrum:
    roots: tuple
    degenerate: bool

    @property
    def min_gap(self) -> float:
        z = self.roots
        return min(abs(z[0] - z[1]), abs(z[0] - z[2]), abs(z[1] - z[2]))

    @property
    def scale(self) -> float:
        return max(abs(z) for z in self.roots)

    def relative_gap(self) -> float:
        scale = self.scale
        return math.inf if scale == 0 else self.min_gap / scale


def cubic_coefficients(p: LindbladParams) -> CubicCoefficients:
    """Characteristic-polynomial coefficients of ``H``.

    ``r = -tr H``, ``s`` = sum of principal 2x2 minors, ``w = -det H``.
    """
    a, b, c, al, be, ga, om = p.a, p.b, p.c, p.alpha, p.beta, p.gamma, p.omega
    r = -(a + al + ga)
    s = a * al + a * ga + al * ga - b * b - c * c - be * be + om * om
    det = (a * (al * ga - be * be)
           - (b + om) * ((b - om) * ga - be * c)
           + c * ((b - om) * be - al * c))
    return CubicCoefficients(r, s, -det)


def _polish(coeffs: CubicCoefficients, lam: complex, iters: int = 3) -> complex:
    f = coeffs(lam)
    for _ in range(iters):
        d = coeffs.derivative(lam)
        if d == 0 or f == 0:
            break
        cand = lam - f / d
        fc = coeffs(cand)
        if abs(fc) >= abs(f):
            break
        lam, f = cand, fc
    return lam


def solve_cubic(coeffs: CubicCoefficients) -> Spectrum:
    """Roots of the monic cubic by Cardano's method.

    Three real roots use the trigonometric form, otherwise the real root comes
    from real cube roots and the complex pair is its exact conjugate.  Each root
    is then refined by a few Newton steps.
    """
    r, s, w = coeffs
    shift = -r / 3.0
    p = s - r * r / 3.0
    q = 2.0 * r ** 3 / 27.0 - r * s / 3.0 + w
    disc = (q / 2.0) ** 2 + (p / 3.0) ** 3

    if p == 0.0 and q == 0.0:
        ys = [0.0, 0.0, 0.0]
    elif disc < 0.0:
        # three distinct real roots; p < 0 here
        m = 2.0 * math.sqrt(-p / 3.0)
        arg = 3.0 * q / (p * m)
        phi = math.acos(max(-1.0, min(1.0, arg))) / 3.0
        ys = [m * math.cos(phi - 2.0 * math.pi * k / 3.0) for k in range(3)]
    else:
        sq = math.sqrt(disc)
        # pick the cube-root argument without cancellation
        u3 = -q / 2.0 - sq if q > 0 else -q / 2.0 + sq
        u = math.copysign(abs(u3) ** (1.0 / 3.0), u3)
        v = -p / (3.0 * u) if u != 0.0 else 0.0
        re = -(u + v) / 2.0
        im = math.sqrt(3.0) / 2.0 * (u - v)
        ys = [u + v, complex(re, im), complex(re, -im)]

    roots = [_polish(coeffs, complex(y + shift)) for y in ys]
    if roots[1].imag != 0.0 or roots[2].imag != 0.0:
        roots[0] = complex(roots[0].real, 0.0)
        roots[2] = roots[1].conjugate()
    roots = tuple(complex(z) for z in roots)

    gap = min(abs(roots[0] - roots[1]), abs(roots[0] - roots[2]), abs(roots[1] - roots[2]))
    scale = max(1.0, max(abs(z) for z in roots))
    return Spectrum(roots, gap < DEGENERACY_TOL * scale)


def spectrum(p: LindbladParams) -> Spectrum:
    return solve_cubic(cubic_coefficients(p))


def _checked_spectrum(p: LindbladParams, gap_tol: float) -> Spectrum:
    spec = spectrum(p)
    if spec.degenerate or spec.relative_gap() < gap_tol:
        raise DegenerateSpectrumError(
            f"eigenvalues {spec.roots} are too close (relative gap "
            f"{spec.relative_gap():.3g}); use propagator_series / the evolve route"
        )
    return spec


def _real_part(z, scale=1.0):
    z = np.asarray(z)
    if np.iscomplexobj(z):
        resid = np.max(np.abs(z.imag), initial=0.0)
        if resid > IMAG_RESIDUE_TOL * max(1.0, scale):
            raise InternalConsistencyError(f"imaginary residue {resid:.3g}")
        return z.real
    return z


def constituent_matrices(p: LindbladParams, gap_tol: float = EIGEN_GAP_TOL):
    """Eigenvalues and Lagrange-Sylvester constituents ``Z_k`` of ``H``.

    ``f(H) = sum_k f(lambda_k) Z_k`` for distinct eigenvalues, with
    ``Z_k = prod_{j != k} (H - lambda_j) / (lambda_k - lambda_j)``.
    """
    spec = _checked_spectrum(p, gap_tol)
    h = build_generator(p).astype(complex)
    eye = np.eye(3, dtype=complex)
    lam = spec.roots
    zs = []
    for k in range(3):
        others = [j for j in range(3) if j != k]
        num = (h - lam[others[0]] * eye) @ (h - lam[others[1]] * eye)
        zs.append(num / ((lam[k] - lam[others[0]]) * (lam[k] - lam[others[1]])))
    return np.array(lam), np.array(zs)


def propagator_eigen(p: LindbladParams, t, gap_tol: float = EIGEN_GAP_TOL) -> np.ndarray:
    """``M(t) = expm(-2 H t)`` from the eigenvalues of ``H``.

    ``t`` may be an array; the result has shape ``t.shape + (3, 3)``.  Raises
    :class:`DegenerateSpectrumError` when the eigenvalues are too close for
    the interpolation formula to be accurate (``H = 0`` returns the identity).
    """
    t = np.asarray(t, dtype=float)
    if p.is_zero:
        return np.broadcast_to(np.eye(3), t.shape + (3, 3)).copy()
    lam, zs = constituent_matrices(p, gap_tol)
    weights = np.exp(-2.0 * np.multiply.outer(t, lam))
    m = np.einsum("...k,kij->...ij", weights, zs)
    return np.ascontiguousarray(_real_part(m, np.max(np.abs(m.real), initial=1.0)))


def expm_taylor(a: np.ndarray, theta: float = 0.5) -> np.ndarray:
    """Matrix exponential by scaling and squaring with a Taylor kernel.

    ``a`` is scaled by ``2**-k`` until its 1-norm is at most ``theta``; the
    series is then summed to machine precision and squared back ``k`` times.
    """
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    norm = np.abs(a).sum(axis=0).max()
    k = 0
    if norm > theta:
        k = int(math.ceil(math.log2(norm / theta)))
    b = a / 2.0 ** k
    result = np.eye(n)
    term = np.eye(n)
    for j in range(1, 40):
        term = term @ b / j
        result = result + term
        if np.abs(term).max() <= 1e-18 * np.abs(result).max():
            break
    for _ in range(k):
        result = result @ result
    return result


def propagator_series(p: LindbladParams, t) -> np.ndarray:
    """``M(t) = expm(-2 H t)`` by scaling and squaring; handles any spectrum."""
    t = np.asarray(t, dtype=float)
    h = build_generator(p)
    out = np.empty(t.shape + (3, 3))
    for idx in np.ndindex(t.shape):
        out[idx] = expm_taylor(-2.0 * h * t[idx])
    return out


def propagator(p: LindbladParams, t) -> np.ndarray:
    """Eigen route, falling back to the series route for degenerate spectra."""
    try:
        return propagator_eigen(p, t)
    except DegenerateSpectrumError:
        return propagator_series(p, t)


def _check_time(t):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("the semigroup only propagates forward in time (t >= 0)")
    return t


def evolve_vector(v, p: LindbladParams, t) -> np.ndarray:
    """Propagate a raw Bloch 3-vector; no positivity check on the result."""
    t = _check_time(t)
    return propagator(p, t) @ np.asarray(v, dtype=float)


def evolve(state0: BlochState, p: LindbladParams, t: float) -> BlochState:
    """State at time ``t >= 0`` starting from ``state0``."""
    return BlochState.from_array(evolve_vector(state0.as_array(), p, float(t)))


def intensity_evolve(p: LindbladParams, theta, t, port=Port.PLUS,
                     orientation=Orientation.ONE):
    """Intensity via the propagator applied to the initial state (any spectrum)."""
    t = _check_time(t)
    theta = np.asarray(theta, dtype=float)
    v0 = initial_state(orientation).as_array()
    vt = propagator(p, t) @ v0
    return intensity_from_vector(vt[..., 0], vt[..., 1], theta, port)


def intensity_general(p: LindbladParams, theta, t, port=Port.PLUS,
                      gap_tol: float = EIGEN_GAP_TOL):
    """Closed-form intensity for the general generator, initial state (1/2, 0, 0).

    Sum over the eigenvalues of ``H`` of ``exp(-2 lambda t) / (3 lambda^2 + 2 r lambda + s)``
    times the (1,1) and (2,1) adjugate entries of ``lambda - H``.  ``theta``
    and ``t`` broadcast.  Raises :class:`DegenerateSpectrumError` for repeated
    eigenvalues.
    """
    port = Port.parse(port)
    t = _check_time(t)
    theta = np.asarray(theta, dtype=float)
    if p.is_zero:
        return 0.5 * (1.0 + port.sign * np.cos(theta)) + 0.0 * t
    coeffs = cubic_coefficients(p)
    spec = _checked_spectrum(p, gap_tol)
    al, ga, be, c, b, om = p.alpha, p.gamma, p.beta, p.c, p.b, p.omega
    cos_th, sin_th = np.cos(theta), np.sin(theta)
    total = 0.0
    for lam in spec.roots:
        weight = np.exp(-2.0 * lam * t) / coeffs.derivative(lam)
        cos_coef = lam * lam - (al + ga) * lam + al * ga - be * be
        sin_coef = (b - om) * (lam - ga) + be * c
        total = total + weight * (cos_coef * cos_th + sin_coef * sin_th)
    total = _real_part(total)
    return 0.5 * (1.0 + port.sign * total)


def intensity_simple(alpha, omega, theta, t, port=Port.PLUS):
    """Weak-coupling intensity ``1/2 {1 +- exp(-2 alpha t) cos(theta - 2 omega t)}``."""
    port = Port.parse(port)
    t = _check_time(t)
    return 0.5 * (1.0 + port.sign * np.exp(-2.0 * alpha * t) * np.cos(theta - 2.0 * omega * t))


def perturbative_frequency(p: LindbladParams) -> float:
    """``Omega^2 = omega^2 - b^2 - c^2 - beta^2 - (alpha - a)^2 / 4``; returns Omega."""
    om2 = p.omega ** 2 - p.b ** 2 - p.c ** 2 - p.beta ** 2 - (p.alpha - p.a) ** 2 / 4
    if om2 <= 0:
        raise DomainError(f"Omega^2 = {om2:.6g} <= 0: dissipative terms are not small w.r.t. omega")
    return math.sqrt(om2)


def intensity_perturbative(p: LindbladParams, theta, t, port=Port.PLUS):
    """Intensity to second order in the dissipative parameters.

    Exact when ``c = beta = 0`` (``H`` is then block diagonal); otherwise the
    ``c``/``beta`` terms are the second-order expansion.
    """
    port = Port.parse(port)
    t = _check_time(t)
    theta = np.asarray(theta, dtype=float)
    big = perturbative_frequency(p)
    a, b, c, al, be, om = p.a, p.b, p.c, p.alpha, p.beta, p.omega
    s2 = np.sin(2 * big * t)
    c2 = np.cos(2 * big * t)
    sq = np.sin(big * t) ** 2
    cos_coef = c2 + (al - a) / (2 * big) * s2 - 2 * be * be / big ** 2 * sq
    sin_coef = (om - b) / big * s2 + 2 * c * be / big ** 2 * sq
    bracket = cos_coef * np.cos(theta) + sin_coef * np.sin(theta)
    return 0.5 * (1.0 + port.sign * np.exp(-(a + al) * t) * bracket)


def intensity_standard(theta, port=Port.PLUS):
    """Dissipation-free pattern ``1/2 (1 +- cos theta)``."""
    port = Port.parse(port)
    return 0.5 * (1.0 + port.sign * np.cos(theta))
