"""Chi-square fits of fringe scans and extraction of alpha and omega.

The fringe model is linear in ``(n0, n0 P, n0 Q)`` once the instrument phase
``theta0`` is fixed, so the fit is a weighted linear least-squares solve with
Poisson weights ``1 / max(counts, 1)``.  ``theta0`` cannot be fitted alongside
``(P, Q)``: shifting it is the same as rotating ``(P, Q)``.  The free-phase
mode therefore fixes the convention ``theta0 = 0`` and lets the fitted
``(P, Q)`` carry the calibration offset.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .constants import per_second_to_gev
from .fringe import FringeParams, InstrumentGeometry, fringe_counts, fringe_model
from .state import Port

MIN_SAMPLES = 6
GRAD_TOL = 1e-8
STEP_TOL = 1e-10


class UnphysicalEstimateWarning(UserWarning):
    """Fitted fringe amplitude exceeds the assumed contrast."""


@dataclass(frozen=True, eq=False)
class FringeDataset:
    """Counts recorded at one exit port as a function of grating displacement ``x`` (m)."""

    x: np.ndarray
    counts: np.ndarray
    port: Port
    geometry: InstrumentGeometry

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float).ravel()
        counts = np.asarray(self.counts).ravel()
        if not np.issubdtype(counts.dtype, np.number):
            raise ValueError("counts must be numeric")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "port", Port.parse(self.port))
        if x.shape != counts.shape:
            raise ValueError("x and counts differ in length")
        if x.size < MIN_SAMPLES:
            raise ValueError(f"need at least {MIN_SAMPLES} samples, got {x.size}")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(counts))):
            raise ValueError("non-finite samples")
        if np.any(counts < 0):
            raise ValueError("counts must be non-negative")
        # evenly spaced n points covering one period span (n-1)/n of it
        n = x.size
        span = (x.max() - x.min()) * n / (n - 1)
        if span < self.geometry.period * (1 - 1e-9):
            raise ValueError(
                f"samples span {span:.4g} m, less than one fringe period {self.geometry.period:.4g} m"
            )

    def __len__(self):
        return self.x.size

    @property
    def sigma2(self) -> np.ndarray:
        return np.maximum(self.counts.astype(float), 1.0)


@dataclass(frozen=True, eq=False)
class FitResult:
    """Fitted ``(n0, P, Q)`` with covariance, at fixed (or conventional) ``theta0``."""

    n0: float
    p: float
    q: float
    theta0: float
    theta0_free: bool
    chi2: float
    dof: int
    covariance: np.ndarray
    converged: bool
    port: Port
    grad_rel: float = 0.0
    step_rel: float = 0.0
    iterations: int = 0
    message: str = ""

    @property
    def errors(self) -> np.ndarray:
        return np.sqrt(np.clip(np.diag(self.covariance), 0, None))

    @property
    def amplitude(self) -> float:
        return math.hypot(self.p, self.q)

    @property
    def phase(self) -> float:
        return math.atan2(self.q, self.p)

    @property
    def reduced_chi2(self) -> float:
        return self.chi2 / self.dof if self.dof > 0 else math.nan

    def pq_covariance(self) -> np.ndarray:
        return self.covariance[1:, 1:]

    def as_dict(self) -> dict:
        e = self.errors
        return {
            "n0": {"value": self.n0, "error": e[0], "unit": "counts"},
            "P": {"value": self.p, "error": e[1], "unit": "dimensionless"},
            "Q": {"value": self.q, "error": e[2], "unit": "dimensionless"},
            "theta0": {"value": self.theta0, "unit": "rad",
                       "mode": "free (convention theta0=0)" if self.theta0_free else "fixed"},
            "chi2": self.chi2,
            "dof": self.dof,
            "covariance": {"order": ["n0", "P", "Q"], "matrix": self.covariance.tolist()},
            "converged": self.converged,
            "port": self.port.value,
            "message": self.message,
        }


@dataclass(frozen=True)
class DissipativeEstimate:
    """alpha and omega in s^-1 with purely statistical errors."""

    alpha: float
    omega: float
    alpha_err: float
    omega_err: float
    contrast_used: float
    contrast_err: float = 0.0
    phase: float = 0.0
    flags: tuple = field(default_factory=tuple)

    @property
    def alpha_gev(self) -> float:
        return per_second_to_gev(self.alpha)

    @property
    def omega_gev(self) -> float:
        return per_second_to_gev(self.omega)

    @property
    def alpha_err_gev(self) -> float:
        return per_second_to_gev(self.alpha_err)

    @property
    def omega_err_gev(self) -> float:
        return per_second_to_gev(self.omega_err)

    @property
    def constrained(self) -> bool:
        return "unconstrained" not in self.flags

    def as_dict(self) -> dict:
        return {
            "alpha": {"value": self.alpha, "error": self.alpha_err, "unit": "s^-1"},
            "omega": {"value": self.omega, "error": self.omega_err, "unit": "s^-1"},
            "alpha_GeV": {"value": self.alpha_gev, "error": self.alpha_err_gev, "unit": "GeV"},
            "omega_GeV": {"value": self.omega_gev, "error": self.omega_err_gev, "unit": "GeV"},
            "contrast": {"value": self.contrast_used, "error": self.contrast_err,
                         "unit": "dimensionless"},
            "phase_2omega_t0": {"value": self.phase, "unit": "rad",
                                "branch": "(-pi/2, pi/2], modulo 2 pi"},
            "flags": list(self.flags),
        }


def chi2(dataset: FringeDataset, n0, p, q, theta0=None) -> float:
    """Poisson-weighted chi-square of the fringe model against ``dataset``."""
    if theta0 is None:
        theta0 = dataset.geometry.theta0
    phase = theta0 + dataset.geometry.kappa * dataset.x
    model = fringe_model(n0, p, q, phase, dataset.port)
    return float(np.sum((dataset.counts - model) ** 2 / dataset.sigma2))


def fit_fringe(dataset: FringeDataset, theta0=None, free_phase=False, max_iter=5) -> FitResult:
    """Least-squares fit of ``n0 {1 +- [P cos + Q sin](theta0 + kappa x)}``.

    Parameters
    ----------
    dataset : FringeDataset
    theta0 : float, optional
        Instrument phase (rad).  Defaults to ``dataset.geometry.theta0``.
    free_phase : bool
        Treat ``theta0`` as unknown: fit with the convention ``theta0 = 0``.
    max_iter : int
        Bound on refinement steps of the weighted normal equations.

    Returns
    -------
    FitResult
        ``covariance`` is the inverse curvature ``(X^T W X)^-1`` mapped to
        ``(n0, P, Q)``; ``converged`` requires a relative gradient below 1e-8
        and a relative last step below 1e-10.
    """
    if free_phase:
        theta0 = 0.0
    elif theta0 is None:
        theta0 = dataset.geometry.theta0
    phase = theta0 + dataset.geometry.kappa * dataset.x
    sign = dataset.port.sign
    design = np.column_stack([np.ones_like(phase), sign * np.cos(phase), sign * np.sin(phase)])
    sw = 1.0 / np.sqrt(dataset.sigma2)
    a = design * sw[:, None]
    y = dataset.counts.astype(float) * sw

    u, _, rank, _ = np.linalg.lstsq(a, y, rcond=None)
    step_rel = math.inf
    it = 0
    for it in range(1, max_iter + 1):
        delta = np.linalg.lstsq(a, y - a @ u, rcond=None)[0]
        u = u + delta
        step_rel = np.linalg.norm(delta) / max(np.linalg.norm(u), np.finfo(float).tiny)
        if step_rel < STEP_TOL:
            break
    grad = -2.0 * a.T @ (y - a @ u)
    grad_scale = 2.0 * np.linalg.norm(a.T @ y)
    grad_rel = np.linalg.norm(grad) / grad_scale if grad_scale > 0 else 0.0

    n = dataset.x.size
    chisq = float(np.sum((y - a @ u) ** 2))
    message = ""
    converged = True
    if rank < 3:
        converged = False
        message = "design matrix is rank deficient"
        cov_u = np.full((3, 3), np.nan)
    else:
        cov_u = np.linalg.inv(a.T @ a)
    if u[0] <= 0:
        converged = False
        message = message or "non-positive normalisation"
    if grad_rel >= GRAD_TOL or step_rel >= STEP_TOL:
        converged = False
        message = message or f"no convergence (grad {grad_rel:.2g}, step {step_rel:.2g})"

    n0 = u[0]
    if n0 != 0:
        p, q = u[1] / n0, u[2] / n0
        jac = np.array([[1.0, 0.0, 0.0], [-u[1] / n0 ** 2, 1 / n0, 0.0], [-u[2] / n0 ** 2, 0.0, 1 / n0]])
        cov = jac @ cov_u @ jac.T
    else:
        p = q = math.nan
        cov = np.full((3, 3), np.nan)
    cov = (cov + cov.T) / 2
    return FitResult(
        n0=float(n0), p=float(p), q=float(q), theta0=float(theta0), theta0_free=bool(free_phase),
        chi2=chisq, dof=n - 3, covariance=cov, converged=converged, port=dataset.port,
        grad_rel=float(grad_rel), step_rel=float(step_rel), iterations=it, message=message,
    )


def visibility_contrast(dataset: FringeDataset, method="quantile", fraction=0.1) -> float:
    """Fringe visibility ``(N_max - N_min) / (N_max + N_min)``.

    This is only approximately the contrast once alpha, omega are nonzero.
    ``method="quantile"`` uses the mean of the top and bottom ``fraction`` of
    the counts as the extrema, which damps Poisson outliers; ``"extrema"``
    uses the single largest and smallest counts.
    """
    counts = np.sort(dataset.counts.astype(float))
    if method == "extrema":
        hi, lo = counts[-1], counts[0]
    elif method == "quantile":
        k = max(1, int(round(fraction * counts.size)))
        hi, lo = counts[-k:].mean(), counts[:k].mean()
    else:
        raise ValueError(f"unknown method {method!r}")
    if hi + lo == 0 or hi == lo:
        return 0.0
    return float((hi - lo) / (hi + lo))


def _amp_phase_jacobians(p, q):
    a2 = p * p + q * q
    dphase = np.array([-q / a2, p / a2])
    dlog_amp = np.array([p / a2, q / a2])
    return dphase, dlog_amp


def extract_dissipative(fit: FitResult, contrast: float, t0: float,
                        contrast_err: float = 0.0) -> DissipativeEstimate:
    """alpha and omega from fitted quadratures and a known contrast.

    ``2 omega t0 = atan2(Q, P)`` (reported branch ``(-pi/2, pi/2]``; values
    outside it are flagged, as 2 omega t0 is only known modulo 2 pi) and
    ``exp(-2 alpha t0) = sqrt(P^2 + Q^2) / C``.  Errors are first-order
    propagation of the fit covariance and ``contrast_err``.
    """
    if not fit.converged:
        raise ValueError(f"fit did not converge: {fit.message}")
    if not 0 < contrast <= 1:
        raise ValueError("contrast must lie in (0, 1]")
    if not t0 > 0:
        raise ValueError("t0 must be positive")
    flags = []
    amp = fit.amplitude
    cov = fit.pq_covariance()
    amp_err = math.sqrt(max(0.0, np.array([fit.p, fit.q]) @ cov @ np.array([fit.p, fit.q]))) / amp \
        if amp > 0 else math.sqrt(max(0.0, np.trace(cov) / 2))
    if amp == 0 or amp < 3 * amp_err:
        flags.append("unconstrained")
    if amp == 0:
        return DissipativeEstimate(math.inf, 0.0, math.inf, math.inf, contrast, contrast_err,
                                   0.0, tuple(flags))

    phase = fit.phase
    if not -math.pi / 2 < phase <= math.pi / 2:
        flags.append("outside_principal_branch")
    dphase, dlog_amp = _amp_phase_jacobians(fit.p, fit.q)
    omega = phase / (2 * t0)
    omega_err = math.sqrt(max(0.0, dphase @ cov @ dphase)) / (2 * t0)

    ratio = amp / contrast
    if ratio > 1:
        warnings.warn(
            f"fringe amplitude {amp:.4g} exceeds contrast {contrast:.4g}; alpha clamped to 0",
            UnphysicalEstimateWarning, stacklevel=2,
        )
        flags.append("unphysical_amplitude")
        alpha = 0.0
    else:
        alpha = -math.log(ratio) / (2 * t0)
    var_alpha = (dlog_amp @ cov @ dlog_amp + (contrast_err / contrast) ** 2) / (2 * t0) ** 2
    return DissipativeEstimate(alpha, omega, math.sqrt(max(0.0, var_alpha)), omega_err,
                               contrast, contrast_err, phase, tuple(flags))


def two_time_separation(fit_a: FitResult, t0_a: float, fit_b: FitResult, t0_b: float) -> DissipativeEstimate:
    """Joint alpha, omega and contrast from scans at two flight times.

    The amplitude ratio gives alpha and the phase difference gives omega, so
    neither a contrast estimate nor the instrument phase is needed.
    """
    if t0_a == t0_b:
        raise ValueError("the two flight times must differ")
    if not (fit_a.converged and fit_b.converged):
        raise ValueError("both fits must have converged")
    dt = t0_b - t0_a
    amp_a, amp_b = fit_a.amplitude, fit_b.amplitude
    if amp_a == 0 or amp_b == 0:
        return DissipativeEstimate(math.nan, math.nan, math.inf, math.inf, math.nan, math.inf,
                                   math.nan, ("unconstrained",))
    dphi = math.remainder(fit_b.phase - fit_a.phase, 2 * math.pi)
    omega = dphi / (2 * dt)
    alpha = (math.log(amp_a) - math.log(amp_b)) / (2 * dt)
    log_c = (t0_b * math.log(amp_a) - t0_a * math.log(amp_b)) / dt
    contrast = math.exp(log_c)

    dph_a, dla_a = _amp_phase_jacobians(fit_a.p, fit_a.q)
    dph_b, dla_b = _amp_phase_jacobians(fit_b.p, fit_b.q)
    ca, cb = fit_a.pq_covariance(), fit_b.pq_covariance()

    def var(ga, gb):
        return float(ga @ ca @ ga + gb @ cb @ gb)

    omega_err = math.sqrt(var(-dph_a, dph_b)) / (2 * abs(dt))
    alpha_err = math.sqrt(var(dla_a, -dla_b)) / (2 * abs(dt))
    contrast_err = contrast * math.sqrt(var(t0_b / dt * dla_a, -t0_a / dt * dla_b))

    flags = []
    if contrast > 1:
        flags.append("contrast_above_one")
    if alpha < 0:
        flags.append("negative_alpha")
    phase_a = fit_a.phase
    return DissipativeEstimate(alpha, omega, alpha_err, omega_err, contrast, contrast_err,
                               phase_a, tuple(flags))


def poisson_counts(expected, seed) -> np.ndarray:
    """Independent Poisson draws with the given means; deterministic in ``seed``."""
    expected = np.asarray(expected, dtype=float)
    if np.any(expected < 0) or not np.all(np.isfinite(expected)):
        raise ValueError("expected counts must be finite and non-negative")
    return np.random.default_rng(seed).poisson(expected)


def synth_dataset(fp: FringeParams, g: InstrumentGeometry, xs, seed=None, port=Port.MINUS,
                  noise=True) -> FringeDataset:
    """Synthetic scan drawn from the fringe model.

    With ``noise=False`` the counts are the (real-valued) expectations.
    """
    port = Port.parse(port)
    expected = fringe_counts(fp, g, xs, port)
    if np.any(expected < 0):
        raise ValueError("model expectation is negative at some x")
    counts = poisson_counts(expected, seed) if noise else expected
    return FringeDataset(np.asarray(xs, dtype=float), counts, port, g)
