"""Command-line front end.

Subcommands: ``simulate``, ``validate``, ``synth``, ``fit``, ``scale-bound``.
Exit codes: 0 success, 1 validation/physics failure, 2 usage, 3 numerical
non-convergence.
"""

from __future__ import annotations

import argparse
import math
import sys
import warnings
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import dynamics, io
from .constants import ATOM_MASSES_GEV, PLANCK_MASS_GEV, gev_to_per_second, per_second_to_khz
from .fitting import (
    extract_dissipative,
    fit_fringe,
    poisson_counts,
    two_time_separation,
    visibility_contrast,
    DissipativeEstimate,
    FringeDataset,
    UnphysicalEstimateWarning,
)
from .fringe import flight_time
from .generator import PARAM_NAMES, check_complete_positivity, dissipative_scale
from .state import Port

EXIT_OK, EXIT_INVALID, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3
ROUTES = ("auto", "general", "simple", "perturbative", "standard", "evolve")
SCALE_WINDOW_GEV = (1e-18, 1e-15)


class CliError(Exception):
    def __init__(self, msg, code=EXIT_INVALID):
        super().__init__(msg)
        self.code = code


def _emit(text: str, path):
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _load(reader, path, *args):
    try:
        return reader(path, *args)
    except io.ParseError as exc:
        raise CliError(f"parse error: {exc}") from None
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from None


def _scan_positions(args, g):
    lo = args.x_min_nm * 1e-9
    hi = g.period if args.x_max_nm is None else args.x_max_nm * 1e-9
    return np.linspace(lo, hi, args.points, endpoint=args.x_max_nm is not None)


def _pick_route(p, requested):
    if requested != "auto":
        return requested
    if p.is_zero:
        return "standard"
    if p.is_weak_coupling:
        return "simple"
    try:
        dynamics.intensity_general(p, 0.0, 0.0)
    except dynamics.DegenerateSpectrumError:
        return "evolve"
    return "general"


def _route_intensity(route, p, theta, t, port):
    if route == "standard":
        return dynamics.intensity_standard(theta, port) + 0.0 * t
    if route == "simple":
        return dynamics.intensity_simple(p.alpha, p.omega, theta, t, port)
    if route == "perturbative":
        return dynamics.intensity_perturbative(p, theta, t, port)
    if route == "general":
        return dynamics.intensity_general(p, theta, t, port)
    return dynamics.intensity_evolve(p, theta, t, port)


def _intensities(p, route, theta, t):
    try:
        return (_route_intensity(route, p, theta, t, Port.PLUS),
                _route_intensity(route, p, theta, t, Port.MINUS))
    except dynamics.DegenerateSpectrumError as exc:
        raise CliError(f"route {route!r}: {exc}", EXIT_NUMERIC) from None
    except dynamics.DomainError as exc:
        raise CliError(f"route {route!r}: {exc}") from None


def _physics_inputs(args):
    p = _load(io.read_params, args.params)
    g = _load(io.read_geometry, args.geometry)
    cert = check_complete_positivity(p)
    notes = []
    if not cert.satisfied:
        if not args.allow_noncp:
            raise CliError("parameters violate complete positivity: " + ", ".join(cert.violated)
                           + " (use --allow-noncp to override)")
        notes.append("WARNING: parameters violate complete positivity: " + ", ".join(cert.violated))
    route = _pick_route(p, args.route)
    if route == "simple" and not (p.is_weak_coupling or p.is_zero):
        raise CliError("route 'simple' needs gamma = b = c = beta = 0 and a = alpha")
    if route == "standard" and not p.is_zero:
        raise CliError("route 'standard' needs all parameters zero")
    return p, g, route, notes


def _times(args, g, xs):
    return flight_time(g, xs) if args.exact_time else np.full_like(xs, g.t0)


def _fmt(v) -> str:
    return f"{v:.12e}"


def cmd_simulate(args) -> int:
    p, g, route, notes = _physics_inputs(args)
    xs = _scan_positions(args, g)
    theta = g.phase(xs)
    t = _times(args, g, xs)
    i_plus, i_minus = _intensities(p, route, theta, t)
    i_plus = np.broadcast_to(i_plus, xs.shape)
    i_minus = np.broadcast_to(i_minus, xs.shape)
    n_plus = args.n0 * (1 + args.contrast * (2 * i_plus - 1))
    n_minus = args.n0 * (1 + args.contrast * (2 * i_minus - 1))

    ref_plus = dynamics.intensity_evolve(p, theta, t, Port.PLUS)
    discrepancy = float(np.max(np.abs(i_plus - ref_plus)))
    conservation = float(np.max(np.abs(i_plus + i_minus - 1)))

    out = ["# lindfringe simulate", f"# route = {route}",
           "# params (s^-1): " + ", ".join(f"{k}={getattr(p, k)!r}" for k in PARAM_NAMES),
           f"# geometry: kappa={g.kappa!r} m^-1, t0={g.t0!r} s, theta0={g.theta0!r} rad, "
           f"time={'exact' if args.exact_time else 't0'}",
           f"# n0 = {args.n0!r} counts, contrast = {args.contrast!r}"]
    out += [f"# {n}" for n in notes]
    out.append("# columns: x_nm theta_rad t_s I_plus I_minus N_plus N_minus")
    for row in zip(xs * 1e9, theta, t, i_plus, i_minus, n_plus, n_minus):
        out.append(" ".join(_fmt(v) for v in row))
    out.append(f"# max |I_plus({route}) - I_plus(evolve)| = {discrepancy:.3e}")
    out.append(f"# max |I_plus + I_minus - 1| = {conservation:.3e}")
    _emit("\n".join(out) + "\n", args.output)
    return EXIT_OK


def cmd_validate(args) -> int:
    p = _load(io.read_params, args.params)
    cert = check_complete_positivity(p, args.tol)
    print(cert.report())
    return EXIT_OK if cert.satisfied else EXIT_INVALID


def cmd_synth(args) -> int:
    p, g, route, notes = _physics_inputs(args)
    port = Port.parse(args.port)
    xs = _scan_positions(args, g)
    theta = g.phase(xs)
    t = _times(args, g, xs)
    try:
        i_port = _route_intensity(route, p, theta, t, port)
    except dynamics.DegenerateSpectrumError as exc:
        raise CliError(f"route {route!r}: {exc}", EXIT_NUMERIC) from None
    except dynamics.DomainError as exc:
        raise CliError(f"route {route!r}: {exc}") from None
    expected = args.n0 * (1 + args.contrast * (2 * np.broadcast_to(i_port, xs.shape) - 1))
    counts = expected if args.noiseless else poisson_counts(expected, args.seed)
    ds = FringeDataset(xs, counts, port, g)
    comments = [f"lindfringe synth route={route} seed={args.seed} n0={args.n0!r} "
                f"contrast={args.contrast!r} noiseless={args.noiseless}"] + notes
    _emit(io.format_dataset(ds, comments), args.output)
    return EXIT_OK


def _fit_one(ds, args):
    theta0 = args.theta0 if args.theta0 is not None else None
    fit = fit_fringe(ds, theta0=theta0, free_phase=args.free_phase)
    if not fit.converged:
        raise CliError(f"fit of {len(ds)} samples did not converge: {fit.message}", EXIT_NUMERIC)
    return fit


def _fit_lines(prefix, fit):
    e = fit.errors
    return [
        (f"{prefix}n0_counts", f"{fit.n0:.10g} +- {e[0]:.3g}"),
        (f"{prefix}P", f"{fit.p:.10g} +- {e[1]:.3g}"),
        (f"{prefix}Q", f"{fit.q:.10g} +- {e[2]:.3g}"),
        (f"{prefix}theta0_rad", f"{fit.theta0:.10g} ({'free, convention 0' if fit.theta0_free else 'fixed'})"),
        (f"{prefix}chi2", f"{fit.chi2:.6g}"),
        (f"{prefix}dof", str(fit.dof)),
        (f"{prefix}chi2_per_dof", f"{fit.reduced_chi2:.6g}"),
    ]


def _estimate_lines(est):
    if not est.constrained:
        return [("alpha", "unconstrained"), ("omega", "unconstrained"),
                ("flags", ",".join(est.flags))]
    return [
        ("alpha_per_s", f"{est.alpha:.6g} +- {est.alpha_err:.3g}"),
        ("alpha_GeV", f"{est.alpha_gev:.6g} +- {est.alpha_err_gev:.3g}"),
        ("omega_per_s", f"{est.omega:.6g} +- {est.omega_err:.3g}"),
        ("omega_GeV", f"{est.omega_gev:.6g} +- {est.omega_err_gev:.3g}"),
        ("contrast", f"{est.contrast_used:.6g} +- {est.contrast_err:.3g}"),
        ("phase_2omega_t0_rad", f"{est.phase:.6g} (modulo 2 pi)"),
        ("flags", ",".join(est.flags) or "none"),
    ]


def cmd_fit(args) -> int:
    g = _load(io.read_geometry, args.geometry)
    ds = _load(io.read_dataset, args.dataset, g, args.port)
    fit = _fit_one(ds, args)
    pairs = [("dataset", str(args.dataset)), ("port", ds.port.value), ("t0_s", repr(g.t0))]
    pairs += _fit_lines("", fit)
    report = {"schema": io.REPORT_SCHEMA["schema"], "dataset": str(args.dataset),
              "t0_s": g.t0, "fit": fit.as_dict()}

    if args.second_dataset:
        g2 = _load(io.read_geometry, args.second_geometry) if args.second_geometry else None
        if g2 is None:
            raise CliError("--second-dataset needs --second-geometry", EXIT_USAGE)
        ds2 = _load(io.read_dataset, args.second_dataset, g2, args.port)
        fit2 = _fit_one(ds2, args)
        try:
            est = two_time_separation(fit, g.t0, fit2, g2.t0)
        except ValueError as exc:
            raise CliError(str(exc)) from None
        source = "two-time"
        pairs += [("second_dataset", str(args.second_dataset)), ("second_t0_s", repr(g2.t0))]
        pairs += _fit_lines("second_", fit2)
        report["second_fit"] = fit2.as_dict()
    else:
        if args.contrast is not None:
            contrast, source = args.contrast, "user"
        else:
            contrast, source = visibility_contrast(ds, method=args.visibility_method), "visibility"
        if contrast == 0 and source == "visibility":
            est = DissipativeEstimate(math.nan, math.nan, math.inf, math.inf, 0.0,
                                      flags=("unconstrained",))
        elif not 0 < contrast <= 1:
            raise CliError(f"contrast {contrast!r} outside (0, 1]")
        else:
            with warnings.catch_warnings():
                # reported through the 'unphysical_amplitude' flag instead
                warnings.simplefilter("ignore", UnphysicalEstimateWarning)
                est = extract_dissipative(fit, contrast, g.t0, args.contrast_err)
        if source == "visibility":
            est = replace(est, flags=est.flags + ("contrast_from_same_data",))
    pairs.append(("contrast_source", source))
    pairs += _estimate_lines(est)
    if source == "visibility":
        pairs.append(("note", "contrast taken from the visibility of the same scan is itself damped "
                              "by exp(-2 alpha t0); alpha is biased towards 0"))
    report["contrast_source"] = source
    report["estimate"] = est.as_dict()

    _emit(io.format_key_values(pairs), args.output)
    if args.json:
        Path(args.json).write_text(io.dump_json(report))
    return EXIT_OK


def cmd_scale_bound(args) -> int:
    mass = ATOM_MASSES_GEV[args.atom] if args.atom else args.atom_mass_gev
    try:
        scale = dissipative_scale(mass, args.planck_mass_gev)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_USAGE) from None
    rate = gev_to_per_second(scale)
    lo, hi = SCALE_WINDOW_GEV
    decade = math.log10(scale)
    pairs = [
        ("atom_mass_GeV", f"{mass:.6g}"),
        ("planck_mass_GeV", f"{args.planck_mass_gev:.6g}"),
        ("scale_GeV", f"{scale:.6e}"),
        ("scale_per_s", f"{rate:.6e}"),
        ("scale_KHz", f"{per_second_to_khz(rate):.6e}"),
        ("log10_scale_GeV", f"{decade:.3f}"),
        ("in_window_1e-18_1e-15_GeV", str(lo <= scale <= hi).lower()),
        # the quoted window is an order-of-magnitude statement; compare decades
        ("decade_in_window", str(round(math.log10(lo)) <= round(decade) <= round(math.log10(hi))).lower()),
    ]
    print(io.format_key_values(pairs), end="")
    return EXIT_OK


def _add_physics_args(sp):
    sp.add_argument("--params", required=True, help="parameter file (key = value, units declared)")
    sp.add_argument("--geometry", required=True, help="geometry file")
    sp.add_argument("--route", choices=ROUTES, default="auto")
    sp.add_argument("--allow-noncp", action="store_true", help="accept parameters that violate complete positivity")
    sp.add_argument("--exact-time", action="store_true", help="use t = t0 + bragg_angle x / v instead of t0")
    sp.add_argument("--x-min-nm", type=float, default=0.0)
    sp.add_argument("--x-max-nm", type=float, default=None,
                    help="default: one fringe period, endpoint excluded")
    sp.add_argument("--n0", type=float, default=1e4, help="normalisation (counts per point)")
    sp.add_argument("--contrast", type=float, default=1.0)
    sp.add_argument("-o", "--output", default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lindfringe", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("simulate", help="tabulate intensities and counts over a grating scan")
    _add_physics_args(sp)
    sp.add_argument("--points", type=int, default=101)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("validate", help="check the complete-positivity inequalities")
    sp.add_argument("--params", required=True)
    sp.add_argument("--tol", type=float, default=0.0)
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("synth", help="Poisson-sampled synthetic scan")
    _add_physics_args(sp)
    sp.add_argument("--points", type=int, default=50)
    sp.add_argument("--port", default="-")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--noiseless", action="store_true", help="write expectations instead of draws")
    sp.set_defaults(func=cmd_synth)

    sp = sub.add_parser("fit", help="fit a scan and extract alpha, omega")
    sp.add_argument("--dataset", required=True)
    sp.add_argument("--geometry", required=True)
    sp.add_argument("--port", default=None)
    sp.add_argument("--contrast", type=float, default=None, help="override the visibility estimate")
    sp.add_argument("--contrast-err", type=float, default=0.0)
    sp.add_argument("--visibility-method", choices=("quantile", "extrema"), default="quantile")
    sp.add_argument("--theta0", type=float, default=None, help="override the geometry's theta0 (rad)")
    sp.add_argument("--free-phase", action="store_true", help="theta0 unknown: fit with theta0 = 0")
    sp.add_argument("--second-dataset", default=None)
    sp.add_argument("--second-geometry", default=None)
    sp.add_argument("--json", default=None, help="write the structured report here")
    sp.add_argument("-o", "--output", default=None)
    sp.set_defaults(func=cmd_fit)

    sp = sub.add_parser("scale-bound", help="M_A^2 / M_P in GeV and KHz")
    mass = sp.add_mutually_exclusive_group(required=True)
    mass.add_argument("--atom-mass-gev", type=float)
    mass.add_argument("--atom", choices=sorted(ATOM_MASSES_GEV))
    sp.add_argument("--planck-mass-gev", type=float, default=PLANCK_MASS_GEV)
    sp.set_defaults(func=cmd_scale_bound)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "points", 6) < 2:
        parser.error("--points must be at least 2")
    try:
        return args.func(args)
    except CliError as exc:
        print(f"lindfringe {args.command}: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
