"""Dissipative (Lindblad) dynamics of atom-interferometer beams and fringe fits."""

from .constants import ATOM_MASSES_GEV, gev_to_per_second, per_second_to_gev, per_second_to_khz
from .state import (
    BlochState,
    DensityMatrix,
    ExitProjector,
    Orientation,
    Port,
    StateError,
    from_bloch,
    initial_state,
    intensity,
    to_bloch,
)
from .generator import (
    CPCertificate,
    LindbladParams,
    build_dissipator,
    build_generator,
    check_complete_positivity,
    dissipative_scale,
    gev_to_angular_frequency,
    params_from_rst,
    sample_cp_params,
)
from .dynamics import (
    CubicCoefficients,
    DegenerateSpectrumError,
    DomainError,
    Spectrum,
    cubic_coefficients,
    evolve,
    intensity_evolve,
    intensity_general,
    intensity_perturbative,
    intensity_simple,
    intensity_standard,
    propagator,
    propagator_eigen,
    propagator_series,
    solve_cubic,
    spectrum,
)
from .fringe import (
    FringeParams,
    InstrumentGeometry,
    conservation_check,
    flight_time,
    fringe_counts,
    grating_phase,
    pq_from_physics,
)
from .fitting import (
    DissipativeEstimate,
    FitResult,
    FringeDataset,
    chi2,
    extract_dissipative,
    fit_fringe,
    poisson_counts,
    synth_dataset,
    two_time_separation,
    visibility_contrast,
)

__version__ = "0.1.0"
