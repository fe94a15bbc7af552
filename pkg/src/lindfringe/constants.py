"""Physical constants and unit conversions.

Every GeV <-> s^-1 conversion in the package goes through this table.
"""

# CODATA 2018 reduced Planck constant, GeV s
HBAR_GEV_S = 6.582119569e-25

# Planck mass, GeV
PLANCK_MASS_GEV = 1.220890e19

# atomic mass unit, GeV
AMU_GEV = 0.93149410242

# Atomic masses (GeV) of species used in matter-wave interferometers.
ATOM_MASSES_GEV = {
    "Li-7": 7.01600343 * AMU_GEV,
    "Na-23": 22.98976928 * AMU_GEV,
    "Ne-20": 19.99244018 * AMU_GEV,
    "Rb-87": 86.90918053 * AMU_GEV,
    "Cs-133": 132.90545196 * AMU_GEV,
}


def gev_to_per_second(x):
    """Convert an energy in GeV to an angular frequency in s^-1."""
    return x / HBAR_GEV_S


def per_second_to_gev(x):
    """Convert an angular frequency in s^-1 to an energy in GeV."""
    return x * HBAR_GEV_S


def per_second_to_khz(x):
    # the KHz figures quoted for the dissipative scale are s^-1 / 1e3 (no 2 pi)
    return x / 1e3
