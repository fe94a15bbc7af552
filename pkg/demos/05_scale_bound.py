"""Size of the dissipative parameters expected from Planck-scale physics.

The rough upper bound is M_A^2 / M_P.  For the atoms used in matter-wave
interferometers it lands around 1e-18 to 1e-15 GeV, that is 1e3 to 1e6 KHz.
"""

import math

from lindfringe import ATOM_MASSES_GEV, dissipative_scale, gev_to_per_second, per_second_to_khz

print(f"{'atom':8s} {'M_A (GeV)':>10s} {'bound (GeV)':>12s} {'bound (KHz)':>12s} {'decade':>7s}")
for name, mass in sorted(ATOM_MASSES_GEV.items(), key=lambda kv: kv[1]):
    scale = dissipative_scale(mass)
    khz = per_second_to_khz(gev_to_per_second(scale))
    print(f"{name:8s} {mass:10.2f} {scale:12.2e} {khz:12.2e} {round(math.log10(scale)):7d}")

# the fitted lithium values sit far below the bound
print(f"\nfitted omega 0.20e-21 GeV is {0.20e-21 / dissipative_scale(ATOM_MASSES_GEV['Li-7']):.0e} x the lithium bound")
