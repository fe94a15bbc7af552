"""Complete positivity in practice.

The six dissipative parameters are not free: the inequalities written in
terms of R, S, T bound the couplings b, c, beta.  Setting gamma = 0 forces
b = c = beta = 0 and a = alpha, which is the weak-coupling case.
"""

import numpy as np

from lindfringe import LindbladParams, check_complete_positivity, sample_cp_params, spectrum

cases = {
    "weak coupling": LindbladParams(a=1.0, alpha=1.0, omega=2.0),
    "gamma=0 with b": LindbladParams(a=1.0, alpha=1.0, b=0.2, omega=2.0),
    "isotropic": LindbladParams(a=1.0, alpha=1.0, gamma=1.0),
}
for name, p in cases.items():
    cert = check_complete_positivity(p)
    print(f"{name:15s} R={cert.R:g} S={cert.S:g} T={cert.T:g} ->",
          "ok" if cert.satisfied else "violates " + ", ".join(cert.violated))

print("\nfull report for the violating case:")
print(check_complete_positivity(cases["gamma=0 with b"]).report())

# every CP generator damps: eigenvalues of H have non-negative real parts
rng = np.random.default_rng(0)
worst = min(min(z.real for z in spectrum(sample_cp_params(rng)).roots) for _ in range(2000))
print(f"\nsmallest Re(lambda) over 2000 random CP generators: {worst:.3e}")
