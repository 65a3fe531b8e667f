import numpy as np
from cascopt.params import reference_physical_params, nondimensionalize
from cascopt import meanfield, linearized, spectra

base = reference_physical_params()

# (a) any secondary maxima anywhere in the lorentzian window at 2 mW?
mp = nondimensionalize(base)
s = meanfield.steady_meanfield(mp)
w = np.linspace(0.05, 2.0, 150001)
v = spectra.position_spectrum(1, mp, s, w).values
idx = np.flatnonzero((v[1:-1] > v[:-2]) & (v[1:-1] >= v[2:])) + 1
print("2 mW maxima over [0.05,2]:", np.round(w[idx], 5), "rel heights", np.round(v[idx]/v.max(), 6))

def full_out_psd(dd, grid):
    Nm = np.zeros_like(dd.N); Nm[1,1] = dd.N[1,1]; Nm[5,5] = dd.N[5,5]
    u = np.zeros(8); u[2] = u[6] = 1.0
    out = np.empty_like(grid)
    for k, om in enumerate(grid):
        M = np.linalg.inv(-1j * om * np.eye(8) - dd.S)
        out[k] = (u @ (M @ Nm @ M.conj().T) @ u).real
    return out

# (b) P_out deviation inside the resonance band, resolved sidebands, G/kappa = 0.05
for kap_frac in (0.05, 0.1):
    kap_si = kap_frac * base.omega1
    # solve for power giving G1/kappa = 0.05: G = g*|A1|, |A1| ~ E/|k/2+i| with E ~ sqrt(2 kappa P/hbar wL)
    p0 = base.replace(kappa=kap_si, power1=1e-6, omega2=base.omega2 * 1.5)
    mp0 = nondimensionalize(p0)
    s0 = meanfield.steady_meanfield(mp0)
    ratio0 = abs(s0.coupling(mp0, 1)) / mp0.kappa
    pw = 1e-6 * (0.05 / ratio0) ** 2
    p1 = p0.replace(power1=pw)
    mp1 = nondimensionalize(p1)
    s1 = meanfield.steady_meanfield(mp1)
    print(f"kappa={mp1.kappa:.3g} G/k={abs(s1.coupling(mp1,1))/mp1.kappa:.4g}")
    dd1 = linearized.build_drift_diffusion(s1, mp1)
    band = np.linspace(0.8, 1.7, 1200)
    closed = spectra.output_spectrum(mp1, s1, band).values
    oracle = mp1.kappa * full_out_psd(dd1, band)
    rel = np.abs(closed - oracle) / oracle
    print(f"  band [0.8,1.7]: max rel dev {rel.max():.4g} at {band[np.argmax(rel)]:.4g}")
    wide = np.linspace(0.3, 2.2, 1200)
    closedw = spectra.output_spectrum(mp1, s1, wide).values
    oraclew = mp1.kappa * full_out_psd(dd1, wide)
    relw = np.abs(closedw - oraclew) / oraclew
    print(f"  wide  [0.3,2.2]: max rel dev {relw.max():.4g}; rel-to-peak {np.max(np.abs(closedw-oraclew))/oraclew.max():.4g}")
