import numpy as np
from cascopt.params import reference_physical_params, nondimensionalize
from cascopt import meanfield, linearized, spectra

base = reference_physical_params()

def full_out_psd(dd, omega_grid):
    N_mech = np.zeros_like(dd.N)
    N_mech[1, 1] = dd.N[1, 1]
    N_mech[5, 5] = dd.N[5, 5]
    out = np.empty_like(omega_grid)
    u = np.zeros(8); u[2] = u[6] = 1.0
    I = np.eye(8)
    for k, w in enumerate(omega_grid):
        M = np.linalg.inv(-1j * w * I - dd.S)
        P = M @ N_mech @ M.conj().T
        out[k] = (u @ P @ u).real
    return out

p = base.replace(power1=base.power1 * 0.0109, omega2=base.omega2 * 1.5)
mp = nondimensionalize(p)
s = meanfield.steady_meanfield(mp)
dd = linearized.build_drift_diffusion(s, mp)
grid = np.linspace(0.3, 2.0, 1200)
closed = spectra.output_spectrum(mp, s, grid).values
oracle = mp.kappa * full_out_psd(dd, grid)
rel = np.abs(closed - oracle) / oracle
peak = oracle.max()
print("oracle peak:", f"{peak:.4g}", " oracle min:", f"{oracle.min():.4g}")
for thresh in (0.05, 0.02, 0.01):
    bad = grid[rel > thresh]
    print(f"rel>{thresh}: {len(bad)} pts", (f"range {bad.min():.3g}..{bad.max():.3g}" if len(bad) else ""))
# how small is the spectrum where deviation exceeds 5%?
mask = rel > 0.05
if mask.any():
    print("max oracle value in bad region / peak:", oracle[mask].max() / peak)
# deviation near peaks
for c in (1.0, 1.5):
    sel = np.abs(grid - c) < 0.05
    print(f"near {c}: max rel dev {rel[sel].max():.4g}")
# relative-to-peak deviation everywhere
print("max |closed-oracle|/peak:", (np.abs(closed - oracle) / peak).max())

# ---- two-peak scan at 2 mW, full window
mp2 = nondimensionalize(base)
s2 = meanfield.steady_meanfield(mp2)
w = np.linspace(0.6, 1.4, 8001)
v = spectra.position_spectrum(1, mp2, s2, w).values
idx = np.flatnonzero((v[1:-1] > v[:-2]) & (v[1:-1] >= v[2:])) + 1
print("2 mW mirror-1 local maxima at:", w[idx], "values", v[idx])
import cmath
G = abs(s2.coupling(mp2, 1))
print("sqrt2*G =", 2**0.5 * G, "kappa/2 =", mp2.kappa / 2)
# ordinary convention too
mp3 = nondimensionalize(base.replace(kappa=2*np.pi*1.34e6))
s3 = meanfield.steady_meanfield(mp3)
v3 = spectra.position_spectrum(1, mp3, s3, w).values
idx3 = np.flatnonzero((v3[1:-1] > v3[:-2]) & (v3[1:-1] >= v3[2:])) + 1
print("2 mW ordinary-kappa maxima at:", w[idx3])
