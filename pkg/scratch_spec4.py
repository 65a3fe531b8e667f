import numpy as np
from cascopt.params import reference_physical_params, nondimensionalize
from cascopt import meanfield, linearized, spectra

base = reference_physical_params()

# ---- shape of |chi_eff|^2-based PSD at several powers (angular kappa)
for power_mw in (1, 2, 4, 8, 16):
    mp = nondimensionalize(base.replace(power1=power_mw * 1e-3))
    s = meanfield.steady_meanfield(mp)
    w = np.linspace(0.5, 1.5, 40001)
    v = spectra.position_spectrum(1, mp, s, w).values
    idx = np.flatnonzero((v[1:-1] > v[:-2]) & (v[1:-1] >= v[2:])) + 1
    idx = idx[v[idx] > v.max() * 1e-6]
    print(f"P={power_mw} mW: G1={abs(s.coupling(mp,1)):.4g} maxima at {np.round(w[idx], 4)}")

# ---- cross-check 2 mW shape against the matrix oracle
mp = nondimensionalize(base)
s = meanfield.steady_meanfield(mp)
dd = linearized.build_drift_diffusion(s, mp)
N_mech = np.zeros_like(dd.N); N_mech[1, 1] = dd.N[1, 1]; N_mech[5, 5] = dd.N[5, 5]
w = np.linspace(0.7, 1.3, 2401)
closed = spectra.position_spectrum(1, mp, s, w).values
oracle = np.empty_like(w)
I = np.eye(8)
for k, om in enumerate(w):
    M = np.linalg.inv(-1j * om * I - dd.S)
    oracle[k] = (M @ N_mech @ M.conj().T)[0, 0].real
print("2 mW S^q1 closed vs matrix oracle max rel dev:", np.max(np.abs(closed-oracle)/oracle))
io = np.flatnonzero((oracle[1:-1] > oracle[:-2]) & (oracle[1:-1] >= oracle[2:])) + 1
print("matrix-oracle maxima:", np.round(w[io], 4))

# ---- P_out vs oracle at resolved sidebands kappa = 0.05 Omega1, G/k=0.05
def full_out_psd(dd, grid):
    Nm = np.zeros_like(dd.N); Nm[1,1] = dd.N[1,1]; Nm[5,5] = dd.N[5,5]
    u = np.zeros(8); u[2] = u[6] = 1.0
    out = np.empty_like(grid)
    for k, om in enumerate(grid):
        M = np.linalg.inv(-1j * om * np.eye(8) - dd.S)
        out[k] = (u @ (M @ Nm @ M.conj().T) @ u).real
    return out

for kap_frac, pw in ((0.05, 2e-7), (0.1, 1e-6), (0.2132, 2.18e-5)):
    p = base.replace(kappa=kap_frac * base.omega1, power1=pw, omega2=base.omega2 * 1.5)
    mpx = nondimensionalize(p)
    sx = meanfield.steady_meanfield(mpx)
    print(f"kappa={mpx.kappa:.4g}: G1/kappa={abs(sx.coupling(mpx,1))/mpx.kappa:.3g}")
    ddx = linearized.build_drift_diffusion(sx, mpx)
    grid = np.linspace(0.3, 2.0, 900)
    closed = spectra.output_spectrum(mpx, sx, grid).values
    oracle = mpx.kappa * full_out_psd(ddx, grid)
    rel = np.abs(closed - oracle) / oracle
    print(f"  max rel dev={rel.max():.4g} at w={grid[np.argmax(rel)]:.4g}; relpeak={np.max(np.abs(closed-oracle))/oracle.max():.4g}")
