import math, time
import numpy as np
from cascopt.params import reference_physical_params, nondimensionalize
from cascopt import meanfield, linearized, effective, spectra, stability

base = reference_physical_params()

def full_response_psd(dd, omega_grid, rows):
    """PSD of sum(rows) driven by mechanical noise only."""
    N_mech = np.zeros_like(dd.N)
    N_mech[1, 1] = dd.N[1, 1]
    N_mech[5, 5] = dd.N[5, 5]
    out = np.empty_like(omega_grid)
    u = np.zeros(8); u[list(rows)] = 1.0
    I = np.eye(8)
    for k, w in enumerate(omega_grid):
        M = np.linalg.inv(-1j * w * I - dd.S)
        P = M @ N_mech @ M.conj().T
        out[k] = (u @ P @ u).real
    return out

# weak coupling point, Omega2 = 1.5
p = base.replace(power1=base.power1 * 0.0109, omega2=base.omega2 * 1.5)
mp = nondimensionalize(p)
s = meanfield.steady_meanfield(mp)
print("G1/kappa =", abs(s.coupling(mp, 1)) / mp.kappa)
dd = linearized.build_drift_diffusion(s, mp)
grid = np.linspace(0.3, 2.0, 3000)

for mirror, row in ((1, 0), (2, 4)):
    closed = spectra.position_spectrum(mirror, mp, s, grid).values
    oracle = full_response_psd(dd, grid, (row,))
    rel = np.abs(closed - oracle) / np.maximum(oracle, oracle.max() * 1e-12)
    print(f"S^q_{mirror}: max rel dev = {rel.max():.4g} at w={grid[np.argmax(rel)]:.4g}")

out_closed = spectra.output_spectrum(mp, s, grid).values
out_oracle = mp.kappa * full_response_psd(dd, grid, (2, 6))
rel = np.abs(out_closed - out_oracle) / np.maximum(out_oracle, out_oracle.max() * 1e-12)
print(f"P_out: max rel dev = {rel.max():.4g} at w={grid[np.argmax(rel)]:.4g}")

# peak locations: output vs individual, for Omega2 in {0.5, 1, 1.5}
for f2 in (0.5, 1.0, 1.5):
    p2 = base.replace(power1=1e-5, omega2=base.omega2 * f2)
    mp2 = nondimensionalize(p2)
    s2 = meanfield.steady_meanfield(mp2)
    g = spectra.default_grid(mp2)
    outsp = spectra.output_spectrum(mp2, s2, g)
    peaks_out = []
    v = outsp.values
    idx = np.flatnonzero((v[1:-1] > v[:-2]) & (v[1:-1] >= v[2:])) + 1
    idx = idx[np.argsort(v[idx])[::-1][:2]]
    peaks_out = sorted(g[i] for i in idx)
    peaks_ind = []
    for m in (1, 2):
        sv = spectra.position_spectrum(m, mp2, s2, g).values
        peaks_ind.append(g[np.argmax(sv)])
    peaks_ind = sorted(peaks_ind)
    step = g[1] - g[0]
    print(f"Omega2={f2}: out peaks {peaks_out} individual {peaks_ind} step {step:.5g}")

# Lorentzian approx low/high power
import warnings
for power, label in ((1e-5, "low"), (2e-3, "high")):
    mpl = nondimensionalize(base.replace(power1=power))
    sl = meanfield.steady_meanfield(mpl)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        fit = spectra.lorentzian_approx(1, mpl, sl)
    kinds = [w.category.__name__ for w in caught]
    exact_peak = spectra.position_spectrum(1, mpl, sl, np.linspace(fit.center*0.97, fit.center*1.03, 20001)).values.max()
    print(f"{label} power: center={fit.center:.6g} width={fit.width:.4g} peakfit={fit.amplitude:.5g} exactpeak={exact_peak:.5g} relpeak={(fit.amplitude-exact_peak)/exact_peak:.3g} warns={kinds}")
