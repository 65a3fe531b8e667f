import math, time
import numpy as np
from cascopt.params import reference_physical_params, nondimensionalize
from cascopt import meanfield, linearized, effective, observables, spectra

base = reference_physical_params()

def at_coupling_ratio(ratio):
    """Scale power so |G1| = ratio * kappa at the steady state."""
    mp = nondimensionalize(base)
    s = meanfield.steady_meanfield(mp)
    g1 = abs(s.coupling(mp, 1))
    power = base.power1 * (ratio * mp.kappa / g1) ** 2
    mp2 = nondimensionalize(base.replace(power1=power))
    s2 = meanfield.steady_meanfield(mp2)
    return mp2, s2

for ratio in (0.2, 0.1, 0.05):
    t0 = time.time()
    mp, s = at_coupling_ratio(ratio)
    ep = effective.effective_rates(mp, s)
    horizon = 5.0 / (2 * ep.gamma_eff_1 + mp.gamma1)
    t_eval = np.linspace(0.0, horizon, 60)
    full = linearized.evolve_covariance(linearized.CovarianceState.thermal(mp), s, mp, t_eval)
    red = effective.evolve_effective_covariance(effective.thermal_reduced_covariance(mp), ep, mp, t_eval)
    n_full = np.array([observables.effective_occupation(C, 1) for C in full.covariances])
    n_red = red.occupations()[0]
    rel = np.abs(n_red - n_full) / np.abs(n_full)
    n2_full = np.array([observables.effective_occupation(C, 2) for C in full.covariances])
    n2_red = red.occupations()[1]
    rel2 = np.abs(n2_red - n2_full) / np.abs(n2_full)
    print(f"G/kappa={ratio}: |G1|={abs(s.coupling(mp,1)):.4g} max rel dev m1={rel.max():.4g} m2={rel2.max():.4g}  ({time.time()-t0:.1f}s)")

# spectra identities at a weak-coupling point
mp, s = at_coupling_ratio(0.05)
for mirror in (1, 2):
    var_spec = spectra.position_variance(mirror, mp, s)
    dd = linearized.build_drift_diffusion(s, mp)
    css = linearized.steady_covariance(dd)
    idx = 0 if mirror == 1 else 4
    var_cov = css.C[idx, idx]
    print(f"mirror {mirror}: var_spec={var_spec:.6g} var_cov={var_cov:.6g} rel={(var_spec-var_cov)/var_cov:.3g}")
