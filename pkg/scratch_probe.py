import time
import numpy as np
from cascopt.params import reference_physical_params, nondimensionalize
from cascopt import meanfield, linearized, effective, gaussinfo, observables

mp = nondimensionalize(reference_physical_params())
t0 = time.time()
s = meanfield.steady_meanfield(mp)
print(f"steady_meanfield: {time.time()-t0:.2f}s  |A1|={abs(s.A1):.5g} |A2|={abs(s.A2):.5g} Q1={s.Q1:.5g} Q2={s.Q2:.5g}")
print("residual:", np.linalg.norm(meanfield.meanfield_rhs(s, mp).to_vector()))

dd = linearized.build_drift_diffusion(s, mp)
eigs = np.linalg.eigvals(dd.S)
print("S eig real parts:", np.sort(eigs.real))
css = linearized.steady_covariance(dd)
print("Lyap residual rel:", linearized.lyapunov_residual(dd, css.C)/np.linalg.norm(dd.N))
print("min sympl eig:", css.symplectic_eigenvalues()[0])
n1 = observables.effective_occupation(css, 1)
n2 = observables.effective_occupation(css, 2)
print(f"n1={n1:.5g} n2={n2:.5g}")
T1 = observables.effective_temperature(n1, mp.omega_rad_s(1))
T2 = observables.effective_temperature(n2, mp.omega_rad_s(2))
print(f"T1={T1:.6g} K  T2={T2:.6g} K  gradient={T2-T1:.5g}")

ep = effective.effective_rates(mp, s)
print(f"Gamma_eff_1={ep.gamma_eff_1:.5g} Gamma_eff_2={ep.gamma_eff_2:.5g} |G1|={abs(ep.G1):.5g} |Lambda|={abs(ep.coupling):.5g}")
print("rate-eq prediction n1:", mp.gamma1*mp.nbar1/(mp.gamma1 + 2*ep.gamma_eff_1))

pair = gaussinfo.extract_mirror_pair(css)
inv = gaussinfo.symplectic_invariants(pair)
print("invariants:", inv)
mi = gaussinfo.mutual_information(pair)
dab = gaussinfo.gaussian_discord(pair, "A_given_B")
dba = gaussinfo.gaussian_discord(pair, "B_given_A")
print(f"steady: MI={mi:.6g} D(A|B)={dab:.6g} D(B|A)={dba:.6g}")
dab_o = gaussinfo.discord_by_measurement(pair, "A_given_B")
dba_o = gaussinfo.discord_by_measurement(pair, "B_given_A")
print(f"oracle: D(A|B)={dab_o:.6g} D(B|A)={dba_o:.6g}")
