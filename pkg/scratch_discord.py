import math
import numpy as np
from cascopt import gaussinfo
from cascopt.gaussinfo import TwoModeGaussian, gaussian_discord, discord_by_measurement, mutual_information, entropy_f

# 1) classical-on-A state: u_B = m*u_A + independent noise
nu, m, nuB = 1e4, 0.01, 3.0
A = nu*np.eye(2); D = m*nu*np.eye(2); B = (m*m*nu + nuB)*np.eye(2)
g = TwoModeGaussian(A, B, D)
print("classical-on-A: I =", mutual_information(g))
print("  D(B|A) [measure A] =", gaussian_discord(g, 'B_given_A'), discord_by_measurement(g, 'B_given_A'))
print("  D(A|B) [measure B] =", gaussian_discord(g, 'A_given_B'), discord_by_measurement(g, 'A_given_B'))

# 2) pure two-mode squeezed vacuum r=1: D(A|B) must equal local entropy f(cosh(2r)/2)
r = 1.0
ch, sh = math.cosh(2*r)/2, math.sinh(2*r)/2
A = ch*np.eye(2); B = ch*np.eye(2); D = np.diag([sh, -sh])
g = TwoModeGaussian(A, B, D)
print("TMSV: I =", mutual_information(g), " 2*f =", 2*entropy_f(ch))
print("  D(A|B) =", gaussian_discord(g, 'A_given_B'), discord_by_measurement(g, 'A_given_B'),
      " expected f(cosh2r/2) =", entropy_f(ch))
print("  D(B|A) =", gaussian_discord(g, 'B_given_A'), discord_by_measurement(g, 'B_given_A'))

# 3) ordinary-convention reference point
from cascopt.params import reference_physical_params, nondimensionalize
from cascopt import meanfield, linearized, observables, effective
p = reference_physical_params(kappa=2*math.pi*1.34e6)
mp = nondimensionalize(p)
print("\nordinary convention: kappa =", mp.kappa, "E1 =", f"{mp.E1:.5g}")
s = meanfield.steady_meanfield(mp)
print("|A1|", f"{abs(s.A1):.5g}", "|A2|", f"{abs(s.A2):.5g}", "G1", f"{abs(s.coupling(mp,1)):.5g}", "G2", f"{abs(s.coupling(mp,2)):.5g}")
dd = linearized.build_drift_diffusion(s, mp)
print("Hurwitz:", dd.hurwitz())
css = linearized.steady_covariance(dd)
n1 = observables.effective_occupation(css, 1); n2 = observables.effective_occupation(css, 2)
ep = effective.effective_rates(mp, s)
print(f"n1={n1:.5g} n2={n2:.5g}  rate-eq n1={mp.gamma1*mp.nbar1/(mp.gamma1+2*ep.gamma_eff_1):.5g} rate-eq-ish n2={(mp.gamma2*mp.nbar2 + 2*ep.gamma_eff_2*0)/(mp.gamma2+2*ep.gamma_eff_2):.5g}")
print(f"Gamma_eff_1={ep.gamma_eff_1:.5g} Gamma_eff_2={ep.gamma_eff_2:.5g} |Lambda|={abs(ep.coupling):.5g}")
pair = gaussinfo.extract_mirror_pair(css)
print("MI =", mutual_information(pair))
print("D(A|B) steady =", gaussian_discord(pair, 'A_given_B'))
print("D(B|A) steady =", gaussian_discord(pair, 'B_given_A'))
T1 = observables.effective_temperature(n1, mp.omega_rad_s(1))
T2 = observables.effective_temperature(n2, mp.omega_rad_s(2))
print(f"T1={T1:.6g} T2={T2:.6g} grad={T2-T1:.5g}")
