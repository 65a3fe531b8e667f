import time
import numpy as np
from cascopt.params import reference_physical_params, nondimensionalize
from cascopt import meanfield, linearized, effective, observables, stability, gaussinfo

base = reference_physical_params()

# --- criterion 5b: bidirectional symmetric => no gradient (appendix gamma = 2pi*1e4)
t0 = time.time()
p_bid = base.replace(topology="bidirectional", power2=base.power1,
                     gamma1=2*np.pi*1e4, gamma2=2*np.pi*1e4)
mpb = nondimensionalize(p_bid)
sb = meanfield.steady_meanfield(mpb)
print("bid steady:", abs(sb.A1), abs(sb.A2), sb.Q1, sb.Q2, f"({time.time()-t0:.1f}s)")
ddb = linearized.build_drift_diffusion(sb, mpb)
print("bid Hurwitz:", ddb.hurwitz())
cssb = linearized.steady_covariance(ddb)
n1 = observables.effective_occupation(cssb, 1); n2 = observables.effective_occupation(cssb, 2)
T1 = observables.effective_temperature(n1, mpb.omega_rad_s(1))
T2 = observables.effective_temperature(n2, mpb.omega_rad_s(2))
print(f"bid: n1={n1:.6g} n2={n2:.6g} |T2-T1|/T1 = {abs(T2-T1)/T1:.3g}")

# unidirectional with same appendix gamma for contrast
p_uni = base.replace(gamma1=2*np.pi*1e4, gamma2=2*np.pi*1e4)
mpu = nondimensionalize(p_uni)
su = meanfield.steady_meanfield(mpu)
cssu = linearized.steady_covariance(linearized.build_drift_diffusion(su, mpu))
nu1 = observables.effective_occupation(cssu, 1); nu2 = observables.effective_occupation(cssu, 2)
Tu1 = observables.effective_temperature(nu1, mpu.omega_rad_s(1))
Tu2 = observables.effective_temperature(nu2, mpu.omega_rad_s(2))
print(f"uni (same gamma): T2-T1 = {Tu2-Tu1:.5g} K (positive? {Tu2 > Tu1})")

# --- thermalization time: exponential oracle + Omega2 sweep monotonicity
t = np.linspace(0, 50, 2001)
gamma_relax = 0.3
trace = 5.0 + 2.0 * np.exp(-gamma_relax * t)
ts = observables.thermalization_time(t, trace, rel_tol=0.01)
expected = np.log((2.0/5.0)/0.01) / gamma_relax
print(f"exp oracle: ts={ts:.3f} expected~{expected:.3f} rel={(ts-expected)/expected:.3g}")

# Omega2 sweep of t_s at reference params (uses covariance runs)
t0 = time.time()
factors = [0.85, 0.925, 1.0, 1.075, 1.15]
tss = []
for f in factors:
    mpf = nondimensionalize(base.replace(omega2=base.omega2 * f))
    sf = meanfield.steady_meanfield(mpf)
    ep = effective.effective_rates(mpf, sf)
    horizon = 8.0 / (2 * ep.gamma_eff_2 + mpf.gamma2)
    te = np.linspace(0, horizon, 400)
    cov = linearized.evolve_covariance(linearized.CovarianceState.thermal(mpf), sf, mpf, te)
    tr = observables.temperature_trace(cov, mpf)
    tss.append(observables.thermalization_time(tr.t, tr.T_eff[1], rel_tol=0.01))
    print(f"  Omega2={f}: t_s = {tss[-1]:.1f} ({time.time()-t0:.1f}s)")
a = np.array(tss)
print("minimum near center:", np.argmin(a), "left side decreasing:", np.all(np.diff(a[:3]) < 0), "right side increasing:", np.all(np.diff(a[2:]) > 0))

# --- power balance alpha->0 consistency and blue-detuned ratio > 1
mp = nondimensionalize(base)
lin = stability.power_balance(mp, (0.0, 0.0), 1.0)
small = stability.power_balance(mp, (1e2, 1e2), 1.0)
print("alpha->0 limits:", lin, " small-alpha:", small)
blue = stability.power_balance(mp, (3e4, 3e4), -1.0)
print("blue-detuned ratios:", blue)

# --- criterion 1 style: random Hurwitz sets, residual + dynamic agreement
rng = np.random.default_rng(1234)
t0 = time.time()
count = 0
worst_res, worst_agree, worst_sym = 0.0, 0.0, 1.0
while count < 20:
    mpr = mp.replace(
        omega2=rng.uniform(0.6, 1.4), gamma1=rng.uniform(0.02, 0.2),
        gamma2=rng.uniform(0.02, 0.2), kappa=rng.uniform(0.5, 2.0),
        delta=rng.uniform(0.3, 1.5), nbar1=rng.uniform(0.0, 20.0),
        nbar2=rng.uniform(0.0, 20.0),
        g1=rng.uniform(0.5, 2.0) * mp.g1, g2=rng.uniform(0.5, 2.0) * mp.g2,
        E1=mp.E1, E2=0.0)
    g_target = rng.uniform(0.02, 0.25) * mpr.kappa
    a1 = g_target / mpr.g1 * np.exp(1j * rng.uniform(0, 2*np.pi))
    a2 = rng.uniform(0.2, 1.5) * g_target / mpr.g2 * np.exp(1j * rng.uniform(0, 2*np.pi))
    s_r = meanfield.MeanFieldState(0.0, rng.uniform(0, 1e3), 0.0, a1, rng.uniform(0, 1e3), 0.0, a2)
    dd = linearized.build_drift_diffusion(s_r, mpr)
    if not dd.hurwitz():
        continue
    count += 1
    css = linearized.steady_covariance(dd)
    res = linearized.lyapunov_residual(dd, css.C) / np.linalg.norm(dd.N)
    worst_res = max(worst_res, res)
    worst_sym = min(worst_sym, css.symplectic_eigenvalues()[0])
    lam = np.max(np.linalg.eigvals(dd.S).real)
    horizon = 40.0 / abs(lam)
    cov = linearized.evolve_covariance(linearized.CovarianceState.thermal(mpr), s_r, mpr,
                                       [0.0, horizon], tol=(1e-10, 1e-10))
    agree = np.linalg.norm(cov.covariances[-1] - css.C) / max(1.0, np.linalg.norm(css.C))
    worst_agree = max(worst_agree, agree)
print(f"20 random sets: worst residual {worst_res:.3g}, worst agreement {worst_agree:.3g}, "
      f"min sympl eig {worst_sym:.6f}  ({time.time()-t0:.1f}s)")
