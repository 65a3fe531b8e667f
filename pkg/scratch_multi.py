import numpy as np
from scipy.integrate import solve_ivp
from cascopt.params import reference_physical_params, nondimensionalize
from cascopt import meanfield, stability, linearized, observables
from cascopt.meanfield import photon_cubic_coefficients, cubic_discriminant, multistability_branches, cubic_residual

base = reference_physical_params()
mp = nondimensionalize(base)

# criterion 9: root count vs discriminant over a Delta sweep
deltas = np.linspace(-3, 3, 241)
counts, transitions, mismatch, jac_ok, jac_tot = [], [], 0, 0, 0
for d in deltas:
    mpd = mp.replace(delta=float(d))
    c1 = photon_cubic_coefficients(mpd, 1, mpd.E1**2, "half")
    disc = cubic_discriminant(*c1)
    br = multistability_branches(mpd, "half")
    n = len(br.cavity1)
    counts.append(n)
    expect = 3 if disc > 0 else 1
    if n != expect:
        mismatch += 1
        print(f"  mismatch at delta={d}: count={n} disc={disc:.3g}")
    for b in br.cavity1:
        res = abs(cubic_residual(c1, b.N))
        assert res < 1e-10 * max(1.0, mpd.E1**2), (d, res)
    if n == 3:
        jac_tot += 1
        if br.cavity1[1].jacobian_unstable:
            jac_ok += 1
counts = np.array(counts)
print("root counts along sweep:", np.unique(counts), " n3 points:", np.sum(counts == 3))
print("sequence transitions:", [f"{deltas[i]:.2f}" for i in np.flatnonzero(np.diff(counts) != 0)])
print("mismatches:", mismatch, " middle-root jacobian-unstable:", jac_ok, "/", jac_tot)

# criterion 10: bessel series vs forced ODE, moderate drive
rng = np.random.default_rng(7)
mpo = mp.replace(E1=2.0, E2=0.0)
worst = 0.0
for trial in range(10):
    delta = rng.uniform(-2.0, 2.0)
    alpha = (rng.uniform(0, 2e5), rng.uniform(0, 2e5))  # z = g*alpha ~ up to 0.75
    qbar = (rng.uniform(0, 1e4) * 0, 0.0)
    amps = stability.bessel_amplitudes(mpo, (0.0, 0.0), alpha, delta=delta)
    period = 2 * np.pi / mpo.omega1
    def rhs(t, y):
        a1 = complex(y[0], y[1]); a2 = complex(y[2], y[3])
        q1 = alpha[0] * np.cos(mpo.omega1 * t)
        q2 = alpha[1] * np.cos(mpo.omega2 * t)
        d1 = delta - mpo.g1 * q1
        d2 = delta - mpo.g2 * q2
        da1 = -(0.5 * mpo.kappa + 1j * d1) * a1 + mpo.E1
        da2 = -(0.5 * mpo.kappa + 1j * d2) * a2 - mpo.kappa * a1
        return [da1.real, da1.imag, da2.real, da2.imag]
    t_settle = 60.0 / mpo.kappa
    n_per = int(np.ceil(t_settle / period))
    t0 = n_per * period  # integer number of periods so series phase matches
    t_eval = t0 + np.linspace(0, period, 201)
    sol = solve_ivp(rhs, (0, t_eval[-1]), [0, 0, 0, 0], t_eval=t_eval, rtol=1e-11, atol=1e-12, method="DOP853")
    a1_ode = sol.y[0] + 1j * sol.y[1]
    a2_ode = sol.y[2] + 1j * sol.y[3]
    a1_ser, a2_ser = stability.reconstruct_cavity_fields(amps, mpo, t_eval)
    dev1 = np.max(np.abs(a1_ser - a1_ode))
    dev2 = np.max(np.abs(a2_ser - a2_ode))
    scale = max(np.max(np.abs(a1_ode)), np.max(np.abs(a2_ode)), 1.0)
    worst = max(worst, dev1 / scale, dev2 / scale)
    print(f"trial {trial}: delta={delta:.3f} z1={amps.z1:.3f} z2={amps.z2:.3f} dev1={dev1:.3g} dev2={dev2:.3g} scale={scale:.3g}")
print("worst relative deviation:", worst)
