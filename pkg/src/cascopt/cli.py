"""Batch front end: ``cascopt <subcommand> --config <file> --out <dir>``.

Each subcommand reads the same configuration format, writes CSV/JSON data
files plus a run manifest, and exits 0 on success, 2 on configuration or
usage errors, 3 on numerical failures (with a machine-readable error
record when the output directory is writable).
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import logging
import math
import os
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from . import effective, gaussinfo, linearized, meanfield, observables, spectra, stability
from .config import RunSettings, load_config, reference_config_text
from .errors import CascoptError, ConfigError, UnresolvablePeaksError
from .output import snapshot_meta, write_csv, write_json
from .params import ModelParams, nondimensionalize

logger = logging.getLogger("cascopt")

_TAU = 2.0 * math.pi  # one mechanical period in model time units


@dataclass
class RunManifest:
    subcommand: str
    version: str
    config_digest: str
    parameters: dict
    settings: dict
    outputs: list
    duration_s: float
    timestamp: float

    def write(self, outdir: Path) -> Path:
        return write_json(outdir / "manifest.json", dataclasses.asdict(self))


def _sample_times(settings: RunSettings) -> np.ndarray:
    horizon = settings.horizon_tau * _TAU
    return np.linspace(0.0, horizon, settings.samples)


def _covariance_run(mp: ModelParams, settings: RunSettings):
    """Switch-on covariance trajectory from the thermal initial state."""
    t_eval = _sample_times(settings)
    traj = meanfield.integrate_meanfield(
        meanfield.MeanFieldState.zero(), mp, float(t_eval[-1]),
        tol=(settings.rtol, settings.atol), t_eval=t_eval,
    )
    C0 = linearized.CovarianceState.thermal(mp)
    return traj, linearized.evolve_covariance(C0, traj, mp, t_eval)


def _delta_grid(settings: RunSettings) -> np.ndarray:
    return np.linspace(settings.delta_min, settings.delta_max, settings.delta_points)


def cmd_meanfield(mp, settings, outdir):
    t_eval = _sample_times(settings)
    traj = meanfield.integrate_meanfield(
        meanfield.MeanFieldState.zero(), mp, float(t_eval[-1]),
        tol=(settings.rtol, settings.atol), t_eval=t_eval,
    )
    meta = snapshot_meta(mp, settings)
    files = [write_csv(outdir / "meanfield_trajectory.csv", {
        "t": traj.t,
        "Q1": traj.y[0], "P1": traj.y[1], "ReA1": traj.y[2], "ImA1": traj.y[3],
        "Q2": traj.y[4], "P2": traj.y[5], "ReA2": traj.y[6], "ImA2": traj.y[7],
    }, meta)]
    fp = meanfield.steady_meanfield(mp, seed=traj.terminal())
    residual = float(np.linalg.norm(meanfield.meanfield_rhs(fp, mp).to_vector()))
    files.append(write_json(outdir / "fixed_point.json", {
        "Q1": fp.Q1, "P1": fp.P1, "ReA1": fp.A1.real, "ImA1": fp.A1.imag,
        "Q2": fp.Q2, "P2": fp.P2, "ReA2": fp.A2.real, "ImA2": fp.A2.imag,
        "residual": residual,
    }))
    return files


def _upper_triangle_columns(cov_traj):
    names, columns = [], []
    labels = linearized.ORDERING
    iu = np.triu_indices(8)
    data = np.array([C[iu] for C in cov_traj.covariances])
    for k, (i, j) in enumerate(zip(*iu)):
        names.append(f"C_{labels[i]}_{labels[j]}")
        columns.append(data[:, k])
    return names, columns


def cmd_covariance(mp, settings, outdir):
    _, cov = _covariance_run(mp, settings)
    meta = snapshot_meta(mp, settings)
    names, columns = _upper_triangle_columns(cov)
    files = [write_csv(outdir / "covariance_trajectory.csv",
                       {"t": cov.t, **dict(zip(names, columns))}, meta)]
    mi, d_ab, d_ba = [], [], []
    for C in cov.covariances:
        pair = gaussinfo.extract_mirror_pair(C)
        mi.append(gaussinfo.mutual_information(pair))
        d_ab.append(gaussinfo.gaussian_discord(pair, "A_given_B"))
        d_ba.append(gaussinfo.gaussian_discord(pair, "B_given_A"))
    files.append(write_csv(outdir / "correlations.csv", {
        "t": cov.t, "mutual_info": mi,
        "discord_A_given_B": d_ab, "discord_B_given_A": d_ba,
    }, {**meta, "units": "nats"}))
    return files


def cmd_effective(mp, settings, outdir):
    s = meanfield.steady_meanfield(mp)
    ep = effective.effective_rates(mp, s)
    t_eval = _sample_times(settings)
    reduced = effective.evolve_effective_covariance(
        effective.thermal_reduced_covariance(mp), ep, mp, t_eval)
    full = linearized.evolve_covariance(
        linearized.CovarianceState.thermal(mp), s, mp, t_eval)
    n_red = reduced.occupations()
    n_full = np.array([
        [observables.effective_occupation(C, m) for C in full.covariances]
        for m in (1, 2)
    ])
    meta = snapshot_meta(mp, settings)
    files = [write_csv(outdir / "effective_comparison.csv", {
        "t": t_eval,
        "n1_reduced": n_red[0], "n2_reduced": n_red[1],
        "n1_full": n_full[0], "n2_full": n_full[1],
    }, meta)]
    files.append(write_json(outdir / "effective_params.json", {
        "gamma_eff_1": ep.gamma_eff_1, "gamma_eff_2": ep.gamma_eff_2,
        "omega_shift_1": ep.omega_shift_1, "omega_shift_2": ep.omega_shift_2,
        "coupling_re": ep.coupling.real, "coupling_im": ep.coupling.imag,
        "coupling_abs": abs(ep.coupling),
    }))
    return files


def cmd_temperature(mp, settings, outdir):
    meta = snapshot_meta(mp, settings)
    t_eval = _sample_times(settings)
    columns = {"t": t_eval}
    ts_rows = {"omega2_factor": [], "t_s": []}
    for factor in settings.omega2_factors:
        mpf = mp.replace(omega2=factor * mp.omega1,
                         nbar2=_rescaled_nbar(mp, factor))
        _, cov = _covariance_run(mpf, settings)
        trace = observables.temperature_trace(cov, mpf)
        tag = format(factor, "g").replace(".", "p")
        columns[f"T1_x{tag}"] = trace.T_eff[0]
        columns[f"T2_x{tag}"] = trace.T_eff[1]
        ts_rows["omega2_factor"].append(factor)
        try:
            ts = observables.thermalization_time(trace.t, trace.T_eff[1]) / _TAU
        except CascoptError:
            ts = math.nan
        ts_rows["t_s"].append(ts)
    files = [
        write_csv(outdir / "temperature_traces.csv", columns, meta),
        write_csv(outdir / "thermalization.csv", ts_rows,
                  {**meta, "t_s_units": "tau"}),
    ]
    points = observables.steady_gradient(mp, _delta_grid(settings))
    files.append(write_csv(outdir / "gradient_sweep.csv", {
        "delta": [p.delta for p in points],
        "T1": [p.T1 for p in points],
        "T2": [p.T2 for p in points],
        "gradient": [p.gradient for p in points],
        "mutual_info": [p.mutual_info for p in points],
        "stable": [int(p.stable) for p in points],
    }, meta))
    return files


def _rescaled_nbar(mp: ModelParams, factor: float) -> float:
    """Bath occupation at the rescaled mirror-2 frequency, same temperature."""
    x = math.log1p(1.0 / mp.nbar2)  # hbar*Omega2/kB*T of the base parameters
    return 1.0 / math.expm1(x * factor)


def cmd_spectra(mp, settings, outdir):
    s = meanfield.steady_meanfield(mp)
    grid = spectra.default_grid(mp, settings.spectrum_points)
    meta = snapshot_meta(mp, settings)
    files = []
    fits = {}
    for mirror in (1, 2):
        spec = spectra.position_spectrum(mirror, mp, s, grid,
                                         settings.spectrum_cascade_sign)
        files.append(write_csv(outdir / f"position_spectrum_{mirror}.csv",
                               {"omega": spec.omega, "value": spec.values},
                               {**meta, "kind": spec.kind,
                                "cascade_sign": settings.spectrum_cascade_sign}))
        fit = spectra.lorentzian_approx(mirror, mp, s)
        fits[f"mirror_{mirror}_analytic"] = dataclasses.asdict(fit)
    out_spec = spectra.output_spectrum(mp, s, grid,
                                       settings.spectrum_cascade_sign)
    files.append(write_csv(outdir / "output_spectrum.csv",
                           {"omega": out_spec.omega, "value": out_spec.values},
                           {**meta, "kind": "output"}))
    try:
        f1, f2 = spectra.reconstruct_mirror_spectra(out_spec, mp, s,
                                                    seed=settings.seed)
        fits["mirror_1_reconstructed"] = dataclasses.asdict(f1)
        fits["mirror_2_reconstructed"] = dataclasses.asdict(f2)
    except UnresolvablePeaksError as exc:
        fits["reconstruction_error"] = str(exc)
    files.append(write_json(outdir / "lorentzian_fits.json", fits))
    return files


def cmd_stability(mp, settings, outdir):
    alpha = np.linspace(settings.alpha_min, settings.alpha_max,
                        settings.alpha_points)
    delta = _delta_grid(settings)
    smap = stability.stability_map(mp, alpha, delta, threads=settings.threads)
    rows = list(smap.as_rows())
    meta = snapshot_meta(mp, settings)
    files = [write_csv(outdir / "stability_map.csv", {
        "alpha": [r[0] for r in rows],
        "delta": [r[1] for r in rows],
        "ratio_1": [r[2] for r in rows],
        "ratio_2": [r[3] for r in rows],
    }, meta)]
    contours = {
        "mirror_1": [c.tolist() for c in smap.contours1],
        "mirror_2": [c.tolist() for c in smap.contours2],
        "columns": ["alpha", "delta"],
    }
    files.append(write_json(outdir / "stability_contours.json", contours))
    return files


def cmd_multistability(mp, settings, outdir):
    rows = {k: [] for k in ("delta", "cavity", "index", "parent", "N", "Q",
                            "stability", "jacobian_unstable")}
    for delta in _delta_grid(settings):
        branches = meanfield.multistability_branches(
            mp.replace(delta=float(delta)), settings.cubic_kappa_convention)
        for idx, b in enumerate(branches.cavity1 + branches.cavity2):
            rows["delta"].append(float(delta))
            rows["cavity"].append(b.cavity)
            rows["index"].append(idx)
            rows["parent"].append(-1 if b.parent is None else b.parent)
            rows["N"].append(b.N)
            rows["Q"].append(b.Q)
            rows["stability"].append(b.stability)
            rows["jacobian_unstable"].append(int(b.jacobian_unstable))
    meta = snapshot_meta(mp, settings)
    return [write_csv(outdir / "multistability_branches.csv", rows, meta)]


def cmd_bidir_compare(mp, settings, outdir):
    if not mp.unidirectional:
        raise ConfigError("bidir-compare expects a unidirectional base configuration")
    mp_bid = mp.replace(topology="bidirectional", E2=mp.E1)
    t_eval = _sample_times(settings)
    columns = {"t": t_eval}
    steady = {}
    for tag, mpx in (("uni", mp), ("bid", mp_bid)):
        _, cov = _covariance_run(mpx, settings)
        trace = observables.temperature_trace(cov, mpx)
        columns[f"T1_{tag}"] = trace.T_eff[0]
        columns[f"T2_{tag}"] = trace.T_eff[1]
        s = meanfield.steady_meanfield(mpx)
        css = linearized.steady_covariance(linearized.build_drift_diffusion(s, mpx))
        T = [observables.effective_temperature(
            observables.effective_occupation(css, m), mpx.omega_rad_s(m))
            for m in (1, 2)]
        steady[tag] = {"T1": T[0], "T2": T[1], "gradient": T[1] - T[0]}
    meta = snapshot_meta(mp, settings)
    return [
        write_csv(outdir / "bidir_compare.csv", columns, meta),
        write_json(outdir / "bidir_steady.json", steady),
    ]


_COMMANDS = {
    "meanfield": cmd_meanfield,
    "covariance": cmd_covariance,
    "effective": cmd_effective,
    "temperature": cmd_temperature,
    "spectra": cmd_spectra,
    "stability": cmd_stability,
    "multistability": cmd_multistability,
    "bidir-compare": cmd_bidir_compare,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cascopt",
        description="Cascaded optomechanics simulator: batch experiments to CSV/JSON.",
        epilog="Example configuration:\n\n" + reference_config_text(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", metavar="subcommand")
    for name in _COMMANDS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--config", required=True, help="configuration file path")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--threads", type=int, default=None,
                       help="cap on parallel workers")
        p.add_argument("--seed", type=int, default=None,
                       help="override the configured random seed")
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get("CASCOPT_LOG", "WARNING").upper())
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.subcommand is None:
        parser.print_usage(sys.stderr)
        return 2

    outdir = Path(args.out)
    try:
        outdir.mkdir(parents=True, exist_ok=True)
        config_bytes = Path(args.config).read_bytes()
        physical, settings = load_config(args.config)
    except (OSError, ConfigError) as exc:
        print(f"cascopt: configuration error: {exc}", file=sys.stderr)
        return 2
    if args.seed is not None:
        settings = dataclasses.replace(settings, seed=args.seed)
    if args.threads is not None:
        settings = dataclasses.replace(settings, threads=max(1, args.threads))

    mp = nondimensionalize(physical)
    started = time.time()
    try:
        files = _COMMANDS[args.subcommand](mp, settings, outdir)
    except CascoptError as exc:
        record = {
            "error_type": type(exc).__name__,
            "message": str(exc),
            "subcommand": args.subcommand,
        }
        try:
            write_json(outdir / "error.json", record)
        except OSError:  # pragma: no cover - output dir vanished mid-run
            pass
        print(f"cascopt: numerical error: {exc}", file=sys.stderr)
        return 3

    manifest = RunManifest(
        subcommand=args.subcommand,
        version=__version__,
        config_digest=hashlib.sha256(config_bytes).hexdigest(),
        parameters=snapshot_meta(mp),
        settings=dataclasses.asdict(settings),
        outputs=sorted(f.name for f in files),
        duration_s=time.time() - started,
        timestamp=started,
    )
    manifest.write(outdir)
    logger.info("%s finished: %d output files", args.subcommand, len(files))
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
