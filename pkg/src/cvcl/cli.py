"""``cvcl`` command-line entry point.

    cvcl <subcommand> --config <path> [--out <dir>] [--plot] [--seed N]

Exit codes: 0 success, 2 config error, 3 numeric failure.
"""
from __future__ import annotations

import argparse
import sys
import warnings
from pathlib import Path

import numpy as np

from . import channels, dynamics, freeops, measures, witness
from .core import GaussianParams, Units, centered_grid, gaussian_wavefunction, make_grid, pure_state_density
from .errors import ConfigError, CvclError
from .io import check_finite, read_config, resolve_config, write_csv, write_json, write_svg_line_plot

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3

UNIT_MODES = ("SI", "natural")

SCHEMAS = {
    "measure": {
        "seed": (int, 0),
        "units.mode": (UNIT_MODES, "natural"),
        "grid.n_points": (int, 512),
        "grid.margin": (float, 6.0),
        "kernel.kind": (("gaussian", "identity"), "gaussian"),
        "kernel.ell_g": (float, 1.0),
        "sweep.ratio_min": (float, 0.1),
        "sweep.ratio_max": (float, 3.0),
        "sweep.n": (int, 30),
    },
    "dynamics": {
        "seed": (int, 0),
        "units.mode": (UNIT_MODES, "SI"),
        "scenario.m": (float, 1e-14),
        "scenario.M": (float, 1e-14),
        "scenario.x0": (float, 200e-6),
        "scenario.sigma0": (float, 10e-6),
        "scenario.ell_g": (float, 20e-6),
        "scenario.t_max": (float, 1.0),
        "scenario.n_steps": (int, 200),
    },
    "counterexample": {
        "seed": (int, 0),
        "grid.x_min": (float, -10.0),
        "grid.x_max": (float, 10.0),
        "grid.n_points": (int, 401),
        "kernel.ell_g": (float, 0.5),
        "packet.kind": (("bump", "gaussian"), "bump"),
        "packet.center": (float, 0.0),
        "packet.width": (float, 1.0),
        "shift.a": (float, -5.0),
        "shift.b": (float, 5.0),
    },
    "witness": {
        "seed": (int, 0),
        "witness.p": (float, 0.5),
        "witness.c_abs": (float, 0.5),
        "witness.c_phase": (float, 0.7),
        "witness.separation": (float, 3.0),
        "kernel.ell_g": (float, 1.0),
        "witness.c0": (float, 0.2),
        "witness.n_theta": (int, 720),
    },
    "mc-check": {
        "seed": (int, 42),
        "units.mode": (UNIT_MODES, "natural"),
        "grid.n_points": (int, 256),
        "grid.half_width": (float, 8.0),
        "state.sigma": (float, 1.0),
        "kernel.ell_g": (float, 1.0),
        "mc.n_small": (int, 10_000),
        "mc.n_large": (int, 100_000),
    },
    "stepmask": {
        "seed": (int, 0),
        "grid.n_points": (int, 401),
        "state.sigma": (float, 1.0),
        "step.eps_over_sigma": ("floats", [0.5, 1.0, 2.0, 4.0]),
        "search.separation": (float, 8.0),
    },
}


def _gaussian_grid(sigma, margin, n_points):
    return centered_grid(0.0, margin * sigma, n_points)


def cmd_measure(cfg):
    ell = cfg["kernel.ell_g"]
    if not ell > 0:
        raise ConfigError("kernel.ell_g", "must be positive")
    if cfg["sweep.n"] < 1:
        raise ConfigError("sweep.n", "must be >= 1")
    identity = cfg["kernel.kind"] == "identity"
    ratios = np.linspace(cfg["sweep.ratio_min"], cfg["sweep.ratio_max"], cfg["sweep.n"])
    if ratios.min() <= 0:
        raise ConfigError("sweep.ratio_min", "must be positive")
    rows = []
    for r in ratios:
        sigma = float(r * ell)
        grid = _gaussian_grid(sigma, cfg["grid.margin"], cfg["grid.n_points"])
        psi = gaussian_wavefunction(grid, GaussianParams(0.0, sigma))
        rho = pure_state_density(psi)
        kernel = channels.identity_kernel(grid) if identity else channels.gaussian_kernel(grid, ell)
        rows.append(
            {
                "sigma": sigma,
                "ell_g": ell,
                "c2_numeric": measures.c2_g(rho, kernel).value,
                "c2_closed": 0.0 if identity else measures.c2_gaussian_closed_form(sigma, ell),
                "crel_numeric": measures.c_rel_g(rho, kernel).value,
                "crel_bound": 0.0 if identity else measures.crel_jensen_bound(sigma, ell),
            }
        )
    columns = ["sigma", "ell_g", "c2_numeric", "c2_closed", "crel_numeric", "crel_bound"]
    check_finite(columns, rows, may_diverge=("crel_numeric",))
    verdict = {
        "max_c2_oracle_error": max(abs(r["c2_numeric"] - r["c2_closed"]) for r in rows),
        "jensen_bound_holds": all(r["crel_numeric"] >= r["crel_bound"] - 1e-8 for r in rows),
        "rows": len(rows),
    }
    return columns, rows, verdict, None


def _scenario(cfg):
    return dynamics.NewtonianScenario(
        m=cfg["scenario.m"],
        M=cfg["scenario.M"],
        x0=cfg["scenario.x0"],
        sigma0=cfg["scenario.sigma0"],
        ell_g=cfg["scenario.ell_g"],
        t_max=cfg["scenario.t_max"],
        n_steps=cfg["scenario.n_steps"],
        units=Units.from_mode(cfg["units.mode"]),
    )


def cmd_dynamics(cfg):
    try:
        scenario = _scenario(cfg)
    except CvclError as exc:
        raise ConfigError("scenario", str(exc)) from None
    series = dynamics.coherence_time_series(scenario)
    columns = list(dynamics.COLUMNS)
    rows = [{c: series[c][i] for c in columns} for i in range(series["t"].size)]
    check_finite(columns, rows)
    delta = series["delta_crel_bound"]
    verdict = {
        "kappa": dynamics.kappa(scenario),
        "validity": scenario.validity(),
        "taylor_coefficient": dynamics.delta_crel_taylor_coefficient(scenario),
        "delta_nonnegative": bool(np.all(delta >= 0)),
        "delta_monotone": bool(np.all(np.diff(delta) >= 0)),
    }
    plot = (series["t"], delta, "t [s]" if scenario.units.mode == "SI" else "t", "delta C_rel bound [nats]")
    return columns, rows, verdict, plot


def cmd_counterexample(cfg):
    grid = make_grid(cfg["grid.x_min"], cfg["grid.x_max"], cfg["grid.n_points"])
    kernel = channels.gaussian_kernel(grid, cfg["kernel.ell_g"])
    phi = freeops.PacketSpec(cfg["packet.kind"], cfg["packet.center"], cfg["packet.width"])
    a, b = cfg["shift.a"], cfg["shift.b"]
    report = freeops.verify_c2_monotonicity_violation(phi, a, b, kernel, with_crel=True)
    inst = freeops.build_counterexample_instrument(grid, 2 * phi.support_half_width, a, b, center=phi.center)
    rho = freeops.counterexample_input(phi, a, b, grid)
    strong_c2 = freeops.verify_strong_monotonicity(rho, inst, kernel, "c2")
    strong_crel = freeops.verify_strong_monotonicity(rho, inst, kernel, "crel")
    defect = freeops.check_dephasing_covariance(inst, kernel, [rho], mode="branchwise")
    row = {
        "c2_in": report.c2_in,
        "c2_out": report.c2_out,
        "ratio": report.ratio,
        "c2_strong_lhs": strong_c2.lhs,
        "crel_in": report.crel_in,
        "crel_out": report.crel_out,
        "crel_strong_lhs": strong_crel.lhs,
        "covariance_defect": defect,
    }
    columns = list(row)
    check_finite(columns, [row])
    verdict = {
        "ratio": report.ratio,
        "violates_monotonicity": report.c2_out > report.c2_in,
        "violates_strong_monotonicity": not strong_c2.holds,
        "crel_monotone": report.crel_out <= report.crel_in + 1e-8,
        "crel_strong_monotone": strong_crel.holds,
        "branch_probabilities": list(strong_c2.probabilities),
    }
    return columns, [row], verdict, None


def cmd_witness(cfg):
    p = cfg["witness.p"]
    c = cfg["witness.c_abs"] * np.exp(1j * cfg["witness.c_phase"])
    d, ell = cfg["witness.separation"], cfg["kernel.ell_g"]
    if not ell > 0:
        raise ConfigError("kernel.ell_g", "must be positive")
    if cfg["witness.n_theta"] < 1:
        raise ConfigError("witness.n_theta", "must be >= 1")
    try:
        state = witness.TwoPacketState(p, c, d)
    except CvclError as exc:
        raise ConfigError("witness.c_abs", str(exc)) from None
    g_d = float(np.exp(-(d**2) / (2 * ell**2)))
    c0 = cfg["witness.c0"]
    thetas = np.arange(cfg["witness.n_theta"]) * (2 * np.pi / cfg["witness.n_theta"])
    thetas = np.append(thetas, np.angle(c))
    rows = []
    for th in thetas:
        cert = witness.certify(state, th, c0, g_d)
        rows.append(
            {
                "theta": th,
                "x_theta": float(witness.x_theta_expectation(state, th)),
                "witness_value": cert.witness_value,
                "certified": float(cert.certified),
            }
        )
    columns = ["theta", "x_theta", "witness_value", "certified"]
    check_finite(columns, rows)
    verdict = {
        "max_expectation": max(r["x_theta"] for r in rows),
        "two_abs_c": 2 * abs(c),
        "bound": witness.witness_bound(c0, g_d),
        "c2_two_packet": witness.c2_two_packet(state, g_d),
        "certified": any(r["certified"] for r in rows),
        "g_at_d": g_d,
    }
    return columns, rows, verdict, None


def cmd_mc_check(cfg):
    units = Units.from_mode(cfg["units.mode"])
    sigma, ell = cfg["state.sigma"], cfg["kernel.ell_g"]
    grid = centered_grid(0.0, cfg["grid.half_width"] * sigma, cfg["grid.n_points"])
    rho = pure_state_density(gaussian_wavefunction(grid, GaussianParams(0.0, sigma)))
    kicks = channels.KickDistribution.gaussian(units.hbar / ell)
    exact = channels.apply_dephasing(rho, channels.kernel_from_kicks(grid, kicks, units))
    rows = []
    for n in (cfg["mc.n_small"], cfg["mc.n_large"]):
        if n < 1:
            raise ConfigError("mc.n_small" if n == cfg["mc.n_small"] else "mc.n_large", "must be >= 1")
        sampled = channels.apply_random_kicks_mc(rho, kicks, n, cfg["seed"], units)
        rows.append({"n_samples": n, "frobenius_error": float(np.linalg.norm(sampled.entries - exact.entries))})
    columns = ["n_samples", "frobenius_error"]
    check_finite(columns, rows)
    verdict = {
        "errors": [r["frobenius_error"] for r in rows],
        "ratio": rows[0]["frobenius_error"] / rows[1]["frobenius_error"],
        "expected_ratio": float(np.sqrt(cfg["mc.n_large"] / cfg["mc.n_small"])),
    }
    return columns, rows, verdict, None


def cmd_stepmask(cfg):
    sigma = cfg["state.sigma"]
    grid = _gaussian_grid(sigma, 6.0, cfg["grid.n_points"])
    rho = pure_state_density(gaussian_wavefunction(grid, GaussianParams(0.0, sigma)))
    rows = []
    for r in cfg["step.eps_over_sigma"]:
        eps = r * sigma
        once = channels.apply_step_projector(rho, eps)
        twice = channels.step_mask(grid, eps) * once.matrix
        rows.append(
            {
                "epsilon": eps,
                "c2_epsilon": measures.c2_epsilon(rho, eps),
                "c2_epsilon_closed": measures.c2_epsilon_gaussian_closed_form(sigma, eps),
                "min_eigenvalue": once.min_eigenvalue,
                "idempotent": float(once.matrix.tobytes() == twice.tobytes()),
            }
        )
    columns = ["epsilon", "c2_epsilon", "c2_epsilon_closed", "min_eigenvalue", "idempotent"]
    check_finite(columns, rows)
    search = noncp_search(sigma, cfg["search.separation"], cfg["grid.n_points"])
    verdict = {
        "max_erf_error": max(abs(r["c2_epsilon"] - r["c2_epsilon_closed"]) for r in rows),
        "idempotent": all(r["idempotent"] == 1.0 for r in rows),
        "noncp_witness": search,
    }
    return columns, rows, verdict, None


def noncp_search(sigma, separation, n_points):
    """Most negative eigenvalue of a step-masked balanced two-packet pure state over a scan of epsilon."""
    half = separation / 2 + 6 * sigma
    grid = make_grid(-half, half, n_points)
    rho, _ = witness.two_packet_density(grid, separation, sigma, 0.5, 0.5)
    best = None
    for eps in np.linspace(sigma, separation, 15):
        lam = channels.apply_step_projector(rho, eps).min_eigenvalue
        if best is None or lam < best["min_eigenvalue"]:
            best = {"epsilon": float(eps), "min_eigenvalue": lam}
    best["not_cp"] = best["min_eigenvalue"] < -1e-6
    return best


COMMANDS = {
    "measure": cmd_measure,
    "dynamics": cmd_dynamics,
    "counterexample": cmd_counterexample,
    "witness": cmd_witness,
    "mc-check": cmd_mc_check,
    "stepmask": cmd_stepmask,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="cvcl", description="Continuous-variable position-coherence toolkit")
    parser.add_argument("subcommand", choices=sorted(COMMANDS))
    parser.add_argument("--config", help="key = value config file (defaults used when omitted)")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--plot", action="store_true", help="also write an SVG line plot (dynamics)")
    parser.add_argument("--seed", type=int, help="override the config seed")
    return parser


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    name = args.subcommand
    try:
        raw = read_config(args.config) if args.config else {}
        if args.seed is not None:
            raw["seed"] = str(args.seed)
        cfg = resolve_config(raw, SCHEMAS[name])
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            columns, rows, verdict, plot = COMMANDS[name](cfg)
    except ConfigError as exc:
        print(f"cvcl {name}: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (CvclError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"cvcl {name}: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = name.replace("-", "_")
    write_csv(out / f"{stem}.csv", columns, rows)
    write_json(out / f"{stem}.json", {"subcommand": name, "config": cfg, "verdict": verdict})
    if args.plot and plot is not None:
        write_svg_line_plot(out / f"{stem}.svg", *plot, title=name)
    print(f"cvcl {name}: wrote {len(rows)} rows to {out / (stem + '.csv')}")
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
