"""Command-line harness: gain-vs-radius and beam-depth sweeps, layout export,
and a fast self-check of the model invariants.

Exit codes: 0 success, 1 configuration/validation error, 2 numerical failure.
"""

import argparse
import os
import sys

import numpy as np

from .analytics import (
    alpha_for_fraction,
    alpha_of_offset,
    beamdepth_gain,
    beamdepth_limits,
)
from .dipoles import (
    PolarizabilitySet,
    SolverError,
    coupling_matrix,
    radiation_damping,
    solve_model,
)
from .experiments import (
    ConfigError,
    parse_config,
    run_beamdepth,
    run_gain_vs_d,
    run_layout_export,
)
from .fields import onaxis_fields, scattered_field
from .geometry import build_layout
from .special import NoRootError, beamdepth_integral, hankel2


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _build_parser():
    parser = _Parser(prog="metabeam", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("gain-sweep", "gain versus aperture radius"),
        ("beam-depth", "beam-depth gain versus focal mismatch"),
        ("layout", "export the element layouts as CSV"),
        ("selfcheck", "run the model invariant suite"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", default=None, help="key=value configuration file")
        cmd.add_argument("--out", default=None, help="output directory")
        cmd.add_argument("--coupling", choices=("on", "off"), default=None)
        cmd.add_argument("--threads", type=int, default=None)
    return parser


def _load_config(args):
    overrides = {}
    if args.coupling is not None:
        overrides["coupling"] = args.coupling == "on"
    if args.threads is not None:
        overrides["threads"] = args.threads
    if args.out is not None:
        overrides["output_dir"] = args.out
    return parse_config(args.config, overrides)


def _selfcheck():
    """Fast invariant suite; prints one line per check."""
    failures = 0

    def check(name, ok, detail=""):
        nonlocal failures
        status = "PASS" if ok else "FAIL"
        if not ok:
            failures += 1
        print(f"{status} {name}{(': ' + detail) if detail else ''}")

    # Wronskian of the self-contained Bessel evaluation
    worst = 0.0
    for x in (0.5, 1.0, 5.0, 20.0, 100.0):
        h0, h1 = hankel2(0, x), hankel2(1, x)
        j0, y0 = h0.real, -h0.imag
        j1, y1 = h1.real, -h1.imag
        wron = j1 * y0 - j0 * y1
        worst = max(worst, abs(wron - 2.0 / (np.pi * x)) * np.pi * x / 2.0)
    check("wronskian", worst < 1e-9, f"max rel dev {worst:.2e}")

    val = beamdepth_integral(0.0)
    check("beamdepth integral at 0", abs(val - 4.0 / 3.0) < 1e-12, f"{val}")
    gain0 = beamdepth_gain(0.0)
    check("beam-depth gain normalization", abs(gain0 - 1.0) < 1e-12, f"{gain0}")
    alpha15 = alpha_for_fraction(0.15)
    check("alpha_0.15 near 4.19", abs(alpha15 - 4.19) < 0.1, f"{alpha15:.4f}")

    config = parse_config(None)
    constants = config.constants()
    damping = radiation_damping(constants)
    layout = build_layout(0.05, constants)
    check("layout count D=0.05", len(layout) == 38, f"N={len(layout)}")
    check("layout count D=0.4", len(build_layout(0.4, constants)) == 2206)

    phases = np.linspace(0.0, 2.0 * np.pi, 64, endpoint=False)
    diag = PolarizabilitySet.from_phases(phases, damping).diagonal
    ok_passive = np.all(diag.imag <= 1e-16)
    live = np.abs(diag) > 1e-15
    ok_inverse = np.allclose((1.0 / diag[live]).imag, damping, rtol=1e-9)
    check("Lorentzian passivity", bool(ok_passive and ok_inverse))

    matrix = coupling_matrix(layout, constants)
    recip = np.abs(matrix - matrix.T).max() / np.abs(matrix).max()
    check("coupling reciprocity", recip < 1e-12, f"rel {recip:.2e}")

    polar = PolarizabilitySet.from_phases(np.zeros(len(layout)), damping)
    model = solve_model(layout, polar, constants, coupling=matrix)
    residual = model.moments - polar.diagonal * model.local_field
    rel = np.linalg.norm(residual) / np.linalg.norm(model.moments)
    check("fixed-point residual", rel < 1e-9, f"rel {rel:.2e}")

    rng = np.random.default_rng(0)
    moments = rng.normal(size=2 * len(layout)) + 1j * rng.normal(size=2 * len(layout))
    direct = onaxis_fields(layout, moments, 1.0, constants)
    general = scattered_field(layout, moments, np.array([0.0, 0.0, 1.0]), constants)
    dev = abs(direct.e_theta - general.e_theta) + abs(direct.e_phi - general.e_phi)
    scale = abs(direct.e_theta) + abs(direct.e_phi)
    check("on-axis closed form", dev <= 1e-10 * scale, f"rel {dev / scale:.2e}")

    k = constants.wavenumber
    for kappa, distance, radius in ((0.15, 0.5, 0.2), (0.5, 0.3, 0.1)):
        alpha_k = alpha_for_fraction(kappa)
        lower, upper = beamdepth_limits(kappa, distance, radius, k)
        dev = abs(alpha_of_offset(upper, distance, radius, k) - alpha_k)
        dev = max(dev, abs(alpha_of_offset(lower, distance, radius, k) + alpha_k))
        check(f"Fresnel identity kappa={kappa}", dev < 1e-12, f"dev {dev:.2e}")

    return failures


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "selfcheck":
            failures = _selfcheck()
            if failures:
                print(f"{failures} check(s) failed")
                return 2
            print("all checks passed")
            return 0

        config = _load_config(args)
        out_dir = config.output_dir
        os.makedirs(out_dir, exist_ok=True)
        if args.command == "layout":
            written = run_layout_export(config, out_dir)
            for radius, (path, count) in sorted(written.items()):
                print(f"D={radius:g} m: N={count} -> {path}")
            return 0
        if args.command == "gain-sweep":
            table = run_gain_vs_d(config)
            path = os.path.join(out_dir, "gain_vs_D.csv")
        else:
            table = run_beamdepth(config)
            path = os.path.join(out_dir, "beam_depth.csv")
        table.write_csv(path)
        print(f"wrote {path} ({len(table.rows)} rows)")
        for note in table.notes:
            print(f"note: {note}")
        return 0
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 1
    except (SolverError, NoRootError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
