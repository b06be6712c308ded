"""Experiment harness: flat key=value configs, sweep drivers for the
gain-vs-radius and beam-depth studies, and plot-ready CSV tables with a
'#'-prefixed metadata header.
"""

import datetime
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields, replace

import numpy as np

from . import __version__
from .analytics import (
    alpha_for_fraction,
    alpha_of_offset,
    analytic_gain,
    beamdepth_gain,
    beamdepth_limits,
    discrete_beamdepth_gain,
    transition_radius,
)
from .dipoles import (
    PolarizabilitySet,
    SolverError,
    coupling_matrix,
    dump_solution_csv,
    radiation_damping,
    solve_model,
    supplied_power,
)
from .fields import onaxis_fields, realized_gain
from .geometry import PhysicalConstants, SPEED_OF_LIGHT, build_layout, surface_density, write_layout_csv
from .optimize import focusing_phases, optimize_phases


class ConfigError(ValueError):
    """A configuration value failed validation; `field` names the key."""

    def __init__(self, field_name, message):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass(frozen=True)
class ExperimentConfig:
    """Run settings; defaults follow the reference setup (10 GHz, 2 mm guide,
    observation at 1 m)."""

    frequency: float = 1.0e10
    waveguide_height: float = 2.0e-3
    light_speed: float = SPEED_OF_LIGHT
    aperture_radii: tuple = (0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4)
    beamdepth_radius: float = 0.2
    observation_radius: float = 1.0
    delta_r_min: float = 0.0
    delta_r_max: float = 10.0
    delta_r_count: int = 200
    kappa: tuple = (0.15,)
    coupling: bool = False
    optimizer_max_iters: int = 500
    optimizer_grad_tol_scale: float = 1.0e-8
    output_dir: str = "results"
    seed: int = 0
    threads: int = 1
    dump_moments: bool = False

    def constants(self):
        return PhysicalConstants(
            frequency=self.frequency,
            waveguide_height=self.waveguide_height,
            light_speed=self.light_speed,
        )

    def delta_r_grid(self):
        return np.linspace(self.delta_r_min, self.delta_r_max, self.delta_r_count)


_POSITIVE_FIELDS = (
    "frequency",
    "waveguide_height",
    "light_speed",
    "beamdepth_radius",
    "observation_radius",
)

_BOOL_WORDS = {"on": True, "true": True, "1": True, "off": False, "false": False, "0": False}


def _parse_value(name, raw, kind):
    try:
        if kind is float:
            return float(raw)
        if kind is int:
            return int(raw)
        if kind is bool:
            if raw.strip().lower() not in _BOOL_WORDS:
                raise ValueError(f"expected on/off, got {raw!r}")
            return _BOOL_WORDS[raw.strip().lower()]
        if kind is tuple:
            return tuple(float(item) for item in raw.split(",") if item.strip())
        return raw.strip()
    except ValueError as exc:
        raise ConfigError(name, f"cannot parse value {raw!r}: {exc}") from None


def validate_config(config):
    for name in _POSITIVE_FIELDS:
        if not getattr(config, name) > 0.0:
            raise ConfigError(name, "must be positive")
    if not config.aperture_radii:
        raise ConfigError("aperture_radii", "must list at least one radius")
    if any(r <= 0.0 for r in config.aperture_radii):
        raise ConfigError("aperture_radii", "all radii must be positive")
    if config.observation_radius + config.delta_r_min <= 0.0:
        raise ConfigError(
            "delta_r_min",
            "focus behind aperture: observation_radius + delta_r_min must be positive",
        )
    if config.delta_r_max < config.delta_r_min:
        raise ConfigError("delta_r_max", "must be >= delta_r_min")
    if config.delta_r_count < 2:
        raise ConfigError("delta_r_count", "need at least 2 grid points")
    if not config.kappa or any(not 0.0 < k <= 1.0 for k in config.kappa):
        raise ConfigError("kappa", "levels must lie in (0, 1]")
    if config.optimizer_max_iters < 1:
        raise ConfigError("optimizer_max_iters", "must be at least 1")
    if config.threads < 1:
        raise ConfigError("threads", "must be at least 1")
    return config


def parse_config(path=None, overrides=None):
    """Build a validated config from a flat key=value file plus overrides.

    Unknown keys are rejected; '#' starts a comment; an empty or missing
    file yields the defaults.
    """
    known = {f.name: type(getattr(ExperimentConfig, f.name)) for f in fields(ExperimentConfig)}
    # value types read off the dataclass defaults; tuples stay tuples
    values = {}
    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as handle:
                lines = handle.readlines()
        except OSError as exc:
            raise ConfigError("config", f"cannot read {path!r}: {exc}") from None
        for lineno, line in enumerate(lines, start=1):
            stripped = line.split("#", 1)[0].strip()
            if not stripped:
                continue
            if "=" not in stripped:
                raise ConfigError(
                    "config", f"{path}:{lineno}: expected key=value, got {line.strip()!r}"
                )
            key, raw = (part.strip() for part in stripped.split("=", 1))
            if key not in known:
                raise ConfigError(key, f"unknown configuration key (line {lineno})")
            values[key] = _parse_value(key, raw, known[key])
    config = ExperimentConfig(**values)
    if overrides:
        unknown = set(overrides) - set(known)
        if unknown:
            raise ConfigError(sorted(unknown)[0], "unknown configuration key")
        config = replace(config, **overrides)
    return validate_config(config)


@dataclass
class ResultTable:
    """Rectangular named-column table with '#' metadata and footer notes."""

    columns: list
    rows: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def append(self, row):
        if len(row) != len(self.columns):
            raise ValueError("row width does not match the column list")
        if any(isinstance(v, float) and not np.isfinite(v) and v != np.inf for v in row):
            raise ValueError("refusing to append a NaN row")
        self.rows.append(tuple(row))

    def column(self, name):
        idx = self.columns.index(name)
        return [row[idx] for row in self.rows]

    def write_csv(self, path, timestamp=True):
        with open(path, "w", newline="") as handle:
            handle.write(f"# tool: metabeam {__version__}\n")
            if timestamp:
                stamp = datetime.datetime.now(datetime.timezone.utc).isoformat()
                handle.write(f"# generated: {stamp}\n")
            for key in sorted(self.metadata):
                handle.write(f"# {key}={self.metadata[key]}\n")
            handle.write(",".join(self.columns) + "\n")
            for row in self.rows:
                handle.write(",".join(_format_cell(v) for v in row) + "\n")
            for note in self.notes:
                handle.write(f"# {note}\n")


def _format_cell(value):
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, float) and value == np.inf:
        return "inf"
    return repr(float(value))


def _config_metadata(config):
    meta = {}
    for f in fields(ExperimentConfig):
        value = getattr(config, f.name)
        if isinstance(value, tuple):
            value = ",".join(repr(v) for v in value)
        elif isinstance(value, bool):
            value = "on" if value else "off"
        meta[f"config.{f.name}"] = value
    return meta


def _dump_moments(config, radius, model, tag):
    os.makedirs(config.output_dir, exist_ok=True)
    path = os.path.join(config.output_dir, f"moments_{tag}_D{radius:g}.csv")
    dump_solution_csv(path, model)


def _gain_row(radius, config, constants, damping):
    layout = build_layout(radius, constants)
    density = surface_density(layout)
    g_analytic = analytic_gain(
        config.observation_radius, radius, density, constants, damping
    )
    phases0 = focusing_phases(layout, config.observation_radius, constants)
    polar0 = PolarizabilitySet.from_phases(phases0, damping)
    uncoupled = solve_model(layout, polar0, constants, coupling=None)
    sample0 = onaxis_fields(layout, uncoupled.moments, config.observation_radius, constants)
    power0 = supplied_power(uncoupled.moments, uncoupled.local_field, constants)
    row = [radius, len(layout), g_analytic, realized_gain(sample0, power0)]
    if config.dump_moments:
        _dump_moments(config, radius, uncoupled, "nocoupling")
    if config.coupling:
        matrix = coupling_matrix(layout, constants)
        target = np.array([0.0, 0.0, config.observation_radius])
        phases, _ = optimize_phases(
            phases0,
            layout,
            constants,
            target,
            coupling=matrix,
            max_iters=config.optimizer_max_iters,
        )
        polar = PolarizabilitySet.from_phases(phases, damping)
        model = solve_model(layout, polar, constants, coupling=matrix)
        sample = onaxis_fields(layout, model.moments, config.observation_radius, constants)
        p_coupled = supplied_power(model.moments, model.local_field, constants)
        row.append(realized_gain(sample, p_coupled))
        # same fields over the uncoupled supplied power, for the normalization
        # ambiguity noted in the table header
        refit = solve_model(layout, polar, constants, coupling=None)
        p_fixed = supplied_power(refit.moments, refit.local_field, constants)
        row.append(realized_gain(sample, p_fixed))
        if config.dump_moments:
            _dump_moments(config, radius, model, "coupled")
    return row


def run_gain_vs_d(config):
    """Gain-versus-aperture-radius sweep (reproduces the D-scaling study).

    Columns: D, N, G_analytic, G_sim_nocoupling, and with coupling enabled
    also G_sim_coupled (coupled supplied power) and G_sim_coupled_fixed_psup
    (uncoupled supplied power in the denominator).
    """
    validate_config(config)
    constants = config.constants()
    damping = radiation_damping(constants)
    columns = ["D", "N", "G_analytic", "G_sim_nocoupling"]
    if config.coupling:
        columns += ["G_sim_coupled", "G_sim_coupled_fixed_psup"]
    table = ResultTable(columns=columns, metadata=_config_metadata(config))
    radii = sorted(config.aperture_radii)

    def job(radius):
        # failed sweep points are flagged in the footer; the run continues
        try:
            return radius, _gain_row(radius, config, constants, damping), None
        except (SolverError, ValueError) as exc:
            return radius, None, f"failed D={radius!r}: {exc}"

    if config.threads > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            results = list(pool.map(job, radii))
    else:
        results = [job(radius) for radius in radii]
    for _, row, error in sorted(results, key=lambda item: item[0]):
        if error is not None:
            table.notes.append(error)
        else:
            table.append(row)
    return table


def run_beamdepth(config):
    """Beam-depth sweep at a single aperture radius.

    Columns: delta_R, alpha, G_analytic (continuum law), G_discrete (layout
    sum); the footer carries alpha_kappa, dR-, dR+ and R_lim per requested
    kappa level.
    """
    validate_config(config)
    constants = config.constants()
    radius = config.beamdepth_radius
    distance = config.observation_radius
    layout = build_layout(radius, constants)
    offsets = config.delta_r_grid()
    alphas = alpha_of_offset(offsets, distance, radius, constants.wavenumber)
    discrete = discrete_beamdepth_gain(layout, distance, offsets, constants)
    table = ResultTable(
        columns=["delta_R", "alpha", "G_analytic", "G_discrete"],
        metadata=_config_metadata(config),
    )
    table.metadata["config.N"] = len(layout)
    for offset, alpha, disc in zip(offsets, np.atleast_1d(alphas), np.atleast_1d(discrete)):
        table.append([float(offset), float(alpha), beamdepth_gain(alpha), float(disc)])
    for level in config.kappa:
        alpha_k = alpha_for_fraction(level)
        lower, upper = beamdepth_limits(level, distance, radius, constants.wavenumber)
        limit = transition_radius(level, radius, constants.wavenumber)
        table.notes.append(
            f"kappa={level!r} alpha_kappa={alpha_k!r} dR_minus={lower!r} "
            f"dR_plus={'inf' if upper == np.inf else repr(upper)} "
            f"R_lim={'inf' if limit == np.inf else repr(limit)}"
        )
    return table


def run_layout_export(config, out_dir):
    """Write one layout CSV per configured radius; returns {radius: (path, N)}."""
    validate_config(config)
    constants = config.constants()
    os.makedirs(out_dir, exist_ok=True)
    written = {}
    for radius in sorted(config.aperture_radii):
        layout = build_layout(radius, constants)
        path = os.path.join(out_dir, f"layout_D{radius:g}.csv")
        write_layout_csv(path, layout)
        written[radius] = (path, len(layout))
    return written
