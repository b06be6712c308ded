"""Closed-form near-field laws: the analytic on-axis gain, aperture field
scaling, the normalized beam-depth gain and its limits, and the far-field
transition radius, plus the discrete-layout counterparts used to validate
them.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .dipoles import PolarizabilitySet, radiation_damping, solve_model, supplied_power
from .fields import onaxis_fields, realized_gain
from .geometry import build_layout, surface_density
from .special import beamdepth_integral, hankel01, smallest_positive_root

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(32)


def analytic_gain(distance, radius, density, constants, damping):
    """On-axis gain law  G(R) = 8 eta k^3 nu D^2 / (9 pi^3 C R^2).

    Valid in the D << R regime; scales with D^2 at fixed density, hence
    linearly in the element count N = nu pi D^2.
    """
    if distance <= 0.0 or radius <= 0.0 or density <= 0.0:
        raise ValueError("distance, radius and density must be positive")
    k = constants.wavenumber
    return (
        8.0 * constants.impedance * k**3 * density * radius**2
        / (9.0 * np.pi**3 * damping * distance**2)
    )


class FieldScaling(NamedTuple):
    """Theta-field magnitude estimates: closed form and disk-integral quadrature."""

    closed_form: float
    quadrature: float


def field_scaling(distance, radius, density, constants, damping):
    """Coherent theta-field magnitude from the continuum disk model.

    closed_form : (eta k^3 |I| nu / (6 pi C R)) sqrt(2/(pi k)) D^(3/2),
                  the D << R reduction.
    quadrature  : prefactor * int_0^D  R rho^(1/2) / (R^2 + rho^2) d rho
                  evaluated without the D << R step (rho = v^2 substitution
                  smooths the sqrt endpoint; Gauss-Legendre panels doubled
                  to convergence).  As D -> infinity this tends to
                  prefactor * pi * sqrt(R/2): the field saturates.
    """
    k = constants.wavenumber
    current = abs(constants.feed_current)
    prefactor = (
        constants.impedance * k**3 * current * density
        / (4.0 * np.pi * damping)
        * math.sqrt(2.0 / (np.pi * k))
    )
    closed = prefactor * (2.0 / 3.0) * radius**1.5 / distance

    def integrand(v):
        return 2.0 * distance * v * v / (distance**2 + v**4)

    upper = math.sqrt(radius)
    previous = None
    value = 0.0
    for panels in (1, 2, 4, 8, 16, 32, 64, 128, 256, 512):
        edges = np.linspace(0.0, upper, panels + 1)
        centers = 0.5 * (edges[:-1] + edges[1:])
        half = 0.5 * np.diff(edges)
        v = (centers[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
        w = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
        value = float(np.sum(w * integrand(v)))
        if previous is not None and abs(value - previous) <= 1e-12 * max(abs(value), 1.0):
            break
        previous = value
    return FieldScaling(closed_form=closed, quadrature=prefactor * value)


def alpha_of_offset(offset, distance, radius, wavenumber):
    """Normalized focal mismatch  alpha(dR) = D^2 k dR / (2 R (R + dR)).

    Tends to D^2 k / (2R) as dR -> infinity.  R + dR <= 0 (focus behind the
    aperture) is a domain error.
    """
    offset = np.asarray(offset, dtype=float)
    if distance <= 0.0:
        raise ValueError("observation distance must be positive")
    if np.any(distance + offset <= 0.0):
        raise ValueError("focus behind the aperture: R + dR must be positive")
    value = radius**2 * wavenumber * offset / (2.0 * distance * (distance + offset))
    return float(value) if value.ndim == 0 else value


def beamdepth_gain(alpha):
    """Normalized beam-depth gain  (9/16) |int_0^1 t^(-1/4) e^{j alpha t} dt|^2.

    Equals 1 at alpha = 0 and is even in alpha.
    """
    return 9.0 / 16.0 * abs(beamdepth_integral(float(alpha))) ** 2


def alpha_for_fraction(kappa, scan_step=0.05, scan_max=100.0):
    """Smallest positive alpha with beamdepth_gain(alpha) = kappa.

    The gain curve is decreasing up to mild oscillations with period O(pi),
    so the default 0.05 scan step cannot skip the first crossing.
    """
    if not 0.0 < kappa <= 1.0:
        raise ValueError("kappa must lie in (0, 1]")
    return smallest_positive_root(beamdepth_gain, kappa, scan_step, scan_max)


def beamdepth_limits(kappa, distance, radius, wavenumber):
    """Radial interval (dR-, dR+) where the beam-depth gain stays >= kappa:

        dR+ = 2 R^2 a_k / (D^2 k - 2 R a_k),   dR- = -2 R^2 a_k / (D^2 k + 2 R a_k)

    with a_k the smallest positive solution of the gain level.  dR+ is
    +infinity once R >= transition_radius(kappa): the beam then tolerates
    arbitrarily large positive offsets at that level.
    """
    if not 0.0 < kappa <= 1.0:
        raise ValueError("kappa must lie in (0, 1]")
    alpha = alpha_for_fraction(kappa)
    lower = -2.0 * distance**2 * alpha / (radius**2 * wavenumber + 2.0 * distance * alpha)
    denom = radius**2 * wavenumber - 2.0 * distance * alpha
    upper = math.inf if denom <= 0.0 else 2.0 * distance**2 * alpha / denom
    return lower, upper


def transition_radius(kappa, radius, wavenumber):
    """Far-field transition radius  R_lim = D^2 k / (2 a_k) for gain level kappa.

    Reported as +infinity for kappa -> 1 (a_k -> 0).
    """
    if not 0.0 < kappa <= 1.0:
        raise ValueError("kappa must lie in (0, 1]")
    alpha = alpha_for_fraction(kappa)
    if alpha == 0.0:
        return math.inf
    return radius**2 * wavenumber / (2.0 * alpha)


def discrete_beamdepth_gain(layout, distance, offset, constants):
    """Beam-depth gain evaluated on the actual layout (no continuum step):

    ratio of the mismatched to the matched coherent sums with per-element
    weights (R/R_n^2) |H1^(2)(k rho_n)| |cos psi_n|, the mismatch entering
    as the phase e^{-jk(R_n(R+dR) - R_n(R))}.
    """
    offset = np.asarray(offset, dtype=float)
    if distance <= 0.0:
        raise ValueError("observation distance must be positive")
    if np.any(distance + offset <= 0.0):
        raise ValueError("focus behind the aperture: R + dR must be positive")
    k = constants.wavenumber
    _, h1 = hankel01(k * layout.rho)
    r_n = np.sqrt(distance**2 + layout.rho**2)
    # complex dtype throughout so the matched (dR = 0) case reduces to the
    # bitwise-identical sum and the ratio is exactly 1
    weight = ((distance / r_n**2) * np.abs(h1) * np.abs(np.cos(layout.psi))).astype(complex)
    matched = abs(np.sum(weight)) ** 2
    scalar = offset.ndim == 0
    offsets = np.atleast_1d(offset)
    r_mis = np.sqrt((distance + offsets[:, None]) ** 2 + layout.rho[None, :] ** 2)
    phase = np.exp(-1j * k * (r_mis - r_n[None, :]))
    values = np.abs(np.sum(weight[None, :] * phase, axis=1)) ** 2 / matched
    return float(values[0]) if scalar else values


@dataclass(frozen=True)
class BeamDepthProfile:
    """Beam-depth characterization at one gain level kappa."""

    kappa: float
    alpha_kappa: float
    offset_lower: float     # dR-, meters
    offset_upper: float     # dR+, meters or +inf
    transition: float       # R_lim, meters
    samples: np.ndarray     # (M, 2) columns: dR, analytic gain


def beamdepth_profile(kappa, distance, radius, wavenumber, offsets=None):
    if offsets is None:
        offsets = np.linspace(0.0, 10.0 * distance, 201)
    offsets = np.asarray(offsets, dtype=float)
    alphas = alpha_of_offset(offsets, distance, radius, wavenumber)
    gains = np.array([beamdepth_gain(a) for a in np.atleast_1d(alphas)])
    lower, upper = beamdepth_limits(kappa, distance, radius, wavenumber)
    return BeamDepthProfile(
        kappa=float(kappa),
        alpha_kappa=alpha_for_fraction(kappa),
        offset_lower=lower,
        offset_upper=upper,
        transition=transition_radius(kappa, radius, wavenumber),
        samples=np.column_stack([offsets, gains]),
    )


@dataclass(frozen=True)
class ScalingReport:
    """Log-log slope of the on-axis response against the element count."""

    radii: np.ndarray
    counts: np.ndarray
    values: np.ndarray     # |e_theta|^2 or realized gain per radius
    slope: float
    mode: str              # "fixed-current" or "power-normalized"


def scaling_report(radii, distance, constants, mode="fixed-current"):
    """Sweep aperture radii with focusing phases and no coupling, and fit the
    growth exponent of either |e_theta(s(R))|^2 (fixed feed current) or the
    power-normalized gain against N.

    The expected exponents are 3/2 and 1 respectively.
    """
    if mode not in ("fixed-current", "power-normalized"):
        raise ValueError(f"unknown scaling mode {mode!r}")
    radii = np.asarray(radii, dtype=float)
    if radii.size < 4:
        raise ValueError("need at least 4 radii to fit a slope")
    from .optimize import focusing_phases  # local import to avoid a cycle

    damping = radiation_damping(constants)
    counts, values = [], []
    for radius in radii:
        layout = build_layout(radius, constants)
        polar = PolarizabilitySet.from_phases(
            focusing_phases(layout, distance, constants), damping
        )
        model = solve_model(layout, polar, constants, coupling=None)
        sample = onaxis_fields(layout, model.moments, distance, constants)
        counts.append(len(layout))
        if mode == "fixed-current":
            values.append(abs(sample.e_theta) ** 2)
        else:
            power = supplied_power(model.moments, model.local_field, constants)
            values.append(realized_gain(sample, power))
    counts = np.asarray(counts, dtype=float)
    values = np.asarray(values, dtype=float)
    slope = float(np.polyfit(np.log(counts), np.log(values), 1)[0])
    return ScalingReport(radii=radii, counts=counts, values=values, slope=slope, mode=mode)


def simulated_onaxis_gain(radius, distance, constants, coupling_matrix=None, phases=None):
    """Full-pipeline on-axis gain for one aperture radius.

    Focusing phases by default; the uncoupled model unless a coupling matrix
    is supplied.  Returns (layout, gain).
    """
    from .optimize import focusing_phases

    layout = build_layout(radius, constants)
    damping = radiation_damping(constants)
    if phases is None:
        phases = focusing_phases(layout, distance, constants)
    polar = PolarizabilitySet.from_phases(phases, damping)
    model = solve_model(layout, polar, constants, coupling=coupling_matrix)
    sample = onaxis_fields(layout, model.moments, distance, constants)
    power = supplied_power(model.moments, model.local_field, constants)
    return layout, realized_gain(sample, power)
