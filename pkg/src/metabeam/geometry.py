"""Aperture geometry: physical constants and the concentric-ring element layout
around the central feed.
"""

import csv
from dataclasses import dataclass, field

import numpy as np

SPEED_OF_LIGHT = 299792458.0   # m/s, SI exact
MU_0 = 1.25663706212e-06       # H/m


@dataclass(frozen=True)
class PhysicalConstants:
    """Operating frequency, waveguide geometry and feed drive, all SI.

    Derived spectral quantities (wavelength, wavenumber, angular frequency,
    free-space impedance) are computed from `frequency` and `light_speed`
    so the invariants lambda = c/f, k = 2 pi/lambda, omega = 2 pi f hold by
    construction.
    """

    frequency: float
    waveguide_height: float
    light_speed: float = SPEED_OF_LIGHT
    feed_current: complex = 1.0 + 0.0j
    mu0: float = MU_0

    def __post_init__(self):
        if not self.frequency > 0.0:
            raise ValueError("frequency must be positive")
        if not self.waveguide_height > 0.0:
            raise ValueError("waveguide_height must be positive")
        if not self.light_speed > 0.0:
            raise ValueError("light_speed must be positive")
        if self.feed_current == 0:
            raise ValueError("feed_current must be nonzero")

    @property
    def wavelength(self):
        return self.light_speed / self.frequency

    @property
    def wavenumber(self):
        return 2.0 * np.pi / self.wavelength

    @property
    def omega(self):
        return 2.0 * np.pi * self.frequency

    @property
    def impedance(self):
        """Free-space wave impedance eta = mu0 * c."""
        return self.mu0 * self.light_speed


@dataclass(frozen=True)
class ApertureLayout:
    """Element positions on the z = 0 plane with the feed at the origin.

    `ring_index` and `angle` record where each element sits on the ring
    grid; `rho` and `psi` cache the feed-to-element distance and the
    feed-minus-element bearing atan2(-y_n, -x_n) used by the excitation
    field.
    """

    positions: np.ndarray      # (N, 2) in meters
    ring_index: np.ndarray     # (N,) 1-based ring number
    angle: np.ndarray          # (N,) position angle on its ring, rad
    radius: float              # aperture radius D in meters
    rho: np.ndarray = field(init=False)
    psi: np.ndarray = field(init=False)

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float)
        if pos.ndim != 2 or pos.shape[1] != 2 or pos.shape[0] == 0:
            raise ValueError("positions must be a nonempty (N, 2) array")
        rho = np.hypot(pos[:, 0], pos[:, 1])
        if np.any(rho <= 0.0):
            raise ValueError("an element coincides with the feed at the origin")
        if np.any(rho > self.radius * (1.0 + 1e-12)):
            raise ValueError("an element lies outside the aperture radius")
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "psi", np.arctan2(-pos[:, 1], -pos[:, 0]))

    def __len__(self):
        return self.positions.shape[0]


def build_layout(radius, constants):
    """Concentric-ring layout: ring m at rho = m lambda/2 carrying round(2 pi m)
    elements uniformly spaced in angle, starting at angle 0.

    Both the radial and angular spacings are thereby lambda/2 up to the
    per-ring rounding; round-to-nearest is the rule that reproduces the
    reference element counts N=38 (D=0.05 m) and N=2206 (D=0.4 m) at 10 GHz.

    Raises
    ------
    ValueError
        If no ring fits (radius < lambda/2).
    """
    if radius <= 0.0:
        raise ValueError("aperture radius must be positive")
    half_wave = 0.5 * constants.wavelength
    n_rings = int(np.floor(radius / half_wave))
    if n_rings < 1:
        raise ValueError(
            f"radius {radius} m fits no ring: smallest ring radius is "
            f"lambda/2 = {half_wave:.6g} m"
        )
    xs, ys, rings, angles = [], [], [], []
    for m in range(1, n_rings + 1):
        ring_radius = m * half_wave
        count = int(round(2.0 * np.pi * m))
        theta = 2.0 * np.pi * np.arange(count) / count
        xs.append(ring_radius * np.cos(theta))
        ys.append(ring_radius * np.sin(theta))
        rings.append(np.full(count, m, dtype=int))
        angles.append(theta)
    positions = np.column_stack([np.concatenate(xs), np.concatenate(ys)])
    return ApertureLayout(
        positions=positions,
        ring_index=np.concatenate(rings),
        angle=np.concatenate(angles),
        radius=float(radius),
    )


def surface_density(layout):
    """Element surface density nu = N / (pi D^2), in 1/m^2."""
    n = len(layout)
    if n == 0:
        raise ValueError("empty layout")
    return n / (np.pi * layout.radius**2)


def write_layout_csv(path, layout):
    """Export the layout as CSV with columns x_m, y_m, ring_index, angle_rad."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["x_m", "y_m", "ring_index", "angle_rad"])
        for (x, y), ring, ang in zip(layout.positions, layout.ring_index, layout.angle):
            writer.writerow([repr(float(x)), repr(float(y)), int(ring), repr(float(ang))])
