"""Near-field scattered fields: per-dipole local spherical components, the
projection onto the common polarization basis at the observation point, the
dual-polarized channel, and the realized gain.

Only the radiative 1/R term of each dipole field is kept; the longitudinal
(radial) component is dropped.  Azimuth convention for points on the +z
axis: theta_s = 0 and phi_s = 0, so the common basis is (x^, y^).
"""

import csv
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .dipoles import solve_model


class FieldSample(NamedTuple):
    """Scattered electric field components in the common spherical basis, V/m."""

    e_theta: complex
    e_phi: complex


@dataclass(frozen=True)
class ObservationPoint:
    """Observation geometry: common-basis angles and per-element quantities."""

    point: np.ndarray        # (3,)
    theta: float             # polar angle of s w.r.t. the aperture center
    phi: float               # azimuth of s (0 on the z axis by convention)
    distances: np.ndarray    # R_n = |s - r_n|, (N,)
    theta_n: np.ndarray      # per-element polar angles of s - r_n
    phi_n: np.ndarray        # per-element azimuths of s - r_n

    @classmethod
    def at(cls, point, layout):
        s = np.asarray(point, dtype=float).reshape(3)
        r = np.linalg.norm(s)
        if r == 0.0:
            raise ValueError("observation point coincides with the aperture center")
        theta = float(np.arccos(np.clip(s[2] / r, -1.0, 1.0)))
        phi = 0.0 if (s[0] == 0.0 and s[1] == 0.0) else float(np.arctan2(s[1], s[0]))
        dx = s[0] - layout.positions[:, 0]
        dy = s[1] - layout.positions[:, 1]
        dz = s[2]
        dist = np.sqrt(dx * dx + dy * dy + dz * dz)
        if np.any(dist < 1e-12):
            raise ValueError("observation point coincides with an element")
        return cls(
            point=s,
            theta=theta,
            phi=phi,
            distances=dist,
            theta_n=np.arccos(np.clip(dz / dist, -1.0, 1.0)),
            phi_n=np.arctan2(dy, dx),
        )


def _spherical_unit_vectors(theta, phi):
    ct, st = np.cos(theta), np.sin(theta)
    cp, sp = np.cos(phi), np.sin(phi)
    theta_hat = np.stack([ct * cp, ct * sp, -st], axis=-1)
    phi_hat = np.stack([-sp, cp, np.zeros_like(np.asarray(phi, dtype=float))], axis=-1)
    return theta_hat, phi_hat


def projection_matrix(element_position, point):
    """2x2 projection from element-local (theta, phi) basis into the common one.

    Entries are inner products of the common-basis unit vectors at `point`
    (w.r.t. the aperture center) with the local ones for the direction
    point - element; all lie in [-1, 1].
    """
    s = np.asarray(point, dtype=float).reshape(3)
    r_n = np.asarray(element_position, dtype=float)
    if r_n.shape == (2,):
        r_n = np.array([r_n[0], r_n[1], 0.0])
    diff = s - r_n
    dist = np.linalg.norm(diff)
    r = np.linalg.norm(s)
    if dist == 0.0 or r == 0.0:
        raise ValueError("projection basis undefined: coincident points")
    theta_s = float(np.arccos(np.clip(s[2] / r, -1.0, 1.0)))
    phi_s = 0.0 if (s[0] == 0.0 and s[1] == 0.0) else float(np.arctan2(s[1], s[0]))
    theta_l = float(np.arccos(np.clip(diff[2] / dist, -1.0, 1.0)))
    phi_l = float(np.arctan2(diff[1], diff[0]))
    th_s, ph_s = _spherical_unit_vectors(theta_s, phi_s)
    th_l, ph_l = _spherical_unit_vectors(theta_l, phi_l)
    return np.array(
        [
            [float(th_s @ th_l), float(th_s @ ph_l)],
            [float(ph_s @ th_l), float(ph_s @ ph_l)],
        ]
    )


def projected_focusing_vectors(layout, point, constants):
    """Common-basis focusing vectors a~_theta, a~_phi (each 2N complex).

    Local per-element blocks
        a_theta = (e^{-jkR_n}/R_n) [sin phi_n, -cos phi_n]
        a_phi   = (e^{-jkR_n} cos theta_n / R_n) [cos phi_n, sin phi_n]
    are rotated pairwise by the per-element projection matrix.
    """
    obs = point if isinstance(point, ObservationPoint) else ObservationPoint.at(point, layout)
    k = constants.wavenumber
    prop = np.exp(-1j * k * obs.distances) / obs.distances
    sin_p, cos_p = np.sin(obs.phi_n), np.cos(obs.phi_n)
    cos_t = np.cos(obs.theta_n)
    a_theta = np.empty(2 * len(layout), dtype=complex)
    a_phi = np.empty_like(a_theta)
    a_theta[0::2] = prop * sin_p
    a_theta[1::2] = -prop * cos_p
    a_phi[0::2] = prop * cos_t * cos_p
    a_phi[1::2] = prop * cos_t * sin_p

    th_s, ph_s = _spherical_unit_vectors(obs.theta, obs.phi)
    th_l, ph_l = _spherical_unit_vectors(obs.theta_n, obs.phi_n)
    t11 = th_l @ th_s
    t12 = ph_l @ th_s
    t21 = th_l @ ph_s
    t22 = ph_l @ ph_s
    t11 = np.repeat(t11, 2)
    t12 = np.repeat(t12, 2)
    t21 = np.repeat(t21, 2)
    t22 = np.repeat(t22, 2)
    return t11 * a_theta + t12 * a_phi, t21 * a_theta + t22 * a_phi


def scattered_field(layout, moments, point, constants):
    """Total scattered field at `point` in the common basis: the sum of the
    projected per-dipole contributions with prefactor eta k^2 / (2 pi).
    """
    a_theta, a_phi = projected_focusing_vectors(layout, point, constants)
    scale = constants.impedance * constants.wavenumber**2 / (2.0 * np.pi)
    moments = np.asarray(moments, dtype=complex)
    return FieldSample(
        e_theta=complex(scale * np.sum(a_theta * moments)),
        e_phi=complex(scale * np.sum(a_phi * moments)),
    )


def onaxis_fields(layout, moments, distance, constants):
    """Closed-form on-axis field at s = (0, 0, R):

        e_theta = -(eta k^2 / 2 pi) sum_n (R / R_n^2) e^{-jkR_n} m_n^y
        e_phi   = +(eta k^2 / 2 pi) sum_n (R / R_n^2) e^{-jkR_n} m_n^x

    with R_n = sqrt(R^2 + rho_n^2).  Bypasses the per-element basis build.
    """
    if distance <= 0.0:
        raise ValueError("on-axis distance must be positive")
    k = constants.wavenumber
    r_n = np.sqrt(distance**2 + layout.rho**2)
    weight = (distance / r_n**2) * np.exp(-1j * k * r_n)
    scale = constants.impedance * k**2 / (2.0 * np.pi)
    moments = np.asarray(moments, dtype=complex)
    return FieldSample(
        e_theta=complex(-scale * np.sum(weight * moments[1::2])),
        e_phi=complex(scale * np.sum(weight * moments[0::2])),
    )


def channel_matrix(layout, point, constants):
    """Dual-polarized channel H(s), shape (2, 2N): rows are the projected
    focusing vectors scaled by eta k^2 / (2 pi)."""
    a_theta, a_phi = projected_focusing_vectors(layout, point, constants)
    scale = constants.impedance * constants.wavenumber**2 / (2.0 * np.pi)
    return np.vstack([scale * a_theta, scale * a_phi])


def received_signal(layout, point, polar, constants, coupling=None):
    """Received 2-vector y at `point`: the scattered field of the solved
    coupled model (identical computation to `scattered_field`, factored API).
    """
    model = solve_model(layout, polar, constants, coupling=coupling)
    sample = scattered_field(layout, model.moments, point, constants)
    return np.array([sample.e_theta, sample.e_phi])


def realized_gain(sample, supplied):
    """Gain |e_theta|^2 + |e_phi|^2 over the supplied power."""
    if not supplied > 0.0:
        raise ValueError("supplied power must be positive")
    return (abs(sample.e_theta) ** 2 + abs(sample.e_phi) ** 2) / supplied


def write_field_grid_csv(path, points, samples):
    """Field-grid export: s_x, s_y, s_z, Re/Im of e_theta and e_phi."""
    points = np.asarray(points, dtype=float)
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(
            ["s_x", "s_y", "s_z", "re_e_theta", "im_e_theta", "re_e_phi", "im_e_phi"]
        )
        for p, s in zip(points, samples):
            writer.writerow(
                [
                    repr(float(p[0])),
                    repr(float(p[1])),
                    repr(float(p[2])),
                    repr(s.e_theta.real),
                    repr(s.e_theta.imag),
                    repr(s.e_phi.real),
                    repr(s.e_phi.imag),
                ]
            )
