import numpy as np
import pytest

from metabeam import ApertureLayout, PhysicalConstants, build_layout, radiation_damping


@pytest.fixture(scope="session")
def constants():
    return PhysicalConstants(frequency=1.0e10, waveguide_height=2.0e-3)


@pytest.fixture(scope="session")
def constants_c3e8():
    return PhysicalConstants(frequency=1.0e10, waveguide_height=2.0e-3, light_speed=3.0e8)


@pytest.fixture(scope="session")
def damping(constants):
    return radiation_damping(constants)


@pytest.fixture(scope="session")
def layout_d005(constants):
    return build_layout(0.05, constants)


@pytest.fixture(scope="session")
def layout_d02(constants):
    return build_layout(0.2, constants)


def make_random_layout(n, constants, seed, inner=1.0, outer=6.0, min_spacing=0.25):
    """Synthetic layout with n elements scattered in an annulus (radii and
    spacing in units of lambda/2), for tests that need irregular geometry."""
    half = 0.5 * constants.wavelength
    rng = np.random.default_rng(seed)
    points = []
    while len(points) < n:
        rho = half * rng.uniform(inner, outer)
        ang = rng.uniform(0.0, 2.0 * np.pi)
        candidate = np.array([rho * np.cos(ang), rho * np.sin(ang)])
        if all(np.linalg.norm(candidate - p) >= min_spacing * half for p in points):
            points.append(candidate)
    positions = np.array(points)
    return ApertureLayout(
        positions=positions,
        ring_index=np.zeros(n, dtype=int),
        angle=np.arctan2(positions[:, 1], positions[:, 0]),
        radius=outer * half,
    )
