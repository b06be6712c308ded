"""Special-function kernel tests: Hankel accuracy against independent
oracles, the beam-depth integral against adaptive quadrature, and the
bracketed root finder.
"""

import math

import numpy as np
import pytest
from scipy import special as sp

from metabeam.special import (
    NoRootError,
    SERIES_ASYMPTOTIC_CROSSOVER,
    _asymptotic_large,
    _series_small,
    beamdepth_integral,
    hankel2,
    smallest_positive_root,
)

# Frozen oracle values for int_0^1 t^(-1/4) e^(j alpha t) dt, computed with
# mpmath tanh-sinh quadrature at 30 digits.
FROZEN_INTEGRALS = {
    0.5: 1.288423829519390 + 0.280203820551992j,
    2.5: 0.493478567568100 + 0.861060826989265j,
    4.19: -0.037488397387289 + 0.515069137608271j,
}


# ---------------------------------------------------------------- hankel2

def test_order1_published_value():
    # J1(1) = 0.4400505857, Y1(1) = -0.7812128213 (15-digit function tables)
    value = hankel2(1, 1.0)
    assert value == pytest.approx(0.4400505857 + 0.7812128213j, abs=1e-9)


def test_j0_limit_small_argument():
    assert hankel2(0, 1e-6).real == pytest.approx(1.0, abs=1e-9)


def test_asymptotic_magnitude_at_100():
    expected = math.sqrt(2.0 / (np.pi * 100.0))
    assert abs(abs(hankel2(1, 100.0)) - expected) / expected <= 5e-3


@pytest.mark.parametrize("order", [0, 1, 2])
def test_against_scipy_oracle(order):
    x = np.concatenate(
        [
            np.geomspace(1e-3, 1e4, 3000),
            np.linspace(SERIES_ASYMPTOTIC_CROSSOVER - 1, SERIES_ASYMPTOTIC_CROSSOVER + 1, 201),
        ]
    )
    mine = hankel2(order, x)
    reference = sp.hankel2(order, x)
    rel = np.abs(mine - reference) / np.abs(reference)
    assert rel.max() <= 1e-10


def test_branch_agreement_at_crossover():
    x = np.array([SERIES_ASYMPTOTIC_CROSSOVER])
    j0s, j1s, y0s, y1s = _series_small(x)
    j0a, y0a = _asymptotic_large(0, x)
    j1a, y1a = _asymptotic_large(1, x)
    for series, asym in ((j0s, j0a), (j1s, j1a), (y0s, y0a), (y1s, y1a)):
        assert abs(series[0] - asym[0]) <= 1e-10


def test_domain_errors():
    with pytest.raises(ValueError):
        hankel2(1, 0.0)
    with pytest.raises(ValueError):
        hankel2(1, -2.0)
    with pytest.raises(ValueError):
        hankel2(3, 1.0)


@pytest.mark.parametrize("x", [0.5, 1.0, 5.0, 20.0, 100.0])
def test_wronskian(x):
    h0 = hankel2(0, x)
    h1 = hankel2(1, x)
    j0, y0 = h0.real, -h0.imag
    j1, y1 = h1.real, -h1.imag
    expected = 2.0 / (np.pi * x)
    assert (j1 * y0 - j0 * y1) == pytest.approx(expected, rel=1e-9)


# ----------------------------------------------------- beamdepth_integral

def test_integral_at_zero_is_four_thirds():
    assert abs(beamdepth_integral(0.0) - 4.0 / 3.0) <= 1e-12


def test_integral_conjugate_symmetry():
    assert abs(beamdepth_integral(-2.5) - np.conj(beamdepth_integral(2.5))) <= 1e-12


@pytest.mark.parametrize("alpha", sorted(FROZEN_INTEGRALS))
def test_integral_frozen_oracle_values(alpha):
    assert abs(beamdepth_integral(alpha) - FROZEN_INTEGRALS[alpha]) <= 1e-10


def test_integral_incomplete_gamma_representation():
    # Optional cross-check: int_0^1 t^(s-1) e^(j a t) dt = gamma(s, -ja) (-ja)^(-s)
    # with s = 3/4, via mpmath's complex lower incomplete gamma.
    mp = pytest.importorskip("mpmath")
    mp.mp.dps = 30
    for alpha in (0.7, 3.3, 12.0):
        z = -1j * mp.mpf(alpha)
        reference = complex(mp.gammainc(mp.mpf(3) / 4, 0, z) * z ** (-mp.mpf(3) / 4))
        assert abs(beamdepth_integral(alpha) - reference) <= 1e-10


def test_integral_magnitude_bound():
    alphas = np.linspace(0.0, 50.0, 1000)
    magnitudes = np.array([abs(beamdepth_integral(a)) for a in alphas])
    assert magnitudes.max() <= 4.0 / 3.0 + 1e-12


def test_integral_rejects_nonfinite():
    with pytest.raises(ValueError):
        beamdepth_integral(np.nan)
    with pytest.raises(ValueError):
        beamdepth_integral(np.inf)


# ------------------------------------------------- smallest_positive_root

def _gain(alpha):
    return 9.0 / 16.0 * abs(beamdepth_integral(alpha)) ** 2


def test_root_boundary_case_returns_zero():
    assert smallest_positive_root(_gain, 1.0, 0.05, 10.0) == 0.0


def test_root_half_level_and_minimality():
    root = smallest_positive_root(_gain, 0.5, 0.05, 20.0)
    assert abs(_gain(root) - 0.5) <= 1e-9
    # dense-grid verification that no earlier crossing was skipped
    grid = np.arange(1e-3, root - 5e-4, 1e-3)
    values = np.array([_gain(a) for a in grid])
    assert np.all(values > 0.5)


def test_root_level_015_anchor():
    root = smallest_positive_root(_gain, 0.15, 0.05, 20.0)
    assert root == pytest.approx(4.19, rel=0.02)


def test_root_scan_refinement_idempotent():
    coarse = smallest_positive_root(_gain, 0.3, 0.05, 20.0)
    fine = smallest_positive_root(_gain, 0.3, 0.025, 20.0)
    assert abs(coarse - fine) <= 1e-6


def test_root_not_found_reports_range():
    with pytest.raises(NoRootError, match="5.0"):
        smallest_positive_root(lambda x: 1.0, 0.5, 0.5, 5.0)


def test_root_rejects_bad_step():
    with pytest.raises(ValueError):
        smallest_positive_root(_gain, 0.5, 0.0, 5.0)
