"""Coupled magnetic-dipole model of the waveguide-fed metasurface: element
polarizabilities, feed excitation, mutual coupling through the guide and
through free space, the dense linear solve, and the supplied power.

Component stacking convention throughout: index 2n-1 (0-based 2n) is the x
component of element n, index 2n (0-based 2n+1) the y component.
"""

import csv
from dataclasses import dataclass

import numpy as np
from scipy.linalg import get_lapack_funcs, lu_factor, lu_solve

from .special import hankel01

CONDITION_LIMIT = 1e12


class SolverError(RuntimeError):
    """The coupled system is singular or too ill-conditioned to solve."""

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


def radiation_damping(constants):
    """Radiation damping constant C = k^3/(3 pi) + k^2/(8 h) for an element
    embedded in the parallel-plate guide (units 1/m^3).

    The first term is the image-doubled free-space damping, the second the
    guided-mode damping; the coupling kernels below reproduce both as the
    d -> 0 imaginary parts of their self-terms.
    """
    k = constants.wavenumber
    return k**3 / (3.0 * np.pi) + k**2 / (8.0 * constants.waveguide_height)


def lorentzian_polarizability(phase, damping):
    """Effective polarizability block A = -(1/2C)(j + e^{j phi}) I2.

    Satisfies the passivity conditions Im{A} <= 0 and, wherever A is
    invertible, Im{1/A} = C.  phi = 3 pi/2 gives A = 0 (element off), a
    valid non-invertible value.
    """
    a = -(0.5 / damping) * (1j + np.exp(1j * float(phase)))
    return a * np.eye(2)


def apply_radiation_reaction(intrinsic, damping):
    """Effective polarizability A = A~ (I2 + jC A~)^(-1) from the intrinsic one.

    Equivalent to 1/A = 1/A~ + jC blockwise for diagonal A~, which is what
    enforces Im{1/A} = C for a real (lossless) intrinsic response.
    """
    intrinsic = np.asarray(intrinsic, dtype=complex)
    if intrinsic.shape != (2, 2):
        raise ValueError("intrinsic polarizability must be a 2x2 block")
    denom = np.eye(2) + 1j * damping * intrinsic
    if abs(np.linalg.det(denom)) < 1e-300:
        raise SolverError("radiation-reaction correction is singular: det(I + jC A~) = 0")
    return intrinsic @ np.linalg.inv(denom)


@dataclass(frozen=True)
class PolarizabilitySet:
    """Per-element tuning phases and the effective 2N-component diagonal.

    The blocks are isotropic (scalar times I2), so the whole 2N x 2N matrix
    A-bar is stored as its diagonal.
    """

    phases: np.ndarray     # (N,) radians in [0, 2pi)
    diagonal: np.ndarray   # (2N,) complex
    damping: float

    @classmethod
    def from_phases(cls, phases, damping):
        phases = np.mod(np.asarray(phases, dtype=float), 2.0 * np.pi)
        a = -(0.5 / damping) * (1j + np.exp(1j * phases))
        return cls(phases=phases, diagonal=np.repeat(a, 2), damping=float(damping))

    def __len__(self):
        return self.phases.shape[0]


def excitation_field(layout, constants):
    """Feed propagation vector h_f (2N,), current factored out.

    [h_f]_x = (jk/4) H1^(2)(k rho_n) sin(psi_n)
    [h_f]_y = (-jk/4) H1^(2)(k rho_n) cos(psi_n)

    with psi_n = atan2(-y_n, -x_n) the feed-minus-element bearing.  The
    excitation field including the drive is h_0 = h_f * I.
    """
    if np.any(layout.rho <= 0.0):
        raise ValueError("excitation field is singular for an element at the feed")
    k = constants.wavenumber
    _, h1 = hankel01(k * layout.rho)
    out = np.empty(2 * len(layout), dtype=complex)
    out[0::2] = (0.25j * k) * h1 * np.sin(layout.psi)
    out[1::2] = (-0.25j * k) * h1 * np.cos(layout.psi)
    return out


def _coupling_coefficients(kd, d, constants):
    """Scalar (delta_ab) and dyadic (d^_a d^_b) coefficients of the total
    inter-element coupling kernel at separation d.

    Waveguide part: in-plane dyadic derivatives of the 2D outgoing kernel
    (-j/4) H0^(2)(kd), scaled by k^2/h; free-space part: transverse block of
    the dyadic (I + grad grad / k^2) e^{-jkd}/(4 pi d) scaled by 2k^2, the
    factor 2 accounting for the image dipole in the upper plate.  With this
    normalization the d -> 0 imaginary self-terms reproduce the radiation
    damping constant k^3/(3 pi) + k^2/(8 h) exactly.
    """
    k = constants.wavenumber
    h0, h1 = hankel01(kd)
    wg_scale = k * k / constants.waveguide_height
    wg_s = (-0.25j) * (h0 - h1 / kd)
    wg_t = (0.25j) * (h0 - 2.0 * h1 / kd)
    psi3 = np.exp(-1j * kd) / (4.0 * np.pi * d)
    fs_s = psi3 * (1.0 - 1j / kd - 1.0 / kd**2)
    fs_t = psi3 * (-1.0 + 3j / kd + 3.0 / kd**2)
    scalar = wg_scale * wg_s + 2.0 * k * k * fs_s
    dyadic = wg_scale * wg_t + 2.0 * k * k * fs_t
    return scalar, dyadic


def coupling_matrix(layout, constants):
    """Assemble the 2N x 2N mutual-coupling matrix G-bar.

    Off-diagonal 2x2 blocks follow `_coupling_coefficients`; diagonal blocks
    are exactly zero (self-interaction lives in the radiation damping, not
    here).  Blocks satisfy reciprocity G_{n,j} = G_{j,n}^T because both
    kernels are even functions of the separation vector.
    """
    pos = layout.positions
    n = pos.shape[0]
    dx = pos[:, 0][:, None] - pos[:, 0][None, :]
    dy = pos[:, 1][:, None] - pos[:, 1][None, :]
    d = np.hypot(dx, dy)
    off = ~np.eye(n, dtype=bool)
    if np.any(d[off] < 1e-12):
        raise ValueError("coincident elements make the coupling singular")
    np.fill_diagonal(d, 1.0)  # placeholder; diagonal blocks are zeroed below
    ux = dx / d
    uy = dy / d
    scalar, dyadic = _coupling_coefficients(constants.wavenumber * d, d, constants)
    np.fill_diagonal(scalar, 0.0)
    np.fill_diagonal(dyadic, 0.0)
    coupling = np.zeros((2 * n, 2 * n), dtype=complex)
    coupling[0::2, 0::2] = scalar + dyadic * ux * ux
    coupling[0::2, 1::2] = dyadic * ux * uy
    coupling[1::2, 0::2] = dyadic * uy * ux
    coupling[1::2, 1::2] = scalar + dyadic * uy * uy
    return coupling


def solve_dipoles(polar, coupling, excitation, current):
    """Dipole moments m = (I - A-bar G-bar)^(-1) A-bar h_f I.

    This form stays valid when some elements are switched off (A_n = 0),
    unlike the A-bar^(-1) formulation.  Dense LU with partial pivoting; the
    LAPACK reciprocal condition estimate guards against an ill-conditioned
    system.

    Raises
    ------
    SolverError
        If the estimated condition number exceeds 1e12.
    """
    diag = polar.diagonal
    rhs = diag * excitation * current
    if coupling is None:
        return rhs.copy()
    size = diag.shape[0]
    if coupling.shape != (size, size):
        raise ValueError("coupling matrix does not match the polarizability size")
    system = -diag[:, None] * coupling
    system[np.diag_indices(size)] += 1.0
    anorm = np.linalg.norm(system, 1)
    lu, piv = lu_factor(system, overwrite_a=True, check_finite=False)
    gecon = get_lapack_funcs("gecon", (lu,))
    rcond, info = gecon(lu, anorm)
    if info < 0 or rcond == 0.0 or 1.0 / max(rcond, 1e-300) > CONDITION_LIMIT:
        cond = np.inf if rcond == 0.0 else 1.0 / rcond
        raise SolverError(
            f"coupled system is ill-conditioned: condition estimate {cond:.3e} "
            f"exceeds {CONDITION_LIMIT:.0e}",
            condition=cond,
        )
    return lu_solve((lu, piv), rhs, check_finite=False)


@dataclass(frozen=True)
class CoupledModel:
    """A solved coupled-dipole state: inputs, moments and local fields."""

    excitation: np.ndarray          # h_f, (2N,)
    moments: np.ndarray             # m, (2N,), A m^2
    local_field: np.ndarray         # h_loc = h_f I + G m, (2N,), A/m
    coupling: np.ndarray | None     # G-bar or None for the uncoupled model


def solve_model(layout, polar, constants, coupling=None):
    """Convenience wrapper: excitation, solve, and local-field reconstruction."""
    h_f = excitation_field(layout, constants)
    m = solve_dipoles(polar, coupling, h_f, constants.feed_current)
    h_loc = h_f * constants.feed_current
    if coupling is not None:
        h_loc = h_loc + coupling @ m
    return CoupledModel(excitation=h_f, moments=m, local_field=h_loc, coupling=coupling)


def supplied_power(moments, local_field, constants):
    """Supplied power P = (1/2) Re{ j omega mu0 sum_n m_n^T h_loc,n^* } in W.

    Plain transpose on the moments, conjugate on the local field.  For the
    uncoupled Lorentzian model this reduces to
    (omega mu0 / 2) sum_n (-Im A_n)(|h0x|^2 + |h0y|^2) >= 0.
    """
    moments = np.asarray(moments)
    local_field = np.asarray(local_field)
    if moments.shape != local_field.shape:
        raise ValueError("moments and local field have mismatched lengths")
    total = np.sum(moments * np.conj(local_field))
    return 0.5 * np.real(1j * constants.omega * constants.mu0 * total)


def dump_solution_csv(path, model):
    """Debug dump of moments and local fields, one row per component."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["component", "re_m", "im_m", "re_h_loc", "im_h_loc"])
        for i, (m, h) in enumerate(zip(model.moments, model.local_field)):
            writer.writerow([i, repr(m.real), repr(m.imag), repr(h.real), repr(h.imag)])
