"""Piecewise-constant construction of the 4x4 generalized transfer matrix.

The scattering region is split into N equal segments.  Each segment propagates
the channel amplitudes and their derivatives with the matrix function

    D_L(Q) = [[cos(sqrt(Q) L),            sin(sqrt(Q) L)/sqrt(Q)],
              [-sqrt(Q) sin(sqrt(Q) L),   cos(sqrt(Q) L)        ]]

evaluated spectrally (cos -> cosh on negative eigenvalues, so evanescent
segments grow hyperbolically), and each segment boundary contributes a
block-diagonal eigenbasis rotation.  Larger-y factors multiply on the left.
Every factor preserves the symplectic form J, so the full product does too up
to roundoff; that discrete conservation law is what makes the scattering
matrices downstream flux-unitary.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ID2, J4, EvanescentOverflowError, eigh2, hs_norm
from .berry import planar_rotation
from .fields import PlanarField

GROWTH_GUARD = 60.0  # refuse builds whose evanescent growth exceeds exp(60)


def _propagator_entries(q, length: float):
    """Scalar pieces (cos, sin/sqrt, -q*sin/sqrt) of D for eigenvalue(s) q.

    Uses the Im >= 0 square-root branch; since cos and sin(x)/x are even in
    sqrt(q), negative eigenvalues turn into hyperbolic growth automatically.
    """
    q = np.asarray(q, dtype=complex)
    z = np.sqrt(q)
    zl = z * length
    small = np.abs(zl) < 1e-4
    zl2 = zl * zl
    series = length * (1.0 - zl2 / 6.0 + zl2 * zl2 / 120.0)
    s = np.where(small, series, np.sin(zl) / np.where(small, 1.0, z))
    c = np.cos(zl)
    return c, s, -q * s, np.abs(zl.imag)


def dblock(q: np.ndarray, length: float) -> np.ndarray:
    """D_length(Q) for a Hermitian 2x2 matrix Q, via closed-form spectra."""
    if length < 0.0:
        raise ValueError("segment length must be non-negative")
    q = np.asarray(q, dtype=complex)
    w0, w1, p0, p1 = eigh2(q)
    out = np.zeros((4, 4), dtype=complex)
    for w, p in ((w0, p0), (w1, p1)):
        c, s, ms, _ = _propagator_entries(w, length)
        out[:2, :2] += c * p
        out[:2, 2:] += s * p
        out[2:, :2] += ms * p
        out[2:, 2:] += c * p
    return out


@dataclass(frozen=True)
class SegmentPlan:
    """Precomputed, energy-independent data for one piecewise build."""

    n_segments: int
    seg_length: float
    magnitudes: np.ndarray  # (N,) field magnitude at segment midpoints
    jump_angles: np.ndarray  # (N+1,) in-plane angle step at each crossing
    jumps: np.ndarray  # (N+1, 2, 2) eigenbasis rotations at the crossings
    theta_total: float  # total winding, equals sum of the jump angles

    @property
    def total_rotation(self) -> np.ndarray:
        return planar_rotation(self.theta_total)


def segment_plan(field: PlanarField, n_segments: int, wall_jump_side: str = "right") -> SegmentPlan:
    """Split the region into equal segments with midpoint-sampled field data.

    The eigenbasis rotation between consecutive midpoint directions sits at
    the shared segment boundary; the first and last crossings connect to the
    lead directions.  A zero-field interior has no eigenbasis of its own: it
    inherits the left-lead basis and the full lead-to-lead rotation is placed
    on a single interface (`wall_jump_side`), which observables cannot see.
    """
    n_segments = int(n_segments)
    if n_segments < 1:
        raise ValueError("need at least one segment")
    h = field.length / n_segments
    angles = np.zeros(n_segments + 1)
    if field.zero_field_interior:
        mags = np.zeros(n_segments)
        delta = field.theta_right - field.theta_left
        if wall_jump_side == "right":
            angles[-1] = delta
        elif wall_jump_side == "left":
            angles[0] = delta
        else:
            raise ValueError("wall_jump_side must be 'left' or 'right'")
    else:
        mids = (np.arange(n_segments) + 0.5) * h
        th = np.asarray(field.theta(mids), dtype=float)
        mags = np.asarray(field.magnitude(mids), dtype=float)
        angles[0] = th[0] - field.theta_left
        angles[1:-1] = np.diff(th)
        angles[-1] = field.theta_right - th[-1]
    half = 0.5 * angles
    jumps = np.zeros((n_segments + 1, 2, 2), dtype=complex)
    jumps[:, 0, 0] = jumps[:, 1, 1] = np.cos(half)
    jumps[:, 1, 0] = np.sin(half)
    jumps[:, 0, 1] = -np.sin(half)
    return SegmentPlan(
        n_segments=n_segments,
        seg_length=h,
        magnitudes=mags,
        jump_angles=angles,
        jumps=jumps,
        theta_total=float(field.theta_right - field.theta_left),
    )


def _ordered_product(
    plan: SegmentPlan,
    energies: np.ndarray,
    j_start: int = 0,
    j_stop: int | None = None,
    leading_jump: bool = True,
    trailing_jump: bool = True,
) -> np.ndarray:
    """Batched transfer product over segments [j_start, j_stop).

    ``leading_jump`` includes the crossing at the starting boundary,
    ``trailing_jump`` the one at the final boundary, so that
    product(m, N) @ product(0, m, trailing_jump=False) composes exactly.
    """
    if j_stop is None:
        j_stop = plan.n_segments
    energies = np.atleast_1d(np.asarray(energies, dtype=float))
    n_e = energies.shape[0]
    gamma = np.zeros((n_e, 4, 4), dtype=complex)
    start = plan.jumps[j_start] if leading_jump else ID2
    gamma[:, :2, :2] = start
    gamma[:, 2:, 2:] = start
    growth = np.zeros(n_e)
    factor = np.empty((n_e, 4, 4), dtype=complex)
    for j in range(j_start, j_stop):
        mag = plan.magnitudes[j]
        q = np.stack([energies + mag, energies - mag], axis=-1)
        c, s, ms, kappa = _propagator_entries(q, plan.seg_length)
        growth += kappa.max(axis=-1)
        if growth.max() > GROWTH_GUARD:
            raise EvanescentOverflowError(
                f"evanescent growth exceeds exp({GROWTH_GUARD:g}); "
                "region too long for this energy"
            )
        if j + 1 < j_stop or trailing_jump:
            u = plan.jumps[j + 1]
        else:
            u = ID2
        factor[:, :2, :2] = u * c[:, None, :]
        factor[:, :2, 2:] = u * s[:, None, :]
        factor[:, 2:, :2] = u * ms[:, None, :]
        factor[:, 2:, 2:] = u * c[:, None, :]
        gamma = factor @ gamma
    return gamma


@dataclass(frozen=True)
class TransferMatrix4:
    """Generalized transfer matrix and its geometry-stripped counterpart."""

    gamma: np.ndarray
    gamma_tilde: np.ndarray
    berry: np.ndarray  # full-interval eigenbasis transport
    energy: float
    n_segments: int

    @property
    def x00(self) -> np.ndarray:
        return self.gamma_tilde[:2, :2]

    @property
    def x01(self) -> np.ndarray:
        return self.gamma_tilde[:2, 2:]

    @property
    def x10(self) -> np.ndarray:
        return self.gamma_tilde[2:, :2]

    @property
    def x11(self) -> np.ndarray:
        return self.gamma_tilde[2:, 2:]


def strip_berry(gamma: np.ndarray, berry: np.ndarray) -> np.ndarray:
    """Remove the geometric factor: gamma_tilde = diag(U^dag, U^dag) @ gamma."""
    ud = berry.conj().T
    stripper = np.zeros((4, 4), dtype=complex)
    stripper[:2, :2] = ud
    stripper[2:, 2:] = ud
    return stripper @ gamma


def gamma_piecewise_batch(
    field: PlanarField,
    energies,
    n_segments: int,
    plan: SegmentPlan | None = None,
    wall_jump_side: str = "right",
):
    """Transfer matrices for many energies at once.

    Returns (gamma, gamma_tilde) with shape (n_energies, 4, 4) plus the
    full-interval transport matrix shared by all energies.
    """
    if plan is None:
        plan = segment_plan(field, n_segments, wall_jump_side=wall_jump_side)
    gamma = _ordered_product(plan, energies)
    berry = plan.total_rotation
    gamma_tilde = np.einsum("ij,ejk->eik", _diag4(berry.conj().T), gamma)
    return gamma, gamma_tilde, berry


def _diag4(u: np.ndarray) -> np.ndarray:
    out = np.zeros((4, 4), dtype=complex)
    out[:2, :2] = u
    out[2:, 2:] = u
    return out


def gamma_piecewise(field: PlanarField, energy: float, n_segments: int) -> TransferMatrix4:
    """Build the transfer matrix of a field at one energy with N segments."""
    gamma, gamma_tilde, berry = gamma_piecewise_batch(field, [float(energy)], n_segments)
    return TransferMatrix4(
        gamma=gamma[0],
        gamma_tilde=gamma_tilde[0],
        berry=berry,
        energy=float(energy),
        n_segments=int(n_segments),
    )


def flow_defect(gamma_tilde: np.ndarray) -> float:
    """Deviation of gamma_tilde from preserving the symplectic form J."""
    return hs_norm(gamma_tilde.conj().T @ J4 @ gamma_tilde - J4)
