"""Geometric (Wilson-line) part of the transfer problem.

Three independent routes compute the same unitary that transports the local
Zeeman eigenbasis along the wire:

* the planar closed form, a rotation by half the unwrapped angle difference;
* an ordered product of eigenbasis overlap matrices over a sampled path;
* the single boundary-overlap matrix, which for two-level systems depends on
  the endpoint directions only.

The engine always uses the winding-aware planar form.  The overlap routes fix
the spinor gauge from the direction vectors alone, so they agree with the
planar form only up to a global sign once the path winds past the principal
range (spinor double cover); products are compared after sign alignment.
"""

from __future__ import annotations

import numpy as np

from .core import FieldDirectionError
from .fields import PlanarField

_ANTIPODAL_TOL = 1e-12


def planar_rotation(delta_theta: float) -> np.ndarray:
    """Eigenbasis transport for an in-plane direction change delta_theta.

    A real rotation by delta_theta / 2 acting on the (lower, upper) channel
    pair; windings beyond 2*pi flip the overall sign, as spinors require.
    """
    half = 0.5 * float(delta_theta)
    c, s = np.cos(half), np.sin(half)
    return np.array([[c, -s], [s, c]], dtype=complex)


def berry_connection_planar(field: PlanarField, y: float) -> np.ndarray:
    """Skew connection K(y) between the local eigenstates, K = theta'/2 * [[0,1],[-1,0]]."""
    if field.zero_field_interior and 0.0 < float(y) < field.length:
        raise FieldDirectionError("connection undefined in a zero-field region")
    dth = float(field.theta_deriv(y))
    return np.array([[0.0, 0.5 * dth], [-0.5 * dth, 0.0]], dtype=complex)


def berry_operator_planar(field: PlanarField, y1: float, y2: float) -> np.ndarray:
    """Transport operator from y1 to y2 for a planar field (closed form)."""
    if not (field.y_left <= y1 <= y2 <= field.y_right):
        raise ValueError("need y_left <= y1 <= y2 <= y_right")
    if field.zero_field_interior:
        # the zero-field interior carries no geometry; the full rotation lives
        # on the interval only when it spans both interfaces
        th1 = field.theta_left if y1 < field.length else field.theta_right
        th2 = field.theta_left if y2 <= 0.0 else field.theta_right
        return planar_rotation(th2 - th1)
    return planar_rotation(float(field.theta(y2)) - float(field.theta(y1)))


def spin_eigenvectors(direction) -> tuple[np.ndarray, np.ndarray]:
    """(lower, upper) Zeeman eigenspinors for a unit 3-vector (n1, n2, n3).

    Standard spin-coherent gauge: polar angle from n3, azimuth from n1 toward
    n2, phases fixed so the north-pole spinors are real non-negative.
    """
    n = np.asarray(direction, dtype=float)
    if n.shape != (3,) or abs(np.linalg.norm(n) - 1.0) > 1e-6:
        raise ValueError("direction must be a unit 3-vector")
    n = n / np.linalg.norm(n)
    polar = np.arccos(np.clip(n[2], -1.0, 1.0))
    azimuth = np.arctan2(n[1], n[0]) if np.hypot(n[0], n[1]) > 1e-300 else 0.0
    c, s = np.cos(polar / 2.0), np.sin(polar / 2.0)
    phase = np.exp(1j * azimuth)
    upper = np.array([c, s * phase], dtype=complex)
    lower = np.array([-s / phase, c], dtype=complex)
    return lower, upper


def _overlap(n_from, n_to) -> np.ndarray:
    lo_f, up_f = spin_eigenvectors(n_from)
    lo_t, up_t = spin_eigenvectors(n_to)
    u = np.empty((2, 2), dtype=complex)
    u[0, 0] = np.vdot(lo_t, lo_f)
    u[0, 1] = np.vdot(lo_t, up_f)
    u[1, 0] = np.vdot(up_t, lo_f)
    u[1, 1] = np.vdot(up_t, up_f)
    return u


def berry_operator_overlap(n_left, n_right) -> np.ndarray:
    """Boundary-only transport operator [U]_{l'l} = <phi_l'(nR) | phi_l(nL)>.

    Exact for quenches between non-antipodal directions; equals the planar
    closed form up to the double-cover sign.
    """
    n_left = np.asarray(n_left, dtype=float)
    n_right = np.asarray(n_right, dtype=float)
    if float(np.dot(n_left, n_right)) < -1.0 + _ANTIPODAL_TOL:
        raise ValueError(
            "antipodal boundary directions leave the overlap gauge undefined; "
            "use the planar closed form with an explicit winding"
        )
    return _overlap(n_left, n_right)


def berry_operator_segmented(directions) -> np.ndarray:
    """Ordered product of step overlaps along a sampled direction path.

    Later steps multiply on the left.  Consecutive antipodal samples are
    rejected; refine the path instead.
    """
    dirs = [np.asarray(d, dtype=float) for d in directions]
    if len(dirs) < 2:
        raise ValueError("need at least two directions")
    u = np.eye(2, dtype=complex)
    for n_from, n_to in zip(dirs[:-1], dirs[1:]):
        if float(np.dot(n_from, n_to)) < -1.0 + _ANTIPODAL_TOL:
            raise ValueError("consecutive antipodal directions in segmented path")
        u = _overlap(n_from, n_to) @ u
    return u


def planar_direction(theta: float) -> np.ndarray:
    """Unit 3-vector (n1, n2, n3 components) at in-plane angle theta."""
    return np.array([np.sin(theta), 0.0, np.cos(theta)], dtype=float)


def field_directions(field: PlanarField, n_points: int) -> np.ndarray:
    """Direction samples at n_points + 1 equally spaced stations on [0, L]."""
    ys = np.linspace(0.0, field.length, n_points + 1)
    thetas = np.asarray(field.theta(ys), dtype=float)
    return np.stack([np.sin(thetas), np.zeros_like(thetas), np.cos(thetas)], axis=1)


def align_sign(u: np.ndarray, reference: np.ndarray) -> np.ndarray:
    """Flip the global sign of u to best match the reference matrix."""
    overlap = np.real(np.sum(np.conj(reference) * u))
    return -u if overlap < 0.0 else u
