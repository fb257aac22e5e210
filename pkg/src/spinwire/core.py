"""Numerical substrate shared by every solver: units, wave vectors, channels.

Everything is nondimensionalized.  Energies are measured in units of the
Zeeman half-gap of the leads, lengths in units of the magnetic length
``sqrt(hbar^2 / (2 m E_Z))``.  In these units ``hbar^2 / 2m = 1`` and the two
spin-split band bottoms in the leads sit at -1 (lower channel, index 0) and
+1 (upper channel, index 1).  Channel index 0 always refers to the locally
lower Zeeman eigenstate.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

E_LOWER = -1.0  # band bottom of the lower spin channel in the leads
E_UPPER = +1.0  # band bottom of the upper spin channel

ID2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)

# Symplectic form preserved by the dynamical part of the transfer matrix;
# its conservation is what guarantees flux unitarity of the scattering matrix.
J4 = np.block([[np.zeros((2, 2)), np.eye(2)], [-np.eye(2), np.zeros((2, 2))]]).astype(complex)


class RegimeError(ValueError):
    """The requested operation is not defined in this channel regime."""


class ThresholdError(RegimeError):
    """Energy sits exactly on a band edge where a wave vector vanishes."""


class FieldDirectionError(ValueError):
    """The field magnitude vanishes where a direction is required."""


class SingularSystemError(ArithmeticError):
    """A boundary-matching linear system is numerically singular."""


class EvanescentOverflowError(ArithmeticError):
    """Evanescent growth across the region exceeds the double-precision guard."""


class ChannelMismatchError(ValueError):
    """Lattice and continuum channel regimes disagree (spacing too coarse)."""


class GridCoarseWarning(UserWarning):
    """An energy grid is too coarse to resolve the integrand."""


class Regime(enum.Enum):
    TWO_CHANNEL = "two_channel"
    SINGLE_CHANNEL = "single_channel"
    CLOSED = "closed"


@dataclass(frozen=True)
class ChannelData:
    """Wave vectors and channel regime at one injection energy."""

    energy: float
    k0: complex
    k1: complex
    regime: Regime


def wavenumber(x):
    """sqrt with the branch Im >= 0, so evanescent waves decay to the right."""
    x = np.asarray(x, dtype=float)
    pos = np.sqrt(np.clip(x, 0.0, None)).astype(complex)
    neg = 1j * np.sqrt(np.clip(-x, 0.0, None))
    return pos + neg


def wave_vectors(energy: float) -> ChannelData:
    """Classify the energy and return the lead wave vectors of both channels.

    ``k_l = sqrt(E - E_l)`` with the decaying branch (Im k >= 0).  Band-edge
    ties belong to the lower regime, so E = +1 is single-channel (k1 = 0) and
    E = -1 is closed.
    """
    energy = float(energy)
    if not np.isfinite(energy):
        raise ValueError("energy must be finite")
    k0 = complex(wavenumber(energy - E_LOWER))
    k1 = complex(wavenumber(energy - E_UPPER))
    if energy > E_UPPER:
        regime = Regime.TWO_CHANNEL
    elif energy > E_LOWER:
        regime = Regime.SINGLE_CHANNEL
    else:
        regime = Regime.CLOSED
    return ChannelData(energy=energy, k0=k0, k1=k1, regime=regime)


def momentum_transfer(energy: float) -> float:
    """Momentum change k1 - k0 of a channel-converting transmission (negative).

    Only defined in the two-channel regime.  For large energies it approaches
    -1/sqrt(E) in code units.
    """
    ch = wave_vectors(energy)
    if ch.regime is not Regime.TWO_CHANNEL:
        raise RegimeError(f"momentum transfer needs two open channels, E={energy}")
    return float(ch.k1.real - ch.k0.real)


def hs_norm(a: np.ndarray) -> float:
    """Hilbert-Schmidt (Frobenius) norm sqrt(Tr[A A^dag])."""
    return float(np.sqrt(np.sum(np.abs(a) ** 2)))


def hs_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Hilbert-Schmidt distance sqrt(Tr[(A-B)(A-B)^dag])."""
    return hs_norm(np.asarray(a) - np.asarray(b))


def planar_spinors(theta: float) -> tuple[np.ndarray, np.ndarray]:
    """Zeeman eigenspinors of a field at polar angle theta in the n1-n3 plane.

    Components are given in the fixed (up, down) basis along n3.  The returned
    pair is (lower-energy, higher-energy); the lower state is anti-aligned with
    the field.  The angle is the *unwrapped* one, so theta and theta + 2*pi
    give opposite spinor signs (double cover).
    """
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    phi0 = np.array([-s, c], dtype=complex)
    phi1 = np.array([c, s], dtype=complex)
    return phi0, phi1


def zeeman_matrix(b1: float, b3: float) -> np.ndarray:
    """Zeeman term b1*sigma_x + b3*sigma_z in the fixed (up, down) basis."""
    return np.array([[b3, b1], [b1, -b3]], dtype=complex)


def eigh2(q: np.ndarray) -> tuple[float, float, np.ndarray, np.ndarray]:
    """Closed-form spectral decomposition of a Hermitian 2x2 matrix.

    Returns (w0, w1, P0, P1) with w0 <= w1 and orthogonal projectors such that
    q = w0*P0 + w1*P1.  Degenerate matrices get the trivial split.
    """
    q = np.asarray(q, dtype=complex)
    a = q[0, 0].real
    d = q[1, 1].real
    b = q[0, 1]
    mean = 0.5 * (a + d)
    radius = np.hypot(0.5 * (a - d), abs(b))
    if radius < 1e-15 * max(1.0, abs(mean)):
        return mean, mean, np.diag([1.0, 0.0]).astype(complex), np.diag([0.0, 1.0]).astype(complex)
    w0 = mean - radius
    w1 = mean + radius
    p1 = (q - w0 * ID2) / (w1 - w0)
    p0 = ID2 - p1
    return float(w0), float(w1), p0, p1
