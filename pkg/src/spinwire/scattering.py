"""Boundary matching: turn transfer matrices into t_E, r_E and observables.

Conventions: the left interface sits at y = 0 (so the left phase matrix is the
identity), amplitudes carry the sqrt(k_out/k_in) flux normalization, and in
the single-channel regime only the (0,0) entries of t and r are physical; the
other entries describe evanescent admixtures and are masked in probability
tables.  Only moduli of amplitudes are convention-free.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field as dataclass_field

import numpy as np

from .core import (
    ChannelData,
    GridCoarseWarning,
    Regime,
    RegimeError,
    SingularSystemError,
    ThresholdError,
    hs_norm,
    wave_vectors,
)
from .fields import PlanarField
from .transfer import SegmentPlan, flow_defect, gamma_piecewise_batch

_THRESHOLD_K = 1e-9  # |k| below this counts as sitting on a band edge

DEFAULT_SEGMENTS = 4096


@dataclass(frozen=True)
class BoundaryMatrices:
    """Diagonal lead matrices entering the matching equations."""

    w: np.ndarray  # diag(1, sqrt(k1/k0)) flux normalization
    v: np.ndarray  # diag(k0, k1)
    f_left: np.ndarray  # identity with the y_left = 0 convention
    f_right: np.ndarray  # diag(exp(i k l L))


def boundary_matrices(channel: ChannelData, length: float) -> BoundaryMatrices:
    if channel.regime is Regime.CLOSED:
        raise RegimeError(f"no open channel at E={channel.energy}")
    k0, k1 = channel.k0, channel.k1
    w = np.diag([1.0, np.sqrt(k1 / k0)]).astype(complex)
    v = np.diag([k0, k1]).astype(complex)
    f_left = np.eye(2, dtype=complex)
    f_right = np.diag([np.exp(1j * k0 * length), np.exp(1j * k1 * length)]).astype(complex)
    return BoundaryMatrices(w=w, v=v, f_left=f_left, f_right=f_right)


@dataclass(frozen=True)
class ScatterResult:
    """Scattering matrices at one energy plus derived observables."""

    t: np.ndarray
    r: np.ndarray
    channel: ChannelData
    probabilities: np.ndarray  # |t[l, l']|^2
    unitarity_defect: float
    conductance: float
    n_segments: int
    flow_defect: float = dataclass_field(default=float("nan"))


def unitarity_defect(t: np.ndarray, r: np.ndarray, regime: Regime) -> float:
    """Residual of the flux-conservation identity for the given regime."""
    if regime is Regime.TWO_CHANNEL:
        return hs_norm(r.conj().T @ r + t.conj().T @ t - np.eye(2))
    return abs(abs(r[0, 0]) ** 2 + abs(t[0, 0]) ** 2 - 1.0)


def build_result(
    t: np.ndarray,
    r: np.ndarray,
    channel: ChannelData,
    n_segments: int = 0,
    flow: float = float("nan"),
) -> ScatterResult:
    """Assemble a ScatterResult from amplitude matrices."""
    probs = np.abs(t) ** 2
    if channel.regime is Regime.TWO_CHANNEL:
        cond = float(np.sum(probs))
    else:
        cond = float(probs[0, 0])
    return ScatterResult(
        t=t,
        r=r,
        channel=channel,
        probabilities=probs,
        unitarity_defect=unitarity_defect(t, r, channel.regime),
        conductance=cond,
        n_segments=int(n_segments),
        flow_defect=float(flow),
    )


def _check_solvable(channel: ChannelData) -> None:
    if channel.regime is Regime.CLOSED:
        raise RegimeError(f"E={channel.energy} is below both bands; nothing scatters")
    if abs(channel.k0) < _THRESHOLD_K or abs(channel.k1) < _THRESHOLD_K:
        raise ThresholdError(
            f"E={channel.energy} sits on a band edge; nudge the energy off the threshold"
        )


def _ldiag(d, m):
    # diag(d) @ m for batched 2x2
    return d[:, :, None] * m


def _rdiag(m, d):
    # m @ diag(d)
    return m * d[:, None, :]


def _inv2(m):
    det = m[:, 0, 0] * m[:, 1, 1] - m[:, 0, 1] * m[:, 1, 0]
    bad = np.abs(det) < 1e-300
    if np.any(bad):
        raise SingularSystemError("boundary-matching system is numerically singular")
    out = np.empty_like(m)
    out[:, 0, 0] = m[:, 1, 1]
    out[:, 1, 1] = m[:, 0, 0]
    out[:, 0, 1] = -m[:, 0, 1]
    out[:, 1, 0] = -m[:, 1, 0]
    return out / det[:, None, None]


def solve_scattering_batch(
    field: PlanarField,
    energies,
    n_segments: int = DEFAULT_SEGMENTS,
    plan: SegmentPlan | None = None,
    wall_jump_side: str = "right",
) -> list[ScatterResult]:
    """Scattering matrices of the field for a batch of energies.

    All energies must be strictly above the lower band edge and away from the
    exact thresholds; the sweep layer is responsible for nudging its grids.
    """
    energies = np.atleast_1d(np.asarray(energies, dtype=float))
    channels = [wave_vectors(e) for e in energies]
    for ch in channels:
        _check_solvable(ch)

    gamma, gamma_tilde, berry = gamma_piecewise_batch(
        field, energies, n_segments, plan=plan, wall_jump_side=wall_jump_side
    )
    x00 = gamma_tilde[:, :2, :2]
    x01 = gamma_tilde[:, :2, 2:]
    x10 = gamma_tilde[:, 2:, :2]
    x11 = gamma_tilde[:, 2:, 2:]

    k = np.array([[ch.k0, ch.k1] for ch in channels], dtype=complex)
    w = np.stack([np.ones_like(k[:, 0]), np.sqrt(k[:, 1] / k[:, 0])], axis=-1)
    winv = 1.0 / w
    fr_dag = np.exp(-1j * k * field.length)

    u = berry[None, :, :]
    plus = x00 + 1j * _rdiag(x01, k)  # X00 + i X01 V
    minus = x00 - 1j * _rdiag(x01, k)  # X00 - i X01 V
    a_mat = u @ (_rdiag(x11, k) + 1j * x10) + _ldiag(k, u @ minus)
    b_mat = u @ (_rdiag(x11, k) - 1j * x10) - _ldiag(k, u @ plus)
    r_w = _inv2(a_mat) @ b_mat
    r = _ldiag(w, _rdiag(r_w, winv))
    t = _ldiag(w * fr_dag, _rdiag(u @ (plus + minus @ r_w), winv))

    results = []
    for i, ch in enumerate(channels):
        results.append(
            build_result(
                t[i],
                r[i],
                ch,
                n_segments=n_segments,
                flow=flow_defect(gamma_tilde[i]),
            )
        )
    return results


def solve_scattering(
    field: PlanarField,
    energy: float,
    n_segments: int = DEFAULT_SEGMENTS,
    wall_jump_side: str = "right",
) -> ScatterResult:
    """Scattering matrices of the field at one energy."""
    return solve_scattering_batch(
        field, [float(energy)], n_segments, wall_jump_side=wall_jump_side
    )[0]


def transmission_probabilities(result: ScatterResult) -> dict[str, float]:
    """Labeled probability table keyed by matrix indices.

    P{l}{l'} is the probability to go from incoming channel l' to outgoing
    channel l; R00sq is the lower-channel reflection probability.  For
    antiparallel leads P00 is the spin-flip transmission; for orthogonal leads
    it feeds the balanced-mixing channel.  Single-channel energies mask every
    entry except the lower-to-lower ones, which carry all the current.
    """
    p = result.probabilities
    masked = result.channel.regime is not Regime.TWO_CHANNEL
    table = {
        "P00": float(p[0, 0]),
        "P01": 0.0 if masked else float(p[0, 1]),
        "P10": 0.0 if masked else float(p[1, 0]),
        "P11": 0.0 if masked else float(p[1, 1]),
        "R00sq": float(abs(result.r[0, 0]) ** 2),
    }
    return table


def conductance(result: ScatterResult) -> float:
    """Dimensionless conductance: Tr[t^dag t], or |t00|^2 below the upper band."""
    return result.conductance


def fermi_occupation(energy, mu: float, temperature: float):
    energy = np.asarray(energy, dtype=float)
    if temperature < 0.0:
        raise ValueError("temperature must be non-negative")
    if temperature == 0.0:
        return (energy < mu).astype(float)
    x = np.clip((energy - mu) / temperature, -700.0, 700.0)
    return 1.0 / (1.0 + np.exp(x))


def landauer_current(
    field: PlanarField,
    mu_left: float,
    mu_right: float,
    temperature: float,
    energies,
    n_segments: int = DEFAULT_SEGMENTS,
) -> float:
    """Two-terminal current I = (1/2 pi) int G_E (f_L - f_R) dE, trapezoidal.

    The grid must cover the window where the occupations differ; a warning is
    emitted when the conductance jumps by more than 10% between neighbours.
    """
    energies = np.sort(np.atleast_1d(np.asarray(energies, dtype=float)))
    if mu_left == mu_right:
        return 0.0
    g = np.array([res.conductance for res in solve_scattering_batch(field, energies, n_segments)])
    steps = np.abs(np.diff(g))
    scale = np.maximum(np.maximum(np.abs(g[:-1]), np.abs(g[1:])), 1e-12)
    if np.any(steps > 0.1 * scale):
        warnings.warn(
            "conductance varies by more than 10% between grid neighbours; "
            "refine the energy grid",
            GridCoarseWarning,
            stacklevel=2,
        )
    occ = fermi_occupation(energies, mu_left, temperature) - fermi_occupation(
        energies, mu_right, temperature
    )
    return float(np.trapezoid(g * occ, energies) / (2.0 * np.pi))


@dataclass(frozen=True)
class ReciprocityReport:
    """Deviations from transmission reciprocity between the two channels."""

    amplitude_gap: float  # |t01 - t10|
    probability_gap: float  # ||t01|^2 - |t10|^2|


def reciprocity_check(
    field: PlanarField, energy: float, n_segments: int = DEFAULT_SEGMENTS
) -> ReciprocityReport:
    """Measure how symmetric the off-diagonal transmissions are.

    Amplitude equality holds for profiles whose eigenvalues and transport
    angle are both midpoint-symmetric (the orthogonal-leads profiles);
    antiparallel-leads profiles only reach equality of the probabilities.
    """
    res = solve_scattering(field, energy, n_segments)
    if res.channel.regime is not Regime.TWO_CHANNEL:
        raise RegimeError("reciprocity check needs two open channels")
    t01, t10 = res.t[0, 1], res.t[1, 0]
    return ReciprocityReport(
        amplitude_gap=float(abs(t01 - t10)),
        probability_gap=float(abs(abs(t01) ** 2 - abs(t10) ** 2)),
    )
